use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coevent_cli::{execute, render, CliError, Command, Format, RunOptions};

#[derive(Parser)]
#[command(name = "coevent", version, about = "Quantum measures, precluded events and coevents of finite history spaces")]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Input document (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Preclusion threshold (Cournot threshold for `predict`); overrides the document.
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Include wall time in the report (makes output differ between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the document and list histories with their measures.
    Validate,
    /// Measure of one event: `h1,h2` or `["h1","h2"]`.
    Measure { event: String },
    /// All precluded events and the maximal ones.
    Preclude,
    /// A certified zero cover, if one exists.
    Zerocover,
    /// The coevents (minimal non-preclusive events).
    Coevents,
    /// The principle classical partition.
    Partition,
    /// Consistency of a partition: `[["h1","h2"],["h3"]]`.
    Consistent { partition: String },
    /// Cournot report for events declared in a file.
    Predict { declared: PathBuf },
    /// Coevents of two documents and whether they share any.
    Compare { other: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Validate => Command::Validate,
        Cmd::Measure { event } => Command::Measure { event },
        Cmd::Preclude => Command::Preclude,
        Cmd::Zerocover => Command::Zerocover,
        Cmd::Coevents => Command::Coevents,
        Cmd::Partition => Command::Partition,
        Cmd::Consistent { partition } => Command::Consistent { partition },
        Cmd::Predict { declared } => Command::Predict { file: declared },
        Cmd::Compare { other } => Command::Compare { other },
    };
    let Some(input) = args.input else {
        eprintln!("error[argument]: --input <file> is required");
        return ExitCode::from(2);
    };
    let opts = RunOptions {
        epsilon: args.epsilon,
        timing: args.timing,
    };
    let format = match args.format {
        OutFormat::Json => Format::Json,
        OutFormat::Text => Format::Text,
    };
    let result = execute(&command, &input, &opts).and_then(|report| {
        let text = render(&report, format);
        match &args.out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
