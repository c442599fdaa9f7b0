//! Front end for the coevent toolkit: JSON documents in, deterministic
//! reports out.
//!
//! A document fixes a quantum measure in one of three modes (`system`,
//! `amplitudes`, `measure_table`); [`run`] evaluates one [`Command`] on it.

pub mod document;
pub mod error;
pub mod report;
pub mod run;

pub use document::{parse_document, parse_predictions, Mode, Model, PredictionFile, SystemDocument, Tolerances};
pub use error::{CliError, CliResult};
pub use report::{render, Format};
pub use run::{execute, load_document, run, Command, Results, RunOptions, RunReport};
