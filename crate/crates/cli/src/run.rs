//! Command dispatch.

use std::path::{Path, PathBuf};
use std::time::Instant;

use coevent_core::{
    amplitude, approximately_precluded, coevent_sets_disjoint, enumerate_precluded,
    find_zero_cover, frequency_deviation_measure, is_classical_partition, is_consistent_partition_with,
    principle_classical_partition, product_system, singleton_covered, solve_coevents, verify_finest, Consistency,
    DeclaredEvent, Event, Partition, Placement, PredictionConfig, QuantumMeasure, SampleSpace, REPORT_NOTE,
};
use serde::Serialize;

use crate::document::{parse_document, parse_predictions, EventItem, FrequencySpec, Model, SystemDocument, Tolerances};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// Check the document; for systems, list every violated invariant.
    Validate,
    /// Quantum measure of one event (JSON label array or comma-separated labels).
    Measure { event: String },
    Preclude,
    Zerocover,
    Coevents,
    /// Principle classical partition.
    Partition,
    /// Consistency of a partition given as a JSON array of label arrays.
    Consistent { partition: String },
    /// Cournot report for the events declared in a file.
    Predict { file: PathBuf },
    /// Coevents of this and a second document, and whether they share any.
    Compare { other: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Measure { .. } => "measure",
            Command::Preclude => "preclude",
            Command::Zerocover => "zerocover",
            Command::Coevents => "coevents",
            Command::Partition => "partition",
            Command::Consistent { .. } => "consistent",
            Command::Predict { .. } => "predict",
            Command::Compare { .. } => "compare",
        }
    }

    fn argument(&self) -> Option<String> {
        match self {
            Command::Measure { event } => Some(event.clone()),
            Command::Consistent { partition } => Some(partition.clone()),
            Command::Predict { file } => Some(file.display().to_string()),
            Command::Compare { other } => Some(other.display().to_string()),
            _ => None,
        }
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Overrides the preclusion threshold, or the Cournot threshold for `predict`.
    pub epsilon: Option<f64>,
    /// Adds the wall time to the report, which then differs between runs.
    pub timing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub document: String,
    pub mode: &'static str,
    pub histories: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argument: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub inputs: Inputs,
    pub tolerances: Tolerances,
    pub results: Results,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Validate(ValidateResult),
    Measure(MeasureResult),
    Preclude(PrecludeResult),
    Zerocover(ZerocoverResult),
    Coevents(CoeventsResult),
    Partition(PartitionResult),
    Consistent(ConsistentResult),
    Predict(PredictResult),
    Compare(CompareResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationEntry {
    pub kind: String,
    pub location: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryEntry {
    pub history: String,
    /// Only for pure states measured with rank-one projectors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<[f64; 2]>,
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateResult {
    pub valid: bool,
    pub violations: Vec<ViolationEntry>,
    /// Empty when the system fails validation.
    pub histories: Vec<HistoryEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasuredEvent {
    pub event: Vec<String>,
    pub mu: f64,
}

pub type MeasureResult = MeasuredEvent;

#[derive(Debug, Clone, Serialize)]
pub struct PrecludeResult {
    pub epsilon: f64,
    pub count: usize,
    pub precluded: Vec<MeasuredEvent>,
    pub maximal: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZerocoverResult {
    pub epsilon: f64,
    pub found: bool,
    /// Every member re-measured at most `epsilon` and the union is everything.
    pub certified: bool,
    pub cover: Vec<MeasuredEvent>,
    /// Histories lying in no precluded event.
    pub uncovered: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeventsResult {
    pub epsilon: f64,
    pub count: usize,
    pub coevents: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlacementEntry {
    pub coevent: Vec<String>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionResult {
    pub epsilon: f64,
    pub cells: Vec<Vec<String>>,
    pub finest: bool,
    pub placements: Vec<PlacementEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistentResult {
    pub epsilon: f64,
    pub cells: Vec<Vec<String>>,
    /// Cell measures add up on every union of cells.
    pub consistent: bool,
    /// Complex off-diagonal block sums vanish as well.
    pub strictly_consistent: bool,
    /// Every coevent lies within one cell.
    pub classical: bool,
    pub cell_measures: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictEntry {
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event: Option<Vec<EventItem>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency: Option<FrequencySpec>,
    pub measure: f64,
    pub epsilon: f64,
    pub approximately_precluded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictResult {
    pub copies: usize,
    pub epsilon: f64,
    pub declared_count: usize,
    pub entries: Vec<PredictEntry>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeventSide {
    pub document: String,
    pub coevents: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareResult {
    pub epsilon: f64,
    pub first: CoeventSide,
    pub second: CoeventSide,
    pub shared: Vec<Vec<String>>,
    pub disjoint: bool,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads and parses a document file.
pub fn load_document(path: &Path) -> CliResult<SystemDocument> {
    parse_document(&read_file(path)?, &path.display().to_string())
}

/// Runs `command` on the document read from `input`.
pub fn execute(command: &Command, input: &Path, opts: &RunOptions) -> CliResult<RunReport> {
    let doc = load_document(input)?;
    run(command, &doc, &input.display().to_string(), opts)
}

fn check_epsilon(v: f64) -> CliResult<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(CliError::Argument(format!("--epsilon must lie in (0,1), got {v}")))
    }
}

/// Runs `command` on an already parsed document; `source` names it in the
/// report. The report is byte-for-byte reproducible unless `opts.timing`.
pub fn run(command: &Command, doc: &SystemDocument, source: &str, opts: &RunOptions) -> CliResult<RunReport> {
    let start = Instant::now();
    let model = doc.load(source)?;
    let mut tol = model.tolerances;
    if let Some(e) = opts.epsilon {
        let e = check_epsilon(e)?;
        match command {
            Command::Predict { .. } => tol.cournot = e,
            _ => tol.preclusion = e,
        }
    }
    let results = match command {
        Command::Validate => Results::Validate(validate(&model)?),
        Command::Measure { event } => Results::Measure(measure(&model, event)?),
        Command::Preclude => Results::Preclude(preclude(&model, tol.preclusion)?),
        Command::Zerocover => Results::Zerocover(zerocover(&model, tol.preclusion)?),
        Command::Coevents => Results::Coevents(coevents(&model, tol.preclusion)?),
        Command::Partition => Results::Partition(partition(&model, tol.preclusion)?),
        Command::Consistent { partition } => Results::Consistent(consistent(&model, partition, &tol)?),
        Command::Predict { file } => Results::Predict(predict(&model, file, tol.cournot)?),
        Command::Compare { other } => Results::Compare(compare(&model, source, other, tol.preclusion)?),
    };
    Ok(RunReport {
        command: command.name(),
        inputs: Inputs {
            document: source.to_string(),
            mode: model.mode.as_str(),
            histories: model.space.size(),
            argument: command.argument(),
        },
        tolerances: tol,
        results,
        wall_time_seconds: opts.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

fn labels(space: &SampleSpace, ev: &Event) -> Vec<String> {
    space.labels_of(ev)
}

fn validate(model: &Model) -> CliResult<ValidateResult> {
    let violations = model
        .validation
        .violations
        .iter()
        .map(|v| ViolationEntry {
            kind: format!("{:?}", v.kind),
            location: v.location.clone(),
            deviation: v.deviation,
        })
        .collect();
    let Some(d) = &model.matrix else {
        return Ok(ValidateResult {
            valid: false,
            violations,
            histories: vec![],
            total: None,
        });
    };
    let n = model.space.size();
    let mut histories = Vec::with_capacity(n);
    for i in 0..n {
        let amp = match &model.system {
            Some(sys) => amplitude(sys, &sys.history(i)).ok().map(|z| [z.re, z.im]),
            None => None,
        };
        histories.push(HistoryEntry {
            history: model.space.label(i).to_string(),
            amplitude: amp,
            mu: d.measure(&Event::singleton(n, i))?,
        });
    }
    Ok(ValidateResult {
        valid: true,
        violations,
        histories,
        total: Some(d.total()),
    })
}

fn parse_labels(text: &str) -> CliResult<Vec<String>> {
    let t = text.trim();
    if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| CliError::Argument(format!("event {text:?}: {e}")))
    } else if t.is_empty() {
        Ok(vec![])
    } else {
        Ok(t.split(',').map(|s| s.trim().to_string()).collect())
    }
}

fn measure(model: &Model, text: &str) -> CliResult<MeasureResult> {
    let d = model.matrix()?;
    let ev = model.event(&parse_labels(text)?)?;
    Ok(MeasuredEvent {
        event: labels(&model.space, &ev),
        mu: d.measure(&ev)?,
    })
}

fn preclude(model: &Model, eps: f64) -> CliResult<PrecludeResult> {
    let d = model.matrix()?;
    let fam = enumerate_precluded(d, eps)?;
    let precluded = fam
        .events()
        .iter()
        .map(|e| {
            Ok(MeasuredEvent {
                event: labels(&model.space, e),
                mu: d.measure(e)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(PrecludeResult {
        epsilon: eps,
        count: precluded.len(),
        precluded,
        maximal: fam.maximal().iter().map(|e| labels(&model.space, e)).collect(),
    })
}

fn zerocover(model: &Model, eps: f64) -> CliResult<ZerocoverResult> {
    let d = model.matrix()?;
    let fam = enumerate_precluded(d, eps)?;
    let covered = singleton_covered(&fam);
    let uncovered = (0..model.space.size())
        .filter(|i| !covered.contains(i))
        .map(|i| model.space.label(i).to_string())
        .collect();
    let (found, certified, cover) = match find_zero_cover(&fam) {
        Some(z) => {
            let certified = z.certify(d, eps)?;
            let cover = z
                .cover
                .iter()
                .map(|e| {
                    Ok(MeasuredEvent {
                        event: labels(&model.space, e),
                        mu: d.measure(e)?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            (true, certified, cover)
        }
        None => (false, false, vec![]),
    };
    Ok(ZerocoverResult {
        epsilon: eps,
        found,
        certified,
        cover,
        uncovered,
    })
}

fn coevents(model: &Model, eps: f64) -> CliResult<CoeventsResult> {
    let r = solve_coevents(model.matrix()?, eps)?;
    let coevents: Vec<Vec<String>> = r.supports().map(|s| labels(&model.space, s)).collect();
    Ok(CoeventsResult {
        epsilon: eps,
        count: coevents.len(),
        coevents,
    })
}

fn partition(model: &Model, eps: f64) -> CliResult<PartitionResult> {
    let r = solve_coevents(model.matrix()?, eps)?;
    let p = principle_classical_partition(&r);
    let finest = verify_finest(&p, &r)?;
    let report = is_classical_partition(&p, &r)?;
    Ok(PartitionResult {
        epsilon: eps,
        cells: p.cells().iter().map(|c| labels(&model.space, c)).collect(),
        finest,
        placements: report.placements.iter().map(|pl| placement(&model.space, pl)).collect(),
    })
}

fn placement(space: &SampleSpace, pl: &Placement) -> PlacementEntry {
    match pl {
        Placement::Inside { coevent, cell, .. } => PlacementEntry {
            coevent: labels(space, coevent),
            cells: vec![*cell],
        },
        Placement::Split { coevent, cells } => PlacementEntry {
            coevent: labels(space, coevent),
            cells: cells.clone(),
        },
    }
}

fn consistent(model: &Model, text: &str, tol: &Tolerances) -> CliResult<ConsistentResult> {
    let d = model.matrix()?;
    let cells: Vec<Vec<String>> =
        serde_json::from_str(text).map_err(|e| CliError::Argument(format!("partition {text:?}: {e}")))?;
    let events = cells.iter().map(|c| model.event(c)).collect::<CliResult<Vec<_>>>()?;
    let p = Partition::new(model.space.size(), events).map_err(|e| CliError::Argument(e.to_string()))?;
    let r = solve_coevents(d, tol.preclusion)?;
    Ok(ConsistentResult {
        epsilon: tol.preclusion,
        cells: p.cells().iter().map(|c| labels(&model.space, c)).collect(),
        consistent: is_consistent_partition_with(d, &p, tol.validation, Consistency::Additive)?,
        strictly_consistent: is_consistent_partition_with(d, &p, tol.validation, Consistency::Strict)?,
        classical: is_classical_partition(&p, &r)?.classical,
        cell_measures: p.cells().iter().map(|c| d.measure(c)).collect::<Result<_, _>>()?,
    })
}

fn predict(model: &Model, file: &Path, eps: f64) -> CliResult<PredictResult> {
    let d = model.matrix()?;
    let source = file.display().to_string();
    let spec = parse_predictions(&read_file(file)?, &source)?;
    let n = spec.copies;
    let bad = |i: usize, e: coevent_core::Error| CliError::Invariant {
        source_name: source.clone(),
        path: format!("events[{i}]"),
        message: e.to_string(),
    };

    // explicit events over the n-fold product; frequency events never need it
    let product = if spec.events.iter().any(|e| e.event.is_some()) {
        Some(product_system(d, n)?)
    } else {
        None
    };
    let mut declared = Vec::new();
    for (i, e) in spec.events.iter().enumerate() {
        let Some(items) = &e.event else { continue };
        let pm = product.as_ref().expect("built above");
        let mut ev = Event::empty(pm.space().size());
        for item in items {
            let idx = match item {
                EventItem::Label(l) => model.space.event(&[l]).map_err(|err| bad(i, err))?.first().expect("one"),
                EventItem::Tuple(t) => {
                    let tuple = t
                        .iter()
                        .map(|l| model.space.index_of(l).ok_or_else(|| bad(i, coevent_core::Error::Domain(format!("unknown history {l:?}")))))
                        .collect::<CliResult<Vec<_>>>()?;
                    pm.space().index(&tuple)?
                }
            };
            ev.insert(idx);
        }
        declared.push(DeclaredEvent {
            description: e.description.clone(),
            event: ev,
        });
    }
    let cfg = PredictionConfig::new(eps, declared)?;

    let mut entries = Vec::with_capacity(spec.events.len());
    let mut explicit = cfg.declared().iter();
    for (i, e) in spec.events.iter().enumerate() {
        if let Some(f) = &e.frequency {
            let a = model.space.event(&f.event).map_err(|err| bad(i, err))?;
            let mu = frequency_deviation_measure(d, &a, n, f.p, f.delta).map_err(|err| bad(i, err))?;
            entries.push(PredictEntry {
                description: e.description.clone(),
                event: None,
                frequency: Some(f.clone()),
                measure: mu,
                epsilon: eps,
                approximately_precluded: mu <= eps,
            });
            continue;
        }
        let decl = explicit.next().expect("one declared event per explicit entry");
        let pm = product.as_ref().expect("built above");
        let items = decl
            .event
            .indices()
            .map(|idx| {
                if n == 1 {
                    EventItem::Label(model.space.label(idx).to_string())
                } else {
                    EventItem::Tuple(pm.space().tuple(idx).iter().map(|&h| model.space.label(h).to_string()).collect())
                }
            })
            .collect();
        entries.push(PredictEntry {
            description: decl.description.clone(),
            event: Some(items),
            frequency: None,
            measure: pm.measure(&decl.event)?,
            epsilon: eps,
            approximately_precluded: approximately_precluded(pm, decl, &cfg)?,
        });
    }
    Ok(PredictResult {
        copies: n,
        epsilon: eps,
        declared_count: entries.len(),
        entries,
        note: REPORT_NOTE.to_string(),
    })
}

fn compare(model: &Model, source: &str, other: &Path, eps: f64) -> CliResult<CompareResult> {
    let second_doc = load_document(other)?;
    let second = second_doc.load(&other.display().to_string())?;
    if second.space.labels() != model.space.labels() {
        return Err(CliError::Argument(format!(
            "{} and {} have different history spaces",
            source,
            other.display()
        )));
    }
    let r1 = solve_coevents(model.matrix()?, eps)?;
    let r2 = solve_coevents(second.matrix()?, eps)?;
    let disjoint = coevent_sets_disjoint(&r1, &r2)?;
    let shared = r1
        .coevents()
        .iter()
        .filter(|c| r2.coevents().contains(c))
        .map(|c| labels(&model.space, c.support()))
        .collect();
    Ok(CompareResult {
        epsilon: eps,
        first: CoeventSide {
            document: source.to_string(),
            coevents: r1.supports().map(|s| labels(&model.space, s)).collect(),
        },
        second: CoeventSide {
            document: other.display().to_string(),
            coevents: r2.supports().map(|s| labels(&model.space, s)).collect(),
        },
        shared,
        disjoint,
    })
}
