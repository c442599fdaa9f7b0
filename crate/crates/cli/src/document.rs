//! The JSON input document and its translation into a decoherence matrix.

use std::collections::BTreeMap;

use coevent_core::{
    decoherence_matrix, from_amplitudes, from_singletons_and_pairs, reconstruct_measure, validate_system,
    AmplitudeTable, CMatrix, CVector, DecoherenceMatrix, Event, HistoriesSystem, InitialState, Outcome, SampleSpace,
    TimeStep, ValidationReport, C64, DEFAULT_COURNOT_EPSILON, DEFAULT_PRECLUSION_EPSILON,
    DEFAULT_VALIDATION_TOLERANCE,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// `[re, im]`
pub type Complex = [f64; 2];
/// Rows of complex entries.
pub type MatrixSpec = Vec<Vec<Complex>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    System,
    Amplitudes,
    MeasureTable,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::System => "system",
            Mode::Amplitudes => "amplitudes",
            Mode::MeasureTable => "measure_table",
        }
    }
}

/// A state vector or a density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Vector(Vec<Complex>),
    Matrix(MatrixSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorSpec {
    pub label: String,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub unitary: MatrixSpec,
    pub projectors: Vec<ProjectorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub history_label: String,
    pub amplitude: Complex,
    /// Histories with different final classes never interfere; absent means
    /// one shared class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureEntry {
    pub event: Vec<String>,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub validation: f64,
    pub preclusion: f64,
    pub cournot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validation: DEFAULT_VALIDATION_TOLERANCE,
            preclusion: DEFAULT_PRECLUSION_EPSILON,
            cournot: DEFAULT_COURNOT_EPSILON,
        }
    }
}

/// One of three ways of fixing the quantum measure: Hilbert-space data,
/// per-history amplitudes, or the measures of all singletons and pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeEntry>>,
    /// History labels, in order; measure_table mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histories: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_table: Option<Vec<MeasureEntry>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Parses JSON text into `T`, separating syntax errors from shape errors and
/// reporting the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(text: &str, source_name: &str) -> CliResult<T> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Malformed {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Schema {
            source_name: source_name.to_string(),
            path: if path == "." { "(document)".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })
}

/// Reads and checks a document: shape, payload selection and tolerances.
/// Label resolution and numerical checks happen in [`SystemDocument::load`].
pub fn parse_document(text: &str, source_name: &str) -> CliResult<SystemDocument> {
    let doc: SystemDocument = parse_json(text, source_name)?;
    doc.check_payload(source_name)?;
    Ok(doc)
}

/// The evaluated document.
#[derive(Debug, Clone)]
pub struct Model {
    pub mode: Mode,
    pub space: SampleSpace,
    pub system: Option<HistoriesSystem>,
    /// Violations of the system's invariants; empty outside system mode.
    pub validation: ValidationReport,
    /// Absent when the system fails validation.
    pub matrix: Option<DecoherenceMatrix>,
    pub tolerances: Tolerances,
}

impl Model {
    /// The decoherence matrix, or a domain error naming the first violation.
    pub fn matrix(&self) -> CliResult<&DecoherenceMatrix> {
        self.matrix.as_ref().ok_or_else(|| {
            let v = &self.validation.violations[0];
            CliError::Core(coevent_core::Error::Invariant(format!(
                "system fails validation ({} violation(s); first: {:?} at {}, deviation {:e}); run `validate`",
                self.validation.violations.len(),
                v.kind,
                v.location,
                v.deviation
            )))
        })
    }

    /// Resolves labels against the history space.
    pub fn event<S: AsRef<str>>(&self, labels: &[S]) -> CliResult<Event> {
        self.space.event(labels).map_err(|e| CliError::Argument(e.to_string()))
    }
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn schema(&self, path: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Schema {
            source_name: self.source.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }

    fn invalid(&self, path: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Invariant {
            source_name: self.source.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }

    fn matrix(&self, spec: &MatrixSpec, d: usize, path: &str) -> CliResult<CMatrix> {
        if spec.len() != d || spec.iter().any(|row| row.len() != d) {
            return Err(self.invalid(path, format!("expected a {d}×{d} matrix")));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| c64(spec[i][j])))
    }
}

fn c64(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn finite(z: &[f64]) -> bool {
    z.iter().all(|x| x.is_finite())
}

impl SystemDocument {
    fn present(&self) -> [(&'static str, bool); 6] {
        [
            ("dimension", self.dimension.is_some()),
            ("initial_state", self.initial_state.is_some()),
            ("steps", self.steps.is_some()),
            ("amplitudes", self.amplitudes.is_some()),
            ("histories", self.histories.is_some()),
            ("measure_table", self.measure_table.is_some()),
        ]
    }

    fn check_payload(&self, source: &str) -> CliResult<()> {
        let ctx = Ctx { source };
        let allowed: &[&str] = match self.mode {
            Mode::System => &["dimension", "initial_state", "steps"],
            Mode::Amplitudes => &["amplitudes"],
            Mode::MeasureTable => &["histories", "measure_table"],
        };
        for (field, there) in self.present() {
            let wanted = allowed.contains(&field);
            if there && !wanted {
                return Err(ctx.schema(
                    field,
                    format!("not allowed in {} mode; exactly one payload may be present", self.mode.as_str()),
                ));
            }
            if !there && wanted {
                return Err(ctx.schema(field, format!("required in {} mode", self.mode.as_str())));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [("validation", t.validation), ("preclusion", t.preclusion), ("cournot", t.cournot)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ctx.invalid(format!("tolerances.{name}"), "must be positive"));
            }
        }
        if !(t.cournot < 1.0) {
            return Err(ctx.invalid("tolerances.cournot", "must be below 1"));
        }
        Ok(())
    }

    /// Pretty JSON; parsing it back yields an equal document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Builds the history space and decoherence matrix.
    pub fn load(&self, source: &str) -> CliResult<Model> {
        self.check_payload(source)?;
        let ctx = Ctx { source };
        match self.mode {
            Mode::System => self.load_system(&ctx),
            Mode::Amplitudes => self.load_amplitudes(&ctx),
            Mode::MeasureTable => self.load_table(&ctx),
        }
    }

    fn load_system(&self, ctx: &Ctx) -> CliResult<Model> {
        let d = self.dimension.expect("checked");
        if d < 2 {
            return Err(ctx.invalid("dimension", "must be at least 2"));
        }
        let initial = match self.initial_state.as_ref().expect("checked") {
            StateSpec::Vector(v) => {
                if v.len() != d {
                    return Err(ctx.invalid("initial_state", format!("expected {d} components")));
                }
                if !v.iter().all(|z| finite(z)) {
                    return Err(ctx.invalid("initial_state", "non-finite component"));
                }
                InitialState::pure(CVector::from_iterator(d, v.iter().map(|&z| c64(z))))
                    .map_err(|e| ctx.invalid("initial_state", e.to_string()))?
            }
            StateSpec::Matrix(m) => InitialState::mixed(ctx.matrix(m, d, "initial_state")?)
                .map_err(|e| ctx.invalid("initial_state", e.to_string()))?,
        };
        let specs = self.steps.as_ref().expect("checked");
        if specs.is_empty() {
            return Err(ctx.invalid("steps", "at least one step required"));
        }
        let mut steps = Vec::with_capacity(specs.len());
        for (k, s) in specs.iter().enumerate() {
            let unitary = ctx.matrix(&s.unitary, d, &format!("steps[{k}].unitary"))?;
            if s.projectors.is_empty() {
                return Err(ctx.invalid(format!("steps[{k}].projectors"), "empty projector family"));
            }
            let mut outcomes = Vec::with_capacity(s.projectors.len());
            for (j, p) in s.projectors.iter().enumerate() {
                let path = format!("steps[{k}].projectors[{j}]");
                if p.label.is_empty() {
                    return Err(ctx.invalid(format!("{path}.label"), "empty label"));
                }
                if s.projectors[..j].iter().any(|q| q.label == p.label) {
                    return Err(ctx.invalid(format!("{path}.label"), format!("duplicate label {:?}", p.label)));
                }
                outcomes.push(Outcome {
                    label: p.label.clone(),
                    projector: ctx.matrix(&p.matrix, d, &format!("{path}.matrix"))?,
                });
            }
            steps.push(TimeStep { unitary, outcomes });
        }
        let system = HistoriesSystem::new(initial, steps)?;
        let space = coevent_core::induced_sample_space(&system)?;
        let validation = validate_system(&system, self.tolerances.validation);
        let matrix = if validation.is_valid() {
            Some(decoherence_matrix(&system)?)
        } else {
            None
        };
        Ok(Model {
            mode: Mode::System,
            space,
            system: Some(system),
            validation,
            matrix,
            tolerances: self.tolerances,
        })
    }

    fn load_amplitudes(&self, ctx: &Ctx) -> CliResult<Model> {
        let entries = self.amplitudes.as_ref().expect("checked");
        if entries.is_empty() {
            return Err(ctx.invalid("amplitudes", "at least one history required"));
        }
        for (i, e) in entries.iter().enumerate() {
            if !finite(&e.amplitude) {
                return Err(ctx.invalid(format!("amplitudes[{i}].amplitude"), "non-finite value"));
            }
            if entries[..i].iter().any(|f| f.history_label == e.history_label) {
                return Err(ctx.invalid(
                    format!("amplitudes[{i}].history_label"),
                    format!("duplicate label {:?}", e.history_label),
                ));
            }
        }
        let space = SampleSpace::new(entries.iter().map(|e| e.history_label.clone()))
            .map_err(|e| ctx.invalid("amplitudes", e.to_string()))?;
        let table = AmplitudeTable {
            space: space.clone(),
            amplitudes: entries.iter().map(|e| c64(e.amplitude)).collect(),
            final_class: entries.iter().map(|e| e.final_class.clone().unwrap_or_default()).collect(),
        };
        let matrix = from_amplitudes(&table)?;
        Ok(Model {
            mode: Mode::Amplitudes,
            space,
            system: None,
            validation: ValidationReport::default(),
            matrix: Some(matrix),
            tolerances: self.tolerances,
        })
    }

    fn load_table(&self, ctx: &Ctx) -> CliResult<Model> {
        let labels = self.histories.as_ref().expect("checked");
        let space = SampleSpace::new(labels.iter().cloned()).map_err(|e| ctx.invalid("histories", e.to_string()))?;
        let n = space.size();
        let entries = self.measure_table.as_ref().expect("checked");
        let mut given: BTreeMap<Event, (usize, f64)> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            let path = format!("measure_table[{i}]");
            let mut ev = Event::empty(n);
            for (j, l) in e.event.iter().enumerate() {
                let h = space
                    .index_of(l)
                    .ok_or_else(|| ctx.invalid(format!("{path}.event[{j}]"), format!("unknown history {l:?}")))?;
                if ev.contains(h) {
                    return Err(ctx.invalid(format!("{path}.event[{j}]"), format!("history {l:?} repeated")));
                }
                ev.insert(h);
            }
            if ev.is_empty() {
                return Err(ctx.invalid(format!("{path}.event"), "empty event"));
            }
            if !e.mu.is_finite() {
                return Err(ctx.invalid(format!("{path}.mu"), "non-finite value"));
            }
            if let Some((k, _)) = given.insert(ev, (i, e.mu)) {
                return Err(ctx.invalid(format!("{path}.event"), format!("same event as measure_table[{k}]")));
            }
        }
        let lookup = |ev: &Event| given.get(ev).map(|&(_, mu)| mu);
        let missing = |ev: &Event| {
            ctx.schema(
                "measure_table",
                format!("missing entry for {:?}; singletons, pairs and the full space are required", space.labels_of(ev)),
            )
        };
        let mut singles = BTreeMap::new();
        let mut pairs = BTreeMap::new();
        for i in 0..n {
            let ev = Event::singleton(n, i);
            singles.insert(i, lookup(&ev).ok_or_else(|| missing(&ev))?);
        }
        for i in 0..n {
            for j in i + 1..n {
                let ev = Event::from_indices(n, [i, j]).expect("in range");
                pairs.insert((i, j), lookup(&ev).ok_or_else(|| missing(&ev))?);
            }
        }
        let full = Event::full(n);
        let total = lookup(&full).ok_or_else(|| missing(&full))?;
        let tol = self.tolerances.validation;
        if (total - 1.0).abs() > tol {
            let (k, _) = given[&full];
            return Err(ctx.invalid(format!("measure_table[{k}].mu"), format!("μ(Ω) = {total}, expected 1")));
        }
        // larger events are implied by the singletons and pairs; check them
        for (ev, &(k, mu)) in &given {
            if ev.count() <= 2 {
                continue;
            }
            let implied = reconstruct_measure(&singles, &pairs, ev)?;
            let slack = tol * (ev.count() * ev.count()) as f64;
            if (implied - mu).abs() > slack {
                return Err(ctx.invalid(
                    format!("measure_table[{k}].mu"),
                    format!("{mu} differs from {implied} implied by the singleton and pair entries"),
                ));
            }
        }
        let matrix = from_singletons_and_pairs(space.clone(), &singles, &pairs, tol)?;
        Ok(Model {
            mode: Mode::MeasureTable,
            space,
            system: None,
            validation: ValidationReport::default(),
            matrix: Some(matrix),
            tolerances: self.tolerances,
        })
    }
}

/// Declared events for `predict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionFile {
    /// Independent copies of the system; 1 means the system itself.
    #[serde(default = "one")]
    pub copies: usize,
    pub events: Vec<DeclaredSpec>,
}

fn one() -> usize {
    1
}

/// An event given as labels (one copy) or label tuples (several copies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EventItem {
    Label(String),
    Tuple(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    /// Base-space event whose relative frequency is watched.
    pub event: Vec<String>,
    pub p: f64,
    pub delta: f64,
}

/// Exactly one of `event` and `frequency`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredSpec {
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<Vec<EventItem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<FrequencySpec>,
}

pub fn parse_predictions(text: &str, source_name: &str) -> CliResult<PredictionFile> {
    let file: PredictionFile = parse_json(text, source_name)?;
    let ctx = Ctx { source: source_name };
    if file.copies == 0 {
        return Err(ctx.invalid("copies", "must be at least 1"));
    }
    for (i, e) in file.events.iter().enumerate() {
        match (&e.event, &e.frequency) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(ctx.schema(format!("events[{i}]"), "exactly one of `event` and `frequency` is required"))
            }
        }
        if let Some(items) = &e.event {
            for (j, item) in items.iter().enumerate() {
                let ok = match item {
                    EventItem::Label(_) => file.copies == 1,
                    EventItem::Tuple(t) => file.copies > 1 && t.len() == file.copies,
                };
                if !ok {
                    return Err(ctx.invalid(
                        format!("events[{i}].event[{j}]"),
                        format!("expected {}", if file.copies == 1 { "a history label".to_string() } else { format!("a tuple of {} labels", file.copies) }),
                    ));
                }
            }
        }
    }
    Ok(file)
}
