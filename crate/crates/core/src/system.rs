//! Finite-dimensional systems measured at a sequence of times.
//!
//! A history picks one projector from each step's family. Its class operator
//! is `P_n U_n ⋯ P_2 U_2 P_1 U_1`: every step evolves with its unitary and
//! then projects.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{check_cap, Error, Result};
use crate::event::{SampleSpace, DEFAULT_ENUMERATION_CAP};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default absolute, entrywise tolerance for validating user matrices.
pub const DEFAULT_VALIDATION_TOLERANCE: f64 = 1e-9;

/// Largest entrywise modulus of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Unit vector representing a rank-1 Hermitian matrix: the normalized column
/// with the largest diagonal entry, rotated so its first nonzero component is
/// real and positive.
pub fn representative_vector(rank_one: &CMatrix) -> CVector {
    let d = rank_one.nrows();
    let j = (0..d)
        .max_by(|&a, &b| {
            rank_one[(a, a)]
                .norm()
                .partial_cmp(&rank_one[(b, b)].norm())
                .unwrap()
        })
        .unwrap_or(0);
    let mut v: CVector = rank_one.column(j).into_owned();
    let n = v.norm();
    if n > 0.0 {
        v /= C64::new(n, 0.0);
    }
    fix_phase(v)
}

fn fix_phase(mut v: CVector) -> CVector {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12 * scale.max(1.0)).copied() {
        let phase = z.conj() / z.norm();
        v *= phase;
    }
    v
}

/// The state the histories start from.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    density: CMatrix,
    vector: Option<CVector>,
}

impl InitialState {
    /// A pure state `|ψ⟩⟨ψ|`; the vector is normalized and kept as given
    /// (its phase is the amplitude phase reference).
    pub fn pure(psi: CVector) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("initial state vector has zero norm".into()));
        }
        let psi = psi / C64::new(n, 0.0);
        let density = &psi * psi.adjoint();
        Ok(Self {
            density,
            vector: Some(psi),
        })
    }

    pub fn mixed(density: CMatrix) -> Result<Self> {
        if density.nrows() != density.ncols() {
            return Err(Error::Domain("density matrix must be square".into()));
        }
        Ok(Self {
            density,
            vector: None,
        })
    }

    /// Computational basis state `|k⟩` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::Domain(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut v = CVector::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        Self::pure(v)
    }

    pub fn density(&self) -> &CMatrix {
        &self.density
    }

    pub fn dimension(&self) -> usize {
        self.density.nrows()
    }

    /// The state vector when the state is pure within `tol`.
    pub fn pure_vector(&self, tol: f64) -> Option<CVector> {
        if let Some(v) = &self.vector {
            return Some(v.clone());
        }
        let purity = (&self.density * &self.density).trace().re;
        let trace = self.density.trace().re;
        if (purity - 1.0).abs() > tol || (trace - 1.0).abs() > tol {
            return None;
        }
        Some(representative_vector(&self.density))
    }
}

/// One labelled projector of a measurement family.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub projector: CMatrix,
}

/// Evolve with `unitary`, then measure one of `outcomes`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStep {
    pub unitary: CMatrix,
    pub outcomes: Vec<Outcome>,
}

impl TimeStep {
    /// Measurement in the computational basis with outcome labels `0 … d-1`.
    pub fn computational(unitary: CMatrix) -> Self {
        let d = unitary.nrows();
        let outcomes = (0..d)
            .map(|k| {
                let mut p = CMatrix::zeros(d, d);
                p[(k, k)] = C64::new(1.0, 0.0);
                Outcome {
                    label: k.to_string(),
                    projector: p,
                }
            })
            .collect();
        Self { unitary, outcomes }
    }
}

/// A history: one outcome index per step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct History {
    pub outcomes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoriesSystem {
    initial: InitialState,
    steps: Vec<TimeStep>,
}

impl HistoriesSystem {
    /// Checks shapes only; numerical invariants are reported by
    /// [`validate_system`].
    pub fn new(initial: InitialState, steps: Vec<TimeStep>) -> Result<Self> {
        let d = initial.dimension();
        if d < 2 {
            return Err(Error::Domain("system dimension must be at least 2".into()));
        }
        if steps.is_empty() {
            return Err(Error::Domain("a system needs at least one time step".into()));
        }
        for (k, s) in steps.iter().enumerate() {
            if s.unitary.shape() != (d, d) {
                return Err(Error::Domain(format!("step {k}: unitary is not {d}×{d}")));
            }
            if s.outcomes.is_empty() {
                return Err(Error::Domain(format!("step {k}: empty projector family")));
            }
            for (j, o) in s.outcomes.iter().enumerate() {
                if o.projector.shape() != (d, d) {
                    return Err(Error::Domain(format!("step {k}: projector {j} is not {d}×{d}")));
                }
            }
        }
        Ok(Self { initial, steps })
    }

    pub fn dimension(&self) -> usize {
        self.initial.dimension()
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    pub fn steps(&self) -> &[TimeStep] {
        &self.steps
    }

    /// Same dynamics from a different initial state.
    pub fn with_initial(&self, initial: InitialState) -> Result<Self> {
        Self::new(initial, self.steps.clone())
    }

    /// Number of histories (product of family sizes), saturating.
    pub fn num_histories(&self) -> usize {
        self.steps
            .iter()
            .fold(1usize, |acc, s| acc.saturating_mul(s.outcomes.len()))
    }

    /// The history at position `index`; the first step is the least
    /// significant digit.
    pub fn history(&self, mut index: usize) -> History {
        let outcomes = self
            .steps
            .iter()
            .map(|s| {
                let k = s.outcomes.len();
                let o = index % k;
                index /= k;
                o
            })
            .collect();
        History { outcomes }
    }

    pub fn histories(&self) -> impl Iterator<Item = History> + '_ {
        (0..self.num_histories()).map(|i| self.history(i))
    }

    fn check_history(&self, h: &History) -> Result<()> {
        if h.outcomes.len() != self.steps.len() {
            return Err(Error::Domain(format!(
                "history has {} outcomes, system has {} steps",
                h.outcomes.len(),
                self.steps.len()
            )));
        }
        for (k, (&o, s)) in h.outcomes.iter().zip(&self.steps).enumerate() {
            if o >= s.outcomes.len() {
                return Err(Error::Domain(format!("step {k}: outcome {o} out of range")));
            }
        }
        Ok(())
    }
}

/// One history per outcome sequence. Labels concatenate outcome labels with
/// the first measurement rightmost; a `.` separates them unless every outcome
/// label is a single character.
pub fn induced_sample_space(system: &HistoriesSystem) -> Result<SampleSpace> {
    induced_sample_space_with_cap(system, DEFAULT_ENUMERATION_CAP)
}

pub fn induced_sample_space_with_cap(system: &HistoriesSystem, cap: usize) -> Result<SampleSpace> {
    check_cap("history count", system.num_histories(), cap)?;
    let compact = system
        .steps
        .iter()
        .all(|s| s.outcomes.iter().all(|o| o.label.chars().count() == 1));
    let sep = if compact { "" } else { "." };
    let labels = system.histories().map(|h| {
        let parts: Vec<&str> = h
            .outcomes
            .iter()
            .zip(&system.steps)
            .rev()
            .map(|(&o, s)| s.outcomes[o].label.as_str())
            .collect();
        parts.join(sep)
    });
    SampleSpace::new(labels)
}

/// `C_h = P_{h_n} U_n ⋯ P_{h_1} U_1`.
pub fn class_operator(system: &HistoriesSystem, h: &History) -> Result<CMatrix> {
    system.check_history(h)?;
    let mut c = identity(system.dimension());
    for (&o, s) in h.outcomes.iter().zip(&system.steps) {
        c = &s.outcomes[o].projector * (&s.unitary * c);
    }
    Ok(c)
}

/// `⟨f_h| C_h |ψ₀⟩` for a pure initial state and rank-1 projectors, where
/// `f_h` is the representative vector of the last projector of `h`.
pub fn amplitude(system: &HistoriesSystem, h: &History) -> Result<C64> {
    let tol = DEFAULT_VALIDATION_TOLERANCE;
    let psi = system.initial.pure_vector(tol).ok_or_else(|| {
        Error::Unsupported("amplitudes need a pure initial state; use the decoherence matrix".into())
    })?;
    system.check_history(h)?;
    for (k, s) in system.steps.iter().enumerate() {
        for (j, o) in s.outcomes.iter().enumerate() {
            if (o.projector.trace().re - 1.0).abs() > tol {
                return Err(Error::Unsupported(format!(
                    "step {k}: projector {j} is not rank-1; use the decoherence matrix"
                )));
            }
        }
    }
    let c = class_operator(system, h)?;
    let last = h.outcomes.len() - 1;
    let f = representative_vector(&system.steps[last].outcomes[h.outcomes[last]].projector);
    Ok(f.dotc(&(c * psi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    DensityNotHermitian,
    DensityNotPositive,
    DensityTrace,
    NotUnitary,
    ProjectorNotIdempotent,
    ProjectorNotHermitian,
    ProjectorsNotOrthogonal,
    FamilyIncomplete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Human-readable position, e.g. `step 1, projector 0`.
    pub location: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, kind: ViolationKind, location: impl Into<String>, deviation: f64, tol: f64) {
        if !(deviation <= tol) {
            self.violations.push(Violation {
                kind,
                location: location.into(),
                deviation,
            });
        }
    }
}

/// Lists every invariant of `system` violated beyond `tol`.
pub fn validate_system(system: &HistoriesSystem, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = system.dimension();
    let rho = system.initial.density();
    report.check(
        ViolationKind::DensityNotHermitian,
        "initial state",
        max_abs(&(rho - rho.adjoint())),
        tol,
    );
    report.check(
        ViolationKind::DensityNotPositive,
        "initial state",
        (-min_hermitian_eigenvalue(rho)).max(0.0),
        tol,
    );
    report.check(
        ViolationKind::DensityTrace,
        "initial state",
        (rho.trace() - C64::new(1.0, 0.0)).norm(),
        tol,
    );
    for (k, s) in system.steps.iter().enumerate() {
        let u = &s.unitary;
        report.check(
            ViolationKind::NotUnitary,
            format!("step {k}, unitary"),
            max_abs(&(u.adjoint() * u - identity(d))),
            tol,
        );
        let mut total = CMatrix::zeros(d, d);
        for (j, o) in s.outcomes.iter().enumerate() {
            let p = &o.projector;
            report.check(
                ViolationKind::ProjectorNotIdempotent,
                format!("step {k}, projector {j}"),
                max_abs(&(p * p - p)),
                tol,
            );
            report.check(
                ViolationKind::ProjectorNotHermitian,
                format!("step {k}, projector {j}"),
                max_abs(&(p - p.adjoint())),
                tol,
            );
            for (i, q) in s.outcomes.iter().enumerate().skip(j + 1) {
                report.check(
                    ViolationKind::ProjectorsNotOrthogonal,
                    format!("step {k}, projectors {j} and {i}"),
                    max_abs(&(p * &q.projector)),
                    tol,
                );
            }
            total += p;
        }
        report.check(
            ViolationKind::FamilyIncomplete,
            format!("step {k}"),
            max_abs(&(total - identity(d))),
            tol,
        );
    }
    report
}
