//! The quantum measure `μ(A) = Σ_{h,h′∈A} D(h,h′)` and its interference
//! identities.

use std::collections::BTreeMap;

use crate::error::{check_cap, Error, Result};
use crate::event::{Event, SampleSpace, MAX_MASK_BITS};
use crate::system::{
    class_operator, induced_sample_space, max_abs, min_hermitian_eigenvalue, CMatrix, HistoriesSystem,
    C64, DEFAULT_VALIDATION_TOLERANCE,
};

/// Default threshold below which an event counts as measure zero.
pub const DEFAULT_PRECLUSION_EPSILON: f64 = 1e-9;

/// Anything that assigns a quantum measure to events of a fixed space.
pub trait QuantumMeasure {
    fn space_size(&self) -> usize;
    fn measure(&self, event: &Event) -> Result<f64>;
}

/// Hermitian positive semidefinite matrix over histories with entries
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix {
    space: SampleSpace,
    entries: CMatrix,
    tolerance: f64,
}

impl DecoherenceMatrix {
    /// Validates Hermiticity, positivity and normalization within `tol`.
    pub fn new(space: SampleSpace, entries: CMatrix, tol: f64) -> Result<Self> {
        let n = space.size();
        if entries.shape() != (n, n) {
            return Err(Error::Domain(format!(
                "decoherence matrix is {}×{}, sample space has {n} histories",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let d = Self {
            space,
            entries,
            tolerance: tol,
        };
        let herm = max_abs(&(&d.entries - d.entries.adjoint()));
        if herm > tol {
            return Err(Error::Invariant(format!("decoherence matrix not Hermitian (deviation {herm:e})")));
        }
        let low = min_hermitian_eigenvalue(&d.entries);
        if low < -tol {
            return Err(Error::Invariant(format!(
                "decoherence matrix not positive semidefinite (eigenvalue {low:e})"
            )));
        }
        let total = d.total();
        if (total - 1.0).abs() > tol {
            return Err(Error::Invariant(format!("μ(Ω) = {total}, expected 1")));
        }
        Ok(d)
    }

    pub(crate) fn new_unchecked(space: SampleSpace, entries: CMatrix, tolerance: f64) -> Self {
        Self {
            space,
            entries,
            tolerance,
        }
    }

    /// The classical matrix `diag(p)`.
    pub fn diagonal(space: SampleSpace, probabilities: &[f64]) -> Result<Self> {
        let n = space.size();
        if probabilities.len() != n {
            return Err(Error::Domain("one probability per history required".into()));
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, &p) in probabilities.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        Self::new(space, m, DEFAULT_VALIDATION_TOLERANCE)
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, h: usize, g: usize) -> C64 {
        self.entries[(h, g)]
    }

    /// Clamp tolerance for tiny negative measures.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `μ(Ω)`, the sum of all entries.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|z| z.re).sum()
    }

    /// `true` when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// `Σ_{h,h′∈A} D(h,h′)` without clamping.
    pub fn raw_measure(&self, a: &Event) -> Result<f64> {
        self.space.check_event(a)?;
        let idx: Vec<usize> = a.indices().collect();
        let mut total = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            total += self.entries[(i, i)].re;
            for &j in &idx[k + 1..] {
                total += 2.0 * self.entries[(i, j)].re;
            }
        }
        Ok(total)
    }

    /// `μ(A)` for every event of a space of at most `cap` histories, indexed
    /// by bit mask.
    pub fn all_event_measures(&self, cap: usize) -> Result<Vec<f64>> {
        let n = self.size();
        check_cap("sample space", n, cap.min(MAX_MASK_BITS))?;
        let re: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)].re).collect())
            .collect();
        let mut mu = vec![0.0f64; 1usize << n];
        for m in 1usize..mu.len() {
            let top = usize::BITS as usize - 1 - m.leading_zeros() as usize;
            let rest = m ^ (1 << top);
            let row = &re[top];
            let mut cross = 0.0;
            let mut r = rest;
            while r != 0 {
                let g = r.trailing_zeros() as usize;
                cross += row[g];
                r &= r - 1;
            }
            mu[m] = mu[rest] + row[top] + 2.0 * cross;
        }
        Ok(mu)
    }
}

impl QuantumMeasure for DecoherenceMatrix {
    fn space_size(&self) -> usize {
        self.size()
    }

    /// `μ(A)`, with negatives down to `-tolerance` clamped to zero.
    fn measure(&self, event: &Event) -> Result<f64> {
        clamp(self.raw_measure(event)?, self.tolerance)
    }
}

pub(crate) fn clamp(mu: f64, tol: f64) -> Result<f64> {
    if mu >= 0.0 {
        Ok(mu)
    } else if mu >= -tol {
        Ok(0.0)
    } else {
        Err(Error::Invariant(format!("negative quantum measure {mu:e}")))
    }
}

/// `D(h,h′) = Tr(C_h ρ C_{h′}†)`, so that `μ({h}) = ‖C_h ψ‖²` for pure states.
pub fn decoherence_matrix(system: &HistoriesSystem) -> Result<DecoherenceMatrix> {
    let space = induced_sample_space(system)?;
    let n = space.size();
    let rho = system.initial().density();
    let ops: Vec<CMatrix> = system
        .histories()
        .map(|h| class_operator(system, &h))
        .collect::<Result<_>>()?;
    let evolved: Vec<CMatrix> = ops.iter().map(|c| c * rho).collect();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            // Tr(X Y†) = Σ X_ab conj(Y_ab)
            let v: C64 = evolved[i]
                .iter()
                .zip(ops[j].iter())
                .map(|(x, y)| x * y.conj())
                .sum();
            d[(i, j)] = v;
            d[(j, i)] = v.conj();
        }
    }
    Ok(DecoherenceMatrix::new_unchecked(space, d, DEFAULT_VALIDATION_TOLERANCE))
}

/// Per-history amplitudes; histories with different final tags never
/// interfere.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    pub space: SampleSpace,
    pub amplitudes: Vec<C64>,
    pub final_class: Vec<String>,
}

impl AmplitudeTable {
    /// All histories share one final class.
    pub fn single_class(space: SampleSpace, amplitudes: Vec<C64>) -> Self {
        let final_class = vec![String::new(); space.size()];
        Self {
            space,
            amplitudes,
            final_class,
        }
    }
}

/// `D(h,h′) = α(h) conj(α(h′))` within a final class, zero across classes,
/// rescaled so that `μ(Ω) = 1`.
pub fn from_amplitudes(table: &AmplitudeTable) -> Result<DecoherenceMatrix> {
    let n = table.space.size();
    if table.amplitudes.len() != n || table.final_class.len() != n {
        return Err(Error::Domain("one amplitude and one final class per history required".into()));
    }
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if table.final_class[i] == table.final_class[j] {
                d[(i, j)] = table.amplitudes[i] * table.amplitudes[j].conj();
            }
        }
    }
    let total: f64 = d.iter().map(|z| z.re).sum();
    if !(total > f64::EPSILON) {
        return Err(Error::Degenerate("amplitude table has zero total measure".into()));
    }
    if total != 1.0 {
        d /= C64::new(total, 0.0);
    }
    Ok(DecoherenceMatrix::new_unchecked(
        table.space.clone(),
        d,
        DEFAULT_VALIDATION_TOLERANCE,
    ))
}

/// `μ(A⊔B⊔C) − μ(A⊔B) − μ(A⊔C) − μ(B⊔C) + μ(A) + μ(B) + μ(C)`; identically
/// zero for any quantum measure.
pub fn sum_rule_residual(d: &DecoherenceMatrix, a: &Event, b: &Event, c: &Event) -> Result<f64> {
    for (x, y) in [(a, b), (a, c), (b, c)] {
        if x.intersects(y)? {
            return Err(Error::Domain("sum rule needs pairwise disjoint events".into()));
        }
    }
    let ab = a.union(b)?;
    let ac = a.union(c)?;
    let bc = b.union(c)?;
    let abc = ab.union(c)?;
    let m = |e: &Event| d.raw_measure(e);
    Ok(m(&abc)? - m(&ab)? - m(&ac)? - m(&bc)? + m(a)? + m(b)? + m(c)?)
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Rebuilds `μ(A)` for `|A| = n` from singleton and pair measures:
/// `(2−n) Σ_i μ(h_i) + ½ Σ_{i≠j} μ({h_i,h_j})`.
///
/// Pair keys are unordered; either `(i, j)` or `(j, i)` may be present.
pub fn reconstruct_measure(
    singletons: &BTreeMap<usize, f64>,
    pairs: &BTreeMap<(usize, usize), f64>,
    a: &Event,
) -> Result<f64> {
    let idx: Vec<usize> = a.indices().collect();
    if idx.is_empty() {
        return Err(Error::Domain("reconstruction needs a nonempty event".into()));
    }
    let n = idx.len() as f64;
    let mut single = 0.0;
    for &i in &idx {
        single += singletons
            .get(&i)
            .ok_or_else(|| Error::Domain(format!("missing singleton measure for history {i}")))?;
    }
    let mut pair_sum = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            let v = pairs
                .get(&pair_key(i, j))
                .or_else(|| pairs.get(&(j.max(i), j.min(i))))
                .ok_or_else(|| Error::Domain(format!("missing pair measure for histories {i},{j}")))?;
            // ½ Σ_{i≠j} counts each unordered pair twice
            pair_sum += v;
        }
    }
    Ok((2.0 - n) * single + pair_sum)
}

/// Real symmetric decoherence matrix reproducing the given singleton and pair
/// measures: `D(h,h) = μ(h)`, `D(h,g) = ½(μ({h,g}) − μ(h) − μ(g))`.
pub fn from_singletons_and_pairs(
    space: SampleSpace,
    singletons: &BTreeMap<usize, f64>,
    pairs: &BTreeMap<(usize, usize), f64>,
    tol: f64,
) -> Result<DecoherenceMatrix> {
    let n = space.size();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        let mi = *singletons
            .get(&i)
            .ok_or_else(|| Error::Domain(format!("missing singleton measure for {}", space.label(i))))?;
        d[(i, i)] = C64::new(mi, 0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mij = *pairs.get(&(i, j)).ok_or_else(|| {
                Error::Domain(format!(
                    "missing pair measure for {},{}",
                    space.label(i),
                    space.label(j)
                ))
            })?;
            let off = 0.5 * (mij - d[(i, i)].re - d[(j, j)].re);
            d[(i, j)] = C64::new(off, 0.0);
            d[(j, i)] = C64::new(off, 0.0);
        }
    }
    DecoherenceMatrix::new(space, d, tol)
}

/// `true` iff `μ` is additive on disjoint events, decided by
/// `|Re D(h,h′)| ≤ tol` for all `h ≠ h′`.
pub fn is_classical(d: &DecoherenceMatrix, tol: f64) -> bool {
    let n = d.size();
    (0..n).all(|i| (0..n).all(|j| i == j || d.entry(i, j).re.abs() <= tol))
}
