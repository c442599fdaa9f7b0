//! Predictions from small measures: events singled out in advance whose
//! measure falls below a chosen threshold are predicted not to happen
//! (rarely occur). Repeated trials are modelled by tensor powers of the
//! decoherence matrix.

use crate::error::{check_cap, Error, Result};
use crate::event::{Event, SampleSpace};
use crate::measure::{clamp, DecoherenceMatrix, QuantumMeasure};
use crate::system::{CMatrix, C64};

/// Default threshold for "small measure".
pub const DEFAULT_COURNOT_EPSILON: f64 = 1e-6;

/// Largest product space that may be indexed.
pub const PRODUCT_HISTORY_CAP: usize = 1 << 24;

/// Largest product space materialized as a dense matrix.
pub const DENSE_PRODUCT_CAP: usize = 1 << 10;

/// Largest event whose measure is summed pairwise over a non-diagonal
/// product measure.
pub const PAIRWISE_EVENT_CAP: usize = 1 << 12;

/// Attached to every Cournot report.
pub const REPORT_NOTE: &str = "Verdicts apply only to events declared before evaluation. \
A small measure predicts that the event rarely occurs; it does not exclude it from the coevents.";

/// An event fixed, with its description, before any measure is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct DeclaredEvent {
    pub description: String,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionConfig {
    epsilon: f64,
    declared: Vec<DeclaredEvent>,
}

impl PredictionConfig {
    pub fn new(epsilon: f64, declared: Vec<DeclaredEvent>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("Cournot threshold must lie in (0,1), got {epsilon}")));
        }
        Ok(Self { epsilon, declared })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn declared(&self) -> &[DeclaredEvent] {
        &self.declared
    }
}

/// `μ(A) ≤ ε` for an event listed in `cfg`. Undeclared events are refused.
pub fn approximately_precluded<M: QuantumMeasure>(
    m: &M,
    event: &DeclaredEvent,
    cfg: &PredictionConfig,
) -> Result<bool> {
    if !cfg.declared.contains(event) {
        return Err(Error::Domain(format!(
            "event {:?} was not declared in advance",
            event.description
        )));
    }
    Ok(m.measure(&event.event)? <= cfg.epsilon)
}

/// `n` independent copies of a base sample space. Tuple position 0 is the
/// least significant digit of the product index.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    base: SampleSpace,
    copies: usize,
    size: usize,
}

impl ProductSpace {
    pub fn new(base: SampleSpace, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::Domain("a product space needs at least one copy".into()));
        }
        let size = (0..copies).try_fold(1usize, |acc, _| acc.checked_mul(base.size()));
        let size = size.unwrap_or(usize::MAX);
        check_cap("product space", size, PRODUCT_HISTORY_CAP)?;
        Ok(Self { base, copies, size })
    }

    pub fn base(&self) -> &SampleSpace {
        &self.base
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let k = self.base.size();
        (0..self.copies)
            .map(|_| {
                let d = index % k;
                index /= k;
                d
            })
            .collect()
    }

    pub fn index(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.copies || tuple.iter().any(|&d| d >= self.base.size()) {
            return Err(Error::Domain("tuple does not belong to the product space".into()));
        }
        Ok(tuple.iter().rev().fold(0, |acc, &d| acc * self.base.size() + d))
    }

    /// Base labels joined by commas, first copy first.
    pub fn label(&self, index: usize) -> String {
        self.tuple(index)
            .iter()
            .map(|&d| self.base.label(d))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `A × Ω × ⋯ × Ω` with `A` in copy `position`.
    pub fn cylinder(&self, a: &Event, position: usize) -> Result<Event> {
        self.base.check_event(a)?;
        if position >= self.copies {
            return Err(Error::Domain("cylinder position out of range".into()));
        }
        let mut ev = Event::empty(self.size);
        for i in 0..self.size {
            if a.contains(self.tuple(i)[position]) {
                ev.insert(i);
            }
        }
        Ok(ev)
    }
}

/// Tensor power of a decoherence matrix, evaluated lazily:
/// `D_n(s, s′) = Π_k D(s_k, s′_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasure {
    base: DecoherenceMatrix,
    space: ProductSpace,
    diagonal: bool,
}

/// `n` independent copies of the system described by `d`.
pub fn product_system(d: &DecoherenceMatrix, n: usize) -> Result<ProductMeasure> {
    let space = ProductSpace::new(d.space().clone(), n)?;
    Ok(ProductMeasure {
        base: d.clone(),
        diagonal: d.is_diagonal(),
        space,
    })
}

impl ProductMeasure {
    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn base(&self) -> &DecoherenceMatrix {
        &self.base
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let (s, t) = (self.space.tuple(i), self.space.tuple(j));
        s.iter()
            .zip(&t)
            .fold(C64::new(1.0, 0.0), |acc, (&a, &b)| acc * self.base.entry(a, b))
    }

    fn diagonal_weight(&self, i: usize) -> f64 {
        self.space
            .tuple(i)
            .iter()
            .map(|&a| self.base.entry(a, a).re)
            .product()
    }

    /// Dense matrix over a labelled sample space, for small products.
    pub fn to_matrix(&self) -> Result<DecoherenceMatrix> {
        let n = self.space.size();
        check_cap("dense product space", n, DENSE_PRODUCT_CAP)?;
        let labels = (0..n).map(|i| self.space.label(i));
        let space = SampleSpace::new(labels)?;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entry(i, j);
            }
        }
        Ok(DecoherenceMatrix::new_unchecked(space, m, self.base.tolerance()))
    }
}

impl QuantumMeasure for ProductMeasure {
    fn space_size(&self) -> usize {
        self.space.size()
    }

    fn measure(&self, event: &Event) -> Result<f64> {
        if event.space_size() != self.space.size() {
            return Err(Error::Domain("event is not over the product space".into()));
        }
        if self.diagonal {
            return Ok(event.indices().map(|i| self.diagonal_weight(i)).sum());
        }
        check_cap("event in a non-diagonal product", event.count(), PAIRWISE_EVENT_CAP)?;
        let idx: Vec<usize> = event.indices().collect();
        let mut total = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            total += self.entry(i, i).re;
            for &j in &idx[k + 1..] {
                total += 2.0 * self.entry(i, j).re;
            }
        }
        clamp(total, self.base.tolerance())
    }
}

fn check_frequency_args(p: f64, delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("target frequency {p} outside [0,1]")));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("deviation {delta} must be positive")));
    }
    Ok(())
}

// scaled by n so that boundary cases such as 3/10 vs 1/2 ± 1/5 compare exactly
fn deviates(hits: usize, n: usize, p: f64, delta: f64) -> bool {
    (hits as f64 - n as f64 * p).abs() > n as f64 * delta
}

/// All tuples whose relative frequency of `A` differs from `p` by more than
/// `delta`.
pub fn frequency_deviation_event(ps: &ProductSpace, a: &Event, p: f64, delta: f64) -> Result<Event> {
    check_frequency_args(p, delta)?;
    ps.base.check_event(a)?;
    let k = ps.base.size();
    let n = ps.copies;
    let mut ev = Event::empty(ps.size);
    let mut digits = vec![0usize; n];
    let mut hits = digits.iter().filter(|&&d| a.contains(d)).count();
    for i in 0..ps.size {
        if deviates(hits, n, p, delta) {
            ev.insert(i);
        }
        // odometer increment, keeping the hit count current
        for d in digits.iter_mut() {
            let was = a.contains(*d);
            *d += 1;
            if *d == k {
                *d = 0;
            }
            let now = a.contains(*d);
            hits = hits + now as usize - was as usize;
            if *d != 0 {
                break;
            }
        }
    }
    Ok(ev)
}

/// Measure of the frequency-deviation event over `n` copies without
/// building the product space: the joint distribution of hit counts on the
/// two branches of the decoherence functional is accumulated one copy at a
/// time.
pub fn frequency_deviation_measure(d: &DecoherenceMatrix, a: &Event, n: usize, p: f64, delta: f64) -> Result<f64> {
    check_frequency_args(p, delta)?;
    d.space().check_event(a)?;
    if n == 0 {
        return Err(Error::Domain("at least one copy required".into()));
    }
    // w[x][y]: total weight of D(h, g) with [h∈A] = x, [g∈A] = y
    let mut w = [[C64::new(0.0, 0.0); 2]; 2];
    for h in 0..d.size() {
        for g in 0..d.size() {
            w[a.contains(h) as usize][a.contains(g) as usize] += d.entry(h, g);
        }
    }
    let side = n + 1;
    let mut counts = vec![C64::new(0.0, 0.0); side * side];
    counts[0] = C64::new(1.0, 0.0);
    for step in 0..n {
        let mut next = vec![C64::new(0.0, 0.0); side * side];
        for k in 0..=step {
            for l in 0..=step {
                let c = counts[k * side + l];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for (x, row) in w.iter().enumerate() {
                    for (y, &wxy) in row.iter().enumerate() {
                        next[(k + x) * side + (l + y)] += c * wxy;
                    }
                }
            }
        }
        counts = next;
    }
    let mut total = 0.0;
    for k in 0..=n {
        if !deviates(k, n, p, delta) {
            continue;
        }
        for l in 0..=n {
            if deviates(l, n, p, delta) {
                total += counts[k * side + l].re;
            }
        }
    }
    clamp(total, d.tolerance())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionEntry {
    pub description: String,
    pub event: Event,
    pub measure: f64,
    pub epsilon: f64,
    pub approximately_precluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CournotReport {
    pub epsilon: f64,
    pub declared_count: usize,
    pub entries: Vec<PredictionEntry>,
    pub note: &'static str,
}

/// Evaluates every declared event, in declaration order. No other event is
/// ever examined.
pub fn cournot_report<M: QuantumMeasure>(m: &M, cfg: &PredictionConfig) -> Result<CournotReport> {
    let mut entries = Vec::with_capacity(cfg.declared.len());
    for decl in &cfg.declared {
        let mu = m.measure(&decl.event)?;
        entries.push(PredictionEntry {
            description: decl.description.clone(),
            event: decl.event.clone(),
            measure: mu,
            epsilon: cfg.epsilon,
            approximately_precluded: mu <= cfg.epsilon,
        });
    }
    Ok(CournotReport {
        epsilon: cfg.epsilon,
        declared_count: cfg.declared.len(),
        entries,
        note: REPORT_NOTE,
    })
}
