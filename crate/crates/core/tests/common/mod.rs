#![allow(dead_code)]

use coevent_core::{
    from_amplitudes, AmplitudeTable, CMatrix, DecoherenceMatrix, Event, HistoriesSystem, InitialState, SampleSpace,
    TimeStep, C64,
};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(1/√2) [[1, i], [i, 1]]`
pub fn qubit_unitary() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)])
}

/// Qubit from `|k⟩`, three computational-basis measurements.
pub fn qubit_system(k: usize) -> HistoriesSystem {
    let step = TimeStep::computational(qubit_unitary());
    HistoriesSystem::new(InitialState::basis(2, k).unwrap(), vec![step.clone(), step.clone(), step]).unwrap()
}

pub fn three_slit() -> DecoherenceMatrix {
    let space = SampleSpace::numbered(3).unwrap();
    let amps = [1.0, -1.0, 1.0].map(|x| c(x, 0.0)).to_vec();
    from_amplitudes(&AmplitudeTable::single_class(space, amps)).unwrap()
}

/// Event from 1-based history numbers `h1 … hn`.
pub fn hs(n: usize, numbers: &[usize]) -> Event {
    Event::from_indices(n, numbers.iter().map(|k| k - 1)).unwrap()
}

pub fn sorted(mut v: Vec<Event>) -> Vec<Event> {
    v.sort();
    v
}

/// `μ(A) = Σ_{h,g∈A} Re D(h,g)` summed directly over the pair set.
pub fn oracle_measure(d: &DecoherenceMatrix, mask: u64) -> f64 {
    let n = d.size();
    let mut s = 0.0;
    for h in 0..n {
        for g in 0..n {
            if mask >> h & 1 == 1 && mask >> g & 1 == 1 {
                s += d.entry(h, g).re;
            }
        }
    }
    s
}

/// Every nonempty event with `μ ≤ eps`, as masks.
pub fn oracle_precluded(d: &DecoherenceMatrix, eps: f64) -> Vec<u64> {
    (1u64..1 << d.size()).filter(|&m| oracle_measure(d, m) <= eps).collect()
}

/// Minimal nonempty `S` contained in no precluded event. Preclusiveness is
/// upward closed, so minimality only needs single-element removals.
pub fn oracle_coevents(d: &DecoherenceMatrix, eps: f64) -> Vec<Event> {
    let n = d.size();
    let precluded = oracle_precluded(d, eps);
    let ok = |s: u64| s != 0 && precluded.iter().all(|&p| s & !p != 0);
    let mut out: Vec<Event> = (1u64..1 << n)
        .filter(|&s| ok(s) && (0..n).all(|i| s >> i & 1 == 0 || !ok(s & !(1 << i))))
        .map(|s| Event::from_mask(n, s))
        .collect();
    out.sort();
    out
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// [`oracle_measure`] for events of any size.
pub fn oracle_measure_event(d: &DecoherenceMatrix, a: &Event) -> f64 {
    let idx: Vec<usize> = a.indices().collect();
    idx.iter().flat_map(|&h| idx.iter().map(move |&g| (h, g))).map(|(h, g)| d.entry(h, g).re).sum()
}
