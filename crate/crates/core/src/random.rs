//! Random instances: Haar unitaries, projector families, systems, and
//! amplitude tables with exact cancellations.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::event::SampleSpace;
use crate::measure::AmplitudeTable;
use crate::system::{CMatrix, CVector, HistoriesSystem, InitialState, Outcome, TimeStep, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-distributed `d×d` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Projectors onto consecutive blocks of columns of a random unitary, with
/// block sizes `ranks` (which must sum to `d`).
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, d: usize, ranks: &[usize]) -> Vec<Outcome> {
    assert_eq!(ranks.iter().sum::<usize>(), d, "ranks must sum to the dimension");
    let basis = haar_unitary(rng, d);
    let mut start = 0;
    ranks
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let cols = basis.columns(start, r);
            start += r;
            Outcome {
                label: k.to_string(),
                projector: cols * cols.adjoint(),
            }
        })
        .collect()
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> InitialState {
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    InitialState::pure(v).expect("gaussian vector is nonzero")
}

/// Density matrix `A A† / Tr(A A†)` with `A` a `d×rank` Ginibre matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> InitialState {
    let a = CMatrix::from_fn(d, rank, |_, _| gaussian(rng));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    InitialState::mixed(rho / tr).expect("square")
}

/// Splits `d` into `parts` positive block sizes at random.
fn random_ranks<R: Rng + ?Sized>(rng: &mut R, d: usize, parts: usize) -> Vec<usize> {
    let mut ranks = vec![1; parts];
    for _ in parts..d {
        let k = rng.random_range(0..parts);
        ranks[k] += 1;
    }
    ranks
}

/// A random valid system of dimension `d` with `steps` measurements, each
/// family having between 2 and `d` outcomes, and at most `max_histories`
/// histories in total.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, d: usize, steps: usize, max_histories: usize) -> HistoriesSystem {
    assert!(d >= 2 && steps >= 1);
    let mut histories = 1usize;
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let remaining_steps = steps - k - 1;
        // leave room for at least two outcomes per later step
        let room = max_histories / histories / (1 << remaining_steps);
        let max_parts = d.min(room).max(2);
        let parts = rng.random_range(2..=max_parts);
        histories *= parts;
        let ranks = random_ranks(rng, d, parts);
        out.push(TimeStep {
            unitary: haar_unitary(rng, d),
            outcomes: random_family(rng, d, &ranks),
        });
    }
    let initial = if rng.random_bool(0.5) {
        random_pure_state(rng, d)
    } else {
        let rank = rng.random_range(1..=d);
        random_mixed_state(rng, d, rank)
    };
    HistoriesSystem::new(initial, out).expect("shapes are consistent")
}

/// Amplitudes drawn from `{0, ±1, ±i}` over `classes` final classes: sums of
/// such values cancel exactly, so these tables have many precluded events.
pub fn random_amplitude_table<R: Rng + ?Sized>(rng: &mut R, n: usize, classes: usize) -> AmplitudeTable {
    let units = [
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, -1.0),
        C64::new(0.0, 0.0),
    ];
    let space = SampleSpace::numbered(n).expect("n ≥ 1");
    loop {
        let amplitudes: Vec<C64> = (0..n).map(|_| units[rng.random_range(0..units.len())]).collect();
        let final_class: Vec<String> = (0..n).map(|_| rng.random_range(0..classes).to_string()).collect();
        // reject tables of total measure zero
        let mut sums = std::collections::HashMap::<&str, C64>::new();
        for (a, c) in amplitudes.iter().zip(&final_class) {
            *sums.entry(c.as_str()).or_default() += a;
        }
        if sums.values().any(|s| s.norm() > 0.5) {
            return AmplitudeTable {
                space: space.clone(),
                amplitudes,
                final_class,
            };
        }
    }
}
