mod common;

use coevent_core::random::random_amplitude_table;
use coevent_core::*;
use common::*;
use proptest::prelude::*;

fn coin(heads: f64) -> DecoherenceMatrix {
    DecoherenceMatrix::diagonal(SampleSpace::new(["H", "T"]).unwrap(), &[heads, 1.0 - heads]).unwrap()
}

fn choose(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P(|K/n − p_num/p_den| > d_num/d_den)` for `K ~ Binomial(n, q)`, with the
/// deviation test done in integers.
fn binomial_tail(n: u64, q: f64, p: (u64, u64), delta: (u64, u64)) -> f64 {
    (0..=n)
        .filter(|&k| {
            let lhs = (k as i128 * p.1 as i128 - n as i128 * p.0 as i128).unsigned_abs() * delta.1 as u128;
            lhs > (n * p.1 * delta.0) as u128
        })
        .map(|k| choose(n, k) * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32))
        .sum()
}

fn frac(r: (u64, u64)) -> f64 {
    r.0 as f64 / r.1 as f64
}

#[test]
fn all_heads_at_twenty_tosses() {
    let d = coin(0.5);
    let pm = product_system(&d, 20).unwrap();
    let all_heads = Event::singleton(pm.space().size(), pm.space().index(&[0; 20]).unwrap());
    let mu = pm.measure(&all_heads).unwrap();
    assert!((mu - 2f64.powi(-20)).abs() < 1e-18);
    let decl = DeclaredEvent {
        description: "twenty heads".into(),
        event: all_heads,
    };
    let cfg = PredictionConfig::new(1e-5, vec![decl.clone()]).unwrap();
    assert!(approximately_precluded(&pm, &decl, &cfg).unwrap());
    let strict = PredictionConfig::new(1e-7, vec![decl.clone()]).unwrap();
    assert!(!approximately_precluded(&pm, &decl, &strict).unwrap());
}

#[test]
fn frequency_deviation_matches_binomial_tails() {
    let heads = Event::singleton(2, 0);
    for (q, p) in [(0.5, (1, 2)), (0.3, (3, 10)), (0.3, (1, 2))] {
        let d = coin(q);
        for n in [1u64, 2, 5, 10, 15, 20] {
            for delta in [(1, 20), (1, 10), (1, 5), (1, 4), (3, 10), (2, 5), (1, 2)] {
                let want = binomial_tail(n, q, p, delta);
                let dp = frequency_deviation_measure(&d, &heads, n as usize, frac(p), frac(delta)).unwrap();
                assert!((dp - want).abs() <= 1e-12, "q={q} n={n} δ={delta:?}: {dp} vs {want}");
                if n <= 15 {
                    let pm = product_system(&d, n as usize).unwrap();
                    let ev = frequency_deviation_event(pm.space(), &heads, frac(p), frac(delta)).unwrap();
                    let direct = pm.measure(&ev).unwrap();
                    assert!((direct - want).abs() <= 1e-12, "q={q} n={n} δ={delta:?}: {direct} vs {want}");
                }
            }
        }
    }
}

#[test]
fn symmetric_coin_twenty_tosses_deviation_is_small() {
    let d = coin(0.5);
    let mu = frequency_deviation_measure(&d, &Event::singleton(2, 0), 20, 0.5, 0.4).unwrap();
    assert!(mu <= 0.01);
    assert!((mu - binomial_tail(20, 0.5, (1, 2), (2, 5))).abs() <= 1e-12);
}

#[test]
fn deviation_shrinks_with_more_tosses() {
    let d = coin(0.5);
    let heads = Event::singleton(2, 0);
    for delta in [(1, 20), (1, 10), (3, 20), (1, 4), (3, 10), (7, 20), (2, 5), (9, 20)] {
        let mus: Vec<f64> = [5u64, 10, 15, 20]
            .iter()
            .map(|&n| frequency_deviation_measure(&d, &heads, n as usize, 0.5, frac(delta)).unwrap())
            .collect();
        for w in mus.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "δ={delta:?}: {mus:?}");
        }
    }
}

#[test]
fn deviation_is_not_monotone_at_one_fifth() {
    // attainable frequencies at n = 15 sit closer to the δ = 1/5 boundary
    let d = coin(0.5);
    let heads = Event::singleton(2, 0);
    let at = |n: usize| frequency_deviation_measure(&d, &heads, n, 0.5, 0.2).unwrap();
    assert!((at(10) - binomial_tail(10, 0.5, (1, 2), (1, 5))).abs() <= 1e-12);
    assert!((at(15) - binomial_tail(15, 0.5, (1, 2), (1, 5))).abs() <= 1e-12);
    assert!(at(15) > at(10));
}

#[test]
fn deviation_event_edge_cases() {
    let ps = ProductSpace::new(SampleSpace::new(["H", "T"]).unwrap(), 4).unwrap();
    let heads = Event::singleton(2, 0);
    assert!(frequency_deviation_event(&ps, &heads, 0.5, 1.0).unwrap().is_empty());
    let one = ProductSpace::new(SampleSpace::new(["H", "T"]).unwrap(), 1).unwrap();
    assert_eq!(frequency_deviation_event(&one, &heads, 1.0, 0.5).unwrap(), heads.complement());
    assert!(frequency_deviation_event(&ps, &heads, 1.5, 0.1).is_err());
    assert!(frequency_deviation_event(&ps, &heads, 0.5, 0.0).is_err());
}

#[test]
fn interfering_base_frequency_measure_matches_explicit_sum() {
    for seed in 0..10 {
        let d = from_amplitudes(&random_amplitude_table(&mut rng(seed), 3, 1)).unwrap();
        let a = Event::from_indices(3, [0, 2]).unwrap();
        for n in 1..=5 {
            let pm = product_system(&d, n).unwrap();
            let dense = pm.to_matrix().unwrap();
            for (p, delta) in [(0.5, 0.2), (0.0, 0.3), (1.0, 0.1)] {
                let ev = frequency_deviation_event(pm.space(), &a, p, delta).unwrap();
                let want = oracle_measure_event(&dense, &ev);
                let dp = frequency_deviation_measure(&d, &a, n, p, delta).unwrap();
                assert!((dp - want).abs() <= 1e-12, "seed {seed} n {n}: {dp} vs {want}");
                assert!((pm.measure(&ev).unwrap() - want).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn product_caps() {
    let d = coin(0.5);
    assert!(matches!(product_system(&d, 25), Err(Error::Capacity { .. })));
    assert!(matches!(product_system(&d, 11).unwrap().to_matrix(), Err(Error::Capacity { .. })));
    assert!(product_system(&d, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_marginals(seed in any::<u64>(), k in 1usize..=4, n in 1usize..=3, classes in 1usize..=2) {
        let d = from_amplitudes(&random_amplitude_table(&mut rng(seed), k, classes)).unwrap();
        let pm = product_system(&d, n).unwrap();
        let dense = pm.to_matrix().unwrap();
        prop_assert!((pm.measure(&Event::full(pm.space().size())).unwrap() - 1.0).abs() < 1e-12);
        for m in 1u64..1 << k {
            let a = Event::from_mask(k, m);
            let base = d.measure(&a).unwrap();
            for pos in 0..n {
                let cyl = pm.space().cylinder(&a, pos).unwrap();
                prop_assert!((oracle_measure_event(&dense, &cyl) - base).abs() < 1e-12);
                prop_assert!((pm.measure(&cyl).unwrap() - base).abs() < 1e-12);
            }
        }
        for i in 0..pm.space().size() {
            prop_assert_eq!(pm.space().index(&pm.space().tuple(i)).unwrap(), i);
        }
    }

    #[test]
    fn classical_products_are_independent(probs in prop::collection::vec(0.01f64..1.0, 2..=3)) {
        let total: f64 = probs.iter().sum();
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let d = DecoherenceMatrix::diagonal(SampleSpace::numbered(probs.len()).unwrap(), &probs).unwrap();
        let pm = product_system(&d, 2).unwrap();
        for i in 0..pm.space().size() {
            let t = pm.space().tuple(i);
            let mu = pm.measure(&Event::singleton(pm.space().size(), i)).unwrap();
            prop_assert!((mu - probs[t[0]] * probs[t[1]]).abs() < 1e-15);
        }
    }

    #[test]
    fn verdicts_are_monotone_in_epsilon(e1 in 1e-9f64..0.5, e2 in 1e-9f64..0.5, seed in any::<u64>()) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let d = from_amplitudes(&random_amplitude_table(&mut rng(seed), 4, 2)).unwrap();
        let declared: Vec<DeclaredEvent> = (1u64..16)
            .map(|m| DeclaredEvent { description: format!("{m:04b}"), event: Event::from_mask(4, m) })
            .collect();
        let c_lo = PredictionConfig::new(lo, declared.clone()).unwrap();
        let c_hi = PredictionConfig::new(hi, declared.clone()).unwrap();
        for decl in &declared {
            if approximately_precluded(&d, decl, &c_lo).unwrap() {
                prop_assert!(approximately_precluded(&d, decl, &c_hi).unwrap());
            }
        }
        let report = cournot_report(&d, &c_lo).unwrap();
        prop_assert_eq!(report.declared_count, 15);
        prop_assert_eq!(report.entries.len(), 15);
        for (e, decl) in report.entries.iter().zip(&declared) {
            prop_assert_eq!(&e.event, &decl.event);
            prop_assert_eq!(e.epsilon, lo);
            prop_assert_eq!(e.approximately_precluded, e.measure <= lo);
        }
    }
}

#[test]
fn report_on_declared_zero_cover_member() {
    let d = decoherence_matrix(&qubit_system(0)).unwrap();
    let decl = DeclaredEvent {
        description: "h1 or h2".into(),
        event: hs(8, &[1, 2]),
    };
    let cfg = PredictionConfig::new(1e-12, vec![decl]).unwrap();
    let report = cournot_report(&d, &cfg).unwrap();
    assert!(report.entries[0].measure <= 1e-12);
    assert!(report.entries[0].approximately_precluded);
    assert!(cournot_report(&d, &PredictionConfig::new(1e-6, vec![]).unwrap())
        .unwrap()
        .entries
        .is_empty());
}

#[test]
fn destructive_interference_is_flagged() {
    // two paths to one detector with nearly opposite amplitudes
    let space = SampleSpace::new(["upper", "lower", "elsewhere"]).unwrap();
    let amps = vec![c(1.0, 0.0), c(-0.9999, 0.0), c(1.0, 0.0)];
    let classes = vec!["detector".into(), "detector".into(), "screen".into()];
    let d = from_amplitudes(&AmplitudeTable {
        space,
        amplitudes: amps,
        final_class: classes,
    })
    .unwrap();
    let decl = DeclaredEvent {
        description: "detector clicks".into(),
        event: Event::from_indices(3, [0, 1]).unwrap(),
    };
    let cfg = PredictionConfig::new(1e-6, vec![decl.clone()]).unwrap();
    assert!(approximately_precluded(&d, &decl, &cfg).unwrap());
    assert!(!approximately_precluded(&d, &decl, &PredictionConfig::new(1e-9, vec![decl.clone()]).unwrap()).unwrap());
}
