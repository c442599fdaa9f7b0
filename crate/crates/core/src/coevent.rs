//! Coevents: the minimal events contained in no precluded event.
//!
//! An event `A` is non-preclusive iff it meets `Ω ∖ M` for every maximal
//! precluded `M`, so the coevents are exactly the minimal nonempty
//! transversals of the hypergraph `{Ω ∖ M}`. [`solve_coevents`] computes them
//! that way (Berge's incremental algorithm over bit masks);
//! [`brute_force_coevents`] scans events by size and serves as the oracle.

use crate::error::{check_cap, Error, Result};
use crate::event::{mask_bits, Event, DEFAULT_ENUMERATION_CAP, MAX_MASK_BITS};
use crate::measure::DecoherenceMatrix;
use crate::preclusion::{enumerate_precluded_with_cap, PrecludedFamily};

/// Size bound for the brute-force oracle.
pub const BRUTE_FORCE_CAP: usize = 12;

/// The support of a primitive preclusive multiplicative valuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coevent {
    support: Event,
}

impl Coevent {
    pub fn support(&self) -> &Event {
        &self.support
    }
}

/// All coevents for one measure at one preclusion threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeventSet {
    space_size: usize,
    epsilon: f64,
    coevents: Vec<Coevent>,
}

impl CoeventSet {
    fn from_masks(space_size: usize, epsilon: f64, masks: impl IntoIterator<Item = u64>) -> Self {
        let mut coevents: Vec<Coevent> = masks
            .into_iter()
            .map(|m| Coevent {
                support: Event::from_mask(space_size, m),
            })
            .collect();
        coevents.sort();
        Self {
            space_size,
            epsilon,
            coevents,
        }
    }

    /// Wraps explicit supports; they are sorted but otherwise trusted.
    pub fn from_supports(space_size: usize, epsilon: f64, supports: Vec<Event>) -> Result<Self> {
        let mut coevents = Vec::with_capacity(supports.len());
        for s in supports {
            if s.space_size() != space_size || s.is_empty() {
                return Err(Error::Domain("coevent supports must be nonempty events of the space".into()));
            }
            coevents.push(Coevent { support: s });
        }
        coevents.sort();
        coevents.dedup();
        Ok(Self {
            space_size,
            epsilon,
            coevents,
        })
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn coevents(&self) -> &[Coevent] {
        &self.coevents
    }

    pub fn supports(&self) -> impl Iterator<Item = &Event> {
        self.coevents.iter().map(|c| &c.support)
    }

    pub fn len(&self) -> usize {
        self.coevents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coevents.is_empty()
    }
}

/// `A ⊄ M` for every maximal precluded `M`.
pub fn is_non_preclusive(a: &Event, family: &PrecludedFamily) -> Result<bool> {
    if a.is_empty() {
        return Err(Error::Domain("non-preclusion is defined for nonempty events".into()));
    }
    if a.space_size() != family.space_size() {
        return Err(Error::Domain("event and precluded family over different spaces".into()));
    }
    for m in family.maximal() {
        if a.is_subset(m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimal non-preclusive events of `d` at threshold `epsilon`.
pub fn solve_coevents(d: &DecoherenceMatrix, epsilon: f64) -> Result<CoeventSet> {
    solve_coevents_with_cap(d, epsilon, DEFAULT_ENUMERATION_CAP)
}

pub fn solve_coevents_with_cap(d: &DecoherenceMatrix, epsilon: f64, cap: usize) -> Result<CoeventSet> {
    let family = enumerate_precluded_with_cap(d, epsilon, cap)?;
    coevents_from_family(&family)
}

/// Coevents of an already enumerated family, via minimal transversals of the
/// complements of its maximal events.
pub fn coevents_from_family(family: &PrecludedFamily) -> Result<CoeventSet> {
    let n = family.space_size();
    check_cap("sample space", n, MAX_MASK_BITS)?;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut edges: Vec<u64> = family
        .maximal()
        .iter()
        .map(|m| full & !m.as_mask().expect("n ≤ 63"))
        .collect();

    if edges.is_empty() {
        // nothing precluded: every singleton is minimal
        return Ok(CoeventSet::from_masks(n, family.epsilon(), (0..n).map(|i| 1u64 << i)));
    }
    if edges.contains(&0) {
        return Err(Error::Invariant("Ω itself is precluded; μ(Ω) must exceed epsilon".into()));
    }
    edges.sort_by_key(|e| e.count_ones());
    Ok(CoeventSet::from_masks(n, family.epsilon(), minimal_transversals(&edges)))
}

/// Berge's algorithm: fold the edges in one at a time, extending every
/// transversal that misses the new edge by one of its vertices and keeping
/// only the minimal results.
fn minimal_transversals(edges: &[u64]) -> Vec<u64> {
    let mut current: Vec<u64> = vec![0];
    for &edge in edges {
        let mut next: Vec<u64> = Vec::with_capacity(current.len());
        let mut extended: Vec<u64> = Vec::new();
        for &t in &current {
            if t & edge != 0 {
                next.push(t);
            } else {
                extended.extend(mask_bits(edge).map(|v| t | 1 << v));
            }
        }
        // Kept transversals are mutually minimal already; an extension
        // survives only if no other candidate sits strictly below it.
        extended.sort_unstable_by_key(|m| (m.count_ones(), *m));
        extended.dedup();
        let kept = next.len();
        for cand in extended {
            if !next.iter().any(|&k| k & cand == k) {
                next.push(cand);
            }
        }
        debug_assert!(next[..kept].iter().all(|&a| next[kept..].iter().all(|&b| a & b != b)));
        current = next;
    }
    current
}

/// Reference scan: events in ascending size, keeping each non-preclusive one
/// that has no kept subset. Limited to [`BRUTE_FORCE_CAP`] histories.
pub fn brute_force_coevents(d: &DecoherenceMatrix, epsilon: f64) -> Result<CoeventSet> {
    let n = d.size();
    check_cap("sample space", n, BRUTE_FORCE_CAP)?;
    let family = enumerate_precluded_with_cap(d, epsilon, BRUTE_FORCE_CAP)?;
    let maximal: Vec<u64> = family.maximal().iter().map(|m| m.as_mask().unwrap()).collect();
    let mut kept: Vec<u64> = Vec::new();
    for size in 1..=n as u32 {
        for m in 1u64..(1u64 << n) {
            if m.count_ones() != size {
                continue;
            }
            let non_preclusive = maximal.iter().all(|&p| m & !p != 0);
            if non_preclusive && !kept.iter().any(|&k| k & m == k) {
                kept.push(m);
            }
        }
    }
    Ok(CoeventSet::from_masks(n, epsilon, kept))
}

/// `true` iff no support occurs in both sets. Sets must share the sample
/// space and the preclusion threshold.
pub fn coevent_sets_disjoint(a: &CoeventSet, b: &CoeventSet) -> Result<bool> {
    if a.space_size != b.space_size {
        return Err(Error::Domain("coevent sets over different sample spaces".into()));
    }
    if a.epsilon != b.epsilon {
        return Err(Error::Domain(format!(
            "coevent sets computed at different thresholds ({:e} vs {:e})",
            a.epsilon, b.epsilon
        )));
    }
    Ok(!a.coevents.iter().any(|c| b.coevents.binary_search(c).is_ok()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::SampleSpace;
    use crate::measure::{from_amplitudes, AmplitudeTable};
    use crate::system::C64;

    fn three_slit() -> DecoherenceMatrix {
        let space = SampleSpace::numbered(3).unwrap();
        let amps = [1.0, -1.0, 1.0].map(|x| C64::new(x, 0.0)).to_vec();
        from_amplitudes(&AmplitudeTable::single_class(space, amps)).unwrap()
    }

    fn supports(set: &CoeventSet) -> Vec<Vec<usize>> {
        set.supports().map(|s| s.indices().collect()).collect()
    }

    #[test]
    fn three_slit_coevents() {
        let d = three_slit();
        let fam = enumerate_precluded_with_cap(&d, 1e-9, 24).unwrap();
        let h = |l: &[&str]| d.space().event(l).unwrap();
        assert!(is_non_preclusive(&h(&["h1", "h3"]), &fam).unwrap());
        assert!(!is_non_preclusive(&h(&["h1"]), &fam).unwrap());
        assert!(is_non_preclusive(&d.space().full(), &fam).unwrap());
        assert!(is_non_preclusive(&d.space().empty(), &fam).is_err());

        assert_eq!(supports(&solve_coevents(&d, 1e-9).unwrap()), vec![vec![0, 2]]);
        assert_eq!(supports(&brute_force_coevents(&d, 1e-9).unwrap()), vec![vec![0, 2]]);
    }

    #[test]
    fn nothing_precluded_gives_singletons() {
        let d = DecoherenceMatrix::diagonal(SampleSpace::numbered(3).unwrap(), &[0.2, 0.3, 0.5]).unwrap();
        let want = vec![vec![0], vec![1], vec![2]];
        assert_eq!(supports(&solve_coevents(&d, 1e-9).unwrap()), want);
        assert_eq!(supports(&brute_force_coevents(&d, 1e-9).unwrap()), want);
    }

    #[test]
    fn classical_coevents_skip_null_histories() {
        let d = DecoherenceMatrix::diagonal(SampleSpace::numbered(4).unwrap(), &[0.5, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(supports(&solve_coevents(&d, 1e-9).unwrap()), vec![vec![0], vec![2]]);
    }

    #[test]
    fn disjointness() {
        let d = three_slit();
        let a = solve_coevents(&d, 1e-9).unwrap();
        assert!(!coevent_sets_disjoint(&a, &a).unwrap());
        let b = CoeventSet::from_supports(3, 1e-9, vec![Event::singleton(3, 1)]).unwrap();
        assert!(coevent_sets_disjoint(&a, &b).unwrap());
        let other_eps = CoeventSet::from_supports(3, 1e-6, vec![Event::singleton(3, 1)]).unwrap();
        assert!(coevent_sets_disjoint(&a, &other_eps).is_err());
        let other_space = CoeventSet::from_supports(4, 1e-9, vec![Event::singleton(4, 1)]).unwrap();
        assert!(coevent_sets_disjoint(&a, &other_space).is_err());
    }

    #[test]
    fn transversals_small_hypergraph() {
        // edges {0,1}, {1,2}: minimal transversals {1}, {0,2}
        let mut t = minimal_transversals(&[0b011, 0b110]);
        t.sort();
        assert_eq!(t, vec![0b010, 0b101]);
    }

    #[test]
    fn brute_force_cap() {
        let d = DecoherenceMatrix::diagonal(SampleSpace::numbered(13).unwrap(), &[1.0 / 13.0; 13]).unwrap();
        assert!(matches!(brute_force_coevents(&d, 1e-9), Err(Error::Capacity { .. })));
    }
}
