//! Precluded (measure-zero) events, their maximal elements, and zero covers.

use crate::error::{Error, Result};
use crate::event::{Event, DEFAULT_ENUMERATION_CAP};
use crate::measure::{DecoherenceMatrix, QuantumMeasure};

/// Every nonempty event with `μ ≤ epsilon`, in canonical order, together with
/// the inclusion-maximal ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecludedFamily {
    space_size: usize,
    epsilon: f64,
    events: Vec<Event>,
    maximal: Vec<Event>,
}

impl PrecludedFamily {
    /// Builds a family from an explicit event list; the maximal antichain is
    /// derived by pairwise inclusion.
    pub fn from_events(space_size: usize, epsilon: f64, events: Vec<Event>) -> Result<Self> {
        let mut events = events;
        for e in &events {
            if e.space_size() != space_size {
                return Err(Error::Domain("precluded event over a different sample space".into()));
            }
            if e.is_empty() {
                return Err(Error::Domain("the empty event is not listed as precluded".into()));
            }
        }
        events.sort();
        events.dedup();
        let mut maximal = Vec::new();
        for (i, e) in events.iter().enumerate() {
            let dominated = events
                .iter()
                .enumerate()
                .any(|(j, f)| i != j && e != f && e.is_subset(f).unwrap_or(false));
            if !dominated {
                maximal.push(e.clone());
            }
        }
        Ok(Self {
            space_size,
            epsilon,
            events,
            maximal,
        })
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn maximal(&self) -> &[Event] {
        &self.maximal
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Union of all precluded events.
    pub fn covered(&self) -> Event {
        self.maximal
            .iter()
            .fold(Event::empty(self.space_size), |acc, m| acc.union(m).expect("same space"))
    }
}

/// Scans all `2^|Ω|` events and keeps the nonempty ones with `μ ≤ epsilon`.
pub fn enumerate_precluded(d: &DecoherenceMatrix, epsilon: f64) -> Result<PrecludedFamily> {
    enumerate_precluded_with_cap(d, epsilon, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_precluded_with_cap(
    d: &DecoherenceMatrix,
    epsilon: f64,
    cap: usize,
) -> Result<PrecludedFamily> {
    let n = d.size();
    let mu = d.all_event_measures(cap)?;
    let precluded: Vec<bool> = mu
        .iter()
        .enumerate()
        .map(|(m, &v)| m != 0 && v <= epsilon)
        .collect();

    // strictly_below[m]: some precluded proper superset of m exists
    let full = mu.len() - 1;
    let mut strictly_below = vec![false; mu.len()];
    for m in (0..full).rev() {
        let mut free = full & !m;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            let up = m | bit;
            if precluded[up] || strictly_below[up] {
                strictly_below[m] = true;
                break;
            }
            free ^= bit;
        }
    }

    let mut events = Vec::new();
    let mut maximal = Vec::new();
    for (m, &p) in precluded.iter().enumerate() {
        if p {
            let e = Event::from_mask(n, m as u64);
            if !strictly_below[m] {
                maximal.push(e.clone());
            }
            events.push(e);
        }
    }
    events.sort();
    maximal.sort();
    Ok(PrecludedFamily {
        space_size: n,
        epsilon,
        events,
        maximal,
    })
}

/// A collection of precluded events whose union is `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCover {
    pub cover: Vec<Event>,
}

impl ZeroCover {
    /// Checks the certificate against the measure itself: members nonempty,
    /// each with `μ ≤ epsilon`, union equal to `Ω`.
    pub fn certify<M: QuantumMeasure>(&self, measure: &M, epsilon: f64) -> Result<bool> {
        let n = measure.space_size();
        let mut union = Event::empty(n);
        for e in &self.cover {
            if e.is_empty() || measure.measure(e)? > epsilon {
                return Ok(false);
            }
            union = union.union(e)?;
        }
        Ok(union.is_full())
    }
}

/// Greedily covers `Ω` with maximal precluded events, then drops members the
/// rest already cover. `None` when the maximal events leave a history out.
pub fn find_zero_cover(family: &PrecludedFamily) -> Option<ZeroCover> {
    let n = family.space_size();
    if !family.covered().is_full() {
        return None;
    }
    let mut uncovered = Event::full(n);
    let mut chosen: Vec<&Event> = Vec::new();
    while !uncovered.is_empty() {
        let best = family
            .maximal()
            .iter()
            .max_by(|a, b| {
                let ga = a.intersection(&uncovered).unwrap().count();
                let gb = b.intersection(&uncovered).unwrap().count();
                // ties go to the canonically first member
                ga.cmp(&gb).then_with(|| b.cmp(a))
            })
            .expect("covered() is full, so maximal is nonempty");
        uncovered = uncovered.difference(best).unwrap();
        chosen.push(best);
    }
    let mut i = 0;
    while i < chosen.len() {
        let rest = chosen
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Event::empty(n), |acc, (_, e)| acc.union(e).unwrap());
        if rest.is_full() {
            chosen.remove(i);
        } else {
            i += 1;
        }
    }
    let mut cover: Vec<Event> = chosen.into_iter().cloned().collect();
    cover.sort();
    Some(ZeroCover { cover })
}

/// Histories lying in at least one precluded event.
pub fn singleton_covered(family: &PrecludedFamily) -> Vec<usize> {
    family.covered().indices().collect()
}
