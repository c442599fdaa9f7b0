//! Finite sample spaces, events as subsets, and partitions.
//!
//! Events are positional bitsets over an ordered label list. Every event
//! remembers the size of the space it lives in; binary operations on events
//! from spaces of different size are domain errors.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{check_cap, Error, Result};

/// Default cap on `|Ω|` (or number of cells) for operations that scan all
/// `2^|Ω|` events.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Hard ceiling for mask-based scans: events are packed into a `u64`.
pub const MAX_MASK_BITS: usize = 63;

/// The ordered set of finest-grained histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl SampleSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Domain("a sample space needs at least one history".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate history label {l:?}")));
            }
        }
        Ok(Self { labels, index })
    }

    /// Histories labelled `h1 … hn`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("h{i}")))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn empty(&self) -> Event {
        Event::empty(self.size())
    }

    pub fn full(&self) -> Event {
        Event::full(self.size())
    }

    pub fn event<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        let mut ev = Event::empty(self.size());
        for l in labels {
            let l = l.as_ref();
            let i = self
                .index_of(l)
                .ok_or_else(|| Error::Domain(format!("unknown history label {l:?}")))?;
            ev.insert(i);
        }
        Ok(ev)
    }

    /// Labels of the members of `ev`, in space order.
    pub fn labels_of(&self, ev: &Event) -> Vec<String> {
        ev.indices().map(|i| self.labels[i].clone()).collect()
    }

    pub fn check_event(&self, ev: &Event) -> Result<()> {
        if ev.space_size() != self.size() {
            return Err(Error::Domain(format!(
                "event over {} histories used with a space of {}",
                ev.space_size(),
                self.size()
            )));
        }
        Ok(())
    }
}

/// A subset of a sample space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Event {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Event {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: smallvec::smallvec![0; word_count(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut ev = Self::empty(len);
        for w in ev.words.iter_mut() {
            *w = u64::MAX;
        }
        ev.trim();
        ev
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut ev = Self::empty(len);
        ev.insert(i);
        ev
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Result<Self> {
        let mut ev = Self::empty(len);
        for i in indices {
            if i >= len {
                return Err(Error::Domain(format!(
                    "history index {i} out of range for a space of {len}"
                )));
            }
            ev.insert(i);
        }
        Ok(ev)
    }

    /// Builds an event from the low `len` bits of `mask` (`len ≤ 64`).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "mask events hold at most 64 histories");
        let mut ev = Self::empty(len);
        if len > 0 {
            ev.words[0] = mask;
            ev.trim();
        }
        ev
    }

    /// The bit mask of this event, if the space fits into 64 histories.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Number of histories in the ambient space.
    pub fn space_size(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "history index {i} out of range");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "history index {i} out of range");
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Number of histories in the event.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.indices().next()
    }

    fn check_same(&self, other: &Event) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Domain(format!(
                "events over different sample spaces ({} vs {} histories)",
                self.len, other.len
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Event, f: impl Fn(u64, u64) -> u64) -> Result<Event> {
        self.check_same(other)?;
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Event {
            len: self.len,
            words,
        })
    }

    /// `A △ B`, the Boolean-ring addition.
    pub fn symmetric_difference(&self, other: &Event) -> Result<Event> {
        self.zip_with(other, |a, b| a ^ b)
    }

    /// `A ∩ B`, the Boolean-ring multiplication.
    pub fn intersection(&self, other: &Event) -> Result<Event> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.zip_with(other, |a, b| a & !b)
    }

    /// `Ω ∖ A`.
    pub fn complement(&self) -> Event {
        let mut ev = Event {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        ev.trim();
        ev
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        self.check_same(other)?;
        Ok(self
            .words
            .iter()
            .zip(other.words.iter())
            .all(|(&a, &b)| a & !b == 0))
    }

    pub fn intersects(&self, other: &Event) -> Result<bool> {
        self.check_same(other)?;
        Ok(self
            .words
            .iter()
            .zip(other.words.iter())
            .any(|(&a, &b)| a & b != 0))
    }
}

/// Canonical order: by ambient size, then by number of histories, then
/// lexicographically by member indices.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.count().cmp(&other.count()))
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

/// Returns `true` iff `cells` are nonempty, pairwise disjoint and cover the
/// space of size `len`.
pub fn is_partition(cells: &[Event], len: usize) -> bool {
    let mut seen = Event::empty(len);
    for c in cells {
        if c.space_size() != len || c.is_empty() {
            return false;
        }
        if seen.intersects(c).unwrap_or(true) {
            return false;
        }
        seen = seen.union(c).expect("sizes checked");
    }
    seen.is_full()
}

/// An exhaustive, exclusive list of nonempty cells.
///
/// Cells are stored in canonical order: sorted by their smallest history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    len: usize,
    cells: Vec<Event>,
}

impl Partition {
    pub fn new(len: usize, cells: Vec<Event>) -> Result<Self> {
        if !is_partition(&cells, len) {
            return Err(Error::Domain(
                "cells must be nonempty, pairwise disjoint and cover the sample space".into(),
            ));
        }
        let mut cells = cells;
        cells.sort_by_key(|c| c.first());
        Ok(Self { len, cells })
    }

    /// The single-cell partition `{Ω}`.
    pub fn trivial(len: usize) -> Self {
        Self {
            len,
            cells: vec![Event::full(len)],
        }
    }

    /// One cell per history.
    pub fn discrete(len: usize) -> Self {
        Self {
            len,
            cells: (0..len).map(|i| Event::singleton(len, i)).collect(),
        }
    }

    pub fn space_size(&self) -> usize {
        self.len
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Index of the cell holding history `h`.
    pub fn cell_of(&self, h: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(h))
    }

    /// `true` iff every cell of `finer` lies inside one cell of `self`.
    pub fn is_coarsening_of(&self, finer: &Partition) -> Result<bool> {
        if self.len != finer.len {
            return Err(Error::Domain("partitions over different sample spaces".into()));
        }
        for f in &finer.cells {
            let mut inside = false;
            for c in &self.cells {
                if f.is_subset(c)? {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The union of the cells selected by the low bits of `mask`.
    pub fn union_of_cells(&self, mask: u64) -> Event {
        let mut ev = Event::empty(self.len);
        for (j, c) in self.cells.iter().enumerate() {
            if mask >> j & 1 == 1 {
                ev = ev.union(c).expect("same space");
            }
        }
        ev
    }
}

/// All `2^k` unions of the `k` cells, i.e. the Boolean algebra generated by
/// the partition, as fine-grained events. Element `m` of the result is the
/// union of the cells whose bit is set in `m`.
pub fn coarse_grained_algebra(partition: &Partition) -> Result<Vec<Event>> {
    coarse_grained_algebra_with_cap(partition, DEFAULT_ENUMERATION_CAP)
}

pub fn coarse_grained_algebra_with_cap(partition: &Partition, cap: usize) -> Result<Vec<Event>> {
    let k = partition.num_cells();
    check_cap("partition cell count", k, cap.min(MAX_MASK_BITS))?;
    let mut out = Vec::with_capacity(1 << k);
    out.push(Event::empty(partition.space_size()));
    // out[m] = out[m without its top bit] ∪ cell[top bit]
    for m in 1u64..(1u64 << k) {
        let top = 63 - m.leading_zeros() as usize;
        let prev = &out[(m ^ (1 << top)) as usize];
        let ev = prev.union(&partition.cells[top]).expect("same space");
        out.push(ev);
    }
    Ok(out)
}

/// Iterates the bits of a mask, lowest first.
pub(crate) fn mask_bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}
