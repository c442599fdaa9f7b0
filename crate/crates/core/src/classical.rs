//! Classical partitions, the principle (finest) classical partition, and
//! consistency of partitions under the quantum measure.

use crate::coevent::CoeventSet;
use crate::error::{check_cap, Error, Result};
use crate::event::{Event, Partition, DEFAULT_ENUMERATION_CAP};
use crate::measure::{DecoherenceMatrix, QuantumMeasure};
use crate::system::C64;

/// Cell count up to which the induced coarse valuation is checked for being
/// a homomorphism.
pub const HOMOMORPHISM_CHECK_CELLS: usize = 12;

/// Where one coevent sits relative to a partition.
#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Support inside cell `cell`; `homomorphic` is the exhaustive check of
    /// the induced valuation on the cell algebra (absent above
    /// [`HOMOMORPHISM_CHECK_CELLS`] cells).
    Inside {
        coevent: Event,
        cell: usize,
        homomorphic: Option<bool>,
    },
    /// Support meets several cells; `cells` is the witness.
    Split { coevent: Event, cells: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalityReport {
    pub partition: Partition,
    pub classical: bool,
    pub placements: Vec<Placement>,
}

fn check_spaces(p: &Partition, r: &CoeventSet) -> Result<()> {
    if p.space_size() != r.space_size() {
        return Err(Error::Domain("partition and coevents over different sample spaces".into()));
    }
    Ok(())
}

/// Induced valuation `U ↦ [R ⊆ U]` on unions of cells, checked against the
/// homomorphism condition on every coarse event: it must be the
/// characteristic map of exactly one cell.
fn induced_is_homomorphic(p: &Partition, support: &Event) -> bool {
    let k = p.num_cells();
    let truth = |mask: u64| support.is_subset(&p.union_of_cells(mask)).expect("same space");
    let atoms: Vec<usize> = (0..k).filter(|&j| truth(1 << j)).collect();
    if atoms.len() != 1 {
        return false;
    }
    let j = atoms[0];
    (0u64..1 << k).all(|u| truth(u) == (u >> j & 1 == 1))
}

/// A partition is classical iff every coevent support lies inside one cell.
pub fn is_classical_partition(p: &Partition, r: &CoeventSet) -> Result<ClassicalityReport> {
    check_spaces(p, r)?;
    let check_hom = p.num_cells() <= HOMOMORPHISM_CHECK_CELLS;
    let mut placements = Vec::with_capacity(r.len());
    let mut classical = true;
    for s in r.supports() {
        let cells: Vec<usize> = p
            .cells()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.intersects(s).expect("same space"))
            .map(|(j, _)| j)
            .collect();
        if cells.len() == 1 {
            placements.push(Placement::Inside {
                coevent: s.clone(),
                cell: cells[0],
                homomorphic: check_hom.then(|| induced_is_homomorphic(p, s)),
            });
        } else {
            classical = false;
            placements.push(Placement::Split {
                coevent: s.clone(),
                cells,
            });
        }
    }
    Ok(ClassicalityReport {
        partition: p.clone(),
        classical,
        placements,
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// The finest classical partition: unions of the connected components of
/// the coevent intersection graph, plus a singleton cell for each history
/// outside every coevent.
pub fn principle_classical_partition(r: &CoeventSet) -> Partition {
    let supports: Vec<&Event> = r.supports().collect();
    let k = supports.len();
    let mut uf = UnionFind::new(k);
    for i in 0..k {
        for j in i + 1..k {
            if supports[i].intersects(supports[j]).expect("same space") {
                uf.union(i, j);
            }
        }
    }
    let n = r.space_size();
    let mut cells: Vec<Option<Event>> = vec![None; k];
    let mut covered = Event::empty(n);
    for (i, s) in supports.iter().enumerate() {
        let root = uf.find(i);
        let cell = cells[root].get_or_insert_with(|| Event::empty(n));
        *cell = cell.union(s).expect("same space");
        covered = covered.union(s).expect("same space");
    }
    let mut cells: Vec<Event> = cells.into_iter().flatten().collect();
    cells.extend(covered.complement().indices().map(|h| Event::singleton(n, h)));
    Partition::new(n, cells).expect("components and leftovers partition Ω")
}

/// `true` iff `p` is classical and no classical partition strictly refines
/// it, decided by trying every two-way split of every multi-history cell.
pub fn verify_finest(p: &Partition, r: &CoeventSet) -> Result<bool> {
    verify_finest_with_cap(p, r, DEFAULT_ENUMERATION_CAP)
}

pub fn verify_finest_with_cap(p: &Partition, r: &CoeventSet, cap: usize) -> Result<bool> {
    if !is_classical_partition(p, r)?.classical {
        return Ok(false);
    }
    for cell in p.cells() {
        let size = cell.count();
        if size < 2 {
            continue;
        }
        check_cap("partition cell", size, cap.min(63))?;
        let members: Vec<usize> = cell.indices().collect();
        let inside: Vec<Vec<usize>> = r
            .supports()
            .filter(|s| s.is_subset(cell).expect("same space"))
            .map(|s| {
                // support as a mask over the cell's local positions
                members
                    .iter()
                    .enumerate()
                    .filter(|(_, &h)| s.contains(h))
                    .map(|(pos, _)| pos)
                    .collect()
            })
            .collect();
        let local: Vec<u64> = inside
            .iter()
            .map(|v| v.iter().fold(0u64, |m, &pos| m | 1 << pos))
            .collect();
        let full = (1u64 << size) - 1;
        // splits X ∪ (cell∖X) with position 0 in X, both parts nonempty
        let mut x = 1u64;
        while x < full {
            if x & 1 == 1 && local.iter().all(|&s| s & !x == 0 || s & x == 0) {
                return Ok(false);
            }
            x += 1;
        }
    }
    Ok(true)
}

/// How strictly [`is_consistent_partition`] reads "no interference".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Consistency {
    /// `μ(C_i ⊔ C_j) = μ(C_i) + μ(C_j)` for every pair of cells.
    #[default]
    Additive,
    /// The full block sum `Σ_{h∈C_i, g∈C_j} D(h,g)` vanishes, imaginary part
    /// included.
    Strict,
}

/// Pairwise non-interference of the cells of `p` within `tol`.
pub fn is_consistent_partition(d: &DecoherenceMatrix, p: &Partition, tol: f64) -> Result<bool> {
    is_consistent_partition_with(d, p, tol, Consistency::Additive)
}

pub fn is_consistent_partition_with(
    d: &DecoherenceMatrix,
    p: &Partition,
    tol: f64,
    mode: Consistency,
) -> Result<bool> {
    if p.space_size() != d.size() {
        return Err(Error::Domain("partition and measure over different sample spaces".into()));
    }
    let cells = p.cells();
    match mode {
        Consistency::Additive => {
            let mu: Vec<f64> = cells.iter().map(|c| d.measure(c)).collect::<Result<_>>()?;
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    let joint = d.measure(&cells[i].union(&cells[j])?)?;
                    if (joint - mu[i] - mu[j]).abs() > tol {
                        return Ok(false);
                    }
                }
            }
        }
        Consistency::Strict => {
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    let mut block = C64::new(0.0, 0.0);
                    for h in cells[i].indices() {
                        for g in cells[j].indices() {
                            block += d.entry(h, g);
                        }
                    }
                    if block.norm() > tol {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
