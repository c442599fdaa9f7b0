//! Multiplicative truth valuations `φ_S(A) = 1 iff S ⊆ A` and the inference
//! rules they support.

use crate::error::{check_cap, Error, Result};
use crate::event::{Event, DEFAULT_ENUMERATION_CAP};
use crate::preclusion::PrecludedFamily;

/// Size bound for operations that walk every pair of events of a truth table.
pub const TRUTH_TABLE_CAP: usize = 6;

/// The multiplicative valuation with a given nonempty support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    support: Event,
}

impl Valuation {
    pub fn new(support: Event) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Domain("a valuation needs a nonempty support".into()));
        }
        Ok(Self { support })
    }

    pub fn support(&self) -> &Event {
        &self.support
    }
}

/// `φ_S(A)`: true iff the support lies inside `A`.
pub fn evaluate(v: &Valuation, a: &Event) -> Result<bool> {
    v.support.is_subset(a)
}

/// A truth value for each of the `2^n` events, indexed by bit mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    space_size: usize,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn new(space_size: usize, values: Vec<bool>) -> Result<Self> {
        check_cap("truth table space", space_size, DEFAULT_ENUMERATION_CAP)?;
        if values.len() != 1 << space_size {
            return Err(Error::Domain(format!(
                "truth table over {space_size} histories needs {} entries",
                1usize << space_size
            )));
        }
        Ok(Self { space_size, values })
    }

    /// The table of `φ_S`.
    pub fn of_valuation(v: &Valuation) -> Result<Self> {
        let n = v.support.space_size();
        check_cap("truth table space", n, DEFAULT_ENUMERATION_CAP)?;
        let s = v.support.as_mask().expect("n ≤ 24");
        Self::new(n, (0u64..1 << n).map(|a| s & !a == 0).collect())
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn get(&self, mask: u64) -> bool {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// `t(A∩B) = t(A)·t(B)` for every pair of events.
pub fn is_multiplicative(t: &TruthTable) -> Result<bool> {
    check_cap("truth table space", t.space_size, TRUTH_TABLE_CAP)?;
    let size = 1u64 << t.space_size;
    for a in 0..size {
        for b in a..size {
            if t.get(a & b) != (t.get(a) && t.get(b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `t(A△B) = t(A) ⊕ t(B)` for every pair of events.
pub fn is_additive(t: &TruthTable) -> Result<bool> {
    check_cap("truth table space", t.space_size, TRUTH_TABLE_CAP)?;
    let size = 1u64 << t.space_size;
    for a in 0..size {
        for b in a..size {
            if t.get(a ^ b) != (t.get(a) ^ t.get(b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Recovers the support of a multiplicative table: the intersection of all
/// events it makes true. The table must equal `φ_S` everywhere.
pub fn characterize_multiplicative(t: &TruthTable) -> Result<Event> {
    if !is_multiplicative(t)? {
        return Err(Error::Domain("truth table is not multiplicative".into()));
    }
    let n = t.space_size;
    let full = (1u64 << n) - 1;
    let mut support = full;
    let mut any = false;
    for a in 0..=full {
        if t.get(a) {
            support &= a;
            any = true;
        }
    }
    if !any {
        return Err(Error::Domain("identically false table has no support".into()));
    }
    if support == 0 {
        return Err(Error::Domain("table makes the empty event true; support would be empty".into()));
    }
    for a in 0..=full {
        if t.get(a) != (support & !a == 0) {
            return Err(Error::Invariant(format!(
                "table differs from the characteristic map of its support at event {a:#b}"
            )));
        }
    }
    Ok(Event::from_mask(n, support))
}

/// `φ(P) = 0` for every precluded `P`; equivalently the support is
/// non-preclusive.
pub fn is_preclusive(v: &Valuation, family: &PrecludedFamily) -> Result<bool> {
    for p in family.events() {
        if evaluate(v, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `w` dominates `v` iff `v(A) = 1 ⇒ w(A) = 1` for all `A`, i.e.
/// `supp(w) ⊆ supp(v)`.
pub fn dominates(w: &Valuation, v: &Valuation) -> Result<bool> {
    w.support.is_subset(&v.support)
}

/// Preclusive, and no preclusive valuation has a strictly smaller support.
pub fn is_primitive(v: &Valuation, family: &PrecludedFamily) -> Result<bool> {
    is_primitive_with_cap(v, family, DEFAULT_ENUMERATION_CAP)
}

pub fn is_primitive_with_cap(v: &Valuation, family: &PrecludedFamily, cap: usize) -> Result<bool> {
    let n = v.support.space_size();
    check_cap("sample space", n, cap.min(63))?;
    if !is_preclusive(v, family)? {
        return Ok(false);
    }
    let s = v.support.as_mask().expect("n ≤ 63");
    // walk the proper nonempty submasks of the support
    let mut sub = (s - 1) & s;
    while sub != 0 {
        let w = Valuation::new(Event::from_mask(n, sub))?;
        if is_preclusive(&w, family)? {
            return Ok(false);
        }
        sub = (sub - 1) & s;
    }
    Ok(true)
}

/// Outcome of checking the inference rules on one valuation and event pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceCheck {
    /// Not (`A` true, `A → B` true, `B` false), with `A → B` encoded as `¬A ∪ B`.
    pub modus_ponens_ok: bool,
    /// Not (`A` true and `¬A` true).
    pub negation_rule_ok: bool,
    /// `A` and `¬A` both false; legal for anhomomorphic valuations.
    pub contradiction_witness: bool,
}

pub fn check_inference(v: &Valuation, a: &Event, b: &Event) -> Result<InferenceCheck> {
    let not_a = a.complement();
    let implies = not_a.union(b)?;
    let va = evaluate(v, a)?;
    let vna = evaluate(v, &not_a)?;
    let vimp = evaluate(v, &implies)?;
    let vb = evaluate(v, b)?;
    Ok(InferenceCheck {
        modus_ponens_ok: !(va && vimp && !vb),
        negation_rule_ok: !(va && vna),
        contradiction_witness: !va && !vna,
    })
}

/// Three-way reading of a question under a realized valuation: whether the
/// event is true, its complement is true, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    True,
    False,
    UndeterminedByComplement,
}

pub fn answer(v: &Valuation, a: &Event) -> Result<Answer> {
    if evaluate(v, a)? {
        Ok(Answer::True)
    } else if evaluate(v, &a.complement())? {
        Ok(Answer::False)
    } else {
        Ok(Answer::UndeterminedByComplement)
    }
}

/// Every multiplicative valuation that is preclusive for `family` and not
/// dominated by another preclusive one, found by enumerating all supports.
pub fn primitive_preclusive_valuations(family: &PrecludedFamily, cap: usize) -> Result<Vec<Valuation>> {
    let n = family.space_size();
    check_cap("sample space", n, cap.min(63))?;
    let preclusive: Vec<u64> = (1u64..1 << n)
        .filter(|&s| {
            let v = Valuation {
                support: Event::from_mask(n, s),
            };
            is_preclusive(&v, family).expect("same space")
        })
        .collect();
    let mut out = Vec::new();
    for &s in &preclusive {
        let dominated = preclusive.iter().any(|&w| w != s && w & !s == 0);
        if !dominated {
            out.push(Valuation {
                support: Event::from_mask(n, s),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(n: usize, idx: &[usize]) -> Event {
        Event::from_indices(n, idx.iter().copied()).unwrap()
    }

    fn val(n: usize, idx: &[usize]) -> Valuation {
        Valuation::new(ev(n, idx)).unwrap()
    }

    fn three_slit_family() -> PrecludedFamily {
        PrecludedFamily::from_events(3, 1e-9, vec![ev(3, &[0, 1]), ev(3, &[1, 2])]).unwrap()
    }

    #[test]
    fn evaluation() {
        let v = val(3, &[0, 2]);
        assert!(evaluate(&v, &Event::full(3)).unwrap());
        assert!(!evaluate(&v, &ev(3, &[0, 1])).unwrap());
        assert!(!evaluate(&v, &ev(3, &[2])).unwrap());
        assert!(evaluate(&v, v.support()).unwrap());
        assert!(evaluate(&v, &ev(4, &[0])).is_err());
        assert!(Valuation::new(Event::empty(3)).is_err());
    }

    #[test]
    fn multiplicativity() {
        let t = TruthTable::of_valuation(&val(3, &[1, 2])).unwrap();
        assert!(is_multiplicative(&t).unwrap());

        // t(∅) = t(Ω) = 1 only, on two histories
        let t = TruthTable::new(2, vec![true, false, false, true]).unwrap();
        assert!(!is_multiplicative(&t).unwrap());

        // parity of |A ∩ {h1,h2}|: additive, not multiplicative
        let t = TruthTable::new(2, vec![false, true, true, false]).unwrap();
        assert!(is_additive(&t).unwrap());
        assert!(!is_multiplicative(&t).unwrap());

        assert!(matches!(
            is_multiplicative(&TruthTable::new(7, vec![false; 128]).unwrap()),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn characterization() {
        let t = TruthTable::of_valuation(&val(3, &[1, 2])).unwrap();
        assert_eq!(characterize_multiplicative(&t).unwrap(), ev(3, &[1, 2]));

        let t = TruthTable::of_valuation(&val(3, &[0])).unwrap();
        assert_eq!(characterize_multiplicative(&t).unwrap(), ev(3, &[0]));

        let mut only_full = vec![false; 8];
        only_full[7] = true;
        let t = TruthTable::new(3, only_full).unwrap();
        assert_eq!(characterize_multiplicative(&t).unwrap(), Event::full(3));

        assert!(characterize_multiplicative(&TruthTable::new(3, vec![false; 8]).unwrap()).is_err());
        assert!(characterize_multiplicative(&TruthTable::new(3, vec![true; 8]).unwrap()).is_err());
    }

    #[test]
    fn preclusion_and_primitivity() {
        let fam = three_slit_family();
        assert!(is_preclusive(&val(3, &[0, 2]), &fam).unwrap());
        assert!(is_primitive(&val(3, &[0, 2]), &fam).unwrap());
        assert!(is_preclusive(&val(3, &[0, 1, 2]), &fam).unwrap());
        assert!(!is_primitive(&val(3, &[0, 1, 2]), &fam).unwrap());
        assert!(!is_preclusive(&val(3, &[0]), &fam).unwrap());

        let prim = primitive_preclusive_valuations(&fam, 6).unwrap();
        assert_eq!(prim, vec![val(3, &[0, 2])]);
    }

    #[test]
    fn domination() {
        let v = val(8, &[1, 2]);
        assert!(dominates(&v, &v).unwrap());
        assert!(dominates(&val(8, &[1]), &v).unwrap());
        assert!(!dominates(&v, &val(8, &[4, 6])).unwrap());
    }

    #[test]
    fn inference_rules() {
        let v = val(3, &[0, 2]);
        let a = ev(3, &[0, 1]);
        let c = check_inference(&v, &a, &ev(3, &[2])).unwrap();
        assert!(c.modus_ponens_ok);
        assert!(c.negation_rule_ok);
        assert!(c.contradiction_witness);
        assert_eq!(answer(&v, &a).unwrap(), Answer::UndeterminedByComplement);
        assert_eq!(answer(&v, &Event::full(3)).unwrap(), Answer::True);
        assert_eq!(answer(&v, &ev(3, &[1])).unwrap(), Answer::False);
    }
}
