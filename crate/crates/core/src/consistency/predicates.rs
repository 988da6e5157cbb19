//! Closed-form checks by exhaustive enumeration of events and event pairs.

use super::envelope::avoids_sure_loss_lower;
use super::gain::{gain_incoherence_search, GainNotion};
use super::{probability_of, Assessment, Verdict, Witness};
use crate::algebra::{all_events, Event};
use crate::nlmodel::Orientation;
use crate::rational::Rational;

fn events(list: &[Event]) -> Witness {
    Witness::Events { events: list.to_vec() }
}

/// First pair `A ⊂ A ∨ ω` (one atom added) where the value decreases.
/// Single-atom steps suffice because inclusion chains are built from them.
fn monotonicity_violation(a: &Assessment) -> Option<(Event, Event)> {
    let n = a.atoms();
    for e in a.events() {
        for w in 0..n {
            if e.contains_atom(w) {
                continue;
            }
            let bigger = e.or(Event::from_mask(n, 1 << w));
            if a[e] > a[bigger] {
                return Some((e, bigger));
            }
        }
    }
    None
}

fn boundary_violation(a: &Assessment) -> Option<Event> {
    let n = a.atoms();
    if !a[Event::empty(n)].is_zero() {
        return Some(Event::empty(n));
    }
    if !a[Event::full(n)].is_one() {
        return Some(Event::full(n));
    }
    None
}

/// `μ(∅) = 0`, `μ(Ω) = 1` and monotonicity.
pub fn is_capacity(a: &Assessment) -> Verdict {
    if let Some(e) = boundary_violation(a) {
        return Verdict::fails(events(&[e]));
    }
    if let Some((x, y)) = monotonicity_violation(a) {
        assert!(x.subset_of(y) && a[x] > a[y]);
        return Verdict::fails(events(&[x, y]));
    }
    Verdict::holds()
}

/// 2-coherence of the values read as a lower probability. For non-negative
/// values this is monotonicity, `v(A) + v(¬A) ≤ 1` and the boundary values;
/// otherwise the decision comes from the two-event gain oracle.
pub fn is_2coherent_lower(a: &Assessment) -> Verdict {
    if a.values().iter().any(Rational::is_negative) {
        return gain_incoherence_search(&a.to_partial(), GainNotion::TwoCoherence);
    }
    if let Some(e) = boundary_violation(a) {
        return Verdict::fails(events(&[e]));
    }
    if let Some((x, y)) = monotonicity_violation(a) {
        return Verdict::fails(events(&[x, y]));
    }
    let one = Rational::one();
    for e in a.events() {
        if &a[e] + &a[e.complement()] > one {
            return Verdict::fails(events(&[e, e.complement()]));
        }
    }
    Verdict::holds()
}

pub fn is_2coherent_upper(a: &Assessment) -> Verdict {
    is_2coherent_lower(&a.with_orientation(Orientation::Upper).conjugate()).mirrored()
}

pub fn is_2coherent(a: &Assessment) -> Verdict {
    match a.orientation() {
        Orientation::Lower => is_2coherent_lower(a),
        Orientation::Upper => is_2coherent_upper(a),
    }
}

/// First unordered pair `{A, B}` (in mask order) for which `bad(A, B)` holds.
fn find_pair(
    a: &Assessment,
    scope: impl Fn(Event, Event) -> bool,
    bad: impl Fn(Event, Event) -> bool,
) -> Option<(Event, Event)> {
    let all: Vec<Event> = a.events().collect();
    for (i, &x) in all.iter().enumerate() {
        for &y in &all[i..] {
            if scope(x, y) && bad(x, y) {
                return Some((x, y));
            }
        }
    }
    None
}

fn pair_verdict(found: Option<(Event, Event)>) -> Verdict {
    match found {
        Some((x, y)) => Verdict::fails(events(&[x, y])),
        None => Verdict::holds(),
    }
}

fn incomparable(x: Event, y: Event) -> bool {
    !x.subset_of(y) && !y.subset_of(x)
}

/// `v(A ∨ B) + v(A ∧ B) ≥ v(A) + v(B)` for all pairs.
pub fn is_2monotone(a: &Assessment) -> Verdict {
    pair_verdict(find_pair(a, incomparable, |x, y| &a[x.or(y)] + &a[x.and(y)] < &a[x] + &a[y]))
}

/// `v(A ∨ B) + v(A ∧ B) ≤ v(A) + v(B)` for all pairs.
pub fn is_2alternating(a: &Assessment) -> Verdict {
    pair_verdict(find_pair(a, incomparable, |x, y| &a[x.or(y)] + &a[x.and(y)] > &a[x] + &a[y]))
}

/// `v(A ∨ B) ≤ v(A) + v(B)` for all pairs.
pub fn is_subadditive(a: &Assessment) -> Verdict {
    pair_verdict(find_pair(a, |_, _| true, |x, y| a[x.or(y)] > &a[x] + &a[y]))
}

/// `v(A ∨ B) ≥ v(A) + v(B)` for disjoint pairs.
pub fn is_superadditive(a: &Assessment) -> Verdict {
    pair_verdict(find_pair(a, |x, y| x.and(y).is_empty(), |x, y| a[x.or(y)] < &a[x] + &a[y]))
}

/// `1 + v(A ∧ B) ≥ v(A) + v(B)` for all pairs.
pub fn is_quasi_superadditive(a: &Assessment) -> Verdict {
    let one = Rational::one();
    pair_verdict(find_pair(a, |_, _| true, |x, y| &one + &a[x.and(y)] < &a[x] + &a[y]))
}

/// `v(A) + v(B) ≥ 1 + v(A ∧ B)` for pairs with `A ∨ B = Ω`: the conjugate form of
/// superadditivity, for upper probabilities.
pub fn is_upper_superadditive(a: &Assessment) -> Verdict {
    let one = Rational::one();
    pair_verdict(find_pair(a, |x, y| x.or(y).is_full(), |x, y| &a[x] + &a[y] < &one + &a[x.and(y)]))
}

/// Precise probability: avoids sure loss and `v(A) + v(¬A) = 1` everywhere.
/// The additive characterization is evaluated alongside and must agree.
pub fn is_precise_probability(a: &Assessment) -> Verdict {
    let one = Rational::one();
    let verdict = match a.events().find(|e| &a[*e] + &a[e.complement()] != one) {
        Some(e) => Verdict::fails(events(&[e, e.complement()])),
        None => avoids_sure_loss_lower(&a.with_orientation(Orientation::Lower)),
    };
    let additive = is_additive_probability(a);
    assert_eq!(verdict.holds, additive.holds, "precision characterizations disagree");
    if verdict.holds {
        if let Some(Witness::Dominating { probability }) = &verdict.witness {
            assert!(a.events().all(|e| probability_of(probability, e) == a[e]));
        }
    }
    verdict
}

/// Normalization, non-negative atoms and additivity on every disjoint pair.
pub fn is_additive_probability(a: &Assessment) -> Verdict {
    if let Some(e) = boundary_violation(a) {
        return Verdict::fails(events(&[e]));
    }
    let n = a.atoms();
    if let Some(w) = (0..n).find(|&w| a[Event::from_mask(n, 1 << w)].is_negative()) {
        return Verdict::fails(events(&[Event::from_mask(n, 1 << w)]));
    }
    pair_verdict(find_pair(a, |x, y| x.and(y).is_empty(), |x, y| a[x.or(y)] != &a[x] + &a[y]))
}

/// `Ω ∈ S`, `∅ ∉ S`, closed under supersets and under intersections.
pub fn is_filter(atoms: usize, set: &[Event]) -> Verdict {
    closure_check(atoms, set, Event::full(atoms), Event::empty(atoms), false)
}

/// `∅ ∈ S`, `Ω ∉ S`, closed under subsets and under unions.
pub fn is_ideal(atoms: usize, set: &[Event]) -> Verdict {
    closure_check(atoms, set, Event::empty(atoms), Event::full(atoms), true)
}

fn closure_check(atoms: usize, set: &[Event], required: Event, forbidden: Event, downward: bool) -> Verdict {
    let mut member = vec![false; 1 << atoms];
    for e in set {
        assert_eq!(e.atom_count(), atoms, "event over the wrong partition");
        member[e.index()] = true;
    }
    let has = |e: Event| member[e.index()];
    if !has(required) {
        return Verdict::fails(events(&[required]));
    }
    if has(forbidden) {
        return Verdict::fails(events(&[forbidden]));
    }
    for x in set {
        for y in all_events(atoms) {
            let related = if downward { y.subset_of(*x) } else { x.subset_of(y) };
            if related && !has(y) {
                return Verdict::fails(events(&[*x, y]));
            }
        }
    }
    for x in set {
        for y in set {
            let combined = if downward { x.or(*y) } else { x.and(*y) };
            if !has(combined) {
                return Verdict::fails(events(&[*x, *y]));
            }
        }
    }
    Verdict::holds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BaseProbability, Partition};
    use crate::nlmodel::{NLModel, NLParams};
    use crate::rational::q;

    fn nl(weights: &[Rational], a: Rational, b: Rational) -> NLModel {
        let p = Partition::with_atoms(weights.len()).unwrap();
        NLModel::new(BaseProbability::new(p, weights.to_vec()).unwrap(), NLParams::lower(a, b))
    }

    fn ev(n: usize, idx: &[usize]) -> Event {
        Event::from_indices(n, idx).unwrap()
    }

    #[test]
    fn negative_slope_breaks_monotonicity() {
        let weights = [q(1, 5), q(3, 10), q(1, 2)];
        let (a, b) = (q(4, 5), q(-1, 2));
        let p = Partition::with_atoms(3).unwrap();
        let p0 = BaseProbability::new(p.clone(), weights.to_vec()).unwrap();
        let raw = Assessment::from_fn(p, Orientation::Lower, |e| {
            if e.is_empty() {
                q(0, 1)
            } else if e.is_full() {
                q(1, 1)
            } else {
                &(&b * &p0.value(e).unwrap()) + &a
            }
        })
        .unwrap();
        let v = is_capacity(&raw);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::Events { events: vec![ev(3, &[0]), ev(3, &[0, 1])] }));
    }

    #[test]
    fn nl_models_are_capacities() {
        let m = nl(&[q(1, 50), q(1, 50), q(24, 25)], q(-3, 20), q(5, 4));
        assert!(is_capacity(&m.to_assessment().unwrap()).holds);
        assert!(is_capacity(&m.conjugate().to_assessment().unwrap()).holds);
    }

    #[test]
    fn two_coherence_examples() {
        let rrm = nl(&[q(1, 5), q(3, 10), q(1, 2)], q(1, 10), q(1, 2));
        assert!(is_2coherent_lower(&rrm.to_assessment().unwrap()).holds);
        assert!(is_2coherent(&rrm.conjugate().to_assessment().unwrap()).holds);

        let p = Partition::with_atoms(2).unwrap();
        let bad = Assessment::from_fn(p, Orientation::Lower, |e| {
            if e.is_empty() {
                q(0, 1)
            } else if e.is_full() {
                q(1, 1)
            } else {
                q(3, 5)
            }
        })
        .unwrap();
        let v = is_2coherent_lower(&bad);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::Events { events: vec![ev(2, &[0]), ev(2, &[1])] }));
        assert!(!gain_incoherence_search(&bad.to_partial(), GainNotion::TwoCoherence).holds);
    }

    #[test]
    fn uniform_incoherent_witness_is_an_atom_pair() {
        let third = q(1, 3);
        let m = nl(&[third.clone(), third.clone(), third], q(-4, 1), q(17, 2));
        let up = m.upper().to_assessment().unwrap();
        let v = is_subadditive(&up);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::Events { events: vec![ev(3, &[0]), ev(3, &[1])] }));
        assert!(!is_quasi_superadditive(&m.lower().to_assessment().unwrap()).holds);
    }

    #[test]
    fn constant_is_two_monotone() {
        let p = Partition::with_atoms(3).unwrap();
        let c = Assessment::from_fn(p, Orientation::Lower, |_| q(2, 7)).unwrap();
        assert!(is_2monotone(&c).holds);
        assert!(is_2alternating(&c).holds);
    }

    #[test]
    fn probability_satisfies_all_inequalities() {
        let m = nl(&[q(1, 6), q(1, 3), q(1, 2)], q(0, 1), q(1, 1));
        let a = m.to_assessment().unwrap();
        for v in [
            is_subadditive(&a),
            is_superadditive(&a),
            is_quasi_superadditive(&a),
            is_upper_superadditive(&a),
            is_2monotone(&a),
            is_2alternating(&a),
            is_precise_probability(&a),
            is_additive_probability(&a),
        ] {
            assert!(v.holds);
        }
    }

    #[test]
    fn precise_examples() {
        let t2 = nl(&[q(1, 50), q(1, 50), q(24, 25)], q(-3, 20), q(5, 4));
        assert!(is_precise_probability(&t2.to_assessment().unwrap()).holds);
        let ex = nl(&[q(3, 10), q(7, 10), q(0, 1)], q(-1, 8), q(5, 4));
        assert!(is_precise_probability(&ex.to_assessment().unwrap()).holds);
        let third = q(1, 3);
        let t3 = nl(&[third.clone(), third.clone(), third], q(-4, 1), q(17, 2));
        assert!(!is_precise_probability(&t3.to_assessment().unwrap()).holds);
    }

    #[test]
    fn filters_and_ideals() {
        let n = 3;
        let up: Vec<Event> = all_events(n).filter(|e| e.contains_atom(0)).collect();
        assert!(is_filter(n, &up).holds);
        let down: Vec<Event> = all_events(n).filter(|e| !e.contains_atom(0)).collect();
        assert!(is_ideal(n, &down).holds);
        let v = is_ideal(n, &[Event::empty(n), ev(n, &[0]), ev(n, &[1])]);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::Events { events: vec![ev(n, &[0]), ev(n, &[1])] }));
        assert!(!is_filter(n, &[ev(n, &[0])]).holds);
    }
}
