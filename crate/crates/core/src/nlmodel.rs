//! Nearly-linear measures: an affine transform `b·P0(A) + a` of a base
//! probability, clipped to `[0, 1]`, with `μ(∅) = 0` and `μ(Ω) = 1` fixed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{all_events, enumeration_cap, BaseProbability, Event, Partition};
use crate::consistency::Assessment;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Lower,
    Upper,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Lower => Orientation::Upper,
            Orientation::Upper => Orientation::Lower,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Lower => "lower",
            Orientation::Upper => "upper",
        })
    }
}

/// Intercept `a` and slope `b` of a measure, read as a lower or an upper probability.
///
/// `a` is always the intercept of *this* measure; for an upper probability it
/// plays the role usually written `c`. The conjugate intercept `1 - (a + b)` is
/// derived on demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NLParams {
    pub a: Rational,
    pub b: Rational,
    pub orientation: Orientation,
}

impl NLParams {
    pub fn new(a: Rational, b: Rational, orientation: Orientation) -> Self {
        NLParams { a, b, orientation }
    }

    pub fn lower(a: Rational, b: Rational) -> Self {
        Self::new(a, b, Orientation::Lower)
    }

    pub fn upper(a: Rational, b: Rational) -> Self {
        Self::new(a, b, Orientation::Upper)
    }

    /// Intercept of the conjugate measure.
    pub fn c(&self) -> Rational {
        Rational::one() - (&self.a + &self.b)
    }

    pub fn conjugate(&self) -> NLParams {
        NLParams { a: self.c(), b: self.b.clone(), orientation: self.orientation.flip() }
    }

    /// Swaps the reading of a constant (`b = 0`) measure whose level exceeds 1/2,
    /// so that the lower member of the pair is the smaller one.
    pub fn normalized(&self) -> NLParams {
        if self.b.is_zero() {
            let lower_a = self.as_lower().a;
            let half = Rational::new(1, 2);
            if lower_a > half && lower_a <= Rational::one() {
                return NLParams { orientation: self.orientation.flip(), ..self.clone() };
            }
        }
        self.clone()
    }

    /// Parameters of the lower-probability member of the conjugate pair.
    pub fn as_lower(&self) -> NLParams {
        match self.orientation {
            Orientation::Lower => self.clone(),
            Orientation::Upper => self.conjugate(),
        }
    }

    pub fn as_upper(&self) -> NLParams {
        match self.orientation {
            Orientation::Upper => self.clone(),
            Orientation::Lower => self.conjugate(),
        }
    }

    pub fn classify(&self) -> ModelClass {
        let lower = self.normalized().as_lower();
        let (a, b) = (&lower.a, &lower.b);
        let zero = Rational::zero();
        let one = Rational::one();
        let half = Rational::new(1, 2);
        let sum = a + b;
        let slope_plus_twice = b + &(a + a);
        let tag = if b.is_negative() {
            ModelTag::NotNL
        } else if b.is_zero() {
            if *a >= zero && *a <= half {
                ModelTag::DegenerateHurwicz
            } else {
                ModelTag::NotNL
            }
        } else if sum.is_zero() {
            ModelTag::Vacuous
        } else if a.is_zero() && b.is_one() {
            ModelTag::BaseProbabilityItself
        } else if a.is_zero() && *b < one {
            ModelTag::EpsilonContamination
        } else if sum.is_one() && a.is_negative() {
            ModelTag::PariMutuel
        } else if *a <= zero && sum > zero && sum < one {
            ModelTag::VerticalBarrier
        } else if sum > one && slope_plus_twice <= one {
            ModelTag::HorizontalBarrier
        } else if a.is_positive() && slope_plus_twice <= one {
            ModelTag::RestrictedRange
        } else {
            ModelTag::NotNL
        };
        ModelClass { tag, b_plus_2a_eq_1: slope_plus_twice.is_one(), a_plus_b_eq_1: sum.is_one() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "PMM")]
    PariMutuel,
    EpsilonContamination,
    Vacuous,
    BaseProbabilityItself,
    #[serde(rename = "VBM")]
    VerticalBarrier,
    #[serde(rename = "HBM")]
    HorizontalBarrier,
    #[serde(rename = "RRM")]
    RestrictedRange,
    DegenerateHurwicz,
    NotNL,
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::PariMutuel => "PMM",
            ModelTag::EpsilonContamination => "EpsilonContamination",
            ModelTag::Vacuous => "Vacuous",
            ModelTag::BaseProbabilityItself => "BaseProbabilityItself",
            ModelTag::VerticalBarrier => "VBM",
            ModelTag::HorizontalBarrier => "HBM",
            ModelTag::RestrictedRange => "RRM",
            ModelTag::DegenerateHurwicz => "DegenerateHurwicz",
            ModelTag::NotNL => "NotNL",
        })
    }
}

/// The most specific family a parameter pair belongs to, plus the two boundary
/// equalities where families meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelClass {
    pub tag: ModelTag,
    pub b_plus_2a_eq_1: bool,
    pub a_plus_b_eq_1: bool,
}

impl ModelClass {
    /// `a ≤ 0` and `0 ≤ a + b ≤ 1`: the vertical barrier family with its special cases.
    pub fn is_vertical_barrier(&self) -> bool {
        matches!(
            self.tag,
            ModelTag::VerticalBarrier
                | ModelTag::PariMutuel
                | ModelTag::EpsilonContamination
                | ModelTag::Vacuous
                | ModelTag::BaseProbabilityItself
        )
    }

    /// `a + b ≥ 1` and `b + 2a ≤ 1`, which admits the pari-mutuel boundary.
    pub fn is_horizontal_barrier(&self) -> bool {
        matches!(self.tag, ModelTag::HorizontalBarrier | ModelTag::PariMutuel)
    }
}

/// Null, universal and essential events of a measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventSets {
    pub null: Vec<Event>,
    pub universal: Vec<Event>,
    pub essential: Vec<Event>,
}

impl EventSets {
    pub fn is_null(&self, e: Event) -> bool {
        self.null.contains(&e)
    }

    pub fn is_universal(&self, e: Event) -> bool {
        self.universal.contains(&e)
    }

    pub fn is_essential(&self, e: Event) -> bool {
        self.essential.contains(&e)
    }
}

/// Gap between upper and lower probability of one event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Imprecision {
    pub gap: Rational,
    /// The event is essential for both members, where the gap is the constant `1 - (b + 2a)`.
    pub constant_gap: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NLModel {
    p0: BaseProbability,
    params: NLParams,
}

impl NLModel {
    pub fn new(p0: BaseProbability, params: NLParams) -> Self {
        NLModel { p0, params }
    }

    pub fn partition(&self) -> &Partition {
        self.p0.partition()
    }

    pub fn atoms(&self) -> usize {
        self.p0.partition().len()
    }

    pub fn p0(&self) -> &BaseProbability {
        &self.p0
    }

    pub fn params(&self) -> &NLParams {
        &self.params
    }

    pub fn orientation(&self) -> Orientation {
        self.params.orientation
    }

    pub fn classify(&self) -> ModelClass {
        self.params.classify()
    }

    pub fn evaluate(&self, event: Event) -> Result<Rational> {
        self.partition().check_event(event)?;
        Ok(self.evaluate_unchecked(event))
    }

    pub(crate) fn evaluate_unchecked(&self, event: Event) -> Rational {
        if event.is_empty() {
            return Rational::zero();
        }
        if event.is_full() {
            return Rational::one();
        }
        let raw = self.raw(event);
        raw.clamp_to(&Rational::zero(), &Rational::one())
    }

    /// The unclipped affine value `b·P0(A) + a`.
    pub fn raw(&self, event: Event) -> Rational {
        &(&self.params.b * &self.p0.value_unchecked(event)) + &self.params.a
    }

    pub fn conjugate(&self) -> NLModel {
        NLModel { p0: self.p0.clone(), params: self.params.conjugate() }
    }

    /// The lower-probability member of the conjugate pair.
    pub fn lower(&self) -> NLModel {
        match self.params.orientation {
            Orientation::Lower => self.clone(),
            Orientation::Upper => self.conjugate(),
        }
    }

    pub fn upper(&self) -> NLModel {
        match self.params.orientation {
            Orientation::Upper => self.clone(),
            Orientation::Lower => self.conjugate(),
        }
    }

    /// Null, universal and essential events from the threshold form
    /// `P0(A) ≤ -a/b` / `P0(A) ≥ (1-a)/b`.
    pub fn event_sets(&self) -> Result<EventSets> {
        self.partition().check_enumerable()?;
        let n = self.atoms();
        let (a, b) = (&self.params.a, &self.params.b);
        let one = Rational::one();
        let mut sets = EventSets { null: Vec::new(), universal: Vec::new(), essential: Vec::new() };
        for e in all_events(n) {
            let (is_null, is_universal) = if e.is_empty() {
                (true, false)
            } else if e.is_full() {
                (false, true)
            } else if b.is_positive() {
                let p = self.p0.value_unchecked(e);
                (p <= -(a / b), p >= (&one - a) / b)
            } else {
                // constant measure: the level alone decides
                (*a <= Rational::zero(), *a >= one)
            };
            if is_null {
                sets.null.push(e);
            } else if is_universal {
                sets.universal.push(e);
            } else {
                sets.essential.push(e);
            }
        }
        Ok(sets)
    }

    pub fn imprecision(&self, event: Event) -> Result<Imprecision> {
        self.partition().check_event(event)?;
        let lower = self.lower();
        let upper = lower.conjugate();
        let lo = lower.evaluate_unchecked(event);
        let up = upper.evaluate_unchecked(event);
        let zero = Rational::zero();
        let one = Rational::one();
        let essential = |v: &Rational| *v > zero && *v < one;
        let constant_gap = essential(&lo) && essential(&up);
        let gap = &up - &lo;
        if constant_gap {
            let p = lower.params();
            debug_assert_eq!(gap, &one - &(&p.b + &(&p.a + &p.a)));
        }
        Ok(Imprecision { gap, constant_gap })
    }

    pub fn to_assessment(&self) -> Result<Assessment> {
        self.to_assessment_capped(enumeration_cap())
    }

    pub fn to_assessment_capped(&self, cap: usize) -> Result<Assessment> {
        if self.atoms() > cap {
            return Err(Error::EnumerationCap { atoms: self.atoms(), cap });
        }
        let values = all_events(self.atoms()).map(|e| self.evaluate_unchecked(e)).collect();
        Assessment::new(self.partition().clone(), values, self.orientation())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn model(weights: &[Rational], a: Rational, b: Rational) -> NLModel {
        let p = Partition::with_atoms(weights.len()).unwrap();
        NLModel::new(BaseProbability::new(p, weights.to_vec()).unwrap(), NLParams::lower(a, b))
    }

    fn precise_hbm() -> NLModel {
        model(&[q(1, 50), q(1, 50), q(24, 25)], q(-3, 20), q(5, 4))
    }

    fn ev(n: usize, idx: &[usize]) -> Event {
        Event::from_indices(n, idx).unwrap()
    }

    #[test]
    fn evaluate_worked_examples() {
        let m = precise_hbm();
        assert_eq!(m.evaluate(ev(3, &[2])).unwrap(), q(1, 1));
        assert_eq!(m.raw(ev(3, &[2])), q(21, 20));
        assert_eq!(m.evaluate(ev(3, &[0])).unwrap(), q(0, 1));
        assert_eq!(m.raw(ev(3, &[0])), q(-1, 8));
        assert_eq!(m.evaluate(Event::empty(3)).unwrap(), q(0, 1));
        assert_eq!(m.evaluate(Event::full(3)).unwrap(), q(1, 1));

        let m = model(&[q(3, 10), q(7, 10), q(0, 1)], q(-1, 8), q(5, 4));
        assert_eq!(m.evaluate(ev(3, &[0])).unwrap(), q(1, 4));
    }

    #[test]
    fn boundary_values_hold_for_any_parameters() {
        let m = model(&[q(1, 2), q(1, 2)], q(5, 1), q(-7, 1));
        assert_eq!(m.evaluate(Event::empty(2)).unwrap(), q(0, 1));
        assert_eq!(m.evaluate(Event::full(2)).unwrap(), q(1, 1));
    }

    #[test]
    fn conjugate_parameters() {
        let delta = q(1, 10);
        let pmm = NLParams::lower(-delta.clone(), &Rational::one() + &delta);
        let up = pmm.conjugate();
        assert_eq!(up.a, q(0, 1));
        assert_eq!(up.b, q(11, 10));
        assert_eq!(up.orientation, Orientation::Upper);
        assert_eq!(NLParams::lower(q(-3, 20), q(5, 4)).c(), q(-1, 10));
        assert_eq!(up.conjugate(), pmm);
    }

    #[test]
    fn classification_examples() {
        let c = NLParams::lower(q(-1, 10), q(11, 10)).classify();
        assert_eq!(c.tag, ModelTag::PariMutuel);
        assert!(c.a_plus_b_eq_1);
        let c = NLParams::lower(q(-3, 20), q(5, 4)).classify();
        assert_eq!(c.tag, ModelTag::HorizontalBarrier);
        assert!(!c.b_plus_2a_eq_1);
        assert_eq!(NLParams::lower(q(1, 10), q(1, 2)).classify().tag, ModelTag::RestrictedRange);
        assert_eq!(NLParams::lower(q(-4, 1), q(17, 2)).classify().tag, ModelTag::HorizontalBarrier);
        assert_eq!(NLParams::lower(q(1, 10), q(1, 1)).classify().tag, ModelTag::NotNL);
        assert_eq!(NLParams::lower(q(-1, 4), q(1, 4)).classify().tag, ModelTag::Vacuous);
        assert_eq!(NLParams::lower(q(0, 1), q(1, 1)).classify().tag, ModelTag::BaseProbabilityItself);
        assert_eq!(NLParams::lower(q(0, 1), q(3, 10)).classify().tag, ModelTag::EpsilonContamination);
        assert_eq!(NLParams::lower(q(-1, 10), q(4, 5)).classify().tag, ModelTag::VerticalBarrier);
        assert_eq!(NLParams::lower(q(1, 3), q(0, 1)).classify().tag, ModelTag::DegenerateHurwicz);
        assert_eq!(NLParams::lower(q(3, 1), q(0, 1)).classify().tag, ModelTag::NotNL);
        assert_eq!(NLParams::lower(q(1, 1), q(-1, 2)).classify().tag, ModelTag::NotNL);
        let c = NLParams::lower(q(-1, 8), q(5, 4)).classify();
        assert_eq!(c.tag, ModelTag::HorizontalBarrier);
        assert!(c.b_plus_2a_eq_1);
    }

    #[test]
    fn upper_orientation_classifies_through_conjugate() {
        // the pari-mutuel upper NL(0, 1+δ)
        assert_eq!(NLParams::upper(q(0, 1), q(11, 10)).classify().tag, ModelTag::PariMutuel);
        // a lower NL(0, 1.1) is no family at all
        assert_eq!(NLParams::lower(q(0, 1), q(11, 10)).classify().tag, ModelTag::NotNL);
        let vbm = NLParams::lower(q(-1, 5), q(3, 5));
        assert_eq!(vbm.conjugate().classify(), vbm.classify());
    }

    #[test]
    fn hurwicz_normalization() {
        let big = NLParams::lower(q(7, 10), q(0, 1));
        assert_eq!(big.classify().tag, ModelTag::DegenerateHurwicz);
        let n = big.normalized();
        assert_eq!(n.orientation, Orientation::Upper);
        assert_eq!(n.as_lower().a, q(3, 10));
        assert_eq!(NLParams::lower(q(1, 2), q(0, 1)).normalized().orientation, Orientation::Lower);
    }

    #[test]
    fn event_sets_examples() {
        let sets = precise_hbm().event_sets().unwrap();
        let expect: Vec<Event> = vec![ev(3, &[2]), ev(3, &[0, 2]), ev(3, &[1, 2]), Event::full(3)];
        assert_eq!(sets.universal, expect);
        assert!(sets.essential.is_empty());

        let vac = model(&[q(1, 5), q(3, 10), q(1, 2)], q(-1, 2), q(1, 2));
        let sets = vac.event_sets().unwrap();
        assert_eq!(sets.null.len(), 7);
        assert_eq!(sets.universal, vec![Event::full(3)]);

        let eps = model(&[q(1, 5), q(3, 10), q(1, 2)], q(0, 1), q(1, 2));
        let sets = eps.event_sets().unwrap();
        assert_eq!(sets.null, vec![Event::empty(3)]);
        assert_eq!(sets.universal, vec![Event::full(3)]);
        assert_eq!(sets.essential.len(), 6);
    }

    #[test]
    fn imprecision_examples() {
        // PMM δ = 1/10 on an event with P0 = 1/2
        let m = model(&[q(1, 2), q(1, 4), q(1, 4)], q(-1, 10), q(11, 10));
        let imp = m.imprecision(ev(3, &[0])).unwrap();
        assert!(imp.constant_gap);
        assert_eq!(imp.gap, q(1, 10));

        let m = precise_hbm();
        let imp = m.imprecision(ev(3, &[0])).unwrap();
        assert!(!imp.constant_gap);
        assert_eq!(imp.gap, q(0, 1));

        let m = model(&[q(3, 10), q(7, 10), q(0, 1)], q(-1, 8), q(5, 4));
        for e in all_events(3) {
            assert_eq!(m.imprecision(e).unwrap().gap, q(0, 1));
        }
    }

    #[test]
    fn assessment_enumeration() {
        let a = precise_hbm().to_assessment().unwrap();
        let expect = [0, 0, 0, 0, 1, 1, 1, 1];
        // mask order: {}, w1, w2, w1w2, w3, w1w3, w2w3, Ω
        for (e, want) in all_events(3).zip(expect) {
            assert_eq!(a[e], q(want, 1));
        }
        let vac = model(&[q(1, 2), q(1, 2)], q(-1, 1), q(1, 1)).to_assessment().unwrap();
        let vals: Vec<Rational> = all_events(2).map(|e| vac[e].clone()).collect();
        assert_eq!(vals, vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);

        let big = model(&vec![q(1, 9); 9], q(0, 1), q(1, 2));
        assert!(matches!(big.to_assessment_capped(8), Err(Error::EnumerationCap { .. })));
    }
}
