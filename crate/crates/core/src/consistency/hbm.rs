//! Results specific to horizontal barrier models.

use serde::Serialize;

use super::predicates::{is_precise_probability, is_quasi_superadditive, is_subadditive};
use super::Verdict;
use crate::algebra::Event;
use crate::error::{Error, Result};
use crate::nlmodel::{ModelTag, NLModel, Orientation};
use crate::rational::Rational;

fn require_hbm(model: &NLModel) -> Result<()> {
    let class = model.classify();
    if class.is_horizontal_barrier() {
        Ok(())
    } else {
        Err(Error::NotHorizontalBarrier(class.tag.to_string()))
    }
}

/// Coherence of an HBM measure: subadditivity for the upper probability,
/// `P(A) + P(B) ≤ 1 + P(A ∧ B)` for the lower one.
pub fn hbm_is_coherent_fast(model: &NLModel) -> Result<Verdict> {
    require_hbm(model)?;
    let assessment = model.to_assessment()?;
    Ok(match model.orientation() {
        Orientation::Upper => is_subadditive(&assessment),
        Orientation::Lower => is_quasi_superadditive(&assessment),
    })
}

/// How one essential event of the upper probability is built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EssentialStructure {
    pub event: Event,
    /// The only atom of the event carrying its upper probability, if there is exactly one.
    pub omega_plus: Option<usize>,
    /// Every other atom of the event is null with base probability 0.
    pub rest_negligible: bool,
    /// An atom `ω* ≠ ω⁺` with positive upper probability and
    /// `b·P0(ω⁺) + c + b·P0(ω*) + c ≥ 1`.
    pub partner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HbmStructure {
    pub essential: Vec<EssentialStructure>,
    pub essential_atoms: Vec<usize>,
    /// `max{m, max 1/(P̄(ωi) + P̄(ωj))}` over essential atom pairs, when there are at least two.
    pub b_bound: Option<Rational>,
    pub b_exceeds_bound: bool,
    pub distinct_values: usize,
}

impl HbmStructure {
    /// Every structural claim checks out.
    pub fn holds(&self, atoms: usize) -> bool {
        self.essential.iter().all(|s| s.omega_plus.is_some() && s.rest_negligible && s.partner.is_some())
            && self.b_exceeds_bound
            && self.distinct_values <= atoms + 2
    }
}

/// Structure of the essential events of a subadditive HBM upper probability.
/// Needs `c < 0`: pari-mutuel models are rejected.
pub fn hbm_structure(model: &NLModel) -> Result<HbmStructure> {
    let tag = model.classify().tag;
    if tag != ModelTag::HorizontalBarrier {
        return Err(Error::NotHorizontalBarrier(tag.to_string()));
    }
    let upper = model.upper();
    let assessment = upper.to_assessment()?;
    if !is_subadditive(&assessment).holds {
        return Err(Error::NotSubadditive);
    }
    let n = upper.atoms();
    let zero = Rational::zero();
    let one = Rational::one();
    let atom = |i: usize| Event::from_mask(n, 1 << i);
    let value = |i: usize| assessment[atom(i)].clone();
    let essential_atoms: Vec<usize> = (0..n).filter(|&i| value(i) > zero && value(i) < one).collect();

    let essential = assessment
        .essential_events()
        .into_iter()
        .map(|e| {
            let carriers: Vec<usize> = e.atom_indices().filter(|&i| value(i) == assessment[e]).collect();
            let omega_plus = (carriers.len() == 1).then(|| carriers[0]);
            let rest_negligible = omega_plus.is_some_and(|p| {
                e.atom_indices().filter(|&i| i != p).all(|i| value(i).is_zero() && upper.p0().weight(i).is_zero())
            });
            let partner = omega_plus.and_then(|p| {
                let raw_plus = upper.raw(atom(p));
                (0..n).find(|&j| j != p && value(j) > zero && &raw_plus + &upper.raw(atom(j)) >= one)
            });
            EssentialStructure { event: e, omega_plus, rest_negligible, partner }
        })
        .collect();

    let b = &upper.params().b;
    let (b_bound, b_exceeds_bound) = if essential_atoms.len() >= 2 {
        let m = Rational::from_integer((essential_atoms.len() / 2) as i64);
        let mut bound = m;
        for (k, &i) in essential_atoms.iter().enumerate() {
            for &j in &essential_atoms[k + 1..] {
                let r = (&value(i) + &value(j)).recip();
                if r > bound {
                    bound = r;
                }
            }
        }
        let ok = *b > bound;
        (Some(bound), ok)
    } else {
        (None, true)
    };

    Ok(HbmStructure {
        essential,
        essential_atoms,
        b_bound,
        b_exceeds_bound,
        distinct_values: assessment.distinct_values(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum PreciseRoute {
    /// One atom has lower and upper probability 1, every other atom 0.
    SingleAtom { atom: usize },
    /// `a = c < 0` with exactly two essential atoms.
    TwoEssentialAtoms,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreciseCheck {
    /// The direct check on the assessment.
    pub verdict: Verdict,
    /// Coherent and matching one of the two atom patterns.
    pub pattern: bool,
    pub route: Option<PreciseRoute>,
    /// `P(A ∨ B) ≤ P(A) + P(B)` and `P(A) + P(B) ≤ 1 + P(A ∧ B)` for all pairs.
    pub inequalities: bool,
}

impl PreciseCheck {
    pub fn agrees(&self) -> bool {
        self.pattern == self.verdict.holds && self.inequalities == self.verdict.holds
    }
}

/// Precision of an HBM pair, decided three ways.
pub fn hbm_precise_check(model: &NLModel) -> Result<PreciseCheck> {
    require_hbm(model)?;
    let lower_model = model.lower();
    let lower = lower_model.to_assessment()?;
    let upper = model.upper().to_assessment()?;
    let n = lower.atoms();
    let atom = |i: usize| Event::from_mask(n, 1 << i);

    let coherent = is_quasi_superadditive(&lower).holds;
    let single = (0..n).find(|&p| {
        (0..n).all(|i| {
            let want = if i == p { Rational::one() } else { Rational::zero() };
            lower[atom(i)] == want && upper[atom(i)] == want
        })
    });
    let params = lower_model.params();
    let a = &params.a;
    let essential_atoms = (0..n).filter(|&i| lower[atom(i)].is_positive() && lower[atom(i)] < Rational::one()).count();
    let route = if let Some(p) = single {
        Some(PreciseRoute::SingleAtom { atom: p })
    } else if *a == params.c() && a.is_negative() && essential_atoms == 2 {
        Some(PreciseRoute::TwoEssentialAtoms)
    } else {
        None
    };
    let pattern = coherent && route.is_some();
    let inequalities = is_subadditive(&lower).holds && is_quasi_superadditive(&lower).holds;
    let verdict = is_precise_probability(&lower);
    Ok(PreciseCheck { verdict, pattern, route, inequalities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BaseProbability, Partition};
    use crate::nlmodel::NLParams;
    use crate::rational::q;

    fn nl(weights: &[Rational], a: Rational, b: Rational) -> NLModel {
        let p = Partition::with_atoms(weights.len()).unwrap();
        NLModel::new(BaseProbability::new(p, weights.to_vec()).unwrap(), NLParams::lower(a, b))
    }

    fn uniform3(a: Rational, b: Rational) -> NLModel {
        let t = q(1, 3);
        nl(&[t.clone(), t.clone(), t], a, b)
    }

    #[test]
    fn fast_coherence_examples() {
        assert!(!hbm_is_coherent_fast(&uniform3(q(-4, 1), q(17, 2))).unwrap().holds);
        assert!(!hbm_is_coherent_fast(&uniform3(q(-4, 1), q(17, 2)).upper()).unwrap().holds);
        let t3 = nl(&[q(1, 2), q(29, 60), q(1, 60)], q(-4, 1), q(6, 1));
        assert!(hbm_is_coherent_fast(&t3).unwrap().holds);
        assert!(hbm_is_coherent_fast(&t3.upper()).unwrap().holds);
        let t2 = nl(&[q(1, 50), q(1, 50), q(24, 25)], q(-3, 20), q(5, 4));
        assert!(hbm_is_coherent_fast(&t2).unwrap().holds);
        let vbm = nl(&[q(1, 2), q(1, 2)], q(-1, 10), q(4, 5));
        assert!(matches!(hbm_is_coherent_fast(&vbm), Err(Error::NotHorizontalBarrier(_))));
    }

    #[test]
    fn structure_of_a_coherent_zero_one_model() {
        let t3 = nl(&[q(1, 2), q(29, 60), q(1, 60)], q(-4, 1), q(6, 1));
        let s = hbm_structure(&t3).unwrap();
        assert!(s.essential_atoms.is_empty());
        assert!(s.essential.is_empty());
        assert_eq!(s.distinct_values, 2);
        assert!(s.holds(3));
    }

    #[test]
    fn structure_of_worked_precise_model() {
        let m = nl(&[q(3, 10), q(7, 10), q(0, 1)], q(-1, 8), q(5, 4));
        let s = hbm_structure(&m).unwrap();
        assert_eq!(s.essential_atoms, vec![0, 1]);
        assert_eq!(s.essential.len(), 4);
        for e in &s.essential {
            assert!(e.omega_plus.is_some() && e.rest_negligible && e.partner.is_some());
        }
        // b = 5/4 against max{1, 1/(1/4 + 3/4)}
        assert_eq!(s.b_bound, Some(q(1, 1)));
        assert!(s.holds(3));
    }

    #[test]
    fn structure_requires_subadditivity() {
        assert!(matches!(hbm_structure(&uniform3(q(-4, 1), q(17, 2))), Err(Error::NotSubadditive)));
    }

    #[test]
    fn structure_rejects_pari_mutuel() {
        // essential event {w2,w3} has two atoms of positive upper probability
        let pmm = nl(&[q(7, 12), q(7, 20), q(1, 15)], q(-11, 30), q(41, 30));
        assert!(hbm_is_coherent_fast(&pmm.upper()).unwrap().holds);
        assert!(matches!(hbm_structure(&pmm), Err(Error::NotHorizontalBarrier(_))));
    }

    #[test]
    fn precise_routes() {
        let t2 = nl(&[q(1, 50), q(1, 50), q(24, 25)], q(-3, 20), q(5, 4));
        let c = hbm_precise_check(&t2).unwrap();
        assert!(c.verdict.holds && c.agrees());
        assert_eq!(c.route, Some(PreciseRoute::SingleAtom { atom: 2 }));

        let ex = nl(&[q(3, 10), q(7, 10), q(0, 1)], q(-1, 8), q(5, 4));
        let c = hbm_precise_check(&ex).unwrap();
        assert!(c.verdict.holds && c.agrees());
        assert_eq!(c.route, Some(PreciseRoute::TwoEssentialAtoms));

        let c = hbm_precise_check(&uniform3(q(-4, 1), q(17, 2))).unwrap();
        assert!(!c.verdict.holds && c.agrees());
    }
}
