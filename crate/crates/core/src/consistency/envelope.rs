//! Envelope oracles: coherence, avoiding sure loss and convexity decided by
//! optimizing over the probabilities on the atoms.

use super::gain::{gain_incoherence_search, GainNotion};
use super::{
    is_probability, probability_of, Assessment, EnvelopePoint, PartialAssessment, ShiftedPoint, Verdict, Witness,
};
use crate::algebra::Event;
use crate::lp::{solve, solve_each, LinearProgram, LpResult, Relation, Sense};
use crate::nlmodel::Orientation;
use crate::rational::Rational;

fn indicator(event: Event, atoms: usize) -> Vec<Rational> {
    (0..atoms).map(|w| if event.contains_atom(w) { Rational::one() } else { Rational::zero() }).collect()
}

/// Probabilities `P` on the atoms with `P(A) ≥ v(A)` for every entry.
/// Entries with `v ≤ 0` on a non-empty event are implied by `P ≥ 0` and skipped.
fn credal_program(assessment: &PartialAssessment) -> Option<LinearProgram> {
    let n = assessment.atoms();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); n]);
    lp.constrain(vec![Rational::one(); n], Relation::Eq, Rational::one());
    for (e, v) in assessment.entries() {
        if !v.is_positive() {
            continue;
        }
        if e.is_empty() {
            return None;
        }
        lp.constrain(indicator(*e, n), Relation::Ge, v.clone());
    }
    Some(lp)
}

fn dominates(p: &[Rational], assessment: &PartialAssessment) -> bool {
    is_probability(p) && assessment.entries().iter().all(|(e, v)| probability_of(p, *e) >= *v)
}

fn sure_loss_verdict(assessment: &PartialAssessment) -> Verdict {
    let v = gain_incoherence_search(assessment, GainNotion::AvoidingSureLoss);
    assert!(!v.holds, "credal set is empty but no sure-loss stakes exist");
    v
}

pub fn avoids_sure_loss_on(assessment: &PartialAssessment) -> Verdict {
    let Some(lp) = credal_program(assessment) else {
        return sure_loss_verdict(assessment);
    };
    let res = solve(&lp).expect("internally built credal program is well formed");
    if !res.is_feasible() {
        return sure_loss_verdict(assessment);
    }
    assert!(dominates(&res.solution, assessment), "dominating probability failed re-verification");
    Verdict::holds_with(Witness::Dominating { probability: res.solution })
}

/// Coherence as a lower probability: every value is the minimum of `P(E)` over the credal set.
pub fn is_coherent_on(assessment: &PartialAssessment) -> Verdict {
    let n = assessment.atoms();
    let Some(lp) = credal_program(assessment) else {
        return incoherent(assessment);
    };
    let objectives: Vec<Vec<Rational>> = assessment.entries().iter().map(|(e, _)| indicator(*e, n)).collect();
    let results: Vec<LpResult> = solve_each(&lp, &objectives).expect("internally built credal program is well formed");
    let mut points = Vec::with_capacity(results.len());
    for ((e, v), res) in assessment.entries().iter().zip(results) {
        match res.optimum {
            Some(min) if min == *v => points.push(EnvelopePoint { event: *e, probability: res.solution }),
            _ => return incoherent(assessment),
        }
    }
    for (pt, (_, v)) in points.iter().zip(assessment.entries()) {
        assert!(
            dominates(&pt.probability, assessment) && probability_of(&pt.probability, pt.event) == *v,
            "envelope point failed re-verification"
        );
    }
    Verdict::holds_with(Witness::Envelope { points })
}

fn incoherent(assessment: &PartialAssessment) -> Verdict {
    let v = gain_incoherence_search(assessment, GainNotion::Coherence);
    assert!(!v.holds, "envelope check failed but no incoherence stakes exist");
    v
}

/// Convexity as a lower probability: every value is `min {P(E) + t}` over pairs
/// `(P, t)` with `P(A) + t ≥ v(A)` on the whole domain.
pub fn is_convex_on(assessment: &PartialAssessment) -> Verdict {
    let n = assessment.atoms();
    if assessment.is_empty() {
        return Verdict::holds_with(Witness::ShiftedEnvelope { points: Vec::new() });
    }
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); n + 1]);
    let mut simplex = vec![Rational::one(); n];
    simplex.push(Rational::zero());
    lp.constrain(simplex, Relation::Eq, Rational::one());
    let shifted = |e: Event| {
        let mut row = indicator(e, n);
        row.push(Rational::one());
        row
    };
    for (e, v) in assessment.entries() {
        lp.constrain(shifted(*e), Relation::Ge, v.clone());
    }
    lp.set_free(n);
    let objectives: Vec<Vec<Rational>> = assessment.entries().iter().map(|(e, _)| shifted(*e)).collect();
    let results = solve_each(&lp, &objectives).expect("internally built convexity program is well formed");
    let mut points = Vec::with_capacity(results.len());
    for ((e, v), res) in assessment.entries().iter().zip(results) {
        let min = res.optimum.expect("convexity program is feasible and bounded");
        if min != *v {
            let verdict = gain_incoherence_search(assessment, GainNotion::Convexity);
            assert!(!verdict.holds, "shifted envelope check failed but no convexity stakes exist");
            return verdict;
        }
        let mut sol = res.solution;
        let shift = sol.pop().expect("shift variable");
        points.push(ShiftedPoint { event: *e, probability: sol, shift });
    }
    for pt in &points {
        let ok = is_probability(&pt.probability)
            && assessment.entries().iter().all(|(e, v)| &probability_of(&pt.probability, *e) + &pt.shift >= *v)
            && assessment
                .entries()
                .iter()
                .filter(|(e, _)| *e == pt.event)
                .any(|(_, v)| &probability_of(&pt.probability, pt.event) + &pt.shift == *v);
        assert!(ok, "shifted envelope point failed re-verification");
    }
    Verdict::holds_with(Witness::ShiftedEnvelope { points })
}

/// Convex with `∅` assessed at 0.
pub fn is_c_convex_on(assessment: &PartialAssessment) -> Verdict {
    if let Some((e, _)) = assessment.entries().iter().find(|(e, v)| e.is_empty() && !v.is_zero()) {
        return Verdict::fails(Witness::Events { events: vec![*e] });
    }
    is_convex_on(&assessment.with_empty_event())
}

pub fn avoids_sure_loss_lower(a: &Assessment) -> Verdict {
    avoids_sure_loss_on(&a.to_partial())
}

pub fn is_coherent_lower(a: &Assessment) -> Verdict {
    is_coherent_on(&a.to_partial())
}

pub fn is_convex_lower(a: &Assessment) -> Verdict {
    is_convex_on(&a.to_partial())
}

pub fn is_c_convex_lower(a: &Assessment) -> Verdict {
    is_c_convex_on(&a.to_partial())
}

/// Reads the values as upper probabilities and checks the conjugate lower.
pub fn avoids_sure_loss_upper(a: &Assessment) -> Verdict {
    avoids_sure_loss_lower(&lower_of_upper(a)).mirrored()
}

pub fn is_coherent_upper(a: &Assessment) -> Verdict {
    is_coherent_lower(&lower_of_upper(a)).mirrored()
}

pub fn is_convex_upper(a: &Assessment) -> Verdict {
    is_convex_lower(&lower_of_upper(a)).mirrored()
}

pub fn is_c_convex_upper(a: &Assessment) -> Verdict {
    is_c_convex_lower(&lower_of_upper(a)).mirrored()
}

fn lower_of_upper(a: &Assessment) -> Assessment {
    a.with_orientation(Orientation::Upper).conjugate()
}

/// Dispatches on the assessment's orientation.
pub fn avoids_sure_loss(a: &Assessment) -> Verdict {
    match a.orientation() {
        Orientation::Lower => avoids_sure_loss_lower(a),
        Orientation::Upper => avoids_sure_loss_upper(a),
    }
}

pub fn is_coherent(a: &Assessment) -> Verdict {
    match a.orientation() {
        Orientation::Lower => is_coherent_lower(a),
        Orientation::Upper => is_coherent_upper(a),
    }
}

pub fn is_convex(a: &Assessment) -> Verdict {
    match a.orientation() {
        Orientation::Lower => is_convex_lower(a),
        Orientation::Upper => is_convex_upper(a),
    }
}

pub fn is_c_convex(a: &Assessment) -> Verdict {
    match a.orientation() {
        Orientation::Lower => is_c_convex_lower(a),
        Orientation::Upper => is_c_convex_upper(a),
    }
}
