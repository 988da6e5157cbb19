//! Consistency notions for lower and upper probabilities on finite algebras.
//!
//! Each notion has a closed-form predicate where one exists and an LP oracle
//! always. Every witness is checked against the assessment before it is
//! returned; a witness that does not check out is a bug and panics.

mod assessment;
mod envelope;
mod gain;
mod hbm;
mod predicates;

use serde::Serialize;

use crate::algebra::Event;
use crate::rational::Rational;

pub use assessment::{Assessment, PartialAssessment};
pub use envelope::{
    avoids_sure_loss, avoids_sure_loss_lower, avoids_sure_loss_on, avoids_sure_loss_upper, is_c_convex,
    is_c_convex_lower, is_c_convex_on, is_c_convex_upper, is_coherent, is_coherent_lower, is_coherent_on,
    is_coherent_upper, is_convex, is_convex_lower, is_convex_on, is_convex_upper,
};
pub use gain::{gain_incoherence_search, GainNotion, GainWitness, Stake};
pub use hbm::{
    hbm_is_coherent_fast, hbm_precise_check, hbm_structure, EssentialStructure, HbmStructure, PreciseCheck,
    PreciseRoute,
};
pub use predicates::{
    is_2alternating, is_2coherent, is_2coherent_lower, is_2coherent_upper, is_2monotone, is_additive_probability,
    is_capacity, is_filter, is_ideal, is_precise_probability, is_quasi_superadditive, is_subadditive, is_superadditive,
    is_upper_superadditive,
};

/// Outcome of a consistency check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds() -> Self {
        Verdict { holds: true, witness: None }
    }

    pub fn holds_with(witness: Witness) -> Self {
        Verdict { holds: true, witness: Some(witness) }
    }

    pub fn fails(witness: Witness) -> Self {
        Verdict { holds: false, witness: Some(witness) }
    }

    pub fn fails_without_witness() -> Self {
        Verdict { holds: false, witness: None }
    }

    /// Re-expresses a verdict about a conjugate lower probability in terms of
    /// the upper probability it came from.
    pub(crate) fn mirrored(self) -> Verdict {
        Verdict { holds: self.holds, witness: self.witness.map(Witness::mirrored) }
    }
}

/// Evidence supporting a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Events violating the defining inequality, in the order the inequality names them.
    Events { events: Vec<Event> },
    /// A probability on the atoms that dominates every assessed lower value
    /// (or is dominated by every upper value).
    Dominating { probability: Vec<Rational> },
    /// For every assessed event, a dominating probability attaining its value.
    Envelope { points: Vec<EnvelopePoint> },
    /// For every assessed event, a probability and shift attaining its value.
    ShiftedEnvelope { points: Vec<ShiftedPoint> },
    /// Stakes whose gain is negative on every atom.
    Stakes(GainWitness),
    /// The reachability inequality of one atom that fails.
    Reachability { atom: usize, bound: ReachabilityBound },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReachabilityBound {
    /// `u_i + Σ_{j≠i} l_j ≤ 1`
    Upper,
    /// `l_i + Σ_{j≠i} u_j ≥ 1`
    Lower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvelopePoint {
    pub event: Event,
    pub probability: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftedPoint {
    pub event: Event,
    pub probability: Vec<Rational>,
    pub shift: Rational,
}

impl Witness {
    fn mirrored(self) -> Witness {
        match self {
            Witness::Events { events } => {
                Witness::Events { events: events.into_iter().map(Event::complement).collect() }
            }
            Witness::Dominating { probability } => Witness::Dominating { probability },
            Witness::Envelope { points } => Witness::Envelope {
                points: points
                    .into_iter()
                    .map(|p| EnvelopePoint { event: p.event.complement(), probability: p.probability })
                    .collect(),
            },
            Witness::ShiftedEnvelope { points } => Witness::ShiftedEnvelope {
                points: points
                    .into_iter()
                    .map(|p| ShiftedPoint { event: p.event.complement(), probability: p.probability, shift: -p.shift })
                    .collect(),
            },
            Witness::Stakes(g) => Witness::Stakes(g.mirrored()),
            w @ Witness::Reachability { .. } => w,
        }
    }
}

pub(crate) fn probability_of(p: &[Rational], event: Event) -> Rational {
    event.atom_indices().map(|i| p[i].clone()).sum()
}

pub(crate) fn is_probability(p: &[Rational]) -> bool {
    !p.iter().any(Rational::is_negative) && p.iter().cloned().sum::<Rational>().is_one()
}
