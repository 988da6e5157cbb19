//! Probability intervals on a finite partition and their natural extension.

use serde::Serialize;

use crate::algebra::{all_events, Event, Partition};
use crate::consistency::{Assessment, PartialAssessment, ReachabilityBound, Verdict, Witness};
use crate::error::{Error, Result};
use crate::nlmodel::{ModelTag, NLModel, Orientation};
use crate::rational::Rational;

/// Bounds `[l_i, u_i]` on the probability of each atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityInterval {
    partition: Partition,
    l: Vec<Rational>,
    u: Vec<Rational>,
}

impl ProbabilityInterval {
    pub fn new(partition: Partition, l: Vec<Rational>, u: Vec<Rational>) -> Result<Self> {
        let n = partition.len();
        if l.len() != n || u.len() != n {
            return Err(Error::InvalidInterval(format!(
                "{n} atoms but {} lower and {} upper bounds",
                l.len(),
                u.len()
            )));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for i in 0..n {
            if l[i] < zero || l[i] > u[i] || u[i] > one {
                return Err(Error::InvalidInterval(format!(
                    "atom {} needs 0 <= l <= u <= 1, got [{}, {}]",
                    partition.label(i),
                    l[i],
                    u[i]
                )));
            }
        }
        Ok(ProbabilityInterval { partition, l, u })
    }

    /// The lower and upper probabilities of the atoms under a model.
    pub fn from_model(model: &NLModel) -> Result<Self> {
        let lower = model.lower();
        let upper = model.upper();
        let atoms: Vec<Event> = model.partition().atoms().collect();
        let l = atoms.iter().map(|e| lower.evaluate_unchecked(*e)).collect();
        let u = atoms.iter().map(|e| upper.evaluate_unchecked(*e)).collect();
        Self::new(model.partition().clone(), l, u)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn atoms(&self) -> usize {
        self.partition.len()
    }

    pub fn lower_bounds(&self) -> &[Rational] {
        &self.l
    }

    pub fn upper_bounds(&self) -> &[Rational] {
        &self.u
    }

    /// Lower probabilities on the atoms and on their complements
    /// (`1 - u_i` on `¬ω_i`). On two atoms the complements are atoms again,
    /// so those events appear twice.
    pub fn as_lower_assessment(&self) -> PartialAssessment {
        let n = self.atoms();
        let one = Rational::one();
        let mut entries: Vec<(Event, Rational)> =
            (0..n).map(|i| (Event::from_mask(n, 1 << i), self.l[i].clone())).collect();
        entries.extend((0..n).map(|i| (Event::from_mask(n, 1 << i).complement(), &one - &self.u[i])));
        PartialAssessment::new(n, entries).expect("events built over this partition")
    }
}

/// `u_i + Σ_{j≠i} l_j ≤ 1` and `l_i + Σ_{j≠i} u_j ≥ 1` for every atom.
pub fn is_reachable(interval: &ProbabilityInterval) -> Verdict {
    let one = Rational::one();
    let sum_l: Rational = interval.l.iter().cloned().sum();
    let sum_u: Rational = interval.u.iter().cloned().sum();
    for i in 0..interval.atoms() {
        if &(&interval.u[i] + &sum_l) - &interval.l[i] > one {
            return Verdict::fails(Witness::Reachability { atom: i, bound: ReachabilityBound::Upper });
        }
        if &(&interval.l[i] + &sum_u) - &interval.u[i] < one {
            return Verdict::fails(Witness::Reachability { atom: i, bound: ReachabilityBound::Lower });
        }
    }
    Verdict::holds()
}

fn describe(interval: &ProbabilityInterval, verdict: &Verdict) -> String {
    match &verdict.witness {
        Some(Witness::Reachability { atom, bound }) => {
            let label = interval.partition.label(*atom);
            match bound {
                ReachabilityBound::Upper => format!("u({label}) + sum of the other lower bounds exceeds 1"),
                ReachabilityBound::Lower => format!("l({label}) + sum of the other upper bounds is below 1"),
            }
        }
        _ => "unreachable".into(),
    }
}

fn require_reachable(interval: &ProbabilityInterval) -> Result<()> {
    let v = is_reachable(interval);
    if v.holds {
        Ok(())
    } else {
        Err(Error::Unreachable(describe(interval, &v)))
    }
}

fn extended_lower(interval: &ProbabilityInterval, event: Event) -> Rational {
    let one = Rational::one();
    let inside: Rational = event.atom_indices().map(|i| interval.l[i].clone()).sum();
    let outside: Rational = event.complement().atom_indices().map(|i| interval.u[i].clone()).sum();
    inside.max(&one - &outside)
}

/// Natural extension `(l(A), u(A))` of a reachable interval.
pub fn natural_extension(interval: &ProbabilityInterval, event: Event) -> Result<(Rational, Rational)> {
    interval.partition.check_event(event)?;
    require_reachable(interval)?;
    let lower = extended_lower(interval, event);
    let upper = Rational::one() - extended_lower(interval, event.complement());
    Ok((lower, upper))
}

/// Natural extension on every event, as a lower and an upper assessment.
pub fn natural_extension_table(interval: &ProbabilityInterval) -> Result<(Assessment, Assessment)> {
    require_reachable(interval)?;
    let p = interval.partition.clone();
    let lower = Assessment::from_fn(p.clone(), Orientation::Lower, |e| extended_lower(interval, e))?;
    let upper =
        Assessment::from_fn(p, Orientation::Upper, |e| Rational::one() - extended_lower(interval, e.complement()))?;
    Ok((lower, upper))
}

/// Which closed-form characterization applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormRule {
    /// Vertical barrier: contamination, pari-mutuel, at most three atoms, or one of the
    /// three conditions for more atoms.
    VerticalBarrier,
    /// A coherent horizontal barrier model always matches.
    CoherentHorizontalBarrier,
    /// A restricted range model matches exactly on two atoms.
    RestrictedRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionComparison {
    /// Eventwise comparison; on failure the witness is the first event that differs
    /// or the failing reachability inequality.
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<ClosedFormRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<bool>,
}

impl ExtensionComparison {
    /// The closed form, where one applies, matches the eventwise comparison.
    pub fn agrees(&self) -> bool {
        self.closed_form.is_none_or(|c| c == self.verdict.holds)
    }
}

/// Whether the model equals the natural extension of its restriction to the atoms.
pub fn nl_equals_extended_interval(model: &NLModel) -> Result<ExtensionComparison> {
    model.partition().check_enumerable()?;
    let verdict = brute_force(model);
    let (rule, closed_form) = closed_form(model);
    Ok(ExtensionComparison { verdict, rule, closed_form })
}

fn brute_force(model: &NLModel) -> Verdict {
    let interval = match ProbabilityInterval::from_model(model) {
        Ok(i) => i,
        Err(_) => {
            let n = model.atoms();
            let lower = model.lower();
            let upper = model.upper();
            let bad = (0..n)
                .map(|i| Event::from_mask(n, 1 << i))
                .find(|e| lower.evaluate_unchecked(*e) > upper.evaluate_unchecked(*e))
                .expect("an NL model's atom values lie in [0, 1]");
            return Verdict::fails(Witness::Events { events: vec![bad] });
        }
    };
    let reach = is_reachable(&interval);
    if !reach.holds {
        return reach;
    }
    let lower = model.lower();
    for e in all_events(model.atoms()) {
        if extended_lower(&interval, e) != lower.evaluate_unchecked(e) {
            return Verdict::fails(Witness::Events { events: vec![e] });
        }
    }
    Verdict::holds()
}

fn closed_form(model: &NLModel) -> (Option<ClosedFormRule>, Option<bool>) {
    let class = model.classify();
    let n = model.atoms();
    if class.is_vertical_barrier() {
        return (Some(ClosedFormRule::VerticalBarrier), Some(vertical_barrier_rule(model)));
    }
    match class.tag {
        ModelTag::RestrictedRange => (Some(ClosedFormRule::RestrictedRange), Some(n == 2)),
        ModelTag::HorizontalBarrier => {
            let coherent = crate::consistency::hbm_is_coherent_fast(&model.lower())
                .expect("classified as a horizontal barrier model")
                .holds;
            if coherent {
                (Some(ClosedFormRule::CoherentHorizontalBarrier), Some(true))
            } else {
                (None, None)
            }
        }
        _ => (None, None),
    }
}

fn vertical_barrier_rule(model: &NLModel) -> bool {
    let params = model.params().as_lower();
    let n = model.atoms();
    if params.a.is_zero() || (&params.a + &params.b).is_one() || n <= 3 {
        return true;
    }
    let lower = model.lower();
    let vacuous = (&params.a + &params.b).is_zero();
    let large_events_only =
        all_events(n).filter(|e| !e.is_full() && lower.evaluate_unchecked(*e).is_positive()).all(|e| e.len() == n - 1);
    model.p0().is_degenerate() || vacuous || large_events_only
}
