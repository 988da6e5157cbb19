//! Stake-based oracles: search for bets at the assessed prices whose gain is
//! negative on every atom.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PartialAssessment, Verdict, Witness};
use crate::algebra::Event;
use crate::lp::{solve, LinearProgram, LpResult, Relation, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GainNotion {
    #[serde(rename = "coherence")]
    Coherence,
    #[serde(rename = "asl")]
    AvoidingSureLoss,
    #[serde(rename = "2coherence")]
    TwoCoherence,
    #[serde(rename = "convexity")]
    Convexity,
}

impl fmt::Display for GainNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainNotion::Coherence => "coherence",
            GainNotion::AvoidingSureLoss => "asl",
            GainNotion::TwoCoherence => "2coherence",
            GainNotion::Convexity => "convexity",
        })
    }
}

impl FromStr for GainNotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "coherence" => Ok(GainNotion::Coherence),
            "asl" => Ok(GainNotion::AvoidingSureLoss),
            "2coherence" => Ok(GainNotion::TwoCoherence),
            "convexity" => Ok(GainNotion::Convexity),
            other => Err(format!("unknown gain notion {other:?}")),
        }
    }
}

/// A net stake on one assessed event: the bet pays `stake · (I_A - value)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stake {
    pub event: Event,
    pub value: Rational,
    pub stake: Rational,
}

/// Stakes together with the resulting gain on each atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainWitness {
    pub notion: GainNotion,
    /// The event whose price is the one permitted negative stake, if the notion has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Event>,
    pub stakes: Vec<Stake>,
    pub gains: Vec<Rational>,
}

impl GainWitness {
    pub fn max_gain(&self) -> Rational {
        self.gains.iter().max().cloned().expect("at least one atom")
    }

    fn recompute(stakes: &[Stake], atoms: usize) -> Vec<Rational> {
        (0..atoms)
            .map(|w| {
                stakes
                    .iter()
                    .map(|s| {
                        let ind = if s.event.contains_atom(w) { Rational::one() } else { Rational::zero() };
                        &s.stake * &(&ind - &s.value)
                    })
                    .sum()
            })
            .collect()
    }

    /// Recomputes the gains from the stakes and checks that each stake prices
    /// an event at a value the assessment gives it, that the sign pattern is
    /// admissible for the notion, and that the gain is negative everywhere.
    pub fn verify(&self, assessment: &PartialAssessment) -> bool {
        let priced =
            self.stakes.iter().all(|s| assessment.entries().iter().any(|(e, v)| *e == s.event && *v == s.value));
        let gains = Self::recompute(&self.stakes, assessment.atoms());
        let mut negative_stakes = self.stakes.iter().filter(|s| s.stake.is_negative());
        let signs = match self.notion {
            GainNotion::AvoidingSureLoss => negative_stakes.next().is_none(),
            GainNotion::Coherence | GainNotion::Convexity => negative_stakes.all(|s| Some(s.event) == self.target),
            GainNotion::TwoCoherence => {
                let events: Vec<Event> = self.stakes.iter().map(|s| s.event).collect();
                events.len() <= 2 && negative_stakes.count() <= 1
            }
        };
        let convex_normalized = self.notion != GainNotion::Convexity || {
            // positive stakes sum to the unit stake on the target
            let net: Rational = self.stakes.iter().map(|s| s.stake.clone()).sum();
            net.is_zero()
        };
        priced && signs && convex_normalized && gains == self.gains && gains.iter().all(Rational::is_negative)
    }

    /// The same bets described as bets on the upper events `¬A` at `1 - value`.
    pub(crate) fn mirrored(self) -> GainWitness {
        let one = Rational::one();
        GainWitness {
            notion: self.notion,
            target: self.target.map(Event::complement),
            stakes: self
                .stakes
                .into_iter()
                .map(|s| Stake { event: s.event.complement(), value: &one - &s.value, stake: -s.stake })
                .collect(),
            gains: self.gains,
        }
    }
}

/// Searches for stakes giving a uniformly negative gain under `notion`.
/// The verdict holds when no such stakes exist.
pub fn gain_incoherence_search(assessment: &PartialAssessment, notion: GainNotion) -> Verdict {
    let found = match notion {
        GainNotion::AvoidingSureLoss => sure_loss_stakes(assessment),
        GainNotion::Coherence => sure_loss_stakes(assessment)
            .map(|mut w| {
                w.notion = GainNotion::Coherence;
                w
            })
            .or_else(|| (0..assessment.len()).find_map(|k| coherence_stakes(assessment, k))),
        GainNotion::Convexity => (0..assessment.len()).find_map(|k| convexity_stakes(assessment, k)),
        GainNotion::TwoCoherence => two_coherence_stakes(assessment),
    };
    match found {
        Some(w) => {
            assert!(w.verify(assessment), "gain witness failed re-verification: {w:?}");
            Verdict::fails(Witness::Stakes(w))
        }
        None => Verdict::holds(),
    }
}

/// `I_A(ω) - v` for each atom `ω`.
fn column(event: Event, value: &Rational, atoms: usize) -> Vec<Rational> {
    (0..atoms).map(|w| if event.contains_atom(w) { Rational::one() - value } else { -value.clone() }).collect()
}

fn run(lp: &LinearProgram) -> LpResult {
    solve(lp).expect("internally built gain program is well formed")
}

/// LP over per-entry stake variables `σ_j` with `Σ_j σ_j (I_j(ω) - v_j) ≤ -1` on every atom.
/// `free` lists entries whose stake may be negative.
fn negative_gain_program(assessment: &PartialAssessment, free: &[usize]) -> LinearProgram {
    let m = assessment.len();
    let n = assessment.atoms();
    let columns: Vec<Vec<Rational>> = assessment.entries().iter().map(|(e, v)| column(*e, v, n)).collect();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); m]);
    for w in 0..n {
        let row = columns.iter().map(|c| c[w].clone()).collect();
        lp.constrain(row, Relation::Le, -Rational::one());
    }
    for &k in free {
        lp.set_free(k);
    }
    lp
}

fn witness_from(
    assessment: &PartialAssessment,
    notion: GainNotion,
    target: Option<Event>,
    net: &[Rational],
) -> GainWitness {
    let stakes: Vec<Stake> = assessment
        .entries()
        .iter()
        .zip(net)
        .filter(|(_, s)| !s.is_zero())
        .map(|((e, v), s)| Stake { event: *e, value: v.clone(), stake: s.clone() })
        .collect();
    let gains = GainWitness::recompute(&stakes, assessment.atoms());
    GainWitness { notion, target, stakes, gains }
}

fn sure_loss_stakes(assessment: &PartialAssessment) -> Option<GainWitness> {
    if assessment.is_empty() {
        return None;
    }
    let res = run(&negative_gain_program(assessment, &[]));
    res.is_feasible().then(|| witness_from(assessment, GainNotion::AvoidingSureLoss, None, &res.solution))
}

fn coherence_stakes(assessment: &PartialAssessment, k: usize) -> Option<GainWitness> {
    let res = run(&negative_gain_program(assessment, &[k]));
    let target = assessment.entries()[k].0;
    res.is_feasible().then(|| witness_from(assessment, GainNotion::Coherence, Some(target), &res.solution))
}

fn two_coherence_stakes(assessment: &PartialAssessment) -> Option<GainWitness> {
    let m = assessment.len();
    let entries = assessment.entries();
    for k in 0..m {
        for j in 0..m {
            let pair = if j == k {
                PartialAssessment::new(assessment.atoms(), vec![entries[k].clone()])
            } else {
                PartialAssessment::new(assessment.atoms(), vec![entries[j].clone(), entries[k].clone()])
            }
            .expect("entries come from a valid assessment");
            let free = if j == k { vec![0] } else { vec![1] };
            let res = run(&negative_gain_program(&pair, &free));
            if res.is_feasible() {
                let target = Some(entries[k].0);
                return Some(witness_from(&pair, GainNotion::TwoCoherence, target, &res.solution));
            }
        }
    }
    None
}

/// Stakes `s_j ≥ 0` summing to one against a unit stake on entry `k`; minimizes
/// the largest gain `t` over atoms.
fn convexity_stakes(assessment: &PartialAssessment, k: usize) -> Option<GainWitness> {
    let m = assessment.len();
    let n = assessment.atoms();
    let entries = assessment.entries();
    let columns: Vec<Vec<Rational>> = entries.iter().map(|(e, v)| column(*e, v, n)).collect();
    let mut objective = vec![Rational::zero(); m + 1];
    objective[m] = Rational::one();
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    let mut sum = vec![Rational::one(); m + 1];
    sum[m] = Rational::zero();
    lp.constrain(sum, Relation::Eq, Rational::one());
    for w in 0..n {
        let mut row: Vec<Rational> = columns.iter().map(|c| c[w].clone()).collect();
        row.push(-Rational::one());
        lp.constrain(row, Relation::Le, columns[k][w].clone());
    }
    lp.set_free(m);
    let res = run(&lp);
    let best = res.optimum.expect("convexity gain program is feasible and bounded below");
    if !best.is_negative() {
        return None;
    }
    let mut net: Vec<Rational> = res.solution[..m].to_vec();
    net[k] -= Rational::one();
    let w = witness_from(assessment, GainNotion::Convexity, Some(entries[k].0), &net);
    debug_assert_eq!(w.max_gain(), best);
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ev(n: usize, idx: &[usize]) -> Event {
        Event::from_indices(n, idx).unwrap()
    }

    #[test]
    fn hurwicz_sure_loss_found_and_verified() {
        let n = 4;
        let entries = crate::algebra::all_events(n)
            .map(|e| {
                let v = if e.is_empty() {
                    q(0, 1)
                } else if e.is_full() {
                    q(1, 1)
                } else {
                    q(3, 10)
                };
                (e, v)
            })
            .collect();
        let pa = PartialAssessment::new(n, entries).unwrap();
        let v = gain_incoherence_search(&pa, GainNotion::AvoidingSureLoss);
        assert!(!v.holds);
        let Some(Witness::Stakes(w)) = v.witness else { panic!("expected stakes") };
        assert!(w.verify(&pa));
        assert!(w.stakes.iter().all(|s| !s.stake.is_negative()));
    }

    #[test]
    fn uniform_stakes_on_atoms_give_the_hurwicz_loss() {
        // 1/n on each atom priced at a gives max gain 1/n - a
        let n = 4;
        let a = q(3, 10);
        let stakes: Vec<Stake> =
            (0..n).map(|i| Stake { event: ev(n, &[i]), value: a.clone(), stake: q(1, n as i64) }).collect();
        let gains = GainWitness::recompute(&stakes, n);
        assert!(gains.iter().all(|g| *g == q(1, 4) - q(3, 10)));
    }

    #[test]
    fn single_event_outside_unit_interval_fails_two_coherence() {
        let pa = PartialAssessment::new(2, vec![(ev(2, &[0]), q(3, 2))]).unwrap();
        assert!(!gain_incoherence_search(&pa, GainNotion::TwoCoherence).holds);
        assert!(!gain_incoherence_search(&pa, GainNotion::AvoidingSureLoss).holds);
        let pa = PartialAssessment::new(2, vec![(ev(2, &[0]), q(-1, 2))]).unwrap();
        assert!(!gain_incoherence_search(&pa, GainNotion::Coherence).holds);
        assert!(gain_incoherence_search(&pa, GainNotion::AvoidingSureLoss).holds);
    }

    #[test]
    fn complementary_pair_above_one_is_not_two_coherent() {
        let pa = PartialAssessment::new(2, vec![(ev(2, &[0]), q(3, 5)), (ev(2, &[1]), q(3, 5))]).unwrap();
        let v = gain_incoherence_search(&pa, GainNotion::TwoCoherence);
        assert!(!v.holds);
    }

    #[test]
    fn precise_probability_passes_every_notion() {
        let n = 3;
        let p = [q(1, 6), q(1, 3), q(1, 2)];
        let entries =
            crate::algebra::all_events(n).map(|e| (e, e.atom_indices().map(|i| p[i].clone()).sum())).collect();
        let pa = PartialAssessment::new(n, entries).unwrap();
        for notion in
            [GainNotion::Coherence, GainNotion::AvoidingSureLoss, GainNotion::TwoCoherence, GainNotion::Convexity]
        {
            assert!(gain_incoherence_search(&pa, notion).holds, "{notion}");
        }
    }

    #[test]
    fn mirrored_witness_keeps_gains() {
        let pa = PartialAssessment::new(2, vec![(ev(2, &[0]), q(3, 5)), (ev(2, &[1]), q(3, 5))]).unwrap();
        let Some(Witness::Stakes(w)) = gain_incoherence_search(&pa, GainNotion::AvoidingSureLoss).witness else {
            panic!()
        };
        let m = w.clone().mirrored();
        assert_eq!(GainWitness::recompute(&m.stakes, 2), w.gains);
    }

    #[test]
    fn notion_names_round_trip() {
        for notion in
            [GainNotion::Coherence, GainNotion::AvoidingSureLoss, GainNotion::TwoCoherence, GainNotion::Convexity]
        {
            assert_eq!(notion.to_string().parse::<GainNotion>().unwrap(), notion);
        }
        assert!("bogus".parse::<GainNotion>().is_err());
    }
}
