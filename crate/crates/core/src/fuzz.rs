//! Randomized checks of the structural results on models sampled from each family.
//!
//! Every case draws its own seed from the run seed, so a single failing case
//! can be replayed without rerunning the others.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{all_events, BaseProbability, Event, Partition};
use crate::consistency::{
    avoids_sure_loss_lower, gain_incoherence_search, hbm_is_coherent_fast, hbm_precise_check, hbm_structure,
    is_2alternating, is_2coherent_lower, is_2coherent_upper, is_2monotone, is_c_convex_lower, is_capacity,
    is_coherent_lower, is_coherent_on, is_coherent_upper, is_convex_lower, is_convex_on, is_filter,
    is_quasi_superadditive, is_subadditive, is_superadditive, is_upper_superadditive, Assessment, GainNotion,
};
use crate::document::ModelDocument;
use crate::intervals::{is_reachable, natural_extension_table, nl_equals_extended_interval, ProbabilityInterval};
use crate::nlmodel::{ModelTag, NLModel, NLParams, Orientation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Vbm,
    Hbm,
    Rrm,
    Hurwicz,
    All,
}

impl Family {
    pub const CONCRETE: [Family; 4] = [Family::Vbm, Family::Hbm, Family::Rrm, Family::Hurwicz];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Vbm => "vbm",
            Family::Hbm => "hbm",
            Family::Rrm => "rrm",
            Family::Hurwicz => "hurwicz",
            Family::All => "all",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vbm" => Ok(Family::Vbm),
            "hbm" => Ok(Family::Hbm),
            "rrm" => Ok(Family::Rrm),
            "hurwicz" => Ok(Family::Hurwicz),
            "all" => Ok(Family::All),
            other => Err(format!("unknown family {other:?} (expected vbm, hbm, rrm, hurwicz or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub cases: usize,
    pub min_atoms: usize,
    pub max_atoms: usize,
    pub seed: u64,
    pub family: Family,
    /// Parameters and base probabilities are drawn on the grid `k / denominator`.
    pub denominator: i64,
    pub checks: CheckOptions,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            cases: 100,
            min_atoms: 2,
            max_atoms: 5,
            seed: 0,
            family: Family::All,
            denominator: 60,
            checks: CheckOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Cross-check every closed-form verdict against the LP and gain oracles.
    pub oracles: bool,
    /// The two-event gain oracle solves one LP per ordered pair of events,
    /// so it only runs up to this many atoms.
    pub two_coherence_gain_max_atoms: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { oracles: true, two_coherence_gain_max_atoms: 4 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzFailure {
    pub seed: u64,
    pub check: String,
    pub family: Family,
    pub model: ModelDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub cases_run: usize,
    pub tallies: BTreeMap<String, Tally>,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn tally(&self, check: &str) -> Tally {
        self.tallies.get(check).copied().unwrap_or_default()
    }

    fn from_outcomes(outcomes: Vec<CaseOutcome>) -> FuzzReport {
        let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
        let mut failures = Vec::new();
        let cases_run = outcomes.len();
        for case in outcomes {
            for (check, ok) in &case.results {
                let t = tallies.entry(check.to_string()).or_default();
                if *ok {
                    t.passed += 1;
                } else {
                    t.failed += 1;
                    failures.push(FuzzFailure {
                        seed: case.seed,
                        check: check.to_string(),
                        family: case.family,
                        model: ModelDocument::from_model(&case.model),
                    });
                }
            }
        }
        failures.sort_by(|x, y| (x.seed, &x.check).cmp(&(y.seed, &y.check)));
        FuzzReport { cases_run, tallies, failures }
    }
}

/// One sampled model and the result of every applicable check.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub seed: u64,
    pub family: Family,
    pub model: NLModel,
    pub results: Vec<(&'static str, bool)>,
}

/// Per-case seeds, derived deterministically from the run seed.
pub fn case_seeds(config: &FuzzConfig) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.cases).map(|_| rng.gen()).collect()
}

pub fn run(config: &FuzzConfig) -> FuzzReport {
    let outcomes: Vec<CaseOutcome> = case_seeds(config).into_par_iter().map(|s| run_case(config, s)).collect();
    FuzzReport::from_outcomes(outcomes)
}

/// Reruns the single case with the given per-case seed.
pub fn replay(config: &FuzzConfig, case_seed: u64) -> FuzzReport {
    FuzzReport::from_outcomes(vec![run_case(config, case_seed)])
}

pub fn run_case(config: &FuzzConfig, case_seed: u64) -> CaseOutcome {
    let (family, model) = sample_case(config, case_seed);
    let results = check_model(&model, family, &config.checks);
    CaseOutcome { seed: case_seed, family, model, results }
}

pub fn sample_case(config: &FuzzConfig, case_seed: u64) -> (Family, NLModel) {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let family = match config.family {
        Family::All => Family::CONCRETE[rng.gen_range(0..Family::CONCRETE.len())],
        f => f,
    };
    let n = rng.gen_range(config.min_atoms..=config.max_atoms.max(config.min_atoms));
    let d = config.denominator.max(4);
    let p0 = sample_p0(&mut rng, n, d);
    let params = sample_params(&mut rng, family, d);
    (family, NLModel::new(p0, params))
}

fn sample_p0(rng: &mut ChaCha8Rng, n: usize, d: i64) -> BaseProbability {
    let partition = Partition::with_atoms(n).expect("atom count within limits");
    let support: Vec<usize> = if rng.gen_bool(0.7) {
        (0..n).collect()
    } else {
        let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if s.is_empty() {
            s.push(rng.gen_range(0..n));
        }
        s
    };
    let mut cuts: Vec<i64> = (1..support.len()).map(|_| rng.gen_range(0..=d)).collect();
    cuts.push(0);
    cuts.push(d);
    cuts.sort_unstable();
    let mut weights = vec![Rational::zero(); n];
    for (k, &atom) in support.iter().enumerate() {
        weights[atom] = Rational::new(cuts[k + 1] - cuts[k], d);
    }
    BaseProbability::new(partition, weights).expect("grid weights sum to one")
}

fn sample_params(rng: &mut ChaCha8Rng, family: Family, d: i64) -> NLParams {
    let r = |k: i64| Rational::new(k, d);
    match family {
        Family::Vbm => loop {
            let i = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(0..=d) };
            let j = if rng.gen_bool(0.1) {
                d
            } else if rng.gen_bool(0.05) {
                0
            } else {
                rng.gen_range(0..=d)
            };
            // a = -i/d, a + b = j/d
            if i + j > 0 {
                return NLParams::lower(r(-i), r(i + j));
            }
        },
        Family::Hbm => {
            let scale = if rng.gen_bool(0.5) { d } else { 5 * d };
            let alpha = r(rng.gen_range(1..=scale));
            let t = if rng.gen_bool(0.25) {
                Rational::one()
            } else if rng.gen_bool(0.05) {
                Rational::zero()
            } else {
                r(rng.gen_range(1..=d))
            };
            // a = -α, b = 1 + α + α t
            let b = &(&Rational::one() + &alpha) + &(&alpha * &t);
            NLParams::lower(-alpha, b)
        }
        Family::Rrm => {
            let i = rng.gen_range(1..=(d - 1) / 2);
            let top = d - 2 * i;
            let j = if rng.gen_bool(0.25) { top } else { rng.gen_range(1..=top) };
            NLParams::lower(r(i), r(j))
        }
        Family::Hurwicz => {
            let i = rng.gen_range(0..=d / 2);
            NLParams::lower(r(i), Rational::zero())
        }
        Family::All => unreachable!("a concrete family is chosen before sampling"),
    }
}

fn family_matches(family: Family, model: &NLModel) -> bool {
    let class = model.classify();
    match family {
        Family::Vbm => class.is_vertical_barrier(),
        Family::Hbm => class.is_horizontal_barrier(),
        Family::Rrm => class.tag == ModelTag::RestrictedRange,
        Family::Hurwicz => class.tag == ModelTag::DegenerateHurwicz,
        Family::All => class.tag != ModelTag::NotNL,
    }
}

/// Runs every check that applies to `model`, returning `(check id, passed)` pairs.
pub fn check_model(model: &NLModel, family: Family, options: &CheckOptions) -> Vec<(&'static str, bool)> {
    let mut out = Vec::new();
    let mut record = |id: &'static str, ok: bool| out.push((id, ok));
    let n = model.atoms();
    let lower_model = model.lower();
    let upper_model = model.upper();
    let lower = lower_model.to_assessment().expect("fuzzed atom counts are enumerable");
    let upper = upper_model.to_assessment().expect("fuzzed atom counts are enumerable");
    let params = lower_model.params().clone();
    let class = model.classify();
    let one = Rational::one();
    let slope_plus_twice = &params.b + &(&params.a + &params.a);

    record("family_classification", family_matches(family, model));
    record("capacity", is_capacity(&lower).holds && is_capacity(&upper).holds);
    if slope_plus_twice <= one {
        record(
            "two_coherent_when_b_plus_2a_at_most_1",
            is_2coherent_lower(&lower).holds && is_2coherent_upper(&upper).holds,
        );
    }
    if slope_plus_twice == one {
        record("lower_equals_upper_when_b_plus_2a_is_1", lower.values() == upper.values());
    }

    let coherent = is_coherent_lower(&lower).holds;
    let upper_coherent = is_coherent_upper(&upper).holds;
    record("conjugate_coherence_agrees", coherent == upper_coherent);
    let sure_loss_free = avoids_sure_loss_lower(&lower).holds;
    let c_convex = is_c_convex_lower(&lower).holds;
    let two_coherent = is_2coherent_lower(&lower).holds;
    record(
        "consistency_chain",
        (!coherent || c_convex) && (!c_convex || sure_loss_free) && (!coherent || two_coherent),
    );

    if options.oracles {
        let partial = lower.to_partial();
        record("coherence_oracle", coherent == gain_incoherence_search(&partial, GainNotion::Coherence).holds);
        record(
            "sure_loss_oracle",
            sure_loss_free == gain_incoherence_search(&partial, GainNotion::AvoidingSureLoss).holds,
        );
        record(
            "convexity_oracle",
            is_convex_lower(&lower).holds == gain_incoherence_search(&partial, GainNotion::Convexity).holds,
        );
        if n <= options.two_coherence_gain_max_atoms {
            record(
                "two_coherence_oracle",
                two_coherent == gain_incoherence_search(&partial, GainNotion::TwoCoherence).holds,
            );
        }
    }

    if coherent {
        record("coherent_implies_2monotone", is_2monotone(&lower).holds && is_2alternating(&upper).holds);
        let universal = lower.universal_events();
        let null = lower.null_events();
        record(
            "coherent_universal_events_form_filter",
            is_filter(n, &universal).holds && universal.iter().all(|e| null.contains(&e.complement())),
        );
    }

    if let Ok(interval) = ProbabilityInterval::from_model(model) {
        let reachable = is_reachable(&interval).holds;
        if options.oracles {
            record("reachability_oracle", reachable == is_coherent_on(&interval.as_lower_assessment()).holds);
        }
        if reachable && coherent {
            let (l, u) = natural_extension_table(&interval).expect("reachable interval");
            record("extension_is_least_committal", all_events(n).all(|e| l[e] <= lower[e] && upper[e] <= u[e]));
        }
    }
    let comparison = nl_equals_extended_interval(model).expect("fuzzed atom counts are enumerable");
    record("extension_closed_form_agrees", comparison.agrees());
    if class.tag == ModelTag::PariMutuel {
        record("pmm_equals_extension", comparison.verdict.holds);
    }

    if n >= 3 {
        record("two_coherent_filter_counterexample", two_coherent_non_filter(n));
    }

    if class.is_vertical_barrier() {
        record(
            "vbm_coherent_2monotone",
            coherent && is_2monotone(&lower).holds && upper_coherent && is_2alternating(&upper).holds,
        );
    }
    if class.is_horizontal_barrier() {
        record("hbm_superadditive_lower", is_superadditive(&lower).holds);
        record("hbm_upper_superadditive", is_upper_superadditive(&upper).holds);
        let subadditive = is_subadditive(&upper).holds;
        let fast_upper = hbm_is_coherent_fast(&upper_model).expect("horizontal barrier").holds;
        record("hbm_coherent_iff_subadditive", upper_coherent == subadditive && subadditive == fast_upper);
        let fast_lower = hbm_is_coherent_fast(&lower_model).expect("horizontal barrier").holds;
        record(
            "hbm_coherent_iff_quasi_superadditive",
            coherent == is_quasi_superadditive(&lower).holds && coherent == fast_lower,
        );
        if upper_coherent {
            record("hbm_coherent_implies_2alternating", is_2alternating(&upper).holds && is_2monotone(&lower).holds);
            record("hbm_coherent_is_extension", comparison.verdict.holds);
        }
        if subadditive && class.tag == ModelTag::HorizontalBarrier {
            let s = hbm_structure(model).expect("subadditive horizontal barrier");
            record("hbm_structure", s.holds(n));
        }
        record("hbm_precise_agreement", hbm_precise_check(model).expect("horizontal barrier").agrees());
    }
    if class.tag == ModelTag::RestrictedRange {
        record("rrm_coherent_iff_binary", coherent == (n == 2));
        let top = &params.a + &params.b;
        record(
            "rrm_range",
            lower.iter().filter(|(e, _)| !e.is_empty() && !e.is_full()).all(|(_, v)| *v >= params.a && *v <= top),
        );
        record("rrm_extension_iff_binary", comparison.verdict.holds == (n == 2));
    }
    if class.tag == ModelTag::DegenerateHurwicz {
        record("hurwicz_two_coherent", two_coherent);
        let inner = lower.restrict(|e| !e.is_empty() && !e.is_full());
        record("hurwicz_convex_without_trivial_events", is_convex_on(&inner).holds);
        let small = params.a <= Rational::new(1, n as i64);
        record("hurwicz_c_convex_iff_sure_loss_free_iff_small", c_convex == sure_loss_free && sure_loss_free == small);
    }
    out
}

/// A lower probability equal to 1 exactly on the events containing `A` or `B`,
/// where `A ∧ B` is non-empty and differs from both: 2-coherent, yet its
/// universal events are not closed under intersection.
pub fn two_coherent_non_filter_example(n: usize, a: Event, b: Event) -> Assessment {
    let partition = Partition::with_atoms(n).expect("atom count within limits");
    Assessment::from_fn(partition, Orientation::Lower, |e| {
        if a.subset_of(e) || b.subset_of(e) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
    .expect("enumerable")
}

fn two_coherent_non_filter(n: usize) -> bool {
    let a = Event::from_mask(n, 0b011);
    let b = Event::from_mask(n, 0b110);
    let p = two_coherent_non_filter_example(n, a, b);
    let meet = a.and(b);
    is_2coherent_lower(&p).holds
        && p[a].is_one()
        && p[b].is_one()
        && p[meet].is_zero()
        && !is_filter(n, &p.universal_events()).holds
}
