use proptest::prelude::*;

use nlum::algebra::all_events;
use nlum::consistency::{
    avoids_sure_loss_lower, gain_incoherence_search, is_2coherent_lower, is_c_convex_lower, is_capacity,
    is_coherent_lower, is_convex_lower, Assessment, GainNotion,
};
use nlum::document::ModelDocument;
use nlum::intervals::{is_reachable, natural_extension, ProbabilityInterval};
use nlum::lp::{solve, solve_each, LinearProgram, LpStatus, Relation, Sense};
use nlum::{q, BaseProbability, Event, ModelTag, NLModel, NLParams, Orientation, Partition, Rational};

const BOX: i64 = 5;

/// Solves a square system by Gaussian elimination; `None` if singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                let pivot_row = m[col].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x = &*x - &(&f * p);
                }
                let delta = &f * &rhs[col];
                rhs[r] = &rhs[r] - &delta;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with_last: Vec<Vec<usize>> = combinations(n - 1, k - 1);
    for c in &mut with_last {
        c.push(n - 1);
    }
    let mut out = combinations(n - 1, k);
    out.extend(with_last);
    out
}

/// Minimum over the vertices of `{x ≥ 0, x ≤ BOX, rows}`; `None` when the polytope is empty.
fn vertex_minimum(lp: &LinearProgram) -> Option<Rational> {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<Rational>, Rational)> =
        lp.constraints.iter().map(|c| (c.coefficients.clone(), c.rhs.clone())).collect();
    for i in 0..n {
        let unit: Vec<Rational> = (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect();
        planes.push((unit.clone(), Rational::zero()));
        planes.push((unit, Rational::from_integer(BOX)));
    }
    let mut best: Option<Rational> = None;
    for pick in combinations(planes.len(), n) {
        let m = pick.iter().map(|&k| planes[k].0.clone()).collect();
        let rhs = pick.iter().map(|&k| planes[k].1.clone()).collect();
        if let Some(x) = solve_square(m, rhs) {
            if lp.is_feasible_point(&x) {
                let v = lp.objective_value(&x);
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

fn arb_lp() -> impl Strategy<Value = LinearProgram> {
    (2usize..=3).prop_flat_map(|n| {
        let row = (prop::collection::vec(-3i64..=3, n), 0usize..3, -4i64..=6);
        (prop::collection::vec(-3i64..=3, n), prop::collection::vec(row, 1..=4)).prop_map(move |(obj, rows)| {
            let ints = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x)).collect::<Vec<_>>();
            let mut lp = LinearProgram::new(Sense::Minimize, ints(&obj));
            for (coef, rel, rhs) in rows {
                let relation = [Relation::Le, Relation::Eq, Relation::Ge][rel];
                lp.constrain(ints(&coef), relation, Rational::from_integer(rhs));
            }
            for i in 0..n {
                let mut unit = vec![Rational::zero(); n];
                unit[i] = Rational::one();
                lp.constrain(unit, Relation::Le, Rational::from_integer(BOX));
            }
            lp
        })
    })
}

fn arb_p0(max_atoms: usize) -> impl Strategy<Value = BaseProbability> {
    (2usize..=max_atoms).prop_flat_map(|n| {
        prop::collection::vec(0i64..=12, n - 1).prop_map(move |mut cuts| {
            cuts.push(0);
            cuts.push(12);
            cuts.sort_unstable();
            let weights = cuts.windows(2).map(|w| q(w[1] - w[0], 12)).collect();
            BaseProbability::new(Partition::with_atoms(n).unwrap(), weights).unwrap()
        })
    })
}

fn arb_model() -> impl Strategy<Value = NLModel> {
    (arb_p0(5), -24i64..=12, -6i64..=36, any::<bool>()).prop_map(|(p0, a, b, upper)| {
        let orientation = if upper { Orientation::Upper } else { Orientation::Lower };
        NLModel::new(p0, NLParams::new(q(a, 12), q(b, 12), orientation))
    })
}

/// A lower assessment on the full algebra of 2 or 3 atoms with values in sixths.
fn arb_assessment() -> impl Strategy<Value = Assessment> {
    (2usize..=3).prop_flat_map(|n| {
        prop::collection::vec(0i64..=6, 1 << n).prop_map(move |raw| {
            Assessment::from_fn(Partition::with_atoms(n).unwrap(), Orientation::Lower, |e| {
                if e.is_empty() {
                    Rational::zero()
                } else if e.is_full() {
                    Rational::one()
                } else {
                    q(raw[e.mask() as usize], 6)
                }
            })
            .unwrap()
        })
    })
}

fn arb_interval() -> impl Strategy<Value = ProbabilityInterval> {
    (2usize..=5).prop_flat_map(|n| {
        prop::collection::vec((0i64..=12, 0i64..=12), n).prop_map(move |pairs| {
            let (l, u): (Vec<Rational>, Vec<Rational>) =
                pairs.iter().map(|&(x, y)| (q(x.min(y), 12), q(x.max(y), 12))).unzip();
            ProbabilityInterval::new(Partition::with_atoms(n).unwrap(), l, u).unwrap()
        })
    })
}

/// `(min P(E), max P(E))` over probabilities within the interval, for every event.
fn lp_extension(i: &ProbabilityInterval) -> Option<Vec<(Rational, Rational)>> {
    let n = i.atoms();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::zero(); n]);
    lp.constrain(vec![Rational::one(); n], Relation::Eq, Rational::one());
    for k in 0..n {
        let mut unit = vec![Rational::zero(); n];
        unit[k] = Rational::one();
        lp.constrain(unit.clone(), Relation::Ge, i.lower_bounds()[k].clone());
        lp.constrain(unit, Relation::Le, i.upper_bounds()[k].clone());
    }
    let indicator = |e: Event| (0..n).map(move |k| if e.contains_atom(k) { Rational::one() } else { Rational::zero() });
    let minima = solve_each(&lp, &all_events(n).map(|e| indicator(e).collect()).collect::<Vec<_>>()).unwrap();
    let maxima =
        solve_each(&lp, &all_events(n).map(|e| indicator(e).map(|x| -x).collect()).collect::<Vec<_>>()).unwrap();
    if minima[0].status == LpStatus::Infeasible {
        return None;
    }
    Some(minima.into_iter().zip(maxima).map(|(lo, hi)| (lo.optimum.unwrap(), -hi.optimum.unwrap())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(lp in arb_lp()) {
        let result = solve(&lp).unwrap();
        match vertex_minimum(&lp) {
            None => prop_assert_eq!(result.status, LpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(result.status, LpStatus::Optimal);
                prop_assert_eq!(result.optimum.clone(), Some(best));
                prop_assert!(lp.is_feasible_point(&result.solution));
            }
        }
    }

    #[test]
    fn assessment_checks_agree_with_gain_search(a in arb_assessment()) {
        let partial = a.to_partial();
        let coherent = is_coherent_lower(&a).holds;
        let sure_loss_free = avoids_sure_loss_lower(&a).holds;
        let convex = is_convex_lower(&a).holds;
        let c_convex = is_c_convex_lower(&a).holds;
        let two_coherent = is_2coherent_lower(&a).holds;
        prop_assert_eq!(coherent, gain_incoherence_search(&partial, GainNotion::Coherence).holds);
        prop_assert_eq!(sure_loss_free, gain_incoherence_search(&partial, GainNotion::AvoidingSureLoss).holds);
        prop_assert_eq!(convex, gain_incoherence_search(&partial, GainNotion::Convexity).holds);
        prop_assert_eq!(two_coherent, gain_incoherence_search(&partial, GainNotion::TwoCoherence).holds);
        prop_assert!(!coherent || (c_convex && two_coherent && is_capacity(&a).holds));
        prop_assert!(!c_convex || (sure_loss_free && convex));
    }

    #[test]
    fn nl_measures_are_capacities(m in arb_model()) {
        prop_assume!(m.classify().tag != ModelTag::NotNL);
        prop_assert!(is_capacity(&m.lower().to_assessment().unwrap()).holds);
        prop_assert!(is_capacity(&m.upper().to_assessment().unwrap()).holds);
    }

    #[test]
    fn conjugation_is_an_involution(m in arb_model()) {
        prop_assert_eq!(m.conjugate().conjugate(), m.clone());
        let own = m.to_assessment().unwrap();
        let other = m.conjugate().to_assessment().unwrap();
        for e in all_events(m.atoms()) {
            prop_assert_eq!(&other[e], &(Rational::one() - &own[e.complement()]));
        }
    }

    #[test]
    fn lower_below_upper_when_b_plus_2a_at_most_1(m in arb_model()) {
        let p = m.params().as_lower();
        prop_assume!(m.classify().tag != ModelTag::NotNL);
        prop_assume!(&p.b + &(&p.a + &p.a) <= Rational::one());
        let lower = m.lower().to_assessment().unwrap();
        let upper = m.upper().to_assessment().unwrap();
        prop_assert!(all_events(m.atoms()).all(|e| lower[e] <= upper[e]));
    }

    #[test]
    fn model_documents_round_trip(m in arb_model()) {
        let text = ModelDocument::from_model(&m).to_json();
        prop_assert_eq!(ModelDocument::from_json(&text).unwrap().to_model().unwrap(), m);
    }

    #[test]
    fn natural_extension_matches_lp(i in arb_interval()) {
        let lp = lp_extension(&i);
        let reachable = is_reachable(&i).holds;
        match &lp {
            None => prop_assert!(!reachable),
            Some(bounds) => {
                let tight = (0..i.atoms()).all(|k| {
                    let atom = Event::from_indices(i.atoms(), &[k]).unwrap();
                    let (lo, hi) = &bounds[atom.mask() as usize];
                    *lo == i.lower_bounds()[k] && *hi == i.upper_bounds()[k]
                });
                prop_assert_eq!(reachable, tight);
                if reachable {
                    for e in all_events(i.atoms()) {
                        prop_assert_eq!(&natural_extension(&i, e).unwrap(), &bounds[e.mask() as usize]);
                    }
                }
            }
        }
    }

    #[test]
    fn event_algebra_laws(n in 1usize..=8, x in any::<u64>(), y in any::<u64>()) {
        let full = (1u64 << n) - 1;
        let a = Event::try_from_mask(n, x & full).unwrap();
        let b = Event::try_from_mask(n, y & full).unwrap();
        prop_assert_eq!(a.complement().complement(), a);
        prop_assert_eq!(a.union(b).unwrap().complement(), a.complement().intersection(b.complement()).unwrap());
        prop_assert_eq!(a.len() + a.complement().len(), n);
        prop_assert_eq!(a.implies(b).unwrap(), a.intersection(b).unwrap() == a);
    }
}
