//! Exact linear programming over [`Rational`]s.
//!
//! A dense two-phase tableau simplex with Bland's rule. Every answer is
//! certified against the original data before it is returned: optimal
//! solutions are substituted back into the constraints and matched with a
//! dual-feasible vector of equal objective value; infeasibility comes with a
//! Farkas vector. A certificate that does not check out is reported as
//! [`Error::MalformedProgram`] rather than silently trusted.

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VarBounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl VarBounds {
    pub fn non_negative() -> Self {
        VarBounds { lower: Some(Rational::zero()), upper: None }
    }

    pub fn free() -> Self {
        VarBounds::default()
    }

    fn admits(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| x >= l) && self.upper.as_ref().is_none_or(|u| x <= u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

impl LinearProgram {
    /// A program over `objective.len()` non-negative variables.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), bounds: vec![VarBounds::non_negative(); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint { coefficients, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, bounds: VarBounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, VarBounds::free())
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coefficients.len()
                )));
            }
        }
        Ok(())
    }

    /// Checks `x` against every constraint and bound exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        self.bounds.iter().zip(x).all(|(b, v)| b.admits(v))
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coefficients, x);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub optimum: Option<Rational>,
    /// Optimal point; a feasible point when unbounded; empty when infeasible.
    pub solution: Vec<Rational>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpResult> {
    let mut out = solve_each(lp, std::slice::from_ref(&lp.objective))?;
    Ok(out.pop().expect("one objective in, one result out"))
}

/// Optimizes several objectives over the same feasible region, running phase one once.
/// Every objective uses `lp.sense`; `lp.objective` itself is ignored.
pub fn solve_each(lp: &LinearProgram, objectives: &[Vec<Rational>]) -> Result<Vec<LpResult>> {
    lp.validate()?;
    for (k, obj) in objectives.iter().enumerate() {
        if obj.len() != lp.num_vars() {
            return Err(Error::MalformedProgram(format!(
                "objective {k} has {} coefficients for {} variables",
                obj.len(),
                lp.num_vars()
            )));
        }
    }
    let std = StandardForm::build(lp);
    let mut tab = Tableau::new(&std);
    if !tab.phase_one(&std)? {
        return Ok(objectives
            .iter()
            .map(|_| LpResult { status: LpStatus::Infeasible, optimum: None, solution: Vec::new() })
            .collect());
    }
    let mut results = Vec::with_capacity(objectives.len());
    for obj in objectives {
        let (costs, _) = std.costs(obj, lp.sense);
        let mut t = tab.clone();
        let bounded = t.phase_two(&std, &costs)?;
        let x = std.recover(&t.primal(&std));
        if !lp.is_feasible_point(&x) {
            return Err(Error::MalformedProgram("solution failed substitution check".into()));
        }
        if bounded {
            let value = dot(obj, &x);
            results.push(LpResult { status: LpStatus::Optimal, optimum: Some(value), solution: x });
        } else {
            results.push(LpResult { status: LpStatus::Unbounded, optimum: None, solution: x });
        }
    }
    Ok(results)
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

#[derive(Debug, Clone)]
enum VarMap {
    /// x = lower + y
    Shift { col: usize, lower: Rational },
    /// x = upper - y
    Mirror { col: usize, upper: Rational },
    /// x = y⁺ - y⁻
    Split { pos: usize, neg: usize },
}

/// `A y = b, y ≥ 0, b ≥ 0` with an identity block marked by `init_basis`.
struct StandardForm {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Columns before this index are structural or slack; the rest are artificial.
    first_artificial: usize,
    cols: usize,
    init_basis: Vec<usize>,
    vars: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> StandardForm {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut structural = 0;
        // (column, rhs) for upper-bound rows of shifted variables
        let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
        for b in &lp.bounds {
            match (&b.lower, &b.upper) {
                (Some(l), upper) => {
                    vars.push(VarMap::Shift { col: structural, lower: l.clone() });
                    if let Some(u) = upper {
                        bound_rows.push((structural, u - l));
                    }
                    structural += 1;
                }
                (None, Some(u)) => {
                    vars.push(VarMap::Mirror { col: structural, upper: u.clone() });
                    structural += 1;
                }
                (None, None) => {
                    vars.push(VarMap::Split { pos: structural, neg: structural + 1 });
                    structural += 2;
                }
            }
        }

        let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut row = vec![Rational::zero(); structural];
            let mut rhs = c.rhs.clone();
            for (a, m) in c.coefficients.iter().zip(&vars) {
                if a.is_zero() {
                    continue;
                }
                match m {
                    VarMap::Shift { col, lower } => {
                        row[*col] += a;
                        rhs -= a * lower;
                    }
                    VarMap::Mirror { col, upper } => {
                        row[*col] -= a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        row[*pos] += a;
                        row[*neg] -= a;
                    }
                }
            }
            raw.push((row, c.relation, rhs));
        }
        for (col, u) in bound_rows {
            let mut row = vec![Rational::zero(); structural];
            row[col] = Rational::one();
            raw.push((row, Relation::Le, u));
        }

        let slack_count = raw.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let mut slack_col = structural;
        let mut rows = Vec::with_capacity(raw.len());
        let mut rhs_out = Vec::with_capacity(raw.len());
        let mut slack_of_row: Vec<Option<(usize, bool)>> = Vec::with_capacity(raw.len());
        for (row, rel, rhs) in raw {
            let mut full = row;
            full.resize(structural + slack_count, Rational::zero());
            let slack = match rel {
                Relation::Le => {
                    full[slack_col] = Rational::one();
                    slack_col += 1;
                    Some(slack_col - 1)
                }
                Relation::Ge => {
                    full[slack_col] = -Rational::one();
                    slack_col += 1;
                    Some(slack_col - 1)
                }
                Relation::Eq => None,
            };
            let (full, rhs) =
                if rhs.is_negative() { (full.iter().map(|v| -v).collect::<Vec<_>>(), -rhs) } else { (full, rhs) };
            let unit_slack = slack.map(|s| (s, full[s].is_one()));
            rows.push(full);
            rhs_out.push(rhs);
            slack_of_row.push(unit_slack);
        }

        let first_artificial = structural + slack_count;
        let mut init_basis = Vec::with_capacity(rows.len());
        let mut art = 0;
        for s in &slack_of_row {
            match s {
                Some((col, true)) => init_basis.push(*col),
                _ => {
                    init_basis.push(first_artificial + art);
                    art += 1;
                }
            }
        }
        let cols = first_artificial + art;
        for (i, row) in rows.iter_mut().enumerate() {
            row.resize(cols, Rational::zero());
            if init_basis[i] >= first_artificial {
                row[init_basis[i]] = Rational::one();
            }
        }
        StandardForm { rows, rhs: rhs_out, first_artificial, cols, init_basis, vars }
    }

    /// Minimization costs over standard columns, plus the constant offset.
    fn costs(&self, objective: &[Rational], sense: Sense) -> (Vec<Rational>, Rational) {
        let mut c = vec![Rational::zero(); self.cols];
        let mut offset = Rational::zero();
        for (coef, m) in objective.iter().zip(&self.vars) {
            let coef = match sense {
                Sense::Minimize => coef.clone(),
                Sense::Maximize => -coef,
            };
            if coef.is_zero() {
                continue;
            }
            match m {
                VarMap::Shift { col, lower } => {
                    c[*col] += &coef;
                    offset += &coef * lower;
                }
                VarMap::Mirror { col, upper } => {
                    c[*col] -= &coef;
                    offset += &coef * upper;
                }
                VarMap::Split { pos, neg } => {
                    c[*pos] += &coef;
                    c[*neg] -= &coef;
                }
            }
        }
        (c, offset)
    }

    fn recover(&self, y: &[Rational]) -> Vec<Rational> {
        self.vars
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, lower } => lower + &y[*col],
                VarMap::Mirror { col, upper } => upper - &y[*col],
                VarMap::Split { pos, neg } => &y[*pos] - &y[*neg],
            })
            .collect()
    }

    fn column_dot(&self, y: &[Rational], col: usize) -> Rational {
        let mut acc = Rational::zero();
        for (yi, row) in y.iter().zip(&self.rows) {
            if !yi.is_zero() && !row[col].is_zero() {
                acc += yi * &row[col];
            }
        }
        acc
    }
}

#[derive(Clone)]
struct Tableau {
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs, with `-objective` in the last slot.
    obj: Vec<Rational>,
}

impl Tableau {
    fn new(std: &StandardForm) -> Tableau {
        let t = std
            .rows
            .iter()
            .zip(&std.rhs)
            .map(|(row, b)| {
                let mut r = row.clone();
                r.push(b.clone());
                r
            })
            .collect();
        Tableau { t, basis: std.init_basis.clone(), obj: Vec::new() }
    }

    fn rhs_col(&self) -> usize {
        self.obj.len() - 1
    }

    fn price(&mut self, costs: &[Rational]) {
        let mut obj: Vec<Rational> = costs.to_vec();
        obj.push(Rational::zero());
        for (row, &b) in self.t.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                if !v.is_zero() {
                    *o -= cb * v;
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let width = self.t[r].len();
        let piv = self.t[r][j].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..width).filter(|&k| !self.t[r][k].is_zero()).collect();
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for &k in &nz {
                row[k] -= &f * &pivot_row[k];
            }
        }
        if !self.obj[j].is_zero() {
            let f = self.obj[j].clone();
            for &k in &nz {
                self.obj[k] -= &f * &pivot_row[k];
            }
        }
        self.basis[r] = j;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false if unbounded.
    fn iterate(&mut self, allowed: usize) -> bool {
        let rhs = self.rhs_col();
        loop {
            let Some(j) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[j];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }

    fn dual(&self, std: &StandardForm, costs: &[Rational]) -> Vec<Rational> {
        (0..self.t.len())
            .map(|i| {
                let col = std.init_basis[i];
                let mut acc = Rational::zero();
                for (row, &b) in self.t.iter().zip(&self.basis) {
                    if !costs[b].is_zero() && !row[col].is_zero() {
                        acc += &costs[b] * &row[col];
                    }
                }
                acc
            })
            .collect()
    }

    fn primal(&self, std: &StandardForm) -> Vec<Rational> {
        let rhs = self.rhs_col();
        let mut y = vec![Rational::zero(); std.cols];
        for (row, &b) in self.t.iter().zip(&self.basis) {
            y[b] = row[rhs].clone();
        }
        y
    }

    /// Returns whether the program is feasible, leaving a feasible basis with no
    /// artificial column at a nonzero level.
    fn phase_one(&mut self, std: &StandardForm) -> Result<bool> {
        if std.first_artificial == std.cols {
            self.price(&vec![Rational::zero(); std.cols]);
            return Ok(true);
        }
        let mut costs = vec![Rational::zero(); std.cols];
        for c in costs.iter_mut().skip(std.first_artificial) {
            *c = Rational::one();
        }
        self.price(&costs);
        let finished = self.iterate(std.cols);
        debug_assert!(finished, "phase one is bounded below by zero");
        let infeasibility = -&self.obj[self.rhs_col()];
        if infeasibility.is_positive() {
            // Farkas: y'A ≤ 0 on real columns and y'b > 0.
            let y = self.dual(std, &costs);
            let yb: Rational = y.iter().zip(&std.rhs).map(|(a, b)| a * b).sum();
            let ok = yb.is_positive() && (0..std.first_artificial).all(|j| !std.column_dot(&y, j).is_positive());
            if !ok {
                return Err(Error::MalformedProgram("infeasibility certificate failed".into()));
            }
            return Ok(false);
        }
        for r in 0..self.t.len() {
            if self.basis[r] < std.first_artificial {
                continue;
            }
            if let Some(j) = (0..std.first_artificial).find(|&j| !self.t[r][j].is_zero()) {
                self.pivot(r, j);
            }
        }
        Ok(true)
    }

    /// Returns false if the objective is unbounded below.
    fn phase_two(&mut self, std: &StandardForm, costs: &[Rational]) -> Result<bool> {
        self.price(costs);
        if !self.iterate(std.first_artificial) {
            return Ok(false);
        }
        // Dual feasibility and equal objective values certify optimality.
        let y = self.dual(std, costs);
        for (j, c) in costs.iter().enumerate().take(std.first_artificial) {
            if (c - &std.column_dot(&y, j)).is_negative() {
                return Err(Error::MalformedProgram("optimality certificate failed".into()));
            }
        }
        let yb: Rational = y.iter().zip(&std.rhs).map(|(a, b)| a * b).sum();
        let x = self.primal(std);
        let cx = dot(costs, &x);
        if yb != cx || -&self.obj[self.rhs_col()] != cx {
            return Err(Error::MalformedProgram("duality gap in optimality certificate".into()));
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  → (2, 6), 36
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(3), r(5)]);
        lp.constrain(vec![r(1), r(0)], Relation::Le, r(4)).constrain(vec![r(0), r(2)], Relation::Le, r(12)).constrain(
            vec![r(3), r(2)],
            Relation::Le,
            r(18),
        );
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.optimum, Some(r(36)));
        assert_eq!(res.solution, vec![r(2), r(6)]);
    }

    #[test]
    fn fractional_optimum_with_equalities() {
        // min x + y s.t. 3x + y = 2, x + 3y ≥ 2 → x = y = 1/2
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(1), r(1)]);
        lp.constrain(vec![r(3), r(1)], Relation::Eq, r(2)).constrain(vec![r(1), r(3)], Relation::Ge, r(2));
        let res = solve(&lp).unwrap();
        assert_eq!(res.optimum, Some(r(1)));
        assert_eq!(res.solution, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(1)]);
        lp.constrain(vec![r(1)], Relation::Ge, r(2)).constrain(vec![r(1)], Relation::Le, r(1));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1), r(-1)]);
        lp.constrain(vec![r(1), r(-1)], Relation::Ge, r(-1));
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Unbounded);
        assert!(lp.is_feasible_point(&res.solution));
    }

    #[test]
    fn free_and_bounded_variables() {
        // min t s.t. t ≥ -3/2 - x, x ∈ [-1, 2], t free → x = 2, t = -7/2
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(0), r(1)]);
        lp.set_bounds(0, VarBounds { lower: Some(r(-1)), upper: Some(r(2)) }).set_free(1);
        lp.constrain(vec![r(1), r(1)], Relation::Ge, q(-3, 2));
        let res = solve(&lp).unwrap();
        assert_eq!(res.optimum, Some(q(-7, 2)));
        assert_eq!(res.solution, vec![r(2), q(-7, 2)]);

        // upper bound only: max x, x ≤ 5/3
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1)]);
        lp.set_bounds(0, VarBounds { lower: None, upper: Some(q(5, 3)) });
        assert_eq!(solve(&lp).unwrap().optimum, Some(q(5, 3)));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![q(-3, 4), r(150), q(-1, 50), r(6)]);
        lp.constrain(vec![q(1, 4), r(-60), q(-1, 25), r(9)], Relation::Le, r(0))
            .constrain(vec![q(1, 2), r(-90), q(-1, 50), r(3)], Relation::Le, r(0))
            .constrain(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1));
        let res = solve(&lp).unwrap();
        assert_eq!(res.optimum, Some(q(-1, 20)));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1), r(2)]);
        lp.constrain(vec![r(1), r(1)], Relation::Eq, r(1)).constrain(vec![r(2), r(2)], Relation::Eq, r(2));
        let res = solve(&lp).unwrap();
        assert_eq!(res.optimum, Some(r(2)));
    }

    #[test]
    fn malformed_programs_are_errors() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(1), r(1)]);
        lp.constrain(vec![r(1)], Relation::Le, r(1));
        assert!(matches!(solve(&lp), Err(Error::MalformedProgram(_))));
        let lp = LinearProgram::new(Sense::Minimize, vec![r(1)]);
        assert!(solve_each(&lp, &[vec![r(1), r(2)]]).is_err());
    }

    #[test]
    fn vacuous_envelope_minimum_is_zero() {
        // min P(w1) over all probabilities on 3 atoms dominating the vacuous lower.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(1), r(0), r(0)]);
        lp.constrain(vec![r(1); 3], Relation::Eq, r(1));
        for mask in 1u32..7 {
            let row = (0..3).map(|i| if mask >> i & 1 == 1 { r(1) } else { r(0) }).collect();
            lp.constrain(row, Relation::Ge, r(0));
        }
        assert_eq!(solve(&lp).unwrap().optimum, Some(r(0)));
    }

    #[test]
    fn solve_each_matches_individual_solves() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(0); 3]);
        lp.constrain(vec![r(1); 3], Relation::Eq, r(1))
            .constrain(vec![r(1), r(1), r(0)], Relation::Ge, q(1, 3))
            .constrain(vec![r(0), r(1), r(1)], Relation::Ge, q(1, 2));
        let objectives = vec![vec![r(1), r(0), r(0)], vec![r(0), r(1), r(0)], vec![r(1), r(1), r(0)]];
        let batch = solve_each(&lp, &objectives).unwrap();
        for (obj, res) in objectives.iter().zip(&batch) {
            let mut single = lp.clone();
            single.objective = obj.clone();
            assert_eq!(solve(&single).unwrap().optimum, res.optimum);
        }
        assert_eq!(batch[0].optimum, Some(r(0)));
        assert_eq!(batch[2].optimum, Some(q(1, 3)));
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1), r(1), r(1)]);
        lp.constrain(vec![r(1), r(1), r(1)], Relation::Le, r(1));
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a, b);
    }
}
