//! A small exact linear-program solver.
//!
//! Dense two-phase simplex over `BigRational` with Bland's pivot rule.
//! Nothing here is clever: the lexicographic-minimax pipeline produces
//! heavily degenerate programs, so termination (Bland) and exactness
//! (rationals end to end) matter more than speed. Desk scale only.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

/// Minimization program. Variables are nonnegative unless their `nonneg`
/// flag is cleared, in which case they are free (unbounded below).
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub nonneg: Vec<bool>,
    pub objective: Vec<BigRational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// A program over `num_vars` nonnegative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            nonneg: vec![true; num_vars],
            objective: vec![BigRational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    fn validate(&self) -> Result<()> {
        if self.nonneg.len() != self.num_vars || self.objective.len() != self.num_vars {
            return Err(Error::dims("objective or bound vector length differs from num_vars"));
        }
        if let Some(c) = self.constraints.iter().find(|c| c.coeffs.len() != self.num_vars) {
            return Err(Error::dims(format!(
                "constraint has {} coefficients, program has {} variables",
                c.coeffs.len(),
                self.num_vars
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<BigRational>, value: BigRational },
    Infeasible,
    Unbounded,
}

/// Column layout of the standard-form tableau: every original variable
/// contributes a `plus` column, free variables also a `minus` column, then
/// slack/surplus columns, then artificials.
struct VarMap {
    plus: Vec<usize>,
    minus: Vec<Option<usize>>,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    cost: Vec<BigRational>,
    value: BigRational,
    cols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    /// Recomputes reduced costs and objective value for `raw_cost` under the
    /// current basis.
    fn price_out(&mut self, raw_cost: &[BigRational]) {
        self.cost = raw_cost.to_vec();
        self.value = BigRational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if raw_cost[b].is_zero() {
                continue;
            }
            let cb = raw_cost[b].clone();
            for j in 0..self.cols {
                let adj = &cb * &self.rows[r][j];
                self.cost[j] -= adj;
            }
            self.value += &cb * &self.rhs[r];
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        for x in &mut self.rows[r] {
            *x /= &piv;
        }
        self.rhs[r] /= &piv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for j in 0..self.cols {
                let adj = &factor * &self.rows[r][j];
                self.rows[i][j] -= adj;
            }
            let adj = &factor * &self.rhs[r];
            self.rhs[i] -= adj;
        }
        if !self.cost[c].is_zero() {
            let factor = self.cost[c].clone();
            for j in 0..self.cols {
                let adj = &factor * &self.rows[r][j];
                self.cost[j] -= adj;
            }
            // The objective moves by (reduced cost) * (step length).
            let adj = &factor * &self.rhs[r];
            self.value += adj;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: entering column is the smallest index with a negative
    /// reduced cost; the leaving row minimizes the ratio, ties resolved by
    /// the smallest basic variable index. Guarantees termination.
    fn run(&mut self, enterable: &[bool]) -> Result<Step> {
        // Bland cannot cycle; the cap only turns a would-be hang into an error.
        let max_iter = 50_000 + 100 * (self.cols + self.rows.len());
        for _ in 0..max_iter {
            let entering = (0..self.cols)
                .find(|&j| enterable[j] && self.cost[j].is_negative());
            let c = match entering {
                Some(c) => c,
                None => return Ok(Step::Optimal),
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][c];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(Step::Unbounded),
            }
        }
        Err(Error::Internal("simplex exceeded its iteration budget".into()))
    }
}

/// Solves the program exactly. `Infeasible` and `Unbounded` are outcomes;
/// only a malformed program is an error.
pub fn solve_lp(program: &LinearProgram) -> Result<LpOutcome> {
    program.validate()?;
    let n = program.num_vars;

    let mut cols = 0;
    let map = VarMap {
        plus: (0..n)
            .map(|_| {
                cols += 1;
                cols - 1
            })
            .collect(),
        minus: (0..n)
            .map(|j| {
                if program.nonneg[j] {
                    None
                } else {
                    cols += 1;
                    Some(cols - 1)
                }
            })
            .collect(),
    };

    // Normalize every constraint to coeffs . x (Le|Eq) rhs with rhs >= 0,
    // then add slack and artificial columns.
    let m = program.constraints.len();
    let mut rows = vec![vec![BigRational::zero(); cols]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    for (r, con) in program.constraints.iter().enumerate() {
        let negate = con.rhs.is_negative();
        for j in 0..n {
            let mut a = con.coeffs[j].clone();
            if negate {
                a = -a;
            }
            rows[r][map.plus[j]] = a.clone();
            if let Some(mc) = map.minus[j] {
                rows[r][mc] = -a;
            }
        }
        rhs.push(if negate { -con.rhs.clone() } else { con.rhs.clone() });
        let rel = match (con.relation, negate) {
            (Relation::Eq, _) => Relation::Eq,
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
        };
        relations.push(rel);
    }

    let split_cols = cols;
    for rel in &relations {
        match rel {
            Relation::Le | Relation::Ge => cols += 1,
            Relation::Eq => {}
        }
    }
    let slack_end = cols;
    // Artificial variables: one per Ge/Eq row.
    let art_start = cols;
    let mut basis = vec![usize::MAX; m];
    {
        let mut next_slack = split_cols;
        let mut next_art = art_start;
        for r in 0..m {
            match relations[r] {
                Relation::Le => {
                    basis[r] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    next_slack += 1;
                    next_art += 1;
                }
                Relation::Eq => {
                    next_art += 1;
                }
            }
        }
        cols = next_art;
    }

    for row in &mut rows {
        row.resize(cols, BigRational::zero());
    }
    {
        let one = BigRational::from_integer(1.into());
        let mut next_slack = split_cols;
        let mut next_art = art_start;
        for r in 0..m {
            match relations[r] {
                Relation::Le => {
                    rows[r][next_slack] = one.clone();
                    next_slack += 1;
                }
                Relation::Ge => {
                    rows[r][next_slack] = -one.clone();
                    next_slack += 1;
                    rows[r][next_art] = one.clone();
                    basis[r] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    rows[r][next_art] = one.clone();
                    basis[r] = next_art;
                    next_art += 1;
                }
            }
        }
    }

    let mut tableau = Tableau {
        rows,
        rhs,
        basis,
        cost: vec![BigRational::zero(); cols],
        value: BigRational::zero(),
        cols,
    };

    // Phase 1: minimize the artificial total.
    if art_start < cols {
        let mut phase1 = vec![BigRational::zero(); cols];
        for c in art_start..cols {
            phase1[c] = BigRational::from_integer(1.into());
        }
        tableau.price_out(&phase1);
        let enterable = vec![true; cols];
        match tableau.run(&enterable)? {
            Step::Optimal => {}
            Step::Unbounded => {
                return Err(Error::Internal("phase-1 objective is bounded by zero".into()))
            }
        }
        if tableau.value.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive leftover artificials out of the basis; rows that cannot
        // pivot are redundant and get dropped.
        let mut r = 0;
        while r < tableau.rows.len() {
            if tableau.basis[r] >= art_start {
                debug_assert!(tableau.rhs[r].is_zero(), "basic artificial at positive level");
                match (0..art_start).find(|&c| !tableau.rows[r][c].is_zero()) {
                    Some(c) => tableau.pivot(r, c),
                    None => {
                        tableau.rows.swap_remove(r);
                        tableau.rhs.swap_remove(r);
                        tableau.basis.swap_remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2: original objective over split variables; artificials may not
    // re-enter.
    let mut phase2 = vec![BigRational::zero(); cols];
    for j in 0..n {
        phase2[map.plus[j]] = program.objective[j].clone();
        if let Some(mc) = map.minus[j] {
            phase2[mc] = -program.objective[j].clone();
        }
    }
    tableau.price_out(&phase2);
    let mut enterable = vec![true; cols];
    for e in enterable.iter_mut().take(cols).skip(art_start) {
        *e = false;
    }
    let _ = slack_end;
    match tableau.run(&enterable)? {
        Step::Optimal => {}
        Step::Unbounded => return Ok(LpOutcome::Unbounded),
    }

    // Read the point back out of the basis.
    let mut col_value = vec![BigRational::zero(); cols];
    for (r, &b) in tableau.basis.iter().enumerate() {
        col_value[b] = tableau.rhs[r].clone();
    }
    let point: Vec<BigRational> = (0..n)
        .map(|j| {
            let mut x = col_value[map.plus[j]].clone();
            if let Some(mc) = map.minus[j] {
                x -= &col_value[mc];
            }
            x
        })
        .collect();

    let value: BigRational = (0..n).map(|j| &program.objective[j] * &point[j]).sum();
    verify_point(program, &point)?;
    debug_assert_eq!(value, tableau.value);
    Ok(LpOutcome::Optimal { point, value })
}

/// Exact re-check of all constraints and bounds; a violation is a solver
/// bug, not user error.
fn verify_point(program: &LinearProgram, point: &[BigRational]) -> Result<()> {
    for (j, x) in point.iter().enumerate() {
        if program.nonneg[j] && x.is_negative() {
            return Err(Error::Internal(format!("solver returned negative x_{j}")));
        }
    }
    for (idx, con) in program.constraints.iter().enumerate() {
        let lhs: BigRational = con.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
        let ok = match con.relation {
            Relation::Le => lhs <= con.rhs,
            Relation::Eq => lhs == con.rhs,
            Relation::Ge => lhs >= con.rhs,
        };
        if !ok {
            return Err(Error::Internal(format!("solver point violates constraint {idx}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{int_ratio, ratio};
    use proptest::prelude::*;

    fn lp(
        num_vars: usize,
        objective: Vec<BigRational>,
        constraints: Vec<(Vec<BigRational>, Relation, BigRational)>,
    ) -> LinearProgram {
        let mut p = LinearProgram::new(num_vars);
        p.objective = objective;
        for (coeffs, rel, rhs) in constraints {
            p.constrain(coeffs, rel, rhs);
        }
        p
    }

    fn optimal(outcome: LpOutcome) -> (Vec<BigRational>, BigRational) {
        match outcome {
            LpOutcome::Optimal { point, value } => (point, value),
            other => panic!("expected Optimal, got {other:?}"),
        }
    }

    #[test]
    fn one_variable_box() {
        let p = lp(
            1,
            vec![int_ratio(-1)],
            vec![(vec![int_ratio(1)], Relation::Le, int_ratio(1))],
        );
        let (point, value) = optimal(solve_lp(&p).unwrap());
        assert_eq!(point, vec![int_ratio(1)]);
        assert_eq!(value, int_ratio(-1));
    }

    #[test]
    fn single_job_split_hits_three_quarters() {
        // Variables a0, a1, t; minimize t with a0 + a1 = 1, a0 <= t, 3 a1 <= t.
        let p = lp(
            3,
            vec![int_ratio(0), int_ratio(0), int_ratio(1)],
            vec![
                (vec![int_ratio(1), int_ratio(1), int_ratio(0)], Relation::Eq, int_ratio(1)),
                (vec![int_ratio(1), int_ratio(0), int_ratio(-1)], Relation::Le, int_ratio(0)),
                (vec![int_ratio(0), int_ratio(3), int_ratio(-1)], Relation::Le, int_ratio(0)),
            ],
        );
        let (point, value) = optimal(solve_lp(&p).unwrap());
        assert_eq!(value, ratio(3, 4));
        assert_eq!(point, vec![ratio(3, 4), ratio(1, 4), ratio(3, 4)]);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let p = lp(
            1,
            vec![int_ratio(0)],
            vec![(vec![int_ratio(1)], Relation::Le, int_ratio(-1))],
        );
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_direction_is_reported() {
        let p = lp(
            1,
            vec![int_ratio(-1)],
            vec![(vec![int_ratio(1)], Relation::Ge, int_ratio(2))],
        );
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_go_negative() {
        let mut p = lp(
            1,
            vec![int_ratio(1)],
            vec![(vec![int_ratio(1)], Relation::Ge, int_ratio(-3))],
        );
        p.nonneg[0] = false;
        let (point, value) = optimal(solve_lp(&p).unwrap());
        assert_eq!(point, vec![int_ratio(-3)]);
        assert_eq!(value, int_ratio(-3));
    }

    #[test]
    fn redundant_equalities_survive_phase_one() {
        let p = lp(
            2,
            vec![int_ratio(1), int_ratio(2)],
            vec![
                (vec![int_ratio(1), int_ratio(1)], Relation::Eq, int_ratio(1)),
                (vec![int_ratio(1), int_ratio(1)], Relation::Eq, int_ratio(1)),
                (vec![int_ratio(2), int_ratio(2)], Relation::Eq, int_ratio(2)),
            ],
        );
        let (point, value) = optimal(solve_lp(&p).unwrap());
        assert_eq!(value, int_ratio(1));
        assert_eq!(point, vec![int_ratio(1), int_ratio(0)]);
    }

    #[test]
    fn malformed_programs_are_errors() {
        let p = lp(
            2,
            vec![int_ratio(1), int_ratio(2)],
            vec![(vec![int_ratio(1)], Relation::Le, int_ratio(1))],
        );
        assert!(solve_lp(&p).is_err());
    }

    #[test]
    fn degenerate_tie_heavy_program_terminates() {
        // Many identical tight rows at the origin; Bland must not cycle.
        let p = lp(
            3,
            vec![int_ratio(-1), int_ratio(-1), int_ratio(-1)],
            vec![
                (vec![int_ratio(1), int_ratio(1), int_ratio(0)], Relation::Le, int_ratio(0)),
                (vec![int_ratio(1), int_ratio(0), int_ratio(1)], Relation::Le, int_ratio(0)),
                (vec![int_ratio(0), int_ratio(1), int_ratio(1)], Relation::Le, int_ratio(0)),
                (vec![int_ratio(1), int_ratio(1), int_ratio(1)], Relation::Le, int_ratio(1)),
            ],
        );
        let (point, value) = optimal(solve_lp(&p).unwrap());
        assert_eq!(value, int_ratio(0));
        assert_eq!(point, vec![int_ratio(0), int_ratio(0), int_ratio(0)]);
    }

    proptest! {
        // Box-bounded feasible programs: the reported optimum is at most the
        // objective at any rejection-sampled feasible point.
        #[test]
        fn optimum_is_a_lower_bound(
            obj in proptest::collection::vec(-5i64..6, 3),
            rows in proptest::collection::vec((proptest::collection::vec(-4i64..5, 3), 0i64..20), 1..5),
            samples in proptest::collection::vec(proptest::collection::vec(0i64..8, 3), 8),
        ) {
            let mut p = LinearProgram::new(3);
            p.objective = obj.iter().map(|&c| int_ratio(c)).collect();
            for (coeffs, rhs) in &rows {
                p.constrain(coeffs.iter().map(|&c| int_ratio(c)).collect(), Relation::Le, int_ratio(*rhs));
            }
            for j in 0..3 {
                let mut coeffs = vec![int_ratio(0); 3];
                coeffs[j] = int_ratio(1);
                p.constrain(coeffs, Relation::Le, int_ratio(7));
            }
            // x = 0 is feasible iff all rhs >= 0, which holds by construction.
            let (_, value) = optimal(solve_lp(&p).unwrap());
            for s in &samples {
                let xs: Vec<BigRational> = s.iter().map(|&v| int_ratio(v)).collect();
                let feasible = rows.iter().all(|(coeffs, rhs)| {
                    coeffs.iter().zip(&xs).map(|(a, x)| int_ratio(*a) * x).sum::<BigRational>()
                        <= int_ratio(*rhs)
                });
                if feasible {
                    let at: BigRational = p.objective.iter().zip(&xs).map(|(c, x)| c * x).sum();
                    prop_assert!(value <= at);
                }
            }
        }

        // Determinism: solving twice gives identical outcomes.
        #[test]
        fn solving_is_deterministic(
            obj in proptest::collection::vec(-5i64..6, 3),
            rows in proptest::collection::vec((proptest::collection::vec(-4i64..5, 3), -3i64..20), 1..5),
        ) {
            let mut p = LinearProgram::new(3);
            p.objective = obj.iter().map(|&c| int_ratio(c)).collect();
            for (coeffs, rhs) in &rows {
                p.constrain(coeffs.iter().map(|&c| int_ratio(c)).collect(), Relation::Le, int_ratio(*rhs));
            }
            for j in 0..3 {
                let mut coeffs = vec![int_ratio(0); 3];
                coeffs[j] = int_ratio(1);
                p.constrain(coeffs, Relation::Le, int_ratio(7));
            }
            prop_assert_eq!(solve_lp(&p).unwrap(), solve_lp(&p).unwrap());
        }
    }
}
