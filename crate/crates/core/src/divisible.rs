//! Divisible scheduling: the fractional makespan program, lexicographic
//! minimax loads, and the two bundle-rebalancing moves.
//!
//! The headline result here is constructive: the assignment whose sorted
//! load vector is lexicographically minimal is locally efficient, so exact
//! envy-free payments exist for it, and its makespan already equals the
//! unconstrained fractional optimum. `lexmin_fractional` computes that
//! assignment by repeatedly minimizing the maximum load and pinning the
//! machines that cannot go lower. `equalize_pair` and `cycle_repair` are
//! the two local moves behind the proof that anything non-lexmin can be
//! strictly improved; they are exposed for direct study.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cost::{ratio_string, Cost};
use crate::envy::{compute_payments, Payments};
use crate::error::Error;
use crate::instance::{loads, makespan, AssignmentRef, FractionalAssignment, Instance};
use crate::linprog::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::Result;

/// Where each finite cost entry's fraction variable lives in the programs
/// below. Infinite entries get no variable, so solutions cannot put mass on
/// them.
struct VarLayout {
    index: Vec<Vec<Option<usize>>>,
    count: usize,
}

fn layout(instance: &Instance) -> Result<VarLayout> {
    let (m, n) = (instance.machines(), instance.jobs());
    for j in 0..n {
        if !(0..m).any(|i| instance.cost(i, j).is_finite()) {
            return Err(Error::Infeasible { job: j });
        }
    }
    let mut index = vec![vec![None; n]; m];
    let mut count = 0;
    for (i, row) in index.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if instance.cost(i, j).is_finite() {
                *slot = Some(count);
                count += 1;
            }
        }
    }
    Ok(VarLayout { index, count })
}

/// Load cap for one machine inside a lexmin round.
enum Cap<'a> {
    /// Shared variable `t` at this column index; the row reads load <= t.
    Var(usize),
    /// Fixed numeric cap.
    Const(&'a BigRational),
}

/// Shared constraint block: unit column sums per job, pinned loads for
/// fixed machines, capped loads for the rest.
fn add_assignment_constraints(
    lp: &mut LinearProgram,
    instance: &Instance,
    layout: &VarLayout,
    fixed: &[Option<BigRational>],
    cap: &Cap,
) {
    let (m, n) = (instance.machines(), instance.jobs());
    for j in 0..n {
        let mut coeffs = vec![BigRational::zero(); lp.num_vars];
        for i in 0..m {
            if let Some(v) = layout.index[i][j] {
                coeffs[v] = BigRational::one();
            }
        }
        lp.constrain(coeffs, Relation::Eq, BigRational::one());
    }
    for i in 0..m {
        let mut coeffs = vec![BigRational::zero(); lp.num_vars];
        for j in 0..n {
            if let Some(v) = layout.index[i][j] {
                coeffs[v] = instance.cost(i, j).as_ratio().unwrap().clone();
            }
        }
        match &fixed[i] {
            Some(value) => lp.constrain(coeffs, Relation::Eq, value.clone()),
            None => match cap {
                Cap::Var(t) => {
                    coeffs[*t] = -BigRational::one();
                    lp.constrain(coeffs, Relation::Le, BigRational::zero());
                }
                Cap::Const(value) => {
                    lp.constrain(coeffs, Relation::Le, (*value).clone());
                }
            },
        }
    }
}

fn fractions_from_point(
    instance: &Instance,
    layout: &VarLayout,
    point: &[BigRational],
) -> FractionalAssignment {
    let (m, n) = (instance.machines(), instance.jobs());
    let fractions = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    layout.index[i][j].map_or_else(BigRational::zero, |v| point[v].clone())
                })
                .collect()
        })
        .collect();
    FractionalAssignment::new(fractions)
}

fn must_be_optimal(outcome: LpOutcome, what: &str) -> Result<(Vec<BigRational>, BigRational)> {
    match outcome {
        LpOutcome::Optimal { point, value } => Ok((point, value)),
        LpOutcome::Infeasible => Err(Error::Internal(format!("{what} program is infeasible"))),
        LpOutcome::Unbounded => Err(Error::Internal(format!("{what} program is unbounded"))),
    }
}

/// Minimum fractional makespan and an optimal vertex. One variable per
/// finite cost entry plus the makespan `t`; unit column sums; per-machine
/// load at most `t`.
pub fn min_makespan_fractional(instance: &Instance) -> Result<(Cost, FractionalAssignment)> {
    let layout = layout(instance)?;
    let t = layout.count;
    let mut lp = LinearProgram::new(layout.count + 1);
    lp.objective[t] = BigRational::one();
    let fixed = vec![None; instance.machines()];
    add_assignment_constraints(&mut lp, instance, &layout, &fixed, &Cap::Var(t));
    let (point, value) = must_be_optimal(solve_lp(&lp)?, "makespan")?;
    let assignment = fractions_from_point(instance, &layout, &point);
    debug_assert!(assignment.validate_for(instance).is_ok());
    debug_assert!(assignment.validate_supports(instance).is_ok());
    Ok((Cost::Finite(value), assignment))
}

/// Assignment whose sorted non-increasing load vector is lexicographically
/// minimal. Round structure: minimize the maximum unfixed load `t`, then
/// probe each unfixed machine for its minimum possible load under cap `t`;
/// machines that cannot drop below `t` are pinned there for all later
/// rounds. Averaging feasible points shows at least one machine pins per
/// round, so there are at most `m` rounds.
pub fn lexmin_fractional(instance: &Instance) -> Result<FractionalAssignment> {
    let layout = layout(instance)?;
    let m = instance.machines();
    let mut fixed: Vec<Option<BigRational>> = vec![None; m];
    loop {
        let t_col = layout.count;
        let mut lp = LinearProgram::new(layout.count + 1);
        lp.objective[t_col] = BigRational::one();
        add_assignment_constraints(&mut lp, instance, &layout, &fixed, &Cap::Var(t_col));
        let (point, t) = must_be_optimal(solve_lp(&lp)?, "lexmin round")?;

        let mut tight = Vec::new();
        for i in 0..m {
            if fixed[i].is_some() {
                continue;
            }
            let mut probe = LinearProgram::new(layout.count);
            for j in 0..instance.jobs() {
                if let Some(v) = layout.index[i][j] {
                    probe.objective[v] = instance.cost(i, j).as_ratio().unwrap().clone();
                }
            }
            add_assignment_constraints(&mut probe, instance, &layout, &fixed, &Cap::Const(&t));
            let (_, lowest) = must_be_optimal(solve_lp(&probe)?, "load probe")?;
            debug_assert!(lowest <= t);
            if lowest == t {
                tight.push(i);
            }
        }
        assert!(!tight.is_empty(), "lexmin round pinned no machine");
        for i in tight {
            fixed[i] = Some(t.clone());
        }
        if fixed.iter().all(|f| f.is_some()) {
            // Machines pinned this round already sit exactly at t in the
            // round's own optimum, so its point realizes every pin.
            let assignment = fractions_from_point(instance, &layout, &point);
            debug_assert!(assignment.validate_for(instance).is_ok());
            debug_assert!(assignment.validate_supports(instance).is_ok());
            debug_assert_eq!(
                loads(instance, &assignment).unwrap().0,
                fixed.iter().map(|f| Cost::Finite(f.clone().unwrap())).collect::<Vec<_>>()
            );
            return Ok(assignment);
        }
    }
}

/// Full divisible pipeline: lexmin assignment, envy-free payments, exact
/// makespan. The lexmin assignment is locally efficient, so the payment
/// computation cannot fail, and its makespan equals the unconstrained
/// fractional optimum.
pub fn solve_divisible_ef(
    instance: &Instance,
) -> Result<(FractionalAssignment, Payments, Cost)> {
    let assignment = lexmin_fractional(instance)?;
    let payments = compute_payments(instance, &assignment)?;
    let value = makespan(instance, &assignment)?;
    Ok((assignment, payments, value))
}

/// Moves the exact fraction of machine `i`'s bundle to machine `i+1` that
/// equalizes their loads. Requires machine `i` strictly more loaded and the
/// shifted bundle finite on machine `i+1`.
pub fn equalize_pair(
    instance: &Instance,
    o: &FractionalAssignment,
    i: usize,
) -> Result<FractionalAssignment> {
    let m = instance.machines();
    if i + 1 >= m {
        return Err(Error::invalid(format!("machine {i} has no successor among {m} machines")));
    }
    o.validate_for(instance)?;
    o.validate_supports(instance)?;
    let r = AssignmentRef::from(o);
    let own_i = r.cross_load(instance, i, i);
    let own_next = r.cross_load(instance, i + 1, i + 1);
    let cross = r.cross_load(instance, i + 1, i);
    let (Cost::Finite(load_i), Cost::Finite(load_next), Cost::Finite(cross)) =
        (own_i, own_next, cross)
    else {
        return Err(Error::invalid("equalizing needs finite loads and a finite cross load"));
    };
    if load_i <= load_next {
        return Err(Error::invalid(format!(
            "machine {i} (load {}) is not strictly more loaded than machine {} (load {})",
            ratio_string(&load_i),
            i + 1,
            ratio_string(&load_next)
        )));
    }
    // Denominator (c_i + c_{i+1}) . o_i expands to own load plus cross load.
    let f = (&load_i - &load_next) / (&load_i + &cross);
    debug_assert!(f > BigRational::zero() && f <= BigRational::one());

    let mut fractions = o.fractions.clone();
    let keep = BigRational::one() - &f;
    for j in 0..instance.jobs() {
        let moved = &f * &o.fractions[i][j];
        fractions[i][j] = &keep * &o.fractions[i][j];
        fractions[i + 1][j] += moved;
    }
    let result = FractionalAssignment::new(fractions);
    debug_assert_eq!(
        AssignmentRef::from(&result).cross_load(instance, i, i),
        AssignmentRef::from(&result).cross_load(instance, i + 1, i + 1)
    );
    Ok(result)
}

/// Rebalancing recipe along a machine cycle: machine `cycle[i]` keeps an
/// `alphas[i]` fraction of its bundle and passes the rest to the next cycle
/// machine. `deltas[i]` is the (signed) relative load change when the next
/// machine evaluates bundle `i`, and must sum negative for the move to pay
/// off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleRepairPlan {
    pub cycle: Vec<usize>,
    pub deltas: Vec<BigRational>,
    pub mu: BigRational,
    pub alphas: Vec<BigRational>,
}

impl CycleRepairPlan {
    /// Derives `mu`, the largest prefix product of the growth factors and
    /// at least 1, and the keep fractions: alpha_0 = 1 - 1/(2 mu), then
    /// 1 - alpha_i shrinks or grows by the factor 1 + delta_{i-1}. Every
    /// 1 - alpha_i stays in (0, 1/2] by the choice of mu.
    pub fn new(cycle: Vec<usize>, deltas: Vec<BigRational>) -> Result<Self> {
        let k = cycle.len();
        if k < 2 {
            return Err(Error::invalid("a repair cycle needs at least two machines"));
        }
        if deltas.len() != k {
            return Err(Error::dims("one delta per cycle machine"));
        }
        let mut seen = cycle.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != k {
            return Err(Error::invalid("repair cycle repeats a machine"));
        }
        let minus_one = -BigRational::one();
        if deltas.iter().any(|d| *d < minus_one) {
            return Err(Error::invalid("every delta must be at least -1"));
        }
        if deltas.iter().fold(BigRational::zero(), |s, d| s + d) >= BigRational::zero() {
            return Err(Error::invalid("deltas must sum negative for the cycle to improve"));
        }

        let mut mu = BigRational::one();
        let mut prefix = BigRational::one();
        for d in &deltas {
            prefix *= BigRational::one() + d;
            if prefix > mu {
                mu = prefix.clone();
            }
        }
        let half = BigRational::new(1.into(), 2.into());
        let mut gaps = Vec::with_capacity(k);
        let mut gap = (BigRational::one() / &mu) * &half;
        for d in &deltas {
            gaps.push(gap.clone());
            gap *= BigRational::one() + d;
        }
        let alphas: Vec<BigRational> =
            gaps.iter().map(|g| BigRational::one() - g).collect();
        for (i, a) in alphas.iter().enumerate() {
            if *a < BigRational::zero() || *a > BigRational::one() {
                return Err(Error::invalid(format!(
                    "alpha_{i} = {} falls outside [0, 1]",
                    ratio_string(a)
                )));
            }
            debug_assert!(gaps[i] <= half);
        }
        Ok(CycleRepairPlan { cycle, deltas, mu, alphas })
    }
}

/// Applies a repair plan to an assignment whose cycle machines all carry
/// load exactly 1 (callers rescale costs to get there) and whose cross
/// loads match the plan's deltas: the next machine values bundle `i` at
/// `1 + deltas[i]`. The result keeps every off-cycle row, holds cycle
/// machines 1..k-1 at load exactly 1, and drops machine `cycle[0]` strictly
/// below 1, so the sorted load vector strictly decreases.
pub fn cycle_repair(
    instance: &Instance,
    o: &FractionalAssignment,
    plan: &CycleRepairPlan,
) -> Result<FractionalAssignment> {
    let m = instance.machines();
    let k = plan.cycle.len();
    o.validate_for(instance)?;
    o.validate_supports(instance)?;
    if let Some(&x) = plan.cycle.iter().find(|&&x| x >= m) {
        return Err(Error::dims(format!("cycle machine {x} out of range")));
    }
    for a in &plan.alphas {
        if *a < BigRational::zero() || *a > BigRational::one() {
            return Err(Error::invalid("plan keep fraction outside [0, 1]"));
        }
    }
    if plan.deltas.iter().fold(BigRational::zero(), |s, d| s + d) >= BigRational::zero() {
        return Err(Error::invalid("plan deltas must sum negative"));
    }
    let r = AssignmentRef::from(o);
    let one = Cost::from_int(1);
    for (pos, &x) in plan.cycle.iter().enumerate() {
        let own = r.cross_load(instance, x, x);
        if own != one {
            return Err(Error::invalid(format!(
                "cycle machine {x} carries load {own}, expected exactly 1 (rescale first)"
            )));
        }
        let next = plan.cycle[(pos + 1) % k];
        let expect = Cost::Finite(BigRational::one() + &plan.deltas[pos]);
        let got = r.cross_load(instance, next, x);
        if got != expect {
            return Err(Error::invalid(format!(
                "machine {next} values bundle {pos} at {got}, plan says {expect}"
            )));
        }
    }

    let mut fractions = o.fractions.clone();
    for (pos, &x) in plan.cycle.iter().enumerate() {
        let prev_pos = (pos + k - 1) % k;
        let prev = plan.cycle[prev_pos];
        let keep = &plan.alphas[pos];
        let take = BigRational::one() - &plan.alphas[prev_pos];
        for j in 0..instance.jobs() {
            fractions[x][j] = keep * &o.fractions[x][j] + &take * &o.fractions[prev][j];
        }
    }
    let result = FractionalAssignment::new(fractions);
    result.validate_for(instance)?;
    result.validate_supports(instance)?;

    // Exact postconditions of the construction.
    let rr = AssignmentRef::from(&result);
    for (pos, &x) in plan.cycle.iter().enumerate() {
        let load = rr.cross_load(instance, x, x);
        if pos == 0 {
            assert!(load < one, "entry machine load failed to drop below 1");
        } else {
            assert_eq!(load, one, "interior cycle machine moved off load 1");
        }
    }
    let before = loads(instance, o)?;
    let after = loads(instance, &result)?;
    assert_eq!(
        crate::instance::lex_compare(&after, &before)?,
        std::cmp::Ordering::Less,
        "repair failed to lex-decrease the load vector"
    );
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{int_ratio, ratio};
    use crate::envy::{is_locally_efficient, verify_envy_free};
    use proptest::prelude::*;

    fn finite(rows: &[&[(i64, i64)]]) -> Instance {
        Instance::new(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| Cost::Finite(ratio(p, q))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_job_equal_machines_splits_evenly() {
        let instance = finite(&[&[(1, 1)], &[(1, 1)]]);
        let (t, a) = min_makespan_fractional(&instance).unwrap();
        assert_eq!(t, Cost::Finite(ratio(1, 2)));
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::Finite(ratio(1, 2)), Cost::Finite(ratio(1, 2))]);
    }

    #[test]
    fn one_job_unequal_machines_matches_closed_form() {
        // t = 1/(1/1 + 1/3) = 3/4.
        let instance = finite(&[&[(1, 1)], &[(3, 1)]]);
        let (t, _) = min_makespan_fractional(&instance).unwrap();
        assert_eq!(t, Cost::Finite(ratio(3, 4)));
    }

    #[test]
    fn forced_support_puts_everything_on_the_finite_machine() {
        let instance = Instance::new(vec![
            vec![Cost::from_int(1)],
            vec![Cost::Infinite],
        ])
        .unwrap();
        let (t, a) = min_makespan_fractional(&instance).unwrap();
        assert_eq!(t, Cost::from_int(1));
        assert_eq!(a.fractions[0][0], BigRational::one());
        assert_eq!(a.fractions[1][0], BigRational::zero());
    }

    #[test]
    fn infeasible_job_is_reported() {
        let instance = Instance::new(vec![
            vec![Cost::Infinite, Cost::from_int(1)],
            vec![Cost::Infinite, Cost::from_int(1)],
        ])
        .unwrap();
        assert!(matches!(
            min_makespan_fractional(&instance),
            Err(Error::Infeasible { job: 0 })
        ));
    }

    #[test]
    fn lexmin_handles_forced_jobs() {
        // Job 1 must sit on machine 1, so the lexmin puts job 0 fully on
        // machine 0: loads (1, 1).
        let instance = Instance::new(vec![
            vec![Cost::from_int(1), Cost::Infinite],
            vec![Cost::from_int(1), Cost::from_int(1)],
        ])
        .unwrap();
        let a = lexmin_fractional(&instance).unwrap();
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::from_int(1), Cost::from_int(1)]);
        assert!(is_locally_efficient(&instance, &a).unwrap().verdict);
    }

    #[test]
    fn lexmin_splits_one_job_evenly_on_identical_machines() {
        let instance = finite(&[&[(6, 1)], &[(6, 1)], &[(6, 1)]]);
        let a = lexmin_fractional(&instance).unwrap();
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::from_int(2); 3]);
    }

    #[test]
    fn lexmin_empty_instance() {
        let instance = Instance::new(vec![vec![], vec![]]).unwrap();
        let a = lexmin_fractional(&instance).unwrap();
        assert_eq!(loads(&instance, &a).unwrap().0, vec![Cost::zero(); 2]);
    }

    #[test]
    fn divisible_pipeline_one_job() {
        let instance = finite(&[&[(1, 1)], &[(3, 1)]]);
        let (a, p, value) = solve_divisible_ef(&instance).unwrap();
        assert_eq!(value, Cost::Finite(ratio(3, 4)));
        assert!(verify_envy_free(&instance, &a, &p).unwrap());
    }

    #[test]
    fn identical_machines_need_no_payments() {
        let instance = finite(&[&[(2, 1), (4, 1)], &[(2, 1), (4, 1)]]);
        let (a, p, _) = solve_divisible_ef(&instance).unwrap();
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::from_int(3), Cost::from_int(3)]);
        assert!(p.p.iter().all(|x| x.is_zero()));
        assert!(verify_envy_free(&instance, &a, &p).unwrap());
    }

    #[test]
    fn equalize_pair_examples() {
        // One job, costs (1,1), all on machine 0: f = 1/2.
        let instance = finite(&[&[(1, 1)], &[(1, 1)]]);
        let o = FractionalAssignment::new(vec![vec![BigRational::one()], vec![BigRational::zero()]]);
        let a = equalize_pair(&instance, &o, 0).unwrap();
        assert_eq!(a.fractions[0][0], ratio(1, 2));
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::Finite(ratio(1, 2)); 2]);

        // Costs (2,2): f is still 1/2, loads land at (1,1).
        let instance = finite(&[&[(2, 1)], &[(2, 1)]]);
        let a = equalize_pair(&instance, &o, 0).unwrap();
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::from_int(1); 2]);

        // Already equal loads: precondition violated.
        let even = FractionalAssignment::new(vec![vec![ratio(1, 2)], vec![ratio(1, 2)]]);
        assert!(equalize_pair(&instance, &even, 0).is_err());
    }

    fn plan_fixture(d0: (i64, i64), d1: (i64, i64)) -> (Instance, FractionalAssignment, CycleRepairPlan) {
        // Two machines, each holding one unit-cost job; cross costs encode
        // 1 + delta.
        let instance = Instance::new(vec![
            vec![Cost::from_int(1), Cost::Finite(int_ratio(1) + ratio(d1.0, d1.1))],
            vec![Cost::Finite(int_ratio(1) + ratio(d0.0, d0.1)), Cost::from_int(1)],
        ])
        .unwrap();
        let o = FractionalAssignment::new(vec![
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ]);
        let plan = CycleRepairPlan::new(vec![0, 1], vec![ratio(d0.0, d0.1), ratio(d1.0, d1.1)]).unwrap();
        (instance, o, plan)
    }

    #[test]
    fn repair_plan_mixed_deltas() {
        let (instance, o, plan) = plan_fixture((-1, 2), (1, 4));
        assert_eq!(plan.mu, BigRational::one());
        assert_eq!(plan.alphas, vec![ratio(1, 2), ratio(3, 4)]);
        let a = cycle_repair(&instance, &o, &plan).unwrap();
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::Finite(ratio(13, 16)), Cost::from_int(1)]);
    }

    #[test]
    fn repair_plan_both_negative() {
        let (instance, o, plan) = plan_fixture((-1, 2), (-1, 2));
        assert_eq!(plan.alphas, vec![ratio(1, 2), ratio(3, 4)]);
        let a = cycle_repair(&instance, &o, &plan).unwrap();
        let l = loads(&instance, &a).unwrap();
        assert_eq!(l.0, vec![Cost::Finite(ratio(5, 8)), Cost::from_int(1)]);
    }

    #[test]
    fn repair_rejects_nonnegative_delta_sum() {
        assert!(CycleRepairPlan::new(vec![0, 1], vec![ratio(-1, 2), ratio(1, 2)]).is_err());
        assert!(CycleRepairPlan::new(vec![0, 1], vec![ratio(1, 4), ratio(1, 4)]).is_err());
    }

    #[test]
    fn repair_rejects_malformed_cycles() {
        assert!(CycleRepairPlan::new(vec![0], vec![ratio(-1, 2)]).is_err());
        assert!(CycleRepairPlan::new(vec![0, 0], vec![ratio(-1, 2), ratio(-1, 2)]).is_err());
        assert!(CycleRepairPlan::new(vec![0, 1], vec![ratio(-3, 2), ratio(1, 4)]).is_err());
    }

    #[test]
    fn repair_rejects_unnormalized_loads() {
        let (instance, _, plan) = plan_fixture((-1, 2), (1, 4));
        let heavy = FractionalAssignment::new(vec![
            vec![BigRational::one(), BigRational::one()],
            vec![BigRational::zero(), BigRational::zero()],
        ]);
        assert!(cycle_repair(&instance, &heavy, &plan).is_err());
    }

    fn arb_instance(m: usize, n: usize, codes: &[u8], inf_mask: &[bool]) -> Instance {
        Instance::new(
            (0..m)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            // Keep machine 0 finite so every job stays
                            // assignable.
                            if i > 0 && inf_mask[i * n + j] {
                                Cost::Infinite
                            } else {
                                let c = codes[i * n + j];
                                Cost::Finite(ratio(i64::from(c % 9) + 1, i64::from(c % 4) + 1))
                            }
                        })
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Lexmin is optimal and locally efficient, so the whole pipeline
        // verifies end to end and loses nothing against the plain optimum.
        #[test]
        fn lexmin_is_optimal_and_locally_efficient(
            m in 1usize..4, n in 0usize..4,
            codes in proptest::collection::vec(0u8..255, 4 * 4),
            inf_mask in proptest::collection::vec(proptest::bool::ANY, 4 * 4),
        ) {
            let instance = arb_instance(m, n, &codes, &inf_mask);
            let (t, _) = min_makespan_fractional(&instance).unwrap();
            let (a, p, value) = solve_divisible_ef(&instance).unwrap();
            prop_assert_eq!(value, t);
            prop_assert!(is_locally_efficient(&instance, &a).unwrap().verdict);
            prop_assert!(verify_envy_free(&instance, &a, &p).unwrap());
        }

        // With two machines and no infinite entries, every minimum-makespan
        // vertex is already locally efficient.
        #[test]
        fn two_machine_optimum_is_locally_efficient(
            n in 1usize..5,
            codes in proptest::collection::vec(0u8..255, 2 * 5),
        ) {
            let instance = arb_instance(2, n, &codes, &[false; 2 * 5]);
            let (_, a) = min_makespan_fractional(&instance).unwrap();
            prop_assert!(is_locally_efficient(&instance, &a).unwrap().verdict);
        }

        // Equalizing a strictly unbalanced all-finite pair lex-decreases
        // the sorted load vector.
        #[test]
        fn equalize_pair_lex_decreases(
            n in 1usize..5,
            codes in proptest::collection::vec(0u8..255, 2 * 5),
            weights in proptest::collection::vec(0u8..=4, 5),
        ) {
            let instance = arb_instance(2, n, &codes, &[false; 2 * 5]);
            let fractions: Vec<Vec<BigRational>> = (0..2)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let w = i64::from(weights[j]);
                            if i == 0 { ratio(w, 4) } else { ratio(4 - w, 4) }
                        })
                        .collect()
                })
                .collect();
            let o = FractionalAssignment::new(fractions);
            let r = AssignmentRef::from(&o);
            let l0 = r.cross_load(&instance, 0, 0);
            let l1 = r.cross_load(&instance, 1, 1);
            prop_assume!(l0 != l1);
            let a = if l0 > l1 {
                equalize_pair(&instance, &o, 0).unwrap()
            } else {
                // Mirror the instance so the heavy machine comes first.
                let mirrored = Instance::new(vec![
                    instance.rows()[1].clone(),
                    instance.rows()[0].clone(),
                ]).unwrap();
                let mo = FractionalAssignment::new(vec![
                    o.fractions[1].clone(),
                    o.fractions[0].clone(),
                ]);
                let res = equalize_pair(&mirrored, &mo, 0).unwrap();
                FractionalAssignment::new(vec![
                    res.fractions[1].clone(),
                    res.fractions[0].clone(),
                ])
            };
            let before = loads(&instance, &o).unwrap();
            let after = loads(&instance, &a).unwrap();
            prop_assert_eq!(
                crate::instance::lex_compare(&after, &before).unwrap(),
                std::cmp::Ordering::Less
            );
        }
    }
}
