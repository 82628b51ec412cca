//! Indivisible scheduling: the phased rebalancing algorithm and exhaustive
//! oracles.
//!
//! `find_approx` turns any starting bundle partition into a locally
//! efficient schedule. Each phase reassigns the active bundles by a
//! minimum-total matching, repeatedly throwing bundles whose load exceeds
//! `beta * m_init` out to the next phase; unioning the phases keeps local
//! efficiency (a union of locally efficient partial schedules is locally
//! efficient) while the makespan grows by at most a factor `q <=
//! floor(log2 m) + 1`.
//!
//! The oracles enumerate all `m^n` assignments (scaled to integer
//! arithmetic, branch-and-bound pruned, optionally split across threads
//! with a deterministic merge) and are the ground truth the algorithmic
//! paths are tested against.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cost::{int_ratio, Cost};
use crate::error::Error;
use crate::instance::{
    bundles_from_assignment, makespan, BundleSet, Instance, IntegralAssignment,
};
use crate::matching::{le_of_family, min_weight_assignment};
use crate::Result;

/// Default bound on the number of enumerated assignments.
pub const DEFAULT_ORACLE_CAP: u64 = 1 << 22;

/// One phase of the rebalancing run: where the phase's bundles ended up and
/// the discard bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRecord {
    /// Jobs committed to each machine in this phase.
    pub jobs_by_machine: Vec<Vec<usize>>,
    /// Nonempty bundles active when the phase started.
    pub active_at_start: usize,
    /// Bundles pushed to the next phase (each exceeded the threshold).
    pub discarded: usize,
    /// Matchings computed within the phase (1 + discard sweeps).
    pub inner_iterations: usize,
}

/// Result of `find_approx`: the union schedule plus per-phase diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasedSchedule {
    pub final_assignment: IntegralAssignment,
    pub phase_assignments: Vec<PhaseRecord>,
    /// Load bound enforced per phase, `beta * m_init`.
    pub threshold: Cost,
    pub m_init: Cost,
    pub beta: BigRational,
}

impl PhasedSchedule {
    /// Number of phases, `q >= 1`.
    pub fn phases(&self) -> usize {
        self.phase_assignments.len()
    }
}

/// Phased rebalancing of an initial bundle partition.
///
/// `m_init` must equal the initial allocation's makespan (maximum origin
/// load) and `beta >= 2`; the threshold `beta * m_init` then guarantees at
/// most half of the active bundles get discarded per phase, which bounds
/// the phase count by `floor(log2 m) + 1` and the final makespan by
/// `q * beta * m_init`.
pub fn find_approx(
    instance: &Instance,
    initial: &BundleSet,
    beta: &BigRational,
    m_init: &Cost,
) -> Result<PhasedSchedule> {
    let m = instance.machines();
    if initial.machines() != m {
        return Err(Error::dims("bundle set machine count differs from instance"));
    }
    if *beta < int_ratio(2) {
        return Err(Error::invalid(format!(
            "beta must be at least 2, got {}",
            crate::cost::ratio_string(beta)
        )));
    }
    let mut max_origin_load = Cost::zero();
    for (b, bundle) in initial.bundles().iter().enumerate() {
        let origin = initial.origin_of(b);
        if origin >= m {
            return Err(Error::dims(format!("origin machine {origin} out of range")));
        }
        let load = instance.set_load(origin, bundle);
        if !load.is_finite() {
            return Err(Error::invalid(format!(
                "bundle {b} has infinite load on its origin machine {origin}"
            )));
        }
        max_origin_load = max_origin_load.max(load);
    }
    if *m_init != max_origin_load {
        return Err(Error::invalid(format!(
            "m_init {m_init} is not the initial makespan {max_origin_load}"
        )));
    }
    let threshold = m_init.times(beta);

    let mut active: Vec<Vec<usize>> = initial
        .bundles()
        .iter()
        .filter(|b| !b.is_empty())
        .cloned()
        .collect();
    let mut phase_records: Vec<PhaseRecord> = Vec::new();

    loop {
        let active_at_start = active.len();
        let mut discarded: Vec<Vec<usize>> = Vec::new();
        let mut inner_iterations = 0usize;
        let mut prev_total: Option<Cost> = None;
        let committed = loop {
            let placement = le_of_family(instance, &active)?;
            inner_iterations += 1;
            // Discarding a bundle and re-matching can only lower the
            // minimum total, never raise it.
            if let Some(prev) = &prev_total {
                assert!(
                    placement.result.total <= *prev,
                    "matching total increased within a phase"
                );
            }
            prev_total = Some(placement.result.total.clone());

            // One sweep over machines in increasing index: every bundle
            // whose load exceeds the threshold moves to the next phase.
            let mut violating_bundles = Vec::new();
            for machine in 0..m {
                if let Some(b) = placement.bundle_on_machine[machine] {
                    if instance.set_load(machine, &active[b]) > threshold {
                        violating_bundles.push(b);
                    }
                }
            }
            if violating_bundles.is_empty() {
                break placement.jobs_by_machine(&active);
            }
            violating_bundles.sort_unstable();
            for &b in violating_bundles.iter().rev() {
                discarded.push(active.remove(b));
            }
        };
        let discard_count = discarded.len();
        // Every discarded bundle carried load > beta * m_init out of a total
        // that started at most active_at_start * m_init, so fewer than
        // 1/beta <= 1/2 of the bundles can leave.
        assert!(
            discard_count <= active_at_start / 2,
            "phase discarded {discard_count} of {active_at_start} bundles"
        );
        phase_records.push(PhaseRecord {
            jobs_by_machine: committed,
            active_at_start,
            discarded: discard_count,
            inner_iterations,
        });
        if discarded.is_empty() {
            break;
        }
        active = discarded;
    }

    let q = phase_records.len();
    assert!(
        q <= floor_log2(m) + 1,
        "ran {q} phases on {m} machines, expected at most log2(m)+1"
    );

    let phase_bundles: Vec<Vec<Vec<usize>>> = phase_records
        .iter()
        .map(|p| p.jobs_by_machine.clone())
        .collect();
    let final_assignment = union_phase_assignments(&phase_bundles, instance.jobs())?;
    let final_makespan = makespan(instance, &final_assignment)?;
    assert!(
        final_makespan <= threshold.times(&int_ratio(q as i64)),
        "final makespan exceeds q * beta * m_init"
    );

    Ok(PhasedSchedule {
        final_assignment,
        phase_assignments: phase_records,
        threshold,
        m_init: m_init.clone(),
        beta: beta.clone(),
    })
}

fn floor_log2(m: usize) -> usize {
    debug_assert!(m >= 1);
    (usize::BITS - 1 - m.leading_zeros()) as usize
}

/// Merges per-phase placements (each a machine -> jobs list) into one
/// assignment. Every job must appear in exactly one phase.
pub fn union_phase_assignments(
    phases: &[Vec<Vec<usize>>],
    jobs: usize,
) -> Result<IntegralAssignment> {
    let mut machine_of = vec![usize::MAX; jobs];
    for phase in phases {
        for (machine, bundle) in phase.iter().enumerate() {
            for &j in bundle {
                if j >= jobs {
                    return Err(Error::dims(format!("job {j} out of range")));
                }
                if machine_of[j] != usize::MAX {
                    return Err(Error::invalid(format!("job {j} appears in two phases")));
                }
                machine_of[j] = machine;
            }
        }
    }
    if let Some(j) = machine_of.iter().position(|&i| i == usize::MAX) {
        return Err(Error::invalid(format!("job {j} missing from every phase")));
    }
    Ok(IntegralAssignment::new(machine_of))
}

/// Greedy starting point: jobs in non-increasing order of their cheapest
/// finite cost, each placed on the machine minimizing the resulting load
/// (ties to the lowest index). No approximation guarantee; it just gives
/// `find_approx` a finite, deterministic `m_init`.
pub fn greedy_bundles(instance: &Instance) -> Result<(BundleSet, Cost)> {
    let (m, n) = (instance.machines(), instance.jobs());
    let mut keyed: Vec<(Cost, usize)> = Vec::with_capacity(n);
    for j in 0..n {
        let cheapest = (0..m)
            .map(|i| instance.cost(i, j).clone())
            .min()
            .expect("at least one machine");
        if !cheapest.is_finite() {
            return Err(Error::Infeasible { job: j });
        }
        keyed.push((cheapest, j));
    }
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut loads = vec![Cost::zero(); m];
    let mut machine_of = vec![0usize; n];
    for (_, j) in keyed {
        let target = (0..m)
            .min_by(|&a, &b| {
                let la = loads[a].clone() + instance.cost(a, j);
                let lb = loads[b].clone() + instance.cost(b, j);
                la.cmp(&lb).then(a.cmp(&b))
            })
            .expect("at least one machine");
        loads[target] += instance.cost(target, j);
        machine_of[j] = target;
    }
    let assignment = IntegralAssignment::new(machine_of);
    let bundles = bundles_from_assignment(instance, &assignment)?;
    let m_init = loads.into_iter().max().expect("at least one machine");
    Ok((bundles, m_init))
}

/// Minimum-makespan assignment by exhaustive enumeration. Ties break to the
/// lexicographically smallest `machine_of` vector.
pub fn exact_optimum(instance: &Instance, cap: u64) -> Result<(IntegralAssignment, Cost)> {
    oracle(instance, cap, false)
}

/// Minimum-makespan *locally efficient* assignment by exhaustive
/// enumeration, same tie-break. At least one locally efficient assignment
/// always exists: giving every job to its cheapest machine minimizes total
/// cost outright, so no bundle permutation can beat it.
pub fn exact_ef_optimum(instance: &Instance, cap: u64) -> Result<(IntegralAssignment, Cost)> {
    oracle(instance, cap, true)
}

fn oracle(instance: &Instance, cap: u64, ef_only: bool) -> Result<(IntegralAssignment, Cost)> {
    let (m, n) = (instance.machines(), instance.jobs());
    for j in 0..n {
        if !(0..m).any(|i| instance.cost(i, j).is_finite()) {
            return Err(Error::Infeasible { job: j });
        }
    }
    let mut states: u128 = 1;
    for _ in 0..n {
        states = states.saturating_mul(m as u128);
    }
    if states > u128::from(cap) {
        return Err(Error::TooLarge { states, cap });
    }

    let denom = common_denominator(instance);
    let table = scaled_table(instance, &denom);
    let (value, machine_of) = match narrow_table(&table) {
        Some(narrow) => run_search::<u128>(&narrow, m, n, ef_only).into_bigint_value(),
        None => {
            let (v, a) = run_search::<BigInt>(&table, m, n, ef_only);
            (v, a)
        }
    };
    let makespan = Cost::Finite(BigRational::new(value, denom));
    Ok((IntegralAssignment::new(machine_of), makespan))
}

/// Least common multiple of all finite-entry denominators.
fn common_denominator(instance: &Instance) -> BigInt {
    let mut d = BigInt::one();
    for row in instance.rows() {
        for c in row {
            if let Some(r) = c.as_ratio() {
                d = d.lcm(r.denom());
            }
        }
    }
    d
}

/// Integer cost table in job-major layout: `table[j][i]` is machine `i`'s
/// scaled cost for job `j`, None when infinite.
fn scaled_table(instance: &Instance, denom: &BigInt) -> Vec<Vec<Option<BigInt>>> {
    (0..instance.jobs())
        .map(|j| {
            (0..instance.machines())
                .map(|i| {
                    instance
                        .cost(i, j)
                        .as_ratio()
                        .map(|r| r.numer() * (denom / r.denom()))
                })
                .collect()
        })
        .collect()
}

/// Downcast the table to u128 when every possible sum stays far from
/// overflow: any assignment total is at most the sum over jobs of the
/// per-job maximum, and the largest intermediate value is twice that.
fn narrow_table(table: &[Vec<Option<BigInt>>]) -> Option<Vec<Vec<Option<u128>>>> {
    let mut bound = <BigInt as Zero>::zero();
    for row in table {
        if let Some(mx) = row.iter().flatten().max() {
            bound += mx;
        }
    }
    let limit = BigInt::from(u128::MAX / 4);
    if bound > limit {
        return None;
    }
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Some(v) => u128::try_from(v.clone()).ok().map(Some),
                    None => Some(None),
                })
                .collect()
        })
        .collect()
}

/// Integer weight usable in the enumeration. Sums stay within bounds by
/// the `narrow_table` check for u128; BigInt is the fallback.
trait Weight: Clone + Ord + Send + Sync {
    fn zero() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn into_bigint(self) -> BigInt;
}

impl Weight for u128 {
    fn zero() -> Self {
        0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn into_bigint(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Weight for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn into_bigint(self) -> BigInt {
        self
    }
}

trait IntoBigintValue {
    fn into_bigint_value(self) -> (BigInt, Vec<usize>);
}

impl<T: Weight> IntoBigintValue for (T, Vec<usize>) {
    fn into_bigint_value(self) -> (BigInt, Vec<usize>) {
        (self.0.into_bigint(), self.1)
    }
}

struct Ctx<'a, T> {
    costs: &'a [Vec<Option<T>>],
    m: usize,
    n: usize,
    ef_only: bool,
}

/// Branch-and-bound over all assignments in lexicographic `machine_of`
/// order. The incumbent starts at the cheapest-total assignment (which is
/// locally efficient, so it is a valid seed for both oracle flavors);
/// subtrees whose partial makespan already exceeds the incumbent value are
/// cut. Prefixes are distributed over worker threads and merged by exact
/// (value, vector) minimum, so parallel runs equal serial ones.
fn run_search<T: Weight>(
    table: &[Vec<Option<T>>],
    m: usize,
    n: usize,
    ef_only: bool,
) -> (T, Vec<usize>) {
    let ctx = Ctx { costs: table, m, n, ef_only };
    let init = cheapest_total_assignment(&ctx);
    debug_assert!(!ef_only || {
        let loads = loads_of(&ctx, &init.1);
        locally_efficient_scaled(&ctx, &init.1, &loads)
    });

    // Split the first few job choices into parallel tasks.
    let mut prefix_len = 0usize;
    let mut width = 1usize;
    while prefix_len < n && width < 64 {
        width = width.saturating_mul(m);
        prefix_len += 1;
    }
    let mut tasks = Vec::new();
    gather_prefixes(
        &ctx,
        prefix_len,
        &init.0,
        &mut vec![T::zero(); m],
        &mut Vec::with_capacity(prefix_len),
        &T::zero(),
        &mut tasks,
    );

    tasks
        .into_par_iter()
        .map(|(cur, loads, max)| {
            let mut best = init.clone();
            let mut cur = cur;
            let mut loads = loads;
            descend(&ctx, &mut loads, &mut cur, &max, &mut best);
            best
        })
        .min()
        .unwrap_or(init)
}

type Task<T> = (Vec<usize>, Vec<T>, T);

fn gather_prefixes<T: Weight>(
    ctx: &Ctx<T>,
    depth: usize,
    bound: &T,
    loads: &mut Vec<T>,
    cur: &mut Vec<usize>,
    cur_max: &T,
    out: &mut Vec<Task<T>>,
) {
    if cur.len() == depth {
        out.push((cur.clone(), loads.clone(), cur_max.clone()));
        return;
    }
    let j = cur.len();
    for i in 0..ctx.m {
        let Some(c) = &ctx.costs[j][i] else { continue };
        let new_load = loads[i].plus(c);
        let new_max = if new_load > *cur_max { new_load.clone() } else { cur_max.clone() };
        if new_max > *bound {
            continue;
        }
        let saved = std::mem::replace(&mut loads[i], new_load);
        cur.push(i);
        gather_prefixes(ctx, depth, bound, loads, cur, &new_max, out);
        cur.pop();
        loads[i] = saved;
    }
}

fn descend<T: Weight>(
    ctx: &Ctx<T>,
    loads: &mut Vec<T>,
    cur: &mut Vec<usize>,
    cur_max: &T,
    best: &mut (T, Vec<usize>),
) {
    if cur.len() == ctx.n {
        let better =
            *cur_max < best.0 || (*cur_max == best.0 && cur.as_slice() < best.1.as_slice());
        if better && (!ctx.ef_only || locally_efficient_scaled(ctx, cur, loads)) {
            *best = (cur_max.clone(), cur.clone());
        }
        return;
    }
    let j = cur.len();
    for i in 0..ctx.m {
        let Some(c) = &ctx.costs[j][i] else { continue };
        let new_load = loads[i].plus(c);
        let new_max = if new_load > *cur_max { new_load.clone() } else { cur_max.clone() };
        // Equal partial makespans stay alive: they may still win the
        // lexicographic tie-break.
        if new_max > best.0 {
            continue;
        }
        let saved = std::mem::replace(&mut loads[i], new_load);
        cur.push(i);
        descend(ctx, loads, cur, &new_max, best);
        cur.pop();
        loads[i] = saved;
    }
}

/// Every job on its cheapest machine (lowest index on ties): the minimum
/// possible total cost, hence locally efficient.
fn cheapest_total_assignment<T: Weight>(ctx: &Ctx<T>) -> (T, Vec<usize>) {
    let mut machine_of = Vec::with_capacity(ctx.n);
    let mut loads = vec![T::zero(); ctx.m];
    for j in 0..ctx.n {
        let i = (0..ctx.m)
            .filter(|&i| ctx.costs[j][i].is_some())
            .min_by(|&a, &b| ctx.costs[j][a].cmp(&ctx.costs[j][b]).then(a.cmp(&b)))
            .expect("feasibility checked before the search");
        loads[i] = loads[i].plus(ctx.costs[j][i].as_ref().unwrap());
        machine_of.push(i);
    }
    let value = loads.into_iter().max().unwrap_or_else(T::zero);
    (value, machine_of)
}

fn loads_of<T: Weight>(ctx: &Ctx<T>, machine_of: &[usize]) -> Vec<T> {
    let mut loads = vec![T::zero(); ctx.m];
    for (j, &i) in machine_of.iter().enumerate() {
        loads[i] = loads[i].plus(ctx.costs[j][i].as_ref().expect("finite placements only"));
    }
    loads
}

/// Local efficiency over scaled integers: does any bundle bijection beat
/// the identity total? A cheap improving-swap scan rejects most failures
/// before the full search.
fn locally_efficient_scaled<T: Weight>(ctx: &Ctx<T>, machine_of: &[usize], loads: &[T]) -> bool {
    let m = ctx.m;
    let mut w: Vec<Vec<Option<T>>> = vec![vec![Some(T::zero()); m]; m];
    for (j, &holder) in machine_of.iter().enumerate() {
        for i in 0..m {
            match (&ctx.costs[j][i], w[i][holder].take()) {
                (Some(c), Some(acc)) => w[i][holder] = Some(acc.plus(c)),
                _ => w[i][holder] = None,
            }
        }
    }
    let identity: T = loads.iter().fold(T::zero(), |acc, l| acc.plus(l));
    debug_assert!((0..m).all(|i| w[i][i].as_ref() == Some(&loads[i])));

    for i in 0..m {
        for k in (i + 1)..m {
            if let (Some(a), Some(b)) = (&w[i][k], &w[k][i]) {
                if a.plus(b) < w[i][i].as_ref().unwrap().plus(w[k][k].as_ref().unwrap()) {
                    return false;
                }
            }
        }
    }

    if m <= 9 {
        !cheaper_bijection_exists(&w, m, 0, 0, &T::zero(), &identity)
    } else {
        // Rare shape (many machines, few jobs): lean on the exact matcher.
        let costs: Vec<Vec<Cost>> = w
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Some(v) => {
                            Cost::Finite(BigRational::from_integer(v.clone().into_bigint()))
                        }
                        None => Cost::Infinite,
                    })
                    .collect()
            })
            .collect();
        match min_weight_assignment(&costs) {
            Ok(r) => {
                r.total == Cost::Finite(BigRational::from_integer(identity.into_bigint()))
            }
            Err(_) => true,
        }
    }
}

fn cheaper_bijection_exists<T: Weight>(
    w: &[Vec<Option<T>>],
    m: usize,
    row: usize,
    used: u32,
    acc: &T,
    identity: &T,
) -> bool {
    if acc >= identity {
        return false;
    }
    if row == m {
        return true;
    }
    for k in 0..m {
        if used & (1 << k) != 0 {
            continue;
        }
        if let Some(c) = &w[row][k] {
            if cheaper_bijection_exists(w, m, row + 1, used | (1 << k), &acc.plus(c), identity) {
                return true;
            }
        }
    }
    false
}
