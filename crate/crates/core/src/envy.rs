//! Local efficiency and envy-free payments.
//!
//! An assignment is *locally efficient* when no permutation of the
//! machines' bundles has a strictly smaller total load. That is exactly
//! the condition under which per-machine payments exist making the
//! schedule envy-free under quasi-linear utility (payment minus own
//! load): feasibility of the payment system and optimality of the
//! identity placement are two faces of one linear program.
//!
//! `is_locally_efficient` decides the condition by matching;
//! `compute_payments` solves the difference-constraint system directly by
//! shortest paths and therefore doubles as an independent check.

use num_rational::BigRational;
use num_traits::Zero;

use crate::cost::Cost;
use crate::error::Error;
use crate::instance::{AssignmentRef, Instance};
use crate::matching::min_weight_assignment;
use crate::Result;

/// Per-machine payments, one rational per machine.
///
/// `compute_payments` normalizes its output so that `min_i p[i] = 0`;
/// envy-freeness is invariant under a common shift, so the normalization
/// is only a canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payments {
    pub p: Vec<BigRational>,
}

/// A bundle rotation that strictly lowers total load. `machines` lists a
/// cycle in rotation order: each listed machine takes the bundle of the
/// next one (the last takes the first's). `decrease` is the exact drop in
/// total load, `Infinite` when the rotation replaces an infinite own load
/// by a finite one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovingCycle {
    pub machines: Vec<usize>,
    pub decrease: Cost,
}

/// Verdict of the local-efficiency test, with a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyCertificate {
    pub verdict: bool,
    pub witness: Option<ImprovingCycle>,
}

fn validate_full(instance: &Instance, a: &AssignmentRef) -> Result<()> {
    match a {
        AssignmentRef::Integral(x) => x.validate_for(instance),
        AssignmentRef::Fractional(x) => x.validate_supports(instance),
    }
}

/// The m-by-m matrix of cross loads: entry (i, k) is what machine `i`
/// would pay to run machine `k`'s bundle.
fn cross_loads(instance: &Instance, a: &AssignmentRef) -> Vec<Vec<Cost>> {
    let m = instance.machines();
    (0..m)
        .map(|i| (0..m).map(|k| a.cross_load(instance, i, k)).collect())
        .collect()
}

/// Decides whether any bundle permutation beats the identity placement.
pub fn is_locally_efficient<'a>(
    instance: &Instance,
    assignment: impl Into<AssignmentRef<'a>>,
) -> Result<EfficiencyCertificate> {
    let a = assignment.into();
    validate_full(instance, &a)?;
    let w = cross_loads(instance, &a);
    let identity_total: Cost = (0..w.len()).map(|i| w[i][i].clone()).sum();

    let best = match min_weight_assignment(&w) {
        Ok(r) => r,
        // Every bijection, the identity included, has infinite total; no
        // permutation can be strictly better.
        Err(Error::NoFiniteMatching) => {
            return Ok(EfficiencyCertificate { verdict: true, witness: None })
        }
        Err(e) => return Err(e),
    };

    if best.total == identity_total {
        return Ok(EfficiencyCertificate { verdict: true, witness: None });
    }
    debug_assert!(best.total < identity_total);
    let witness = improving_cycle_from(&w, &best.permutation)
        .ok_or_else(|| Error::Internal("cheaper permutation without improving cycle".into()))?;
    Ok(EfficiencyCertificate { verdict: false, witness: Some(witness) })
}

/// Splits `perm` into cycles and returns the first (by smallest member)
/// whose rotation strictly decreases total load.
fn improving_cycle_from(w: &[Vec<Cost>], perm: &[usize]) -> Option<ImprovingCycle> {
    let m = perm.len();
    let mut seen = vec![false; m];
    for start in 0..m {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut own = Cost::zero();
        let mut rotated = Cost::zero();
        let mut i = start;
        loop {
            seen[i] = true;
            cycle.push(i);
            own += &w[i][i];
            rotated += &w[i][perm[i]];
            i = perm[i];
            if i == start {
                break;
            }
        }
        if rotated < own {
            let decrease = match (own, rotated) {
                (Cost::Finite(o), Cost::Finite(r)) => Cost::Finite(o - r),
                (Cost::Infinite, _) => Cost::Infinite,
                _ => unreachable!("rotated < own rules out finite own with infinite rotation"),
            };
            return Some(ImprovingCycle { machines: cycle, decrease });
        }
    }
    None
}

/// Computes envy-free payments for a locally efficient assignment.
///
/// The envy constraints `p_i - own_i >= p_j - cross_ij` rearrange to the
/// difference system `p_j - p_i <= cross_ij - own_i` over all pairs with
/// finite cross load. Shortest-path distances from a virtual source solve
/// it; a negative cycle is precisely an improving bundle rotation.
///
/// Requires every machine's own load to be finite: an infinite own load
/// makes the machine's utility ill-defined (there is no finite payment
/// vector once any other bundle is finite for it, and the quasi-linear
/// comparison degenerates otherwise).
pub fn compute_payments<'a>(
    instance: &Instance,
    assignment: impl Into<AssignmentRef<'a>>,
) -> Result<Payments> {
    let a = assignment.into();
    validate_full(instance, &a)?;
    let w = cross_loads(instance, &a);
    let m = w.len();

    let mut own = Vec::with_capacity(m);
    for (i, row) in w.iter().enumerate() {
        match row[i].as_ratio() {
            Some(r) => own.push(r.clone()),
            None => return Err(Error::InfiniteLoad { machine: i }),
        }
    }

    // Edge i -> j with weight cross_ij - own_i, finite entries only.
    let mut edges = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            if let Some(cross) = w[i][j].as_ratio() {
                edges.push((i, j, cross - &own[i]));
            }
        }
    }

    // Bellman-Ford from a virtual source connected to every machine with
    // weight 0: start all distances at zero.
    let mut dist = vec![BigRational::zero(); m];
    let mut pred = vec![usize::MAX; m];
    let mut improved_at = usize::MAX;
    for round in 0..m {
        let mut improved = false;
        for (i, j, wt) in &edges {
            let cand = &dist[*i] + wt;
            if cand < dist[*j] {
                dist[*j] = cand;
                pred[*j] = *i;
                improved = true;
                improved_at = *j;
            }
        }
        if !improved {
            break;
        }
        if round == m - 1 {
            // A relaxation in round m means a negative cycle; walk the
            // predecessor chain into it and read it off.
            let witness = extract_cycle(&pred, improved_at, &w, &own);
            return Err(Error::NotLocallyEfficient { witness: Box::new(witness) });
        }
    }

    let min = dist.iter().min().cloned().unwrap_or_else(BigRational::zero);
    Ok(Payments { p: dist.into_iter().map(|d| d - &min).collect() })
}

fn extract_cycle(pred: &[usize], start: usize, w: &[Vec<Cost>], own: &[BigRational]) -> ImprovingCycle {
    // After m rounds of relaxation, walking m predecessor steps lands
    // strictly inside the cycle.
    let mut x = start;
    for _ in 0..pred.len() {
        x = pred[x];
    }
    let mut cycle = vec![x];
    let mut cur = pred[x];
    while cur != x {
        cycle.push(cur);
        cur = pred[cur];
    }
    // pred order is reversed edge order; flip so each machine takes the
    // next listed machine's bundle.
    cycle.reverse();
    // Start the listing at the smallest machine for a canonical witness.
    let pos = cycle
        .iter()
        .position(|&i| Some(&i) == cycle.iter().min())
        .expect("cycle is nonempty");
    cycle.rotate_left(pos);

    let mut drop = BigRational::zero();
    for r in 0..cycle.len() {
        let (i, j) = (cycle[r], cycle[(r + 1) % cycle.len()]);
        let cross = w[i][j].as_ratio().expect("cycle edges are finite");
        drop += &own[i] - cross;
    }
    debug_assert!(drop > BigRational::zero());
    ImprovingCycle { machines: cycle, decrease: Cost::Finite(drop) }
}

/// Exact check of the envy-freeness inequalities for given payments.
/// A pair whose cross load is infinite is vacuously satisfied.
pub fn verify_envy_free<'a>(
    instance: &Instance,
    assignment: impl Into<AssignmentRef<'a>>,
    payments: &Payments,
) -> Result<bool> {
    let a = assignment.into();
    validate_full(instance, &a)?;
    let m = instance.machines();
    if payments.p.len() != m {
        return Err(Error::dims("payment vector length differs from machine count"));
    }
    let w = cross_loads(instance, &a);
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let cross = match w[i][j].as_ratio() {
                Some(c) => c,
                None => continue,
            };
            match w[i][i].as_ratio() {
                // p_i - own_i >= p_j - cross_ij, exactly.
                Some(o) => {
                    if &payments.p[i] - o < &payments.p[j] - cross {
                        return Ok(false);
                    }
                }
                // Own load infinite but some other bundle finite: machine i
                // envies no matter the payments.
                None => return Ok(false),
            }
        }
    }
    Ok(true)
}
