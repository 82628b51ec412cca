//! Cost matrices, assignments, load vectors, and bundle structures.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cost::Cost;
use crate::error::Error;
use crate::Result;

/// A scheduling instance: `m >= 1` machines, `n >= 0` jobs, and the cost
/// of running each job on each machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    costs: Vec<Vec<Cost>>,
    fully_assignable: bool,
}

impl Instance {
    /// `costs[i][j]` is machine `i`'s cost for job `j`. Rows must be equally
    /// long and at least one machine is required.
    pub fn new(costs: Vec<Vec<Cost>>) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::invalid("an instance needs at least one machine"));
        }
        let n = costs[0].len();
        if costs.iter().any(|row| row.len() != n) {
            return Err(Error::dims("cost rows have unequal lengths"));
        }
        let fully_assignable =
            (0..n).all(|j| costs.iter().any(|row| row[j].is_finite()));
        Ok(Instance { costs, fully_assignable })
    }

    pub fn machines(&self) -> usize {
        self.costs.len()
    }

    pub fn jobs(&self) -> usize {
        self.costs[0].len()
    }

    pub fn cost(&self, machine: usize, job: usize) -> &Cost {
        &self.costs[machine][job]
    }

    pub fn rows(&self) -> &[Vec<Cost>] {
        &self.costs
    }

    /// True iff every job has a finite cost on at least one machine.
    pub fn fully_assignable(&self) -> bool {
        self.fully_assignable
    }

    /// Total cost on `machine` of the given set of jobs.
    pub fn set_load(&self, machine: usize, jobs: &[usize]) -> Cost {
        let mut total = Cost::zero();
        for &j in jobs {
            total += &self.costs[machine][j];
        }
        total
    }
}

/// Every job on exactly one machine: `machine_of[j]` hosts job `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralAssignment {
    pub machine_of: Vec<usize>,
}

impl IntegralAssignment {
    pub fn new(machine_of: Vec<usize>) -> Self {
        IntegralAssignment { machine_of }
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        if self.machine_of.len() != instance.jobs() {
            return Err(Error::dims(format!(
                "assignment covers {} jobs, instance has {}",
                self.machine_of.len(),
                instance.jobs()
            )));
        }
        if let Some(&i) = self.machine_of.iter().find(|&&i| i >= instance.machines()) {
            return Err(Error::dims(format!(
                "machine index {i} out of range for {} machines",
                instance.machines()
            )));
        }
        Ok(())
    }

    /// Jobs hosted by `machine`, in increasing order.
    pub fn bundle_of(&self, machine: usize) -> Vec<usize> {
        (0..self.machine_of.len())
            .filter(|&j| self.machine_of[j] == machine)
            .collect()
    }
}

/// Jobs split fractionally: `fractions[i][j]` of job `j` runs on machine `i`.
/// Columns sum to one and all entries are nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalAssignment {
    pub fractions: Vec<Vec<BigRational>>,
}

impl FractionalAssignment {
    pub fn new(fractions: Vec<Vec<BigRational>>) -> Self {
        FractionalAssignment { fractions }
    }

    pub fn machines(&self) -> usize {
        self.fractions.len()
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        if self.fractions.len() != instance.machines()
            || self.fractions.iter().any(|r| r.len() != instance.jobs())
        {
            return Err(Error::dims("fraction matrix shape differs from instance"));
        }
        for row in &self.fractions {
            if let Some(f) = row.iter().find(|f| f.is_negative()) {
                return Err(Error::invalid(format!(
                    "negative fraction {}",
                    crate::cost::ratio_string(f)
                )));
            }
        }
        for j in 0..instance.jobs() {
            let sum: BigRational = self.fractions.iter().map(|r| r[j].clone()).sum();
            if !sum.is_one() {
                return Err(Error::invalid(format!(
                    "job {j} fractions sum to {}, not 1",
                    crate::cost::ratio_string(&sum)
                )));
            }
        }
        Ok(())
    }

    /// Checks that positive weight only sits on finite cost entries.
    pub fn validate_supports(&self, instance: &Instance) -> Result<()> {
        self.validate_for(instance)?;
        for (i, row) in self.fractions.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                if f.is_positive() && !instance.cost(i, j).is_finite() {
                    return Err(Error::invalid(format!(
                        "job {j} has positive weight on machine {i} with infinite cost"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Either flavor of assignment, borrowed. Lets load and efficiency checks
/// treat integral schedules as 0/1 fractional ones without copying.
#[derive(Debug, Clone, Copy)]
pub enum AssignmentRef<'a> {
    Integral(&'a IntegralAssignment),
    Fractional(&'a FractionalAssignment),
}

impl<'a> From<&'a IntegralAssignment> for AssignmentRef<'a> {
    fn from(a: &'a IntegralAssignment) -> Self {
        AssignmentRef::Integral(a)
    }
}

impl<'a> From<&'a FractionalAssignment> for AssignmentRef<'a> {
    fn from(a: &'a FractionalAssignment) -> Self {
        AssignmentRef::Fractional(a)
    }
}

impl<'a> AssignmentRef<'a> {
    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        match self {
            AssignmentRef::Integral(a) => a.validate_for(instance),
            AssignmentRef::Fractional(a) => a.validate_for(instance),
        }
    }

    /// Cost machine `evaluator` would pay to run machine `holder`'s bundle.
    /// For `evaluator == holder` this is the machine's own load.
    pub fn cross_load(&self, instance: &Instance, evaluator: usize, holder: usize) -> Cost {
        match self {
            AssignmentRef::Integral(a) => {
                let mut total = Cost::zero();
                for (j, &host) in a.machine_of.iter().enumerate() {
                    if host == holder {
                        total += instance.cost(evaluator, j);
                    }
                }
                total
            }
            AssignmentRef::Fractional(a) => {
                let mut total = Cost::zero();
                for (j, f) in a.fractions[holder].iter().enumerate() {
                    if !f.is_zero() {
                        total += &instance.cost(evaluator, j).times(f);
                    }
                }
                total
            }
        }
    }
}

/// Per-machine loads of some assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadVector(pub Vec<Cost>);

impl LoadVector {
    pub fn max(&self) -> &Cost {
        self.0.iter().max().expect("instances have at least one machine")
    }
}

/// Load of one machine. Infinite exactly when the machine carries positive
/// weight of a job it cannot run.
pub fn load<'a>(
    instance: &Instance,
    assignment: impl Into<AssignmentRef<'a>>,
    machine: usize,
) -> Result<Cost> {
    let a = assignment.into();
    a.validate_for(instance)?;
    if machine >= instance.machines() {
        return Err(Error::dims(format!("machine {machine} out of range")));
    }
    Ok(a.cross_load(instance, machine, machine))
}

/// All machine loads.
pub fn loads<'a>(instance: &Instance, assignment: impl Into<AssignmentRef<'a>>) -> Result<LoadVector> {
    let a = assignment.into();
    a.validate_for(instance)?;
    Ok(LoadVector(
        (0..instance.machines())
            .map(|i| a.cross_load(instance, i, i))
            .collect(),
    ))
}

/// Maximum machine load.
pub fn makespan<'a>(instance: &Instance, assignment: impl Into<AssignmentRef<'a>>) -> Result<Cost> {
    Ok(loads(instance, assignment)?.max().clone())
}

/// Compares two load vectors by their sorted, non-increasing rearrangements.
/// This is the order whose minimum characterizes efficient fractional
/// schedules; it is only defined for finite loads.
pub fn lex_compare(a: &LoadVector, b: &LoadVector) -> Result<Ordering> {
    if a.0.len() != b.0.len() {
        return Err(Error::dims("load vectors have different lengths"));
    }
    let sorted_desc = |v: &LoadVector| -> Result<Vec<BigRational>> {
        let mut out = Vec::with_capacity(v.0.len());
        for c in &v.0 {
            match c.as_ratio() {
                Some(r) => out.push(r.clone()),
                None => return Err(Error::invalid("lex_compare requires finite loads")),
            }
        }
        out.sort_by(|x, y| y.cmp(x));
        Ok(out)
    };
    Ok(sorted_desc(a)?.cmp(&sorted_desc(b)?))
}

/// A partition of all jobs into one (possibly empty) bundle per machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleSet {
    bundles: Vec<Vec<usize>>,
    origin_machine: Option<Vec<usize>>,
}

impl BundleSet {
    /// `bundles` must have one entry per machine and partition `0..jobs`.
    pub fn new(bundles: Vec<Vec<usize>>, jobs: usize) -> Result<Self> {
        let mut seen = vec![false; jobs];
        for b in &bundles {
            for &j in b {
                if j >= jobs {
                    return Err(Error::dims(format!("job {j} out of range")));
                }
                if seen[j] {
                    return Err(Error::invalid(format!("job {j} appears in two bundles")));
                }
                seen[j] = true;
            }
        }
        if let Some(j) = seen.iter().position(|&s| !s) {
            return Err(Error::invalid(format!("job {j} missing from every bundle")));
        }
        let mut bundles = bundles;
        for b in &mut bundles {
            b.sort_unstable();
        }
        Ok(BundleSet { bundles, origin_machine: None })
    }

    /// Records which machine held each bundle in the assignment the set was
    /// derived from.
    pub fn with_origin(mut self, origin: Vec<usize>) -> Result<Self> {
        if origin.len() != self.bundles.len() {
            return Err(Error::dims("origin list length differs from bundle count"));
        }
        self.origin_machine = Some(origin);
        Ok(self)
    }

    pub fn machines(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, i: usize) -> &[usize] {
        &self.bundles[i]
    }

    /// Origin of bundle `i`; defaults to `i` itself when nothing was recorded.
    pub fn origin_of(&self, i: usize) -> usize {
        self.origin_machine.as_ref().map_or(i, |o| o[i])
    }
}

/// Groups an integral assignment into its per-machine bundles, recording the
/// identity origin.
pub fn bundles_from_assignment(
    instance: &Instance,
    assignment: &IntegralAssignment,
) -> Result<BundleSet> {
    assignment.validate_for(instance)?;
    let mut bundles = vec![Vec::new(); instance.machines()];
    for (j, &i) in assignment.machine_of.iter().enumerate() {
        bundles[i].push(j);
    }
    BundleSet::new(bundles, instance.jobs())
        .and_then(|b| b.with_origin((0..instance.machines()).collect()))
}
