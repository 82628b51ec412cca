//! Seeded instance generators for experiments and tests. Everything is a
//! pure function of its parameters and the 64-bit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{ratio, Cost};
use crate::error::Error;
use crate::instance::Instance;
use crate::Result;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("need at least one machine"));
    }
    let _ = n;
    Ok(())
}

/// Costs drawn uniformly from {1/denom, 2/denom, ..., denom/denom}.
pub fn random_uniform(m: usize, n: usize, denom: u64, seed: u64) -> Result<Instance> {
    check_shape(m, n)?;
    if denom == 0 || denom > i64::MAX as u64 {
        return Err(Error::invalid("denominator must be a positive machine integer"));
    }
    let mut rng = rng_for(seed);
    let rows = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| Cost::Finite(ratio(rng.gen_range(1..=denom) as i64, denom as i64)))
                .collect()
        })
        .collect();
    Instance::new(rows)
}

/// Uniform costs with every entry independently struck to infinity with
/// probability `rho`; any column left with no finite entry gets one
/// restored on a machine drawn from the same stream, so the instance stays
/// fully assignable.
pub fn random_inf_mask(m: usize, n: usize, denom: u64, rho: f64, seed: u64) -> Result<Instance> {
    check_shape(m, n)?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid("rho must lie in [0, 1]"));
    }
    let base = random_uniform(m, n, denom, seed)?;
    let mut rng = rng_for(seed);
    // Skip past the draws the base matrix consumed so mask bits are fresh
    // but still seed-determined.
    for _ in 0..m * n {
        let _ = rng.gen_range(1..=denom);
    }
    let mut rows: Vec<Vec<Cost>> = base.rows().to_vec();
    for row in rows.iter_mut() {
        for c in row.iter_mut() {
            if rng.gen_bool(rho) {
                *c = Cost::Infinite;
            }
        }
    }
    for j in 0..n {
        if !(0..m).any(|i| rows[i][j].is_finite()) {
            let i = rng.gen_range(0..m);
            rows[i][j] = base.cost(i, j).clone();
        }
    }
    Instance::new(rows)
}

/// `m` machines sharing one cost row.
pub fn identical(m: usize, row: &[Cost]) -> Result<Instance> {
    check_shape(m, row.len())?;
    Instance::new(vec![row.to_vec(); m])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_deterministic_and_in_range() {
        let a = random_uniform(3, 4, 6, 42).unwrap();
        let b = random_uniform(3, 4, 6, 42).unwrap();
        assert_eq!(a.rows(), b.rows());
        assert_ne!(a.rows(), random_uniform(3, 4, 6, 43).unwrap().rows());
        let one = Cost::from_int(1);
        for row in a.rows() {
            for c in row {
                assert!(c.is_finite() && *c <= one && !c.is_zero());
            }
        }
    }

    #[test]
    fn masked_instances_stay_assignable() {
        for seed in 0..20 {
            let instance = random_inf_mask(4, 5, 8, 0.9, seed).unwrap();
            for j in 0..5 {
                assert!((0..4).any(|i| instance.cost(i, j).is_finite()), "seed {seed} job {j}");
            }
        }
        let a = random_inf_mask(4, 5, 8, 0.5, 7).unwrap();
        let b = random_inf_mask(4, 5, 8, 0.5, 7).unwrap();
        assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn mask_rate_extremes() {
        let none = random_inf_mask(2, 3, 4, 0.0, 1).unwrap();
        assert!(none.rows().iter().flatten().all(Cost::is_finite));
        let all = random_inf_mask(2, 3, 4, 1.0, 1).unwrap();
        // Exactly one finite entry per column survives the repair pass.
        for j in 0..3 {
            assert_eq!((0..2).filter(|&i| all.cost(i, j).is_finite()).count(), 1);
        }
    }

    #[test]
    fn identical_clones_the_row() {
        let row = vec![Cost::from_int(1), Cost::from_int(2)];
        let instance = identical(3, &row).unwrap();
        assert_eq!(instance.machines(), 3);
        for i in 0..3 {
            assert_eq!(instance.rows()[i], row);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(random_uniform(0, 2, 4, 0).is_err());
        assert!(random_uniform(2, 2, 0, 0).is_err());
        assert!(random_inf_mask(2, 2, 4, 1.5, 0).is_err());
        assert!(identical(0, &[]).is_err());
    }
}
