//! The oracle sandwich on small random instances: the plain optimum is at
//! most the best locally efficient makespan, which is at most what the
//! phased algorithm achieves. Run with `cargo run --example oracle`.

use efsched::cost::int_ratio;
use efsched::generate::random_uniform;
use efsched::indivisible::{
    exact_ef_optimum, exact_optimum, find_approx, greedy_bundles, DEFAULT_ORACLE_CAP,
};
use efsched::instance::makespan;
use efsched::Result;

fn main() -> Result<()> {
    println!("seed   opt     ef_opt  algorithm");
    for seed in 0..8 {
        let instance = random_uniform(3, 6, 6, seed)?;
        let (_, opt) = exact_optimum(&instance, DEFAULT_ORACLE_CAP)?;
        let (_, ef_opt) = exact_ef_optimum(&instance, DEFAULT_ORACLE_CAP)?;
        let (bundles, m_init) = greedy_bundles(&instance)?;
        let schedule = find_approx(&instance, &bundles, &int_ratio(2), &m_init)?;
        let algo = makespan(&instance, &schedule.final_assignment)?;
        assert!(opt <= ef_opt && ef_opt <= algo);
        println!(
            "{seed:<6} {:<7} {:<7} {}",
            opt.to_string(),
            ef_opt.to_string(),
            algo
        );
    }
    println!("every row satisfies opt <= ef_opt <= algorithm");
    Ok(())
}
