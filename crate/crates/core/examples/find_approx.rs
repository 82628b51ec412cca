//! The phased rebalancing algorithm end to end: start from greedy
//! bundles, rebalance until every load clears the threshold, and compare
//! the result against the exhaustive optimum. Run with
//! `cargo run --example find_approx`.

use efsched::cost::int_ratio;
use efsched::envy::{compute_payments, verify_envy_free};
use efsched::generate::random_uniform;
use efsched::indivisible::{exact_optimum, find_approx, greedy_bundles, DEFAULT_ORACLE_CAP};
use efsched::instance::makespan;
use efsched::Result;

fn main() -> Result<()> {
    let instance = random_uniform(4, 9, 10, 42)?;
    let (bundles, m_init) = greedy_bundles(&instance)?;
    println!("greedy start: makespan {m_init}, bundles {:?}", bundles.bundles());

    let beta = int_ratio(2);
    let schedule = find_approx(&instance, &bundles, &beta, &m_init)?;
    println!("threshold per phase: {}", schedule.threshold);
    for (t, phase) in schedule.phase_assignments.iter().enumerate() {
        println!(
            "phase {t}: {} active bundles, {} pushed to the next phase, jobs {:?}",
            phase.active_at_start, phase.discarded, phase.jobs_by_machine
        );
    }

    let achieved = makespan(&instance, &schedule.final_assignment)?;
    let q = schedule.phases();
    println!("final makespan {achieved} over {q} phases (bound {})", schedule.threshold.times(&int_ratio(q as i64)));

    let (_, opt) = exact_optimum(&instance, DEFAULT_ORACLE_CAP)?;
    println!("exhaustive optimum {opt}");

    // The output is always locally efficient, so payments exist.
    let payments = compute_payments(&instance, &schedule.final_assignment)?;
    println!(
        "payments {:?} verify envy-free: {}",
        payments.p.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        verify_envy_free(&instance, &schedule.final_assignment, &payments)?
    );
    Ok(())
}
