//! The constructive exchange step behind fractional local efficiency: if
//! a cycle of machines values its successors' bundles at factors 1 +
//! delta_i with the deltas summing negative, blending each bundle between
//! its holder and the next machine strictly improves the sorted load
//! vector. Run with `cargo run --example cycle_repair`.

use efsched::cost::ratio;
use efsched::divisible::{cycle_repair, CycleRepairPlan};
use efsched::instance::{loads, FractionalAssignment};
use efsched::{Cost, Instance, Result};

fn main() -> Result<()> {
    // Two machines, each fully holding its own job at load exactly 1.
    // Machine 1 runs machine 0's job at factor 1/2 (delta_0 = -1/2),
    // machine 0 runs machine 1's at 5/4 (delta_1 = 1/4).
    let instance = Instance::new(vec![
        vec![Cost::from_int(1), Cost::from_ratio(ratio(5, 4))?],
        vec![Cost::from_ratio(ratio(1, 2))?, Cost::from_int(1)],
    ])?;
    let identity = FractionalAssignment::new(vec![
        vec![ratio(1, 1), ratio(0, 1)],
        vec![ratio(0, 1), ratio(1, 1)],
    ]);
    let before = loads(&instance, &identity)?;
    println!(
        "loads before: {:?}",
        before.0.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );

    let plan = CycleRepairPlan::new(vec![0, 1], vec![ratio(-1, 2), ratio(1, 4)])?;
    println!(
        "keep fractions alpha = {:?} (mu = {})",
        plan.alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        plan.mu
    );

    let repaired = cycle_repair(&instance, &identity, &plan)?;
    let after = loads(&instance, &repaired)?;
    println!(
        "loads after:  {:?}",
        after.0.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );
    println!("machine 0 dropped strictly below 1, machine 1 stayed exactly at 1;");
    println!("the sorted load vector went down, which is what the exchange argument needs.");
    Ok(())
}
