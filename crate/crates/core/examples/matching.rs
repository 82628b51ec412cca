//! Exact min-cost matching drives every rebalancing step: bundles are
//! reassigned to machines as a minimum-weight bijection. Run with
//! `cargo run --example matching`.

use efsched::matching::{le_of_family, min_weight_assignment};
use efsched::{Cost, Instance, Result};

fn main() -> Result<()> {
    // A weight matrix with a forbidden cell. Minimum-weight bijections
    // tie-break to the lexicographically smallest permutation.
    let weights = vec![
        vec![Cost::from_int(4), Cost::from_int(1), Cost::from_int(3)],
        vec![Cost::from_int(2), Cost::Infinite, Cost::from_int(5)],
        vec![Cost::from_int(3), Cost::from_int(2), Cost::from_int(2)],
    ];
    let result = min_weight_assignment(&weights)?;
    println!(
        "row i takes column {:?}, total weight {}",
        result.permutation, result.total
    );

    // Placing two job bundles on three machines: the family need not
    // cover all machines, the matching pads with empty bundles.
    let instance = Instance::new(vec![
        vec![Cost::from_int(9), Cost::from_int(1), Cost::from_int(1)],
        vec![Cost::from_int(1), Cost::from_int(9), Cost::from_int(9)],
        vec![Cost::from_int(2), Cost::from_int(2), Cost::from_int(2)],
    ])?;
    let family = vec![vec![0], vec![1, 2]];
    let placement = le_of_family(&instance, &family)?;
    println!(
        "bundle placement {:?}, machine job lists {:?}, total {}",
        placement.bundle_on_machine,
        placement.jobs_by_machine(&family),
        placement.result.total
    );
    Ok(())
}
