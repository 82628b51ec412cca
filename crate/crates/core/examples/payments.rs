//! Payments from local efficiency: a schedule admits envy-removing
//! payments exactly when no cyclic exchange of the machines' bundles
//! lowers total cost. Run with `cargo run --example payments`.

use efsched::envy::{compute_payments, is_locally_efficient, verify_envy_free};
use efsched::{Cost, Error, Instance, IntegralAssignment, Result};

fn inst(rows: &[&[&str]]) -> Instance {
    Instance::new(
        rows.iter()
            .map(|r| r.iter().map(|s| s.parse::<Cost>().unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

fn main() -> Result<()> {
    // Two specialists and a generalist. "inf" marks a job a machine
    // cannot run at all.
    let instance = inst(&[
        &["1", "4", "inf", "3"],
        &["5", "1", "2", "3"],
        &["2", "2", "2", "2"],
    ]);

    // Each machine gets the job it is (weakly) best at; job 3 goes to the
    // generalist.
    let good = IntegralAssignment::new(vec![0, 1, 1, 2]);
    let cert = is_locally_efficient(&instance, &good)?;
    println!("assignment {:?} locally efficient: {}", good.machine_of, cert.verdict);

    let payments = compute_payments(&instance, &good)?;
    for (i, p) in payments.p.iter().enumerate() {
        println!("  machine {i} is paid {p}");
    }
    println!(
        "envy-free under those payments: {}",
        verify_envy_free(&instance, &good, &payments)?
    );

    // Swap the specialists' jobs and payment computation fails, returning
    // the improving exchange as a witness.
    let bad = IntegralAssignment::new(vec![1, 0, 1, 2]);
    match compute_payments(&instance, &bad) {
        Err(Error::NotLocallyEfficient { witness }) => {
            println!(
                "assignment {:?} rejected: rotating bundles along machines {:?} \
                 saves {} in total cost",
                bad.machine_of, witness.machines, witness.decrease
            );
        }
        other => panic!("expected a local-efficiency failure, got {other:?}"),
    }
    Ok(())
}
