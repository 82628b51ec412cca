//! Divisible jobs: lexicographic load minimization is envy-free for free.
//! The minimum fractional makespan is achieved exactly, no approximation
//! loss. Run with `cargo run --example divisible`.

use efsched::divisible::{lexmin_fractional, min_makespan_fractional, solve_divisible_ef};
use efsched::envy::verify_envy_free;
use efsched::generate::random_uniform;
use efsched::instance::{loads, makespan};
use efsched::Result;

fn main() -> Result<()> {
    let instance = random_uniform(3, 6, 8, 7)?;

    let (t, _) = min_makespan_fractional(&instance)?;
    println!("fractional optimum: {t}");

    let lexmin = lexmin_fractional(&instance)?;
    println!("lexmin loads: {:?}", loads(&instance, &lexmin)?.0.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    assert_eq!(makespan(&instance, &lexmin)?, t);

    let (assignment, payments, achieved) = solve_divisible_ef(&instance)?;
    println!("mechanism makespan {achieved} (ratio over optimum is exactly 1)");
    for (i, row) in assignment.fractions.iter().enumerate() {
        let shares: Vec<String> = row.iter().map(|f| f.to_string()).collect();
        println!("  machine {i}: shares {shares:?}, paid {}", payments.p[i]);
    }
    println!(
        "envy-free: {}",
        verify_envy_free(&instance, &assignment, &payments)?
    );
    Ok(())
}
