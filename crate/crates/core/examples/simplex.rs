//! The embedded exact-rational LP solver. Everything downstream (minimum
//! fractional makespan, lexicographic load minimization) reduces to
//! programs like these. Run with `cargo run --example simplex`.

use efsched::cost::{int_ratio, ratio};
use efsched::linprog::{solve_lp, LinearProgram, LpOutcome, Relation};
use efsched::Result;

fn main() -> Result<()> {
    // min x + y  subject to  x + 2y >= 3,  3x + y >= 4,  x, y >= 0.
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![int_ratio(1), int_ratio(1)];
    lp.constrain(vec![int_ratio(1), int_ratio(2)], Relation::Ge, int_ratio(3));
    lp.constrain(vec![int_ratio(3), int_ratio(1)], Relation::Ge, int_ratio(4));
    match solve_lp(&lp)? {
        LpOutcome::Optimal { point, value } => {
            let p: Vec<String> = point.iter().map(|v| v.to_string()).collect();
            println!("optimum {value} at {p:?} (exact rationals, no rounding)");
        }
        other => panic!("unexpected outcome {other:?}"),
    }

    // Contradictory bounds are detected, not silently clamped.
    let mut infeasible = LinearProgram::new(1);
    infeasible.objective = vec![int_ratio(1)];
    infeasible.constrain(vec![int_ratio(1)], Relation::Ge, ratio(5, 2));
    infeasible.constrain(vec![int_ratio(1)], Relation::Le, int_ratio(2));
    println!("contradictory program: {:?}", solve_lp(&infeasible)?);

    // So is an objective that can sink forever.
    let mut unbounded = LinearProgram::new(1);
    unbounded.objective = vec![int_ratio(-1)];
    println!("sinking objective: {:?}", solve_lp(&unbounded)?);
    Ok(())
}
