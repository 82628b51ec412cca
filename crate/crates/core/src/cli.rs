//! Command-line surface. One thin binary dispatches here; everything below
//! is a pure function of its arguments and input files, so identical
//! invocations produce byte-identical documents. Timing goes to stderr
//! only, and the counting diagnostic is the single place floats appear.
//!
//! Exit codes: 0 success, 2 unusable input (flags or documents), 3
//! infeasible instance, 4 enumeration over the cap, 5 verification failed,
//! 1 internal error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cost::{parse_ratio, ratio_string, Cost};
use crate::divisible::{min_makespan_fractional, solve_divisible_ef};
use crate::docs::{
    instance_digest, parse, render, AssignmentDocument, InstanceDocument, PaymentsDocument,
};
use crate::envy::{compute_payments, is_locally_efficient, verify_envy_free, Payments};
use crate::error::Error;
use crate::generate as gen;
use crate::indivisible::{
    exact_ef_optimum, exact_optimum, find_approx, greedy_bundles, DEFAULT_ORACLE_CAP,
};
use crate::instance::{bundles_from_assignment, makespan, BundleSet, Instance};
use crate::lowerbound::{
    counting_bound, coupled_ell, gap_experiment, generate as lb_generate, LowerBoundParams,
};
use crate::Result;

#[derive(Parser)]
#[command(
    name = "efsched",
    version,
    about = "Envy-free makespan scheduling: solvers, payments, oracles, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an instance document.
    Generate(GenerateArgs),
    /// Schedule an instance, derive payments, and report exact ratios.
    Solve(SolveArgs),
    /// Re-check an assignment and payments against an instance.
    Verify(VerifyArgs),
    /// Exhaustive optima (plain and envy-free) at small scale.
    Oracle(OracleArgs),
    /// Hard-family experiments and the counting diagnostic.
    Lowerbound(LowerboundArgs),
    /// Run a suite of instances and emit a CSV table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    /// Uniform rational costs k/denom.
    RandomUniform,
    /// Uniform costs with entries struck to infinity at rate rho.
    RandomInfMask,
    /// The staircase-plus-tail family.
    Lowerbound,
    /// One shared cost row.
    Identical,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GenerateKind,
    #[arg(long, default_value_t = 2)]
    machines: usize,
    #[arg(long, default_value_t = 4)]
    jobs: usize,
    /// Cost denominator for the random kinds.
    #[arg(long, default_value_t = 12)]
    denom: u64,
    /// Infinity rate for random-inf-mask.
    #[arg(long, default_value_t = 0.25)]
    rho: f64,
    /// Tail machine count for the lowerbound kind.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Comma-separated cost row for the identical kind, e.g. "1,5/2".
    #[arg(long)]
    row: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Indivisible,
    Divisible,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Phase load threshold factor (at least 2), as an exact rational.
    #[arg(long, default_value = "2")]
    beta: String,
    /// Initial bundles for the indivisible mode: "greedy", "oracle", or a
    /// path to an integral assignment document.
    #[arg(long, default_value = "greedy")]
    initial: String,
    /// Enumeration bound for oracle work.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: u64,
    #[arg(long)]
    out_assignment: Option<PathBuf>,
    #[arg(long)]
    out_payments: Option<PathBuf>,
    /// Report destination (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long)]
    payments: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundArgs {
    #[command(subcommand)]
    command: LowerboundCmd,
}

#[derive(Subcommand)]
enum LowerboundCmd {
    /// Enumerate plain and envy-free optima on one family member.
    Gap {
        #[arg(long)]
        jobs: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the counting argument's two closed forms (approximate
    /// floats, the only inexact output in the tool).
    Counting {
        /// Size as log2(n), so astronomical n stays representable.
        #[arg(long)]
        log2n: f64,
        /// Real-valued ell; defaults to the asymptotic coupling.
        #[arg(long)]
        ell: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Suite document listing kinds, sizes, and repetitions.
    #[arg(long)]
    suite: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses and runs a full command line (first element is the program
/// name). Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let started = Instant::now();
    let outcome = dispatch(cli.command);
    eprintln!("wall_clock_ms={:.3}", started.elapsed().as_secs_f64() * 1e3);
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch(_) => 2,
        Error::Infeasible { .. } | Error::NoFiniteMatching => 3,
        Error::TooLarge { .. } => 4,
        Error::NotLocallyEfficient { .. } | Error::InfiniteLoad { .. } => 5,
        Error::Internal(_) => 1,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Lowerbound(a) => match a.command {
            LowerboundCmd::Gap { jobs, ell, cap, out } => cmd_gap(jobs, ell, cap, out),
            LowerboundCmd::Counting { log2n, ell, out } => cmd_counting(log2n, ell, out),
        },
        Command::Bench(a) => cmd_bench(a),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Internal(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("reading {}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance> {
    parse::<InstanceDocument>(&read_text(path)?)?.to_instance()
}

fn enumeration_states(m: usize, n: usize) -> u128 {
    let mut states: u128 = 1;
    for _ in 0..n {
        states = states.saturating_mul(m as u128);
    }
    states
}

fn cost_ratio(num: &Cost, den: &Cost) -> Option<String> {
    match (num, den) {
        (Cost::Finite(a), Cost::Finite(b)) if !b.is_zero() => Some(ratio_string(&(a / b))),
        _ => None,
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<i32> {
    let instance = match args.kind {
        GenerateKind::RandomUniform => {
            gen::random_uniform(args.machines, args.jobs, args.denom, args.seed)?
        }
        GenerateKind::RandomInfMask => {
            gen::random_inf_mask(args.machines, args.jobs, args.denom, args.rho, args.seed)?
        }
        GenerateKind::Lowerbound => {
            lb_generate(&LowerBoundParams::new(args.jobs, args.ell)?)
        }
        GenerateKind::Identical => {
            let row_text = args
                .row
                .as_deref()
                .ok_or_else(|| Error::invalid("the identical kind needs --row"))?;
            let row = row_text
                .split(',')
                .map(|s| s.trim().parse::<Cost>())
                .collect::<Result<Vec<_>>>()?;
            gen::identical(args.machines, &row)?
        }
    };
    emit(&args.out, &render(&InstanceDocument::from_instance(&instance)))?;
    Ok(0)
}

#[derive(Serialize)]
struct RunReport {
    mode: &'static str,
    instance_digest: String,
    machines: usize,
    jobs: usize,
    /// Plain integral optimum, when the instance is small enough to
    /// enumerate under the cap.
    opt: Option<String>,
    /// Envy-free integral optimum under the same condition.
    ef_opt: Option<String>,
    algorithm_makespan: String,
    /// Fractional optimum (the divisible baseline).
    divisible_opt: Option<String>,
    ratio_algo_over_opt: Option<String>,
    ratio_ef_over_opt: Option<String>,
    ratio_algo_over_divisible: Option<String>,
    phases: Option<usize>,
    phase_discards: Option<Vec<usize>>,
    payments: Vec<String>,
    locally_efficient: bool,
    envy_free: bool,
}

/// Initial bundles plus their makespan; the third slot carries the
/// enumerated optimum when the oracle route already paid for it.
fn initial_bundles(
    instance: &Instance,
    choice: &str,
    cap: u64,
) -> Result<(BundleSet, Cost, Option<Cost>)> {
    match choice {
        "greedy" => {
            let (bundles, m_init) = greedy_bundles(instance)?;
            Ok((bundles, m_init, None))
        }
        "oracle" => {
            let (assignment, opt) = exact_optimum(instance, cap)?;
            let bundles = bundles_from_assignment(instance, &assignment)?;
            Ok((bundles, opt.clone(), Some(opt)))
        }
        path => {
            let doc: AssignmentDocument = parse(&read_text(Path::new(path))?)?;
            let assignment = doc.to_integral()?;
            assignment.validate_for(instance)?;
            let m_init = makespan(instance, &assignment)?;
            if !m_init.is_finite() {
                return Err(Error::invalid(
                    "initial assignment has infinite makespan on this instance",
                ));
            }
            let bundles = bundles_from_assignment(instance, &assignment)?;
            Ok((bundles, m_init, None))
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let instance = read_instance(&args.instance)?;
    let digest = instance_digest(&instance);
    let (m, n) = (instance.machines(), instance.jobs());
    let within_cap = enumeration_states(m, n) <= u128::from(args.cap);

    let report = match args.mode {
        Mode::Indivisible => {
            let beta = parse_ratio(&args.beta)?;
            let (bundles, m_init, oracle_run) =
                initial_bundles(&instance, args.initial.as_str(), args.cap)?;
            let schedule = find_approx(&instance, &bundles, &beta, &m_init)?;
            let assignment = schedule.final_assignment.clone();
            let payments = compute_payments(&instance, &assignment)?;
            let algo = makespan(&instance, &assignment)?;

            emit_artifacts(
                &args,
                AssignmentDocument::from_integral(m, &assignment),
                &payments,
            )?;
            // Verdicts are recomputed from the emitted artifacts, never
            // taken on faith from the solver.
            let le = is_locally_efficient(&instance, &assignment)?.verdict;
            let ef = verify_envy_free(&instance, &assignment, &payments)?;

            let opt = match oracle_run {
                Some(opt) => Some(opt),
                None if within_cap => Some(exact_optimum(&instance, args.cap)?.1),
                None => None,
            };
            let ef_opt = if within_cap {
                Some(exact_ef_optimum(&instance, args.cap)?.1)
            } else {
                None
            };
            let (div_opt, _) = min_makespan_fractional(&instance)?;
            RunReport {
                mode: "indivisible",
                instance_digest: digest,
                machines: m,
                jobs: n,
                opt: opt.as_ref().map(|c| c.to_string()),
                ef_opt: ef_opt.as_ref().map(|c| c.to_string()),
                algorithm_makespan: algo.to_string(),
                divisible_opt: Some(div_opt.to_string()),
                ratio_algo_over_opt: opt.as_ref().and_then(|o| cost_ratio(&algo, o)),
                ratio_ef_over_opt: ef_opt
                    .as_ref()
                    .zip(opt.as_ref())
                    .and_then(|(e, o)| cost_ratio(e, o)),
                ratio_algo_over_divisible: cost_ratio(&algo, &div_opt),
                phases: Some(schedule.phases()),
                phase_discards: Some(
                    schedule.phase_assignments.iter().map(|p| p.discarded).collect(),
                ),
                payments: payments.p.iter().map(ratio_string).collect(),
                locally_efficient: le,
                envy_free: ef,
            }
        }
        Mode::Divisible => {
            let (assignment, payments, algo) = solve_divisible_ef(&instance)?;
            emit_artifacts(
                &args,
                AssignmentDocument::from_fractional(&assignment),
                &payments,
            )?;
            let le = is_locally_efficient(&instance, &assignment)?.verdict;
            let ef = verify_envy_free(&instance, &assignment, &payments)?;
            let (div_opt, _) = min_makespan_fractional(&instance)?;
            let opt = if within_cap {
                Some(exact_optimum(&instance, args.cap)?.1)
            } else {
                None
            };
            RunReport {
                mode: "divisible",
                instance_digest: digest,
                machines: m,
                jobs: n,
                opt: opt.as_ref().map(|c| c.to_string()),
                ef_opt: None,
                algorithm_makespan: algo.to_string(),
                divisible_opt: Some(div_opt.to_string()),
                ratio_algo_over_opt: None,
                ratio_ef_over_opt: None,
                ratio_algo_over_divisible: cost_ratio(&algo, &div_opt),
                phases: None,
                phase_discards: None,
                payments: payments.p.iter().map(ratio_string).collect(),
                locally_efficient: le,
                envy_free: ef,
            }
        }
    };
    emit(&args.out, &render(&report))?;
    if !(report.locally_efficient && report.envy_free) {
        eprintln!("solver output failed re-verification");
        return Ok(5);
    }
    Ok(0)
}

fn emit_artifacts(args: &SolveArgs, doc: AssignmentDocument, payments: &Payments) -> Result<()> {
    if let Some(path) = &args.out_assignment {
        emit(&Some(path.clone()), &render(&doc))?;
    }
    if let Some(path) = &args.out_payments {
        emit(&Some(path.clone()), &render(&PaymentsDocument::from_payments(payments)))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CycleDocument {
    machines: Vec<usize>,
    decrease: String,
}

#[derive(Serialize)]
struct VerifyReport {
    locally_efficient: bool,
    improving_cycle: Option<CycleDocument>,
    envy_free: bool,
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let instance = read_instance(&args.instance)?;
    let assignment: AssignmentDocument = parse(&read_text(&args.assignment)?)?;
    let payments = parse::<PaymentsDocument>(&read_text(&args.payments)?)?.to_payments()?;

    let (cert, ef) = match &assignment {
        AssignmentDocument::Integral { .. } => {
            let a = assignment.to_integral()?;
            a.validate_for(&instance)?;
            (
                is_locally_efficient(&instance, &a)?,
                verify_envy_free(&instance, &a, &payments)?,
            )
        }
        AssignmentDocument::Fractional { .. } => {
            let a = assignment.to_fractional()?;
            a.validate_for(&instance)?;
            (
                is_locally_efficient(&instance, &a)?,
                verify_envy_free(&instance, &a, &payments)?,
            )
        }
    };
    let report = VerifyReport {
        locally_efficient: cert.verdict,
        improving_cycle: cert.witness.map(|w| CycleDocument {
            machines: w.machines,
            decrease: w.decrease.to_string(),
        }),
        envy_free: ef,
    };
    let ok = report.locally_efficient && report.envy_free;
    emit(&args.out, &render(&report))?;
    Ok(if ok { 0 } else { 5 })
}

#[derive(Serialize)]
struct OracleReport {
    instance_digest: String,
    opt: String,
    opt_machine_of: Vec<usize>,
    ef_opt: String,
    ef_machine_of: Vec<usize>,
    ratio_ef_over_opt: Option<String>,
}

fn cmd_oracle(args: OracleArgs) -> Result<i32> {
    let instance = read_instance(&args.instance)?;
    let (a_opt, opt) = exact_optimum(&instance, args.cap)?;
    let (a_ef, ef_opt) = exact_ef_optimum(&instance, args.cap)?;
    let report = OracleReport {
        instance_digest: instance_digest(&instance),
        opt: opt.to_string(),
        opt_machine_of: a_opt.machine_of,
        ef_opt: ef_opt.to_string(),
        ef_machine_of: a_ef.machine_of,
        ratio_ef_over_opt: cost_ratio(&ef_opt, &opt),
    };
    emit(&args.out, &render(&report))?;
    Ok(0)
}

#[derive(Serialize)]
struct GapDocument {
    jobs: usize,
    ell: usize,
    machines: usize,
    opt: String,
    ef_opt: String,
    ratio: String,
}

fn cmd_gap(jobs: usize, ell: usize, cap: u64, out: Option<PathBuf>) -> Result<i32> {
    let params = LowerBoundParams::new(jobs, ell)?;
    let report = gap_experiment(&params, cap)?;
    let doc = GapDocument {
        jobs,
        ell,
        machines: params.machines(),
        opt: report.opt.to_string(),
        ef_opt: report.ef_opt.to_string(),
        ratio: ratio_string(&report.ratio),
    };
    emit(&out, &render(&doc))?;
    Ok(0)
}

#[derive(Serialize)]
struct CountingDocument {
    log2_n: f64,
    ell: f64,
    /// Approximate floats; every other report field in the tool is exact.
    increase_approx: f64,
    decrease_approx: f64,
    established: bool,
}

fn cmd_counting(log2n: f64, ell: Option<f64>, out: Option<PathBuf>) -> Result<i32> {
    if !log2n.is_finite() || log2n <= 1.0 {
        return Err(Error::invalid("log2n must be a finite number above 1"));
    }
    let ell = match ell {
        Some(e) if e.is_finite() => e,
        Some(_) => return Err(Error::invalid("ell must be finite")),
        None => coupled_ell(log2n),
    };
    let cb = counting_bound(log2n, ell);
    let doc = CountingDocument {
        log2_n: log2n,
        ell,
        increase_approx: cb.increase,
        decrease_approx: cb.decrease,
        established: cb.established,
    };
    emit(&out, &render(&doc))?;
    Ok(0)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteDocument {
    entries: Vec<SuiteEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteEntry {
    kind: String,
    #[serde(default = "default_machines")]
    machines: usize,
    #[serde(default = "default_jobs")]
    jobs: usize,
    #[serde(default = "default_reps")]
    reps: usize,
    #[serde(default = "default_denom")]
    denom: u64,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default = "default_ell")]
    ell: usize,
}

fn default_machines() -> usize {
    2
}
fn default_jobs() -> usize {
    4
}
fn default_reps() -> usize {
    1
}
fn default_denom() -> u64 {
    12
}
fn default_rho() -> f64 {
    0.25
}
fn default_ell() -> usize {
    1
}

/// The last column is the consistency ratio of the divisible mechanism's
/// makespan over the fractional optimum; it is exactly 1 whenever the
/// pipeline is correct, which the table makes visible.
const BENCH_HEADER: &str =
    "kind,m,n,seed,opt,ef_opt,algo,q,divisible_opt,ratio_ef_over_opt,ratio_algo_over_opt,ratio_divisible";

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let suite: SuiteDocument = parse(&read_text(&args.suite)?)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let mut table = String::from(BENCH_HEADER);
    table.push('\n');
    for entry in &suite.entries {
        for _ in 0..entry.reps {
            let seed = rng.next_u64();
            let instance = bench_instance(entry, seed)?;
            table.push_str(&bench_row(entry, seed, &instance, args.cap)?);
            table.push('\n');
        }
    }
    emit(&args.out, &table)?;
    Ok(0)
}

fn bench_instance(entry: &SuiteEntry, seed: u64) -> Result<Instance> {
    match entry.kind.as_str() {
        "random-uniform" => gen::random_uniform(entry.machines, entry.jobs, entry.denom, seed),
        "random-inf-mask" => {
            gen::random_inf_mask(entry.machines, entry.jobs, entry.denom, entry.rho, seed)
        }
        "identical" => {
            let base = gen::random_uniform(1, entry.jobs, entry.denom, seed)?;
            gen::identical(entry.machines, &base.rows()[0])
        }
        "lowerbound" => Ok(lb_generate(&LowerBoundParams::new(entry.jobs, entry.ell)?)),
        other => Err(Error::invalid(format!("unknown suite kind {other:?}"))),
    }
}

fn bench_row(entry: &SuiteEntry, seed: u64, instance: &Instance, cap: u64) -> Result<String> {
    let (m, n) = (instance.machines(), instance.jobs());
    let oracle = match exact_optimum(instance, cap) {
        Ok((_, opt)) => match exact_ef_optimum(instance, cap) {
            Ok((_, ef)) => Some((opt, ef)),
            Err(Error::TooLarge { .. }) => None,
            Err(e) => return Err(e),
        },
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let (bundles, m_init) = greedy_bundles(instance)?;
    let schedule = find_approx(instance, &bundles, &crate::cost::int_ratio(2), &m_init)?;
    let algo = makespan(instance, &schedule.final_assignment)?;
    let (div_opt, _) = min_makespan_fractional(instance)?;
    let (_, _, div_ms) = solve_divisible_ef(instance)?;

    let blank = String::new();
    let (opt_s, ef_s, ratio_ef, ratio_algo) = match &oracle {
        Some((opt, ef)) => (
            opt.to_string(),
            ef.to_string(),
            cost_ratio(ef, opt).unwrap_or_default(),
            cost_ratio(&algo, opt).unwrap_or_default(),
        ),
        None => (blank.clone(), blank.clone(), blank.clone(), blank),
    };
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        entry.kind,
        m,
        n,
        seed,
        opt_s,
        ef_s,
        algo,
        schedule.phases(),
        div_opt,
        ratio_ef,
        ratio_algo,
        cost_ratio(&div_ms, &div_opt).unwrap_or_default(),
    ))
}
