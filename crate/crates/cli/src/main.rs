mod bench;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use cf_recovery::format::{InstanceFile, SolutionFile};
use cf_recovery::lp::{encode_ad_lp, encode_delay_lp, solve_lp, LpStatus};
use cf_recovery::model::objective_at;
use cf_recovery::{
    check_feasibility, generate, solve, GenConfig, Mode, Objective, RecoveryInstance, RecoveryPlan,
    DEFAULT_TOLERANCE,
};

/// Exit status for a completed verification that found a problem.
const EXIT_VERIFY_FAILED: u8 = 1;
/// Exit status for unreadable or invalid input.
const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cfrecover",
    version,
    about = "Feasibility recovery for conflict-free vehicle plans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instance files.
    Generate(GenerateArgs),
    /// Solve one instance and print a summary line.
    Solve(SolveArgs),
    /// Time the engine over a grid of generated instances and write CSV.
    Bench(bench::BenchArgs),
    /// Compare the engine (or a plan file) against the LP oracle.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Fraction of vehicle pairs without a conflict arc.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance `i` of the batch uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    with_anticipations: bool,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ProblemArgs {
    instance: PathBuf,
    #[arg(long, default_value = "total-delay")]
    objective: Objective,
    #[arg(long, default_value = "delay")]
    mode: Mode,
    /// Overrides the instance's alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Overrides the instance's beta.
    #[arg(long)]
    beta: Option<f64>,
}

impl ProblemArgs {
    fn load(&self) -> Result<RecoveryInstance> {
        let file = InstanceFile::read(&self.instance)?;
        let mut instance = file
            .to_instance()
            .with_context(|| format!("reading {}", self.instance.display()))?;
        if let Some(alpha) = self.alpha {
            instance.alpha = alpha;
        }
        if let Some(beta) = self.beta {
            instance.beta = beta;
        }
        Ok(instance)
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Write the plan as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Largest accepted gap between engine and oracle values.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Check this plan file instead of solving.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Refuse instances with more vehicles than this.
    #[arg(long, default_value_t = 100)]
    oracle_limit: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

fn format_p(p: f64) -> String {
    format!("{p}")
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for i in 0..args.count {
        let seed = args
            .seed
            .checked_add(i)
            .context("seed range overflows u64")?;
        let mut config = GenConfig::new(args.n, args.p, seed);
        config.with_anticipations = args.with_anticipations;
        let instance = generate(&config)?;
        let name = format!("n{}_p{}_s{}.json", args.n, format_p(args.p), seed);
        let path = args.out.join(name);
        InstanceFile::generated(&instance, &config).write(&path)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn join(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", items.join(","))
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let p = &args.problem;
    let instance = p.load()?;
    let plan = solve(&instance, p.objective, p.mode)?;
    let mut line = format!(
        "objective={} mode={} n={} z={}",
        p.objective,
        p.mode,
        instance.vehicle_count(),
        plan.objective_value
    );
    if let Some(zp) = plan.combined_value {
        line.push_str(&format!(" z'={zp} sum_x={}", plan.total_anticipation()));
    }
    line.push_str(&format!(" u={}", join(&plan.u)));
    println!("{line}");
    if let Some(out) = &args.out {
        SolutionFile::new(p.objective, p.mode, &plan).write(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_value(instance: &RecoveryInstance, objective: Objective, mode: Mode) -> Result<f64> {
    let encoded = match mode {
        Mode::Delay => encode_delay_lp(instance, objective)?,
        Mode::AnticipationDelay => encode_ad_lp(instance, objective)?,
    };
    let solution = solve_lp(&encoded.lp)?;
    if solution.status != LpStatus::Optimal {
        bail!("oracle reports {:?}", solution.status);
    }
    Ok(solution.objective)
}

/// Value of the mode's objective at `plan`, recomputed from its vectors.
fn plan_value(
    instance: &RecoveryInstance,
    plan: &RecoveryPlan,
    objective: Objective,
    mode: Mode,
) -> Result<f64> {
    let z = objective_at(instance, &plan.u, objective)?;
    Ok(match mode {
        Mode::Delay => z,
        Mode::AnticipationDelay => instance.alpha * z + instance.beta * plan.x.iter().sum::<f64>(),
    })
}

fn read_plan(path: &Path, objective: Objective, mode: Mode) -> Result<RecoveryPlan> {
    let file = SolutionFile::read(path)?;
    if file.objective != objective || file.mode != mode {
        bail!(
            "plan {} was produced for {} / {}, not {} / {}",
            path.display(),
            file.objective,
            file.mode,
            objective,
            mode
        );
    }
    Ok(file.to_plan())
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let p = &args.problem;
    let instance = p.load()?;
    let n = instance.vehicle_count();
    if n > args.oracle_limit {
        bail!(
            "refusing to run the oracle on {n} vehicles (limit {}; raise --oracle-limit)",
            args.oracle_limit
        );
    }
    let plan = match &args.plan {
        Some(path) => read_plan(path, p.objective, p.mode)?,
        None => solve(&instance, p.objective, p.mode)?,
    };
    let mut ok = true;

    let engine = plan_value(&instance, &plan, p.objective, p.mode)?;
    let oracle = oracle_value(&instance, p.objective, p.mode)?;
    let gap = (engine - oracle).abs();
    let gap_ok = gap <= args.tolerance;
    ok &= gap_ok;
    println!("engine: {engine}");
    println!("oracle: {oracle}");
    println!(
        "gap: {gap:e} ({})",
        if gap_ok { "ok" } else { "exceeds tolerance" }
    );

    let report = check_feasibility(&instance, &plan, p.mode, DEFAULT_TOLERANCE)?;
    let mut problems: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    for h in 0..n {
        let expected = plan.u[h] - instance.deviations[h];
        if plan
            .delta
            .get(h)
            .is_none_or(|&d| (d - expected).abs() > DEFAULT_TOLERANCE)
        {
            problems.push(format!("delta inconsistent with u - d at vehicle {h}"));
        }
    }
    if problems.is_empty() {
        println!("feasibility: ok");
    } else {
        ok = false;
        println!("feasibility: {} violation(s)", problems.len());
        for problem in &problems {
            println!("  {problem}");
        }
    }

    if p.mode == Mode::AnticipationDelay {
        let clashes: Vec<usize> = (0..n)
            .filter(|&h| {
                let delta = plan.u[h] - instance.deviations[h];
                delta.min(plan.x[h]) > DEFAULT_TOLERANCE
            })
            .collect();
        if clashes.is_empty() {
            println!("complementarity: ok");
        } else {
            ok = false;
            println!("complementarity: delayed and anticipated vehicles {clashes:?}");
        }
    }

    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}
