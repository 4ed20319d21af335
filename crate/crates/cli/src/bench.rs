//! Benchmark grid: generated instances timed per objective and mode.
//!
//! Columns, in order: kind, p, n, objective, mode, rep, seed, time_ms_mean,
//! time_ms_median, oracle_ms, z, z_prime, dev_pct, error. `kind` is `run` for
//! one instance and `mean` for the per-(p, n, objective, mode) average over
//! the replications; `rep` and `seed` are empty on mean rows. Instance `r` of
//! cell `c` (cells ordered by size, then sparsity) uses seed
//! `seed + c * reps + r`. Everything except the time columns is reproducible.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use cf_recovery::lp::{encode_ad_lp, encode_delay_lp, solve_lp};
use cf_recovery::{dev_percent, generate, solve, GenConfig, Mode, Objective, RecoveryInstance};

const HEADER: [&str; 14] = [
    "kind",
    "p",
    "n",
    "objective",
    "mode",
    "rep",
    "seed",
    "time_ms_mean",
    "time_ms_median",
    "oracle_ms",
    "z",
    "z_prime",
    "dev_pct",
    "error",
];

#[derive(clap::Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "50,100,150,200,250,300")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75")]
    sparsities: Vec<f64>,
    /// Instances per (size, sparsity) cell.
    #[arg(long, default_value_t = 10)]
    reps: u64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "total-delay,weighted-delay,makespan,lateness"
    )]
    objectives: Vec<Objective>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "delay,anticipation-delay"
    )]
    modes: Vec<Mode>,
    /// Timed repetitions per solve, after one discarded warm-up.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also time the LP oracle on instances up to this many vehicles.
    #[arg(long)]
    oracle_up_to: Option<usize>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Run {
    p: f64,
    n: usize,
    objective: Objective,
    mode: Mode,
    rep: u64,
    seed: u64,
    mean_ms: f64,
    median_ms: f64,
    oracle_ms: Option<f64>,
    z: Option<f64>,
    z_prime: Option<f64>,
    dev: Option<f64>,
    error: Option<String>,
}

fn ms(seconds: f64) -> String {
    format!("{:.3}", seconds * 1e3)
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Mean and median wall-clock seconds of `repeats` calls after one warm-up.
fn time_solve(
    instance: &RecoveryInstance,
    objective: Objective,
    mode: Mode,
    repeats: usize,
) -> (f64, f64) {
    let _ = solve(instance, objective, mode);
    let mut samples: Vec<f64> = (0..repeats.max(1))
        .map(|_| {
            let start = Instant::now();
            let _ = std::hint::black_box(solve(std::hint::black_box(instance), objective, mode));
            start.elapsed().as_secs_f64()
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mid = samples.len() / 2;
    let median = if samples.len().is_multiple_of(2) {
        (samples[mid - 1] + samples[mid]) / 2.0
    } else {
        samples[mid]
    };
    (mean, median)
}

fn time_oracle(instance: &RecoveryInstance, objective: Objective, mode: Mode) -> Option<f64> {
    let start = Instant::now();
    let encoded = match mode {
        Mode::Delay => encode_delay_lp(instance, objective),
        Mode::AnticipationDelay => encode_ad_lp(instance, objective),
    }
    .ok()?;
    solve_lp(&encoded.lp).ok()?;
    Some(start.elapsed().as_secs_f64())
}

fn instance_runs(
    args: &BenchArgs,
    modes: &[Mode],
    instance: &RecoveryInstance,
    (p, n, rep, seed): (f64, usize, u64, u64),
) -> Vec<Run> {
    let mut runs = Vec::new();
    for &objective in &args.objectives {
        let mut delay_z = None;
        for &mode in modes {
            let mut run = Run {
                p,
                n,
                objective,
                mode,
                rep,
                seed,
                mean_ms: 0.0,
                median_ms: 0.0,
                oracle_ms: None,
                z: None,
                z_prime: None,
                dev: None,
                error: None,
            };
            match solve(instance, objective, mode) {
                Ok(plan) => {
                    let (mean, median) = time_solve(instance, objective, mode, args.repeats);
                    run.mean_ms = mean;
                    run.median_ms = median;
                    run.z = Some(plan.objective_value);
                    run.z_prime = plan.combined_value;
                    match mode {
                        Mode::Delay => delay_z = Some(plan.objective_value),
                        Mode::AnticipationDelay => {
                            run.dev = delay_z.and_then(|zd| dev_percent(zd, plan.objective_value));
                        }
                    }
                    if args.oracle_up_to.is_some_and(|limit| n <= limit) {
                        run.oracle_ms = time_oracle(instance, objective, mode);
                    }
                }
                Err(err) => run.error = Some(err.to_string()),
            }
            runs.push(run);
        }
    }
    runs
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

pub fn run(args: &BenchArgs) -> Result<ExitCode> {
    if args.sizes.is_empty() || args.sparsities.is_empty() || args.reps == 0 {
        bail!("empty benchmark grid");
    }
    if args.objectives.is_empty() || args.modes.is_empty() {
        bail!("no objectives or modes selected");
    }
    // DEV needs the delay-only value first.
    let mut modes = args.modes.clone();
    modes.sort_by_key(|m| *m == Mode::AnticipationDelay);
    modes.dedup();

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    csv.write_record(HEADER)?;

    let mut dev_by_objective: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    let mut cell = 0u64;
    for &n in &args.sizes {
        for &p in &args.sparsities {
            let mut runs = Vec::new();
            for rep in 0..args.reps {
                let seed = args.seed + cell * args.reps + rep;
                match generate(&GenConfig::new(n, p, seed)) {
                    Ok(instance) => {
                        runs.extend(instance_runs(args, &modes, &instance, (p, n, rep, seed)))
                    }
                    Err(err) => bail!("cannot generate n={n} p={p}: {err}"),
                }
            }
            cell += 1;
            for r in &runs {
                csv.write_record([
                    "run".to_string(),
                    r.p.to_string(),
                    r.n.to_string(),
                    r.objective.to_string(),
                    r.mode.to_string(),
                    r.rep.to_string(),
                    r.seed.to_string(),
                    ms(r.mean_ms),
                    ms(r.median_ms),
                    r.oracle_ms.map(ms).unwrap_or_default(),
                    opt(r.z),
                    opt(r.z_prime),
                    opt(r.dev),
                    r.error.clone().unwrap_or_default(),
                ])?;
                if let Some(dev) = r.dev {
                    dev_by_objective
                        .entry(r.objective.as_str())
                        .or_default()
                        .push(dev);
                }
            }
            for &objective in &args.objectives {
                for &mode in &modes {
                    let group: Vec<&Run> = runs
                        .iter()
                        .filter(|r| r.objective == objective && r.mode == mode && r.error.is_none())
                        .collect();
                    let failures = runs
                        .iter()
                        .filter(|r| r.objective == objective && r.mode == mode && r.error.is_some())
                        .count();
                    csv.write_record([
                        "mean".to_string(),
                        p.to_string(),
                        n.to_string(),
                        objective.to_string(),
                        mode.to_string(),
                        String::new(),
                        String::new(),
                        mean_of(group.iter().map(|r| Some(r.mean_ms)))
                            .map(ms)
                            .unwrap_or_default(),
                        mean_of(group.iter().map(|r| Some(r.median_ms)))
                            .map(ms)
                            .unwrap_or_default(),
                        mean_of(group.iter().map(|r| r.oracle_ms))
                            .map(ms)
                            .unwrap_or_default(),
                        opt(mean_of(group.iter().map(|r| r.z))),
                        opt(mean_of(group.iter().map(|r| r.z_prime))),
                        opt(mean_of(group.iter().map(|r| r.dev))),
                        if failures > 0 {
                            format!("{failures} failed")
                        } else {
                            String::new()
                        },
                    ])?;
                }
            }
            csv.flush()?;
        }
    }
    csv.flush()?;
    drop(csv);

    for (objective, devs) in &dev_by_objective {
        let mean = devs.iter().sum::<f64>() / devs.len() as f64;
        let min = devs.iter().copied().fold(f64::INFINITY, f64::min);
        eprintln!(
            "DEV {objective}: mean {mean:.2}% min {min:.2}% over {} instances",
            devs.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}
