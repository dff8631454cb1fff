//! Command-line entry point. Thin: parses flags, applies overrides to the
//! experiment config, and delegates to the harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::coverage;
use crate::harness::{
    ablate_particles, compute_metrics, evaluate_dataset, generate_trajectory, ingest_dataset,
    output, render_markdown, run_trials, ExperimentConfig, HarnessError, TrialResult,
};

#[derive(Debug, Parser)]
#[command(
    name = "cdoa-loc",
    about = "RSSI-gradient CDOA localization: simulators, estimators, and experiment harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run simulated localization trials and write results + summary.
    Simulate(SimulateArgs),
    /// Evaluate methods on a recorded RSSI dataset (canonical CSV schema).
    Dataset(DatasetArgs),
    /// Sweep the CDOA-PF particle count with and without odometry.
    Ablate(AblateArgs),
    /// Coverage planning formulas for a given sensing range.
    Coverage(CoverageArgs),
    /// Regenerate summary tables from a previous run's results.csv.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct CommonRunArgs {
    /// Experiment config file (JSON); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Method name (cdoa-pf, cdoa-em, trilateration, wcl, d-rssi, i-rssi,
    /// pf-ekf) or "all".
    #[arg(long)]
    method: Option<String>,
    /// Base random seed; falls back to $CDOA_LOC_SEED, then the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for results.csv, summary.md/csv and config.json.
    #[arg(long, default_value = "cdoa-out")]
    out: PathBuf,
    /// Worker threads for parallel trials (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Number of trials per method.
    #[arg(long)]
    trials: Option<usize>,
    /// Channel noise standard deviation in dBm.
    #[arg(long)]
    noise_dbm: Option<f64>,
    /// CDOA-PF particle count.
    #[arg(long)]
    particles: Option<usize>,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Input CSV: timestamp,node_id,rssi_dbm,gt_x,gt_y (header required).
    #[arg(long)]
    data: PathBuf,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Particle counts to sweep, ascending.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,500")]
    counts: Vec<usize>,
    /// Seeds per count.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Channel noise standard deviation in dBm.
    #[arg(long)]
    noise_dbm: Option<f64>,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    /// Sensing range of one node, meters.
    #[arg(long)]
    range: f64,
    /// Width factor of a rectangular workspace (prints the rectangular
    /// coverage bound too).
    #[arg(long)]
    aspect_k: Option<f64>,
    /// Replicated unit areas to plan nodes for.
    #[arg(long, default_value_t = 1)]
    units: u64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Run directory containing results.csv.
    #[arg(long)]
    out: PathBuf,
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args())
}

/// Testable entry point over explicit argv.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate(args) => with_pool(args.common.jobs, || simulate(&args)),
        Command::Dataset(args) => with_pool(args.common.jobs, || dataset(&args)),
        Command::Ablate(args) => with_pool(args.common.jobs, || ablate(&args)),
        Command::Coverage(args) => coverage_cmd(&args),
        Command::Report(args) => report(&args),
    }
}

/// Caps the worker pool when --jobs is given.
fn with_pool<F: FnOnce() -> Result<(), HarnessError> + Send>(
    jobs: Option<usize>,
    f: F,
) -> Result<(), HarnessError> {
    match jobs {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
            pool.install(f)
        }
    }
}

/// Loads the config and applies the flag overrides; flags beat config-file
/// values, which beat built-in defaults. $CDOA_LOC_SEED fills in when
/// --seed is absent.
fn effective_config(
    common: &CommonRunArgs,
    trials: Option<usize>,
    noise_dbm: Option<f64>,
    particles: Option<usize>,
) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(method) = &common.method {
        config.method = method.clone();
    }
    let env_seed = std::env::var("CDOA_LOC_SEED").ok().and_then(|s| s.parse::<u64>().ok());
    if let Some(seed) = common.seed.or(env_seed) {
        config.seed = seed;
    }
    if let Some(trials) = trials {
        config.trials = trials;
    }
    if let Some(noise) = noise_dbm {
        config.channel.noise_std_dbm = noise;
    }
    if let Some(particles) = particles {
        config.hyperparams.particles = particles;
    }
    config.validate()?;
    Ok(config)
}

fn announce(config: &ExperimentConfig, out: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", out.display())))?;
    let json = config.to_json();
    std::fs::write(out.join("config.json"), &json)
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    println!("override precedence: flags > config file > built-in defaults ($CDOA_LOC_SEED fills in when --seed is absent)");
    println!("effective config:\n{json}");
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), HarnessError> {
    let config =
        effective_config(&args.common, args.trials, args.noise_dbm, args.particles)?;
    announce(&config, &args.common.out)?;

    let layout = config.layout.build(&config.workspace)?;
    let trajectory = generate_trajectory(
        &config.workspace,
        &config.trajectory.kind,
        config.trajectory.step,
    )?;

    let mut results: Vec<TrialResult> = Vec::new();
    for method in config.methods()? {
        // Same base seed for every method: comparisons are paired per trial.
        let mut method_results = run_trials(
            method,
            &layout,
            &config.channel,
            &trajectory,
            &config.hyperparams,
            &config.workspace,
            config.seed,
            config.trials,
        )?;
        results.append(&mut method_results);
    }

    write_run_outputs(&args.common.out, &results)
}

fn dataset(args: &DatasetArgs) -> Result<(), HarnessError> {
    let config = effective_config(&args.common, None, None, None)?;
    announce(&config, &args.common.out)?;

    let layout = config.layout.build(&config.workspace)?;
    let ingested = ingest_dataset(&args.data, &layout)?;
    println!(
        "ingested {} rows: {} used in {} snapshots, {} diagnosed",
        ingested.rows_total,
        ingested.rows_used,
        ingested.snapshots.len(),
        ingested.diagnostics.len()
    );
    for d in &ingested.diagnostics {
        eprintln!("line {}: {}", d.line, d.reason);
    }

    let mut results = Vec::new();
    for method in config.methods()? {
        results.push(evaluate_dataset(
            method,
            &layout,
            &config.channel,
            &ingested.snapshots,
            &config.hyperparams,
            &config.workspace,
            config.seed,
        )?);
    }
    write_run_outputs(&args.common.out, &results)
}

fn ablate(args: &AblateArgs) -> Result<(), HarnessError> {
    let config = effective_config(&args.common, None, args.noise_dbm, None)?;
    announce(&config, &args.common.out)?;

    let layout = config.layout.build(&config.workspace)?;
    let trajectory = generate_trajectory(
        &config.workspace,
        &config.trajectory.kind,
        config.trajectory.step,
    )?;
    let points = ablate_particles(
        &args.counts,
        &layout,
        &config.channel,
        &trajectory,
        &config.hyperparams,
        &config.workspace,
        config.seed,
        args.seeds,
    )?;
    let path = args.common.out.join("ablation.csv");
    output::write_ablation_csv(&path, &points)?;
    println!("particles  odometry-on  odometry-off");
    for p in &points {
        println!("{:>9}  {:>11.3}  {:>12.3}", p.particles, p.mean_on(), p.mean_off());
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn coverage_cmd(args: &CoverageArgs) -> Result<(), HarnessError> {
    if args.range.is_nan() || args.range <= 0.0 {
        return Err(HarnessError::InvalidConfig(format!(
            "--range must be positive, got {}",
            args.range
        )));
    }
    if args.units < 1 {
        return Err(HarnessError::InvalidConfig("--units must be at least 1".into()));
    }
    let unit_word = if args.units == 1 { "unit" } else { "units" };
    println!(
        "square coverage: {:?} m\u{b2}, min nodes for {} {}: {}",
        coverage::square_coverage_area(args.range),
        args.units,
        unit_word,
        coverage::nodes_required(args.units)
    );
    if let Some(k) = args.aspect_k {
        if k.is_nan() || k <= 0.0 {
            return Err(HarnessError::InvalidConfig(format!(
                "--aspect-k must be positive, got {k}"
            )));
        }
        println!(
            "rectangular coverage (k = {k}): {:?} m\u{b2}",
            coverage::rect_coverage_area(args.range, k)
        );
    }
    Ok(())
}

fn report(args: &ReportArgs) -> Result<(), HarnessError> {
    let rows = output::read_results_csv(&args.out.join("results.csv"))?;
    if rows.is_empty() {
        return Err(HarnessError::InvalidConfig("results.csv contains no rows".into()));
    }
    let summaries = output::summaries_from_rows(&rows)?;
    output::write_summary_csv(&args.out.join("summary.csv"), &summaries)?;
    output::write_summary_markdown(&args.out.join("summary.md"), &summaries)?;
    print!("{}", render_markdown(&summaries));
    Ok(())
}

fn write_run_outputs(out: &Path, results: &[TrialResult]) -> Result<(), HarnessError> {
    output::write_results_csv(&out.join("results.csv"), results)?;
    let summaries = compute_metrics(results)?;
    output::write_summary_csv(&out.join("summary.csv"), &summaries)?;
    output::write_summary_markdown(&out.join("summary.md"), &summaries)?;
    print!("{}", render_markdown(&summaries));
    println!("wrote results.csv, summary.csv, summary.md to {}", out.display());
    Ok(())
}
