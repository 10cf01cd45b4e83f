//! Command-line front end.
//!
//! Subcommands cover the full workflow: `simulate` runs seed batches and
//! writes per-run tables plus a summary, `trajectory` tabulates the
//! predicted curves with envelope widths, `compare` and `blue` measure
//! written runs against those curves, `fit` checks the final-size scale
//! across n, and `verify` cross-checks the engine against brute force.
//!
//! Exit codes: 0 on success, 1 when verification fails, 2 on usage or
//! input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::process::{RunRecord, StopRule};
use crate::trajectory::{self, closed_form, EnvelopeConfig};

use super::blue::blue_fraction_check;
use super::compare::{compare, RunSeries};
use super::ensemble::{run_ensemble, EnsembleConfig, EnsembleSummary, OutputFormat};
use super::fit::{fit_final_size, FitConfig};
use super::persist;
use super::verify::{verify, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "dfp",
    version,
    about = "Simulator and numerical checks for the diamond-free random graph process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seed batches and write run tables plus a summary
    Simulate(SimulateArgs),
    /// Tabulate the predicted curves and envelope widths over a time grid
    Trajectory(TrajectoryArgs),
    /// Compare written runs against a trajectory table
    Compare(CompareArgs),
    /// Measure the blue edge fraction of written runs against its curve
    Blue(BlueArgs),
    /// Check the final-size scaling constant across several n
    Fit(FitArgs),
    /// Cross-check the engine against brute-force recomputation
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("stop").args(["terminate", "t_max", "mu_horizon"]).multiple(false)
))]
struct SimulateArgs {
    /// Number of vertices
    #[arg(long)]
    n: u32,
    /// Single seed; shorthand for --seeds with one entry
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Seed list: "k" means 1..=k, "a..b" means a..=b
    #[arg(long)]
    seeds: Option<String>,
    /// Run every seed until no open pair is left (the default)
    #[arg(long)]
    terminate: bool,
    /// Stop at scaled time T, i.e. after floor(T n^1.5) steps
    #[arg(long)]
    t_max: Option<f64>,
    /// Stop at the envelope horizon mu sqrt(ln n)
    #[arg(long)]
    mu_horizon: bool,
    /// Envelope growth rate
    #[arg(long = "K", default_value_t = trajectory::DEFAULT_K)]
    k: f64,
    /// Envelope exponent; the horizon must satisfy theta_y < n^epsilon
    #[arg(long, default_value_t = trajectory::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Steps between snapshots; default gives about 100 per unit time
    #[arg(long)]
    stride: Option<u64>,
    /// Tracked pairs and tracked vertices per run
    #[arg(long, default_value_t = 16)]
    probes: u32,
    /// Output directory
    #[arg(long, default_value = "dfp-out")]
    out: PathBuf,
    /// Per-run file format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("grid").required(true).args(["t_max", "grid_from"])
))]
struct TrajectoryArgs {
    /// Number of vertices the envelope widths are scaled for
    #[arg(long)]
    n: u32,
    /// Tabulate on 0..=T with spacing --dt
    #[arg(long)]
    t_max: Option<f64>,
    /// Tabulate on the time grid of a written run table instead
    #[arg(long)]
    grid_from: Option<PathBuf>,
    /// Grid spacing for --t-max
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Envelope growth rate
    #[arg(long = "K", default_value_t = trajectory::DEFAULT_K)]
    k: f64,
    /// Envelope exponent
    #[arg(long, default_value_t = trajectory::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Output file
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory written by simulate
    #[arg(long)]
    runs: PathBuf,
    /// Trajectory table covering the run grid
    #[arg(long)]
    trajectory: PathBuf,
    /// Override the envelope growth rate stored with the runs
    #[arg(long = "K")]
    k: Option<f64>,
    /// Override the stored envelope exponent
    #[arg(long)]
    epsilon: Option<f64>,
    /// Override the stored envelope horizon factor
    #[arg(long)]
    mu: Option<f64>,
    /// Output file
    #[arg(long, default_value = "compare.json")]
    out: PathBuf,
}

#[derive(Args)]
struct BlueArgs {
    /// Directory written by simulate
    #[arg(long)]
    runs: PathBuf,
    /// Output file
    #[arg(long, default_value = "blue.json")]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Comma-separated n values, e.g. "200,400,800"
    #[arg(long)]
    n_list: String,
    /// Seed list per n: "k" means 1..=k, "a..b" means a..=b
    #[arg(long, default_value = "10")]
    seeds: String,
    /// Output file
    #[arg(long, default_value = "fit.json")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of vertices, between 4 and 30
    #[arg(long, default_value_t = 12)]
    n: u32,
    /// Seed list: "k" means 1..=k, "a..b" means a..=b
    #[arg(long, default_value = "3")]
    seeds: String,
    /// Optional JSON report file
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv and runs one subcommand, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Trajectory(args) => trajectory_cmd(args),
        Command::Compare(args) => compare_cmd(args),
        Command::Blue(args) => blue_cmd(args),
        Command::Fit(args) => fit_cmd(args),
        Command::Verify(args) => verify_cmd(args),
    }
}

// ============================================================================
// Subcommand handlers
// ============================================================================

fn simulate(args: SimulateArgs) -> Result<i32> {
    let seeds = match (&args.seed, &args.seeds) {
        (Some(s), None) => vec![*s],
        (None, Some(spec)) => parse_seed_spec(spec)?,
        (None, None) => vec![1],
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    let n = args.n;
    let envelope = EnvelopeConfig::new(args.k, args.epsilon, args.epsilon / (2.0 * args.k), n)?;
    let steps_at = |t: f64| (t * (n as f64).powf(1.5)).floor() as u64;
    let stop = if let Some(t) = args.t_max {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("need --t-max > 0, got {t}")));
        }
        StopRule::Steps(steps_at(t))
    } else if args.mu_horizon {
        StopRule::Steps(steps_at(envelope.mu * (n as f64).ln().sqrt()))
    } else {
        StopRule::ToTermination
    };
    let cfg = EnsembleConfig {
        n,
        seeds,
        stop,
        stride: args.stride,
        probe_pairs: args.probes,
        probe_vertices: args.probes,
        envelope: Some(envelope),
        out_dir: Some(args.out.clone()),
        format: match args.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
    };
    let out = run_ensemble(&cfg)?;
    let s = &out.summary;
    println!(
        "n = {}, {} seeds, stride {}, {} grid points",
        s.n,
        s.seeds.len(),
        s.stride,
        s.grid.len()
    );
    println!(
        "inside envelope: Q0 {}/{} ({:.4}), Q1 {}/{} ({:.4})",
        s.bands.q0.inside,
        s.bands.q0.samples,
        s.bands.q0.fraction_inside,
        s.bands.q1.inside,
        s.bands.q1.samples,
        s.bands.q1.fraction_inside
    );
    println!(
        "finals: {}/{} terminated, mean steps {:.1}, mean t {:.4}, blue fraction {:.4}, max codegree {}",
        s.finals.terminated_count,
        s.seeds.len(),
        s.finals.mean_final_i,
        s.finals.mean_final_t,
        s.finals.mean_blue_fraction,
        s.finals.max_codegree_seen
    );
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn trajectory_cmd(args: TrajectoryArgs) -> Result<i32> {
    let cfg = EnvelopeConfig::new(args.k, args.epsilon, args.epsilon / (2.0 * args.k), args.n)?;
    let grid: Vec<f64> = if let Some(path) = &args.grid_from {
        grid_from_run_file(path)?
    } else {
        let t_max = args.t_max.unwrap();
        if !(t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need --t-max > 0, got {t_max}"
            )));
        }
        if !(args.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need --dt > 0, got {}",
                args.dt
            )));
        }
        let steps = (t_max / args.dt + 1e-9).floor() as u64;
        let mut ts: Vec<f64> = (0..=steps).map(|i| i as f64 * args.dt).collect();
        if t_max - steps as f64 * args.dt > 1e-9 * t_max.max(1.0) {
            ts.push(t_max);
        }
        ts
    };
    let mut points = Vec::with_capacity(grid.len());
    for &t in &grid {
        points.push(closed_form(t)?);
    }
    let rows = persist::trajectory_rows(&points, &cfg);
    persist::write_text(&args.out, &persist::trajectory_csv(&rows))?;
    println!("{} grid points, t up to {:.6}", rows.len(), grid.last().unwrap());
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn compare_cmd(args: CompareArgs) -> Result<i32> {
    let (summary, series) = load_runs(&args.runs)?;
    let stored = summary.envelope;
    let cfg = if args.k.is_some() || args.epsilon.is_some() || args.mu.is_some() {
        EnvelopeConfig::new(
            args.k.unwrap_or(stored.k),
            args.epsilon.unwrap_or(stored.epsilon),
            args.mu.unwrap_or(stored.mu),
            summary.n,
        )?
    } else {
        stored
    };
    let trajectory = persist::parse_trajectory_csv(&persist::read_text(&args.trajectory)?)?;
    let report = compare(summary.n, &series, &trajectory, &cfg)?;
    persist::write_text(&args.out, &persist::to_json(&report)?)?;
    println!(
        "n = {}, {} seeds, {} grid points",
        report.n,
        report.seeds.len(),
        report.rows.len()
    );
    for band in &report.bands {
        println!(
            "inside band {}: {}/{} ({:.4})",
            band.observable, band.inside, band.samples, band.fraction_inside
        );
    }
    if let Some(w) = report
        .worst
        .iter()
        .max_by(|a, b| a.relative.abs().total_cmp(&b.relative.abs()))
    {
        println!(
            "largest relative deviation: {} {:+.4} at t = {:.4}",
            w.observable, w.relative, w.t
        );
    }
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn blue_cmd(args: BlueArgs) -> Result<i32> {
    let (summary, series) = load_runs(&args.runs)?;
    let report = blue_fraction_check(summary.n, &series)?;
    persist::write_text(&args.out, &persist::to_json(&report)?)?;
    println!(
        "final blue fraction {:.4}, predicted {:.4}, gap above 2/3 {:+.4}",
        report.final_mean_fraction, report.final_predicted, report.two_thirds_gap
    );
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn fit_cmd(args: FitArgs) -> Result<i32> {
    let n_list = parse_n_list(&args.n_list)?;
    let seeds = parse_seed_spec(&args.seeds)?;
    let report = fit_final_size(&FitConfig { n_list, seeds })?;
    persist::write_text(&args.out, &persist::to_json(&report)?)?;
    for entry in &report.entries {
        println!(
            "n = {}: c = {:.4} +- {:.4} over {} seeds (final edges {}..{})",
            entry.n, entry.c, entry.c_stderr, entry.seeds, entry.min_final, entry.max_final
        );
    }
    println!("spread c_max / c_min = {:.4}", report.c_max_over_min);
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn verify_cmd(args: VerifyArgs) -> Result<i32> {
    let cfg = VerifyConfig::new(args.n, parse_seed_spec(&args.seeds)?)?;
    let report = verify(&cfg)?;
    for check in &report.checks {
        println!(
            "check {}: {} ({})",
            check.name,
            if check.pass { "PASS" } else { "FAIL" },
            check.detail
        );
    }
    println!(
        "verification {} for n = {}, {} seeds",
        if report.pass { "passed" } else { "failed" },
        report.n,
        report.seeds.len()
    );
    if let Some(out) = &args.out {
        persist::write_text(out, &persist::to_json(&report)?)?;
        println!("wrote {}", out.display());
    }
    Ok(if report.pass { 0 } else { 1 })
}

// ============================================================================
// Input helpers
// ============================================================================

const MAX_SEEDS: u64 = 1_000_000;

fn parse_seed_spec(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    let bad = |what: &str| Error::InvalidParameter(format!("{what} in seed spec {spec:?}"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad("bad range start"))?;
        let b: u64 = b.trim().parse().map_err(|_| bad("bad range end"))?;
        if a > b {
            return Err(bad("empty range"));
        }
        if b - a + 1 > MAX_SEEDS {
            return Err(bad("range too large"));
        }
        Ok((a..=b).collect())
    } else {
        let k: u64 = spec.parse().map_err(|_| bad("bad count"))?;
        if k == 0 {
            return Err(bad("zero count"));
        }
        if k > MAX_SEEDS {
            return Err(bad("count too large"));
        }
        Ok((1..=k).collect())
    }
}

fn parse_n_list(list: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in list.split(',') {
        let n: u32 = part.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("bad entry {:?} in n list {list:?}", part.trim()))
        })?;
        out.push(n);
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty n list".into()));
    }
    Ok(out)
}

fn grid_from_run_file(path: &Path) -> Result<Vec<f64>> {
    let text = persist::read_text(path)?;
    let rows = if path.extension().is_some_and(|e| e == "json") {
        let record: RunRecord = persist::from_json(&text)?;
        persist::run_rows(&record)
    } else {
        persist::parse_run_csv(&text)?
    };
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no rows in {}",
            path.display()
        )));
    }
    Ok(rows.iter().map(|r| r.t).collect())
}

fn load_runs(dir: &Path) -> Result<(EnsembleSummary, Vec<RunSeries>)> {
    let summary: EnsembleSummary =
        persist::from_json(&persist::read_text(&dir.join("summary.json"))?)?;
    let mut series = Vec::with_capacity(summary.seeds.len());
    for &seed in &summary.seeds {
        let csv = dir.join(format!("run_{seed}.csv"));
        let json = dir.join(format!("run_{seed}.json"));
        if csv.exists() {
            let rows = persist::parse_run_csv(&persist::read_text(&csv)?)?;
            let probes_path = dir.join(format!("probes_{seed}.csv"));
            let probes = if probes_path.exists() {
                persist::parse_probe_csv(&persist::read_text(&probes_path)?)?
            } else {
                Vec::new()
            };
            series.push(RunSeries { seed, rows, probes });
        } else if json.exists() {
            let record: RunRecord = persist::from_json(&persist::read_text(&json)?)?;
            series.push(RunSeries::from_record(&record));
        } else {
            return Err(Error::InvalidInput(format!(
                "no run file for seed {seed} in {}",
                dir.display()
            )));
        }
    }
    Ok((summary, series))
}
