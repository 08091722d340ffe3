use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use skodom::conformal::{ray_tips, trace, StepProfile};
use skodom::fourier::{cosine_coefficients, default_order};
use skodom::geometry::{default_y_max, polygonize};
use skodom::montecarlo::{simulate_disc, simulate_domain, SimConfig, SimMode};
use skodom::Distribution;
use skodom_cli::manifest::{sibling, RunManifest};
use skodom_cli::verify::{self, VerifyOptions};
use skodom_cli::{format, svg};

#[derive(Parser)]
#[command(
    name = "skodom",
    version,
    about = "Planar domains whose Brownian exit abscissa has a given law"
)]
struct Cli {
    /// Cap on worker threads (default: one per core)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cosine coefficients a_0..a_N of the quantile profile, as CSV
    Coeffs(CoeffsArgs),
    /// Sampled boundary curve as CSV, optionally drawn as SVG
    Trace(TraceArgs),
    /// Ray tips of an atomic law, as JSON
    Tips(TipsArgs),
    /// Brownian exit samples (CSV) and summary statistics (JSON)
    Simulate(SimulateArgs),
    /// Run every consistency check and print a JSON verdict
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    /// Distribution file (JSON)
    #[arg(long)]
    dist: PathBuf,
    /// Truncation order (default 4096, 65536 for Cantor)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    /// Number of angles on [-pi, pi] (odd)
    #[arg(long, default_value_t = verify::DEFAULT_GRID)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct TipsArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Disc,
    Domain,
}

impl From<Mode> for SimMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Disc => SimMode::DiscTimeChange,
            Mode::Domain => SimMode::DirectDomain,
        }
    }
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = verify::DEFAULT_GRID)]
    grid: usize,
    /// Time step (default 1e-4 in disc mode, 1e-5 in domain mode)
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, env = "SKODOM_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Disc)]
    mode: Mode,
    /// Height at which infinite rays are cut (domain mode)
    #[arg(long)]
    ymax: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    /// Samples CSV; the report goes to `<out>.report.json` as well as stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value_t = verify::DEFAULT_PATHS)]
    paths: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad command-line input or unreadable / invalid input files (exit code 2).
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(InputError(msg.into()))
}

fn load(path: &Path) -> Result<Distribution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read distribution file {}: {e}", path.display())))?;
    Distribution::from_json_str(&text)
        .map_err(|e| input_error(format!("invalid distribution file {}: {e}", path.display())))
}

fn dt_for(sim: &SimArgs) -> f64 {
    sim.dt.unwrap_or(match sim.mode {
        Mode::Disc => verify::DEFAULT_DISC_DT,
        Mode::Domain => verify::DEFAULT_DOMAIN_DT,
    })
}

fn write_output(path: &Path, text: &str, manifest: &RunManifest) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    manifest
        .write_beside(path)
        .with_context(|| format!("cannot write manifest for {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str, manifest: &RunManifest) -> Result<()> {
    match out {
        Some(path) => write_output(path, text, manifest),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_coeffs(a: &CoeffsArgs) -> Result<()> {
    let dist = load(&a.dist)?;
    let n = a.n.unwrap_or_else(|| default_order(&dist));
    let series = cosine_coefficients(&dist, n).map_err(|e| input_error(e.to_string()))?;
    let manifest = RunManifest::new("coeffs", &a.dist, json!({"n": n}));
    emit(a.out.as_deref(), &format::coefficients_csv(&series), &manifest)
}

fn cmd_trace(a: &TraceArgs) -> Result<()> {
    let dist = load(&a.dist)?;
    let n = a.n.unwrap_or_else(|| default_order(&dist));
    let series = cosine_coefficients(&dist, n).map_err(|e| input_error(e.to_string()))?;
    let curve = trace(&series, &dist, a.grid).map_err(|e| input_error(e.to_string()))?;
    let manifest = RunManifest::new(
        "trace",
        &a.dist,
        json!({"n": n, "grid": a.grid, "abel_radius": curve.abel_radius, "quantile_clip": curve.quantile_clip}),
    );
    if let Some(path) = &a.svg {
        write_output(path, &svg::render(&curve), &manifest)?;
    }
    emit(a.out.as_deref(), &format::boundary_csv(&curve), &manifest)
}

fn cmd_tips(a: &TipsArgs) -> Result<()> {
    let dist = load(&a.dist)?;
    let profile = StepProfile::from_distribution(&dist).map_err(|_| input_error("tips require atomic distribution"))?;
    let tips = ray_tips(&profile).map_err(|e| input_error(e.to_string()))?;
    let text = serde_json::to_string_pretty(&format::tips_json(&tips))? + "\n";
    let manifest = RunManifest::new("tips", &a.dist, json!({}));
    emit(a.out.as_deref(), &text, &manifest)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let s = &a.sim;
    let dist = load(&s.dist)?;
    let n = s.n.unwrap_or_else(|| default_order(&dist));
    let dt = dt_for(s);
    let cfg = SimConfig {
        n_paths: a.paths,
        dt,
        seed: s.seed,
        mode: s.mode.into(),
    };
    let series = cosine_coefficients(&dist, n)?;
    let mut params = json!({"n": n, "paths": a.paths, "dt": dt, "seed": s.seed, "mode": cfg.mode});
    let report = match s.mode {
        Mode::Disc => simulate_disc(&series, &dist, &cfg).map_err(|e| input_error(e.to_string()))?,
        Mode::Domain => {
            let curve = trace(&series, &dist, s.grid).map_err(|e| input_error(e.to_string()))?;
            let tips = StepProfile::from_distribution(&dist)
                .ok()
                .filter(|p| !p.steps.is_empty())
                .map(|p| ray_tips(&p))
                .transpose()?;
            let y_max = s.ymax.unwrap_or_else(|| default_y_max(&dist, tips.as_ref()));
            let poly = polygonize(&curve, y_max)?;
            params["grid"] = json!(s.grid);
            params["y_max"] = json!(y_max);
            if let Some(out) = &a.out {
                let manifest = RunManifest::new("simulate", &s.dist, params.clone());
                write_output(&sibling(out, "polygon.json"), &(poly.to_json() + "\n"), &manifest)?;
            }
            simulate_domain(&poly, &dist, &cfg)?
        }
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    let manifest = RunManifest::new("simulate", &s.dist, params);
    if let Some(out) = &a.out {
        write_output(out, &format::samples_csv(&report.samples), &manifest)?;
        write_output(&sibling(out, "report.json"), &text, &manifest)?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let s = &a.sim;
    let dist = load(&s.dist)?;
    let opts = VerifyOptions {
        n: s.n,
        grid: s.grid,
        paths: a.paths,
        dt: s.dt,
        seed: s.seed,
        mode: s.mode.into(),
        y_max: s.ymax,
    };
    let report = verify::run(&dist, &opts);
    let manifest = RunManifest::new("verify", &s.dist, serde_json::to_value(&report.options)?);
    emit(a.out.as_deref(), &report.to_json(), &manifest)?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check {} failed: {}", c.name, c.message);
    }
    Ok(report.passed)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(input_error("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    match &cli.command {
        Command::Coeffs(a) => cmd_coeffs(a).map(|_| true),
        Command::Trace(a) => cmd_trace(a).map(|_| true),
        Command::Tips(a) => cmd_tips(a).map(|_| true),
        Command::Simulate(a) => cmd_simulate(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
