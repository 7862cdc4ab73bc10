//! `gesnorm`: distortion-based norms, their duals, norm-projection onto
//! polyhedra, and rolling-window anomaly detection from the shell.
//!
//! Every subcommand is a pure function of its flags, input files and seed,
//! so rerunning a command produces byte-identical output. Scalar and CSV
//! output is formatted at 12 significant digits; JSON artifacts keep exact
//! floats and re-parse into equal in-memory structures.

mod distspec;
mod format;
mod report;
mod series;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use distspec::{parse_distortion, parse_f64_list};
use format::sig12;
use gesnorm::anomaly::{
    detect, log_returns_from_prices, overlap_matrix, returns_from_prices, DetectorConfig, Method,
};
use gesnorm::{
    alpha_sweep, generate_instance, ges_dual_norm, nonscaled_ges_norm, project_enumerate,
    project_lp, project_milp, scaled_ges_norm, unit_disk_boundary, Distortion, MilpOptions,
    ProjectionInstance,
};
use serde::Serialize;
use series::{load_series, ColumnKind};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "gesnorm",
    version,
    about = "Distortion-based norms, duals, polyhedral projection and anomaly detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the scaled (default) or non-scaled norm of a vector.
    Norm(NormArgs),
    /// Evaluate the dual norm of a vector (convex distortions only).
    Dual(DualArgs),
    /// Project a point onto { x : Ax <= b, x >= 0 } under the norm.
    Project(ProjectArgs),
    /// Projection objective values over an alpha grid.
    Sweep(SweepArgs),
    /// Run one detector over a dated series and emit its report.
    Detect(DetectArgs),
    /// Run the five reference detectors and emit the flag-overlap table.
    Compare(CompareArgs),
    /// Trace the planar unit-disk boundary as theta,x,y rows.
    Disk(DiskArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct NormArgs {
    /// Comma-separated vector, e.g. "-2,1,7,10,-12".
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// identity | sqrt | power:<p> | table:<path>
    #[arg(long, default_value = "power:2")]
    distortion: String,
    /// Level in [0,1].
    #[arg(long)]
    alpha: f64,
    /// Evaluate the non-scaled variant, n(1-alpha) times the scaled norm.
    #[arg(long)]
    nonscaled: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DualArgs {
    /// Comma-separated vector.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value = "power:2")]
    distortion: String,
    /// Level in [0,1).
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProjectMethod {
    /// Single LP via the top-k epigraph; convex distortions only.
    Lp,
    /// One LP per sort order; exact for any distortion, n <= 8.
    Enumerate,
    /// Branch and bound over sort assignments; exact for any distortion.
    Milp,
}

#[derive(clap::Args)]
struct ProjectArgs {
    /// Instance JSON {n, m, seed, A, b, x_star, d, q}; alternative to --n/--m.
    #[arg(long, conflicts_with_all = ["n", "m"])]
    input: Option<PathBuf>,
    #[arg(long, requires = "m")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    m: Option<usize>,
    /// Seed for generated instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "power:2")]
    distortion: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ProjectMethod::Lp)]
    method: ProjectMethod,
    /// Node budget for --method milp.
    #[arg(long, default_value_t = 1_000_000)]
    node_limit: u64,
    /// Also write the instance itself (useful with --n/--m/--seed).
    #[arg(long)]
    emit_instance: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Instance JSON; alternative to --n/--m.
    #[arg(long, conflicts_with_all = ["n", "m"])]
    input: Option<PathBuf>,
    #[arg(long, requires = "m")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated grid; defaults to 0,0.1,...,0.9.
    #[arg(long)]
    alphas: Option<String>,
    /// Comma-separated distortion specs, also used as series labels.
    #[arg(long, default_value = "power:2,identity")]
    distortions: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectMethod {
    Ges,
    Mad,
    Pot,
    Iforest,
}

impl DetectMethod {
    fn method(self) -> Method {
        match self {
            DetectMethod::Ges => Method::GesNorm,
            DetectMethod::Mad => Method::MadZscore,
            DetectMethod::Pot => Method::Pot,
            DetectMethod::Iforest => Method::IsolationForest,
        }
    }
}

#[derive(clap::Args)]
struct DetectArgs {
    /// CSV with header `date,price` or `date,return`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: DetectMethod,
    /// Overrides the method default (30 for ges/mad, 180 for pot/iforest).
    #[arg(long)]
    window: Option<usize>,
    /// GES level.
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// GES distortion.
    #[arg(long, default_value = "power:2")]
    distortion: String,
    /// Modified Z-score cutoff.
    #[arg(long, default_value_t = 3.0)]
    z_threshold: f64,
    /// POT tail-fit threshold percentile.
    #[arg(long, default_value_t = 0.90)]
    pot_threshold_quantile: f64,
    /// POT outlier quantile.
    #[arg(long, default_value_t = 0.99)]
    pot_outlier_quantile: f64,
    /// Flag against the empirical window quantile instead of the GPD one.
    #[arg(long)]
    pot_empirical: bool,
    /// Isolation-forest tree count.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Isolation-forest subsample; defaults to min(256, window).
    #[arg(long)]
    subsample: Option<usize>,
    /// Isolation-forest score cutoff.
    #[arg(long, default_value_t = 0.7)]
    score_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Convert prices with log returns instead of simple returns.
    #[arg(long)]
    log_returns: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompareArgs {
    /// CSV with header `date,price` or `date,return`.
    #[arg(long)]
    input: PathBuf,
    /// GES and modified Z-score window.
    #[arg(long, default_value_t = 30)]
    window: usize,
    /// POT and isolation-forest window.
    #[arg(long, default_value_t = 180)]
    window_tail: usize,
    /// GES level.
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Convert prices with log returns instead of simple returns.
    #[arg(long)]
    log_returns: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DiskArgs {
    #[arg(long, default_value = "power:2")]
    distortion: String,
    #[arg(long)]
    alpha: f64,
    /// Number of equally spaced directions.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Trace the non-scaled norm's disk instead.
    #[arg(long)]
    nonscaled: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Norm(a) => run_norm(a),
        Command::Dual(a) => run_dual(a),
        Command::Project(a) => run_project(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Detect(a) => run_detect(a),
        Command::Compare(a) => run_compare(a),
        Command::Disk(a) => run_disk(a),
    }
}

/// Writes to the path when given, otherwise to stdout.
fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, content).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_norm(a: NormArgs) -> Result<()> {
    let x = parse_f64_list(&a.x).context("--x")?;
    let g = parse_distortion(&a.distortion)?;
    let v = if a.nonscaled {
        nonscaled_ges_norm(&x, a.alpha, &g)?
    } else {
        scaled_ges_norm(&x, a.alpha, &g)?
    };
    emit(a.output.as_deref(), &format!("{}\n", sig12(v)))
}

fn run_dual(a: DualArgs) -> Result<()> {
    let y = parse_f64_list(&a.y).context("--y")?;
    let g = parse_distortion(&a.distortion)?;
    let v = ges_dual_norm(&y, a.alpha, &g)?;
    emit(a.output.as_deref(), &format!("{}\n", sig12(v)))
}

fn load_or_generate(
    input: Option<&Path>,
    n: Option<usize>,
    m: Option<usize>,
    seed: u64,
) -> Result<ProjectionInstance> {
    match input {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("invalid instance JSON {}", p.display()))
        }
        None => match (n, m) {
            (Some(n), Some(m)) => Ok(generate_instance(n, m, seed)?),
            _ => bail!("provide --input FILE or both --n and --m"),
        },
    }
}

#[derive(Serialize)]
struct ProjectOutput {
    method: String,
    distortion: String,
    alpha: f64,
    value: f64,
    minimizer: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<u64>,
}

fn run_project(a: ProjectArgs) -> Result<()> {
    let inst = load_or_generate(a.input.as_deref(), a.n, a.m, a.seed)?;
    if let Some(path) = &a.emit_instance {
        let text = serde_json::to_string_pretty(&inst)? + "\n";
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let g = parse_distortion(&a.distortion)?;
    let (value, minimizer, nodes) = match a.method {
        ProjectMethod::Lp => {
            let p = project_lp(&inst.q, &inst.polyhedron, a.alpha, &g)?;
            (p.value, p.minimizer, None)
        }
        ProjectMethod::Enumerate => {
            let p = project_enumerate(&inst.q, &inst.polyhedron, a.alpha, &g)?;
            (p.value, p.minimizer, None)
        }
        ProjectMethod::Milp => {
            let p = project_milp(
                &inst.q,
                &inst.polyhedron,
                a.alpha,
                &g,
                &MilpOptions {
                    node_limit: a.node_limit,
                },
            )?;
            (p.value, p.minimizer, Some(p.nodes))
        }
    };
    let out = ProjectOutput {
        method: match a.method {
            ProjectMethod::Lp => "lp",
            ProjectMethod::Enumerate => "enumerate",
            ProjectMethod::Milp => "milp",
        }
        .to_string(),
        distortion: a.distortion.clone(),
        alpha: a.alpha,
        value,
        minimizer,
        nodes,
    };
    emit(
        a.output.as_deref(),
        &(serde_json::to_string_pretty(&out)? + "\n"),
    )
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let inst = load_or_generate(a.input.as_deref(), a.n, a.m, a.seed)?;
    let alphas = match &a.alphas {
        Some(s) => parse_f64_list(s).context("--alphas")?,
        None => (0..10).map(|k| k as f64 / 10.0).collect(),
    };
    let mut pairs: Vec<(String, Distortion)> = Vec::new();
    for spec in a.distortions.split(',') {
        let spec = spec.trim();
        pairs.push((spec.to_string(), parse_distortion(spec)?));
    }
    let rows = alpha_sweep(&inst, &alphas, &pairs)?;
    let content = match a.format {
        Format::Csv => {
            let mut out = String::from("g,alpha,value\n");
            for r in &rows {
                out.push_str(&format!("{},{},{}\n", r.g, sig12(r.alpha), sig12(r.value)));
            }
            out
        }
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    emit(a.output.as_deref(), &content)
}

/// Converts a loaded series into dated returns, honoring `--log-returns`.
fn to_returns(s: series::DatedSeries, log_returns: bool) -> Result<(Vec<String>, Vec<f64>)> {
    match s.kind {
        ColumnKind::Return => {
            if log_returns {
                bail!("--log-returns only applies to `date,price` input");
            }
            Ok((s.dates, s.values))
        }
        ColumnKind::Price => {
            let r = if log_returns {
                log_returns_from_prices(&s.values)?
            } else {
                returns_from_prices(&s.values)?
            };
            // The return at index i spans prices i..i+1 and carries the
            // later date.
            Ok((s.dates[1..].to_vec(), r))
        }
    }
}

fn run_detect(a: DetectArgs) -> Result<()> {
    let (dates, returns) = to_returns(load_series(&a.input)?, a.log_returns)?;
    let mut cfg = DetectorConfig::new(a.method.method());
    if let Some(w) = a.window {
        cfg.window = w;
    }
    cfg.alpha = a.alpha;
    cfg.distortion = parse_distortion(&a.distortion)?;
    cfg.z_threshold = a.z_threshold;
    cfg.pot_threshold_quantile = a.pot_threshold_quantile;
    cfg.pot_outlier_quantile = a.pot_outlier_quantile;
    cfg.pot_empirical = a.pot_empirical;
    cfg.trees = a.trees;
    cfg.subsample = a.subsample;
    cfg.score_threshold = a.score_threshold;
    cfg.seed = a.seed;
    cfg.validate()?;
    let det = detect(&returns, &cfg)?;
    let report = report::build_report(&det, &dates, &cfg, &a.distortion, a.log_returns);
    let content = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => report.to_csv(),
    };
    emit(a.output.as_deref(), &content)
}

fn run_compare(a: CompareArgs) -> Result<()> {
    let (_, returns) = to_returns(load_series(&a.input)?, a.log_returns)?;

    let ges = |g: Distortion| {
        let mut cfg = DetectorConfig::new(Method::GesNorm);
        cfg.window = a.window;
        cfg.alpha = a.alpha;
        cfg.distortion = g;
        cfg.seed = a.seed;
        cfg
    };
    let mut mad = DetectorConfig::new(Method::MadZscore);
    mad.window = a.window;
    mad.seed = a.seed;
    let mut pot = DetectorConfig::new(Method::Pot);
    pot.window = a.window_tail;
    pot.seed = a.seed;
    let mut forest = DetectorConfig::new(Method::IsolationForest);
    forest.window = a.window_tail;
    forest.seed = a.seed;

    let runs: [(&str, DetectorConfig); 5] = [
        ("GES-linear", ges(Distortion::identity())),
        ("GES-square", ges(Distortion::power(2.0)?)),
        ("Isolation Forest", forest),
        ("Modified Z-score", mad),
        ("POT", pot),
    ];
    let mut flag_sets = Vec::new();
    for (label, cfg) in runs {
        cfg.validate()?;
        flag_sets.push((label.to_string(), detect(&returns, &cfg)?.flags()));
    }
    let table = overlap_matrix(&flag_sets)?;
    emit(a.output.as_deref(), &table.to_csv())
}

fn run_disk(a: DiskArgs) -> Result<()> {
    let g = parse_distortion(&a.distortion)?;
    let boundary = unit_disk_boundary(&g, a.alpha, a.samples, !a.nonscaled)?;
    let mut out = String::from("theta,x,y\n");
    for p in &boundary {
        out.push_str(&format!("{},{},{}\n", sig12(p.theta), sig12(p.x), sig12(p.y)));
    }
    emit(a.output.as_deref(), &out)
}
