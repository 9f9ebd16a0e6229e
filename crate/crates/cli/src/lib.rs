//! Command-line front end: instance generation, piercing, coloring, exact
//! oracles, verification, batch statistics and SVG rendering.
//!
//! Results go to a file or to stdout with `-`; progress and reports meant for
//! people go to stderr.

pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use rectpierce::exact::{exact_chi, exact_nu, exact_omega_clique, exact_tau, ExactError, ExactLimits};
use rectpierce::instance::InstanceError;
use rectpierce::pierce::PierceError;
use rectpierce::verify::{batch_stats, verify_coloring_bounds, verify_piercing, VerifyError};
use rectpierce::{
    build_graph_sweep, construct_transversal, generate_random, generate_structured,
    greedy_degeneracy_coloring, max_depth_omega, parse_instance, serialize_instance, Coloring,
    GeneratorConfig, Instance, PiercingResult, Scalar, StructureKind,
};

use crate::svg::{render_svg, Overlay, RenderStyle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Oracle(#[from] ExactError),
    #[error(transparent)]
    Pierce(#[from] PierceError),
    #[error(transparent)]
    Generate(Box<InstanceError>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Generate(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Verification(_) | CliError::Pierce(_) => EXIT_VERIFY,
            CliError::Oracle(_) => EXIT_ORACLE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rectpierce", version, about = "Pierce and color families of axis-parallel rectangles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random or structured instance.
    Generate(Box<GenerateArgs>),
    /// Build a transversal with its disjointness certificate.
    Pierce(PierceArgs),
    /// Greedy coloring along a degeneracy order.
    Color(ColorArgs),
    /// Exact tau, nu, chi or omega for small instances.
    Exact(ExactArgs),
    /// Re-check a piercing or coloring result, or a whole directory.
    Verify(VerifyArgs),
    /// Per-instance and aggregate statistics.
    Stats(StatsArgs),
    /// Draw an instance, optionally with a result on top.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Aspect-ratio bound, e.g. `2` or `5/2`.
    #[arg(long, default_value = "1")]
    pub r: Scalar,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "100")]
    pub window: Scalar,
    #[arg(long, default_value = "1")]
    pub side_min: Scalar,
    #[arg(long, default_value = "10")]
    pub side_max: Scalar,
    /// Corners are multiples of 1/resolution.
    #[arg(long, default_value_t = 1000)]
    pub resolution: u32,
    /// `random`, `disjoint_grid`, `common_point_clique` or `chain`.
    #[arg(long, default_value = "random")]
    pub kind: String,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PierceArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    pub instance: PathBuf,
    /// Comma-separated subset of tau, nu, chi, omega.
    #[arg(long, default_value = "tau,nu")]
    pub what: String,
    /// Raise every size limit to this many rectangles.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Time budget per oracle, in seconds.
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(required_unless_present = "batch")]
    pub instance: Option<PathBuf>,
    /// Piercing (`points`) or coloring (`colors`) JSON.
    #[arg(required_unless_present = "batch")]
    pub result: Option<PathBuf>,
    /// Verify every `*.json` instance in a directory.
    #[arg(long, conflicts_with_all = ["instance", "result"])]
    pub batch: Option<PathBuf>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Instance files or directories of `*.json` instances.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Largest instance handed to the exact oracles.
    #[arg(long, default_value_t = 10)]
    pub exact_max_n: usize,
    /// Tab-separated table instead of JSON.
    #[arg(long)]
    pub table: bool,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub instance: PathBuf,
    /// Piercing or coloring JSON to overlay.
    #[arg(long)]
    pub result: Option<PathBuf>,
    /// Draw the long-edge subdivision points of this rectangle.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 600.0)]
    pub canvas: f64,
    #[arg(long, visible_alias = "svg", default_value = "-")]
    pub out: PathBuf,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("results always encode");
    s.push('\n');
    s
}

enum LoadedResult {
    Piercing(PiercingResult),
    Coloring(Coloring),
}

fn load_result(path: &Path) -> Result<LoadedResult, CliError> {
    let parse_err = |message: String| CliError::Parse { path: path.to_path_buf(), message };
    let value: serde_json::Value = serde_json::from_str(&read(path)?).map_err(|e| parse_err(e.to_string()))?;
    if value.get("points").is_some() {
        serde_json::from_value(value).map(LoadedResult::Piercing).map_err(|e| parse_err(e.to_string()))
    } else if value.get("colors").is_some() {
        serde_json::from_value(value).map(LoadedResult::Coloring).map_err(|e| parse_err(e.to_string()))
    } else {
        Err(parse_err("expected a piercing result (\"points\") or a coloring (\"colors\")".into()))
    }
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn collect_corpus(inputs: &[PathBuf]) -> Result<Vec<(String, Instance)>, CliError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = fs::read_dir(input).map_err(|source| CliError::Io { path: input.clone(), source })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no instance files found".into()));
    }
    files.iter().map(|p| Ok((instance_name(p), load_instance(p)?))).collect()
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let instance = if a.kind == "random" {
        let cfg = GeneratorConfig {
            n: a.n,
            r_max: a.r.clone(),
            window: a.window.clone(),
            side_min: a.side_min.clone(),
            side_max: a.side_max.clone(),
            resolution: a.resolution,
            seed: a.seed,
        };
        generate_random(&cfg).map_err(|e| CliError::Generate(Box::new(e)))?
    } else {
        let kind: StructureKind = a.kind.parse().map_err(CliError::Usage)?;
        generate_structured(kind, a.n)
    };
    let mut text = serialize_instance(&instance);
    text.push('\n');
    write(&a.out, &text)?;
    eprintln!("generated {} rectangles", instance.len());
    Ok(())
}

fn write_svg(path: &Option<PathBuf>, i: &Instance, overlay: Overlay<'_>) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, &render_svg(i, overlay, &RenderStyle::default())),
        None => Ok(()),
    }
}

pub fn cmd_pierce(a: &PierceArgs) -> Result<(), CliError> {
    let i = load_instance(&a.instance)?;
    let res = construct_transversal(&i)?;
    eprintln!(
        "|T| = {}, |I| = {}, {} rounds",
        res.transversal.len(),
        res.certificate.len(),
        res.trace.len()
    );
    write(&a.out, &to_json(&res))?;
    write_svg(&a.svg, &i, Overlay { piercing: Some(&res), ..Default::default() })
}

pub fn cmd_color(a: &ColorArgs) -> Result<(), CliError> {
    let i = load_instance(&a.instance)?;
    let c = greedy_degeneracy_coloring(&build_graph_sweep(&i));
    eprintln!("{} colors", c.num_colors);
    write(&a.out, &to_json(&c))?;
    write_svg(&a.svg, &i, Overlay { coloring: Some(&c), ..Default::default() })
}

pub fn cmd_exact(a: &ExactArgs) -> Result<(), CliError> {
    let i = load_instance(&a.instance)?;
    let mut lim = ExactLimits::default();
    if let Some(n) = a.max_n {
        lim = lim.with_max_n(n);
    }
    if let Some(secs) = a.budget {
        lim.time_budget = Duration::try_from_secs_f64(secs)
            .map_err(|e| CliError::Usage(format!("--budget {secs}: {e}")))?;
    }
    let mut fields = Vec::new();
    for what in a.what.split(',').map(str::trim).filter(|w| !w.is_empty()) {
        let value = match what {
            "tau" => exact_tau(&i, &lim)?.0,
            "nu" => exact_nu(&i, &lim)?.0,
            "chi" => exact_chi(&i, &lim)?.0,
            "omega" => exact_omega_clique(&build_graph_sweep(&i), &lim)?,
            other => return Err(CliError::Usage(format!("unknown quantity {other:?}; expected tau, nu, chi or omega"))),
        };
        fields.push(format!("\"{what}\":{value}"));
    }
    if fields.is_empty() {
        return Err(CliError::Usage("--what is empty".into()));
    }
    write(&a.out, &format!("{{{}}}\n", fields.join(",")))
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let malformed = |e: VerifyError| CliError::Verification(e.to_string());
    if let Some(dir) = &a.batch {
        let corpus = collect_corpus(std::slice::from_ref(dir))?;
        let summary = batch_stats(&corpus, &ExactLimits::default().with_max_n(10));
        eprint!("{}", summary.to_table());
        write(&a.out, &to_json(&summary))?;
        let skipped = corpus.len() - summary.rows.len();
        return if summary.all_verified && skipped == 0 && summary.wegner_flags.is_empty() {
            Ok(())
        } else {
            Err(CliError::Verification(format!(
                "{} of {} instances failed",
                summary.rows.iter().filter(|r| !r.verified).count() + skipped,
                corpus.len()
            )))
        };
    }
    let (ipath, rpath) = match (&a.instance, &a.result) {
        (Some(i), Some(r)) => (i, r),
        _ => return Err(CliError::Usage("verify needs <instance> <result> or --batch <dir>".into())),
    };
    let i = load_instance(ipath)?;
    let id = instance_name(ipath);
    let report = match load_result(rpath)? {
        LoadedResult::Piercing(res) => verify_piercing(&i, &res, &id).map_err(malformed)?,
        LoadedResult::Coloring(c) => verify_coloring_bounds(&i, &c, &id).map_err(malformed)?,
    };
    eprint!("{report}");
    write(&a.out, &to_json(&report))?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failed_checks().map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(names.join(", ")))
    }
}

pub fn cmd_stats(a: &StatsArgs) -> Result<(), CliError> {
    let corpus = collect_corpus(&a.inputs)?;
    for (name, i) in &corpus {
        let (omega, witness) = max_depth_omega(i).map_err(|e| CliError::Parse {
            path: PathBuf::from(name),
            message: e.to_string(),
        })?;
        eprintln!("{name}: n = {}, omega = {omega} at ({}, {})", i.len(), witness.x, witness.y);
    }
    let summary = batch_stats(&corpus, &ExactLimits::default().with_max_n(a.exact_max_n));
    if a.table {
        write(&a.out, &summary.to_table())
    } else {
        write(&a.out, &to_json(&summary))
    }
}

pub fn cmd_render(a: &RenderArgs) -> Result<(), CliError> {
    if !(a.canvas.is_finite() && a.canvas > 0.0) {
        return Err(CliError::Usage("--canvas must be a positive number".into()));
    }
    let i = load_instance(&a.instance)?;
    if let Some(id) = a.grid {
        if id >= i.len() {
            return Err(CliError::Usage(format!("--grid {id}: instance has {} rectangles", i.len())));
        }
    }
    let loaded = a.result.as_deref().map(load_result).transpose()?;
    let mut overlay = Overlay { p_grid: a.grid, ..Default::default() };
    match &loaded {
        Some(LoadedResult::Piercing(res)) => overlay.piercing = Some(res),
        Some(LoadedResult::Coloring(c)) => overlay.coloring = Some(c),
        None => {}
    }
    let style = RenderStyle { canvas: a.canvas, ..Default::default() };
    write(&a.out, &render_svg(&i, overlay, &style))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Pierce(a) => cmd_pierce(a),
        Command::Color(a) => cmd_color(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Render(a) => cmd_render(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
