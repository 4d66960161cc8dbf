//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 configuration error,
//! 3 bound violated beyond tolerance, 4 estimator degeneracy.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, Scenario};
use super::render::{self, ReportFormat};
use super::run::{run_experiment, scenario_seed};
use crate::bounds::lp_bound;
use crate::error::{Error, Result};
use crate::estimators::{knn_entropy, EnsembleMatrix};
use crate::maxent::{MaxEntDensity, PExponent};
use crate::processes::{simulate_process, simulate_recursion};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 3;

const DEFAULT_OUT: &str = "entrobound-out";

#[derive(Debug, Parser)]
#[command(name = "entrobound", version, about = "Entropic lower bounds on L_p prediction errors")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "ENTROBOUND_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples from a maximum-entropy density, or simulate the
    /// ensembles of every scenario in a config.
    Sample(SampleArgs),
    /// Entropy in bits: closed form for a density, or a kNN estimate for a
    /// file of values.
    Entropy(EntropyArgs),
    /// Lower bound on the L_p norm implied by an entropy.
    Bound(BoundArgs),
    /// Run an experiment config and write its reports.
    Run(RunArgs),
    /// Re-render a JSON report.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, conflicts_with_all = ["p", "mu", "n"])]
    pub config: Option<PathBuf>,
    #[arg(long, requires = "mu")]
    pub p: Option<PExponent>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (density samples) or directory (config ensembles).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write binary ensemble dumps instead of CSV.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long, requires = "mu", conflicts_with = "input")]
    pub p: Option<PExponent>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// One value per line; blank lines and `#` comments are skipped.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = crate::estimators::DEFAULT_K_NEIGHBORS)]
    pub k_neighbors: usize,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Entropy of the error in bits.
    #[arg(long, allow_hyphen_values = true)]
    pub entropy: f64,
    /// Exponents, e.g. `--p 1 --p 2 --p inf`.
    #[arg(long, required = true)]
    pub p: Vec<PExponent>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Formats to write; all of them when omitted.
    #[arg(long, value_enum)]
    pub format: Vec<ReportFormat>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// A `report.json` written by `run`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Vec<ReportFormat>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut stdout = io::stdout().lock();
    match execute(cli.command, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Sample(a) => sample(a, out),
        Command::Entropy(a) => entropy(a, out),
        Command::Bound(a) => bound(a, out),
        Command::Run(a) => run(a, out),
        Command::Render(a) => render_cmd(a, out),
    }
}

fn sample(a: SampleArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(path) = a.config {
        let config = ExperimentConfig::load(&path)?;
        let dir = a.out.or(config.output.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        fs::create_dir_all(&dir)?;
        let base = a.seed.unwrap_or(config.seed);
        for (i, s) in config.scenarios.iter().enumerate() {
            let (n, k, seed) = (s.realizations(config.realizations), s.steps(config.steps), scenario_seed(base, i));
            let ens = match s {
                Scenario::Prediction(p) => simulate_process(&p.process, n, k, seed)?,
                Scenario::Recursion(r) => simulate_recursion(&r.recursion, n, k, seed)?,
                Scenario::SideInformation(_) => {
                    writeln!(out, "skipping {}: no trajectory ensemble", s.name())?;
                    continue;
                }
            };
            let ext = if a.binary { "bin" } else { "csv" };
            let file = dir.join(format!("{}.{ext}", s.name()));
            let w = io::BufWriter::new(fs::File::create(&file)?);
            if a.binary {
                ens.write_binary(w)?;
            } else {
                ens.write_csv(w)?;
            }
            writeln!(out, "{}", file.display())?;
        }
        return Ok(EXIT_OK);
    }
    let (p, mu) = match (a.p, a.mu) {
        (Some(p), Some(mu)) => (p, mu),
        _ => return Err(Error::invalid("give --config, or --p and --mu")),
    };
    let values = MaxEntDensity::new(p, mu)?.sample(a.n, a.seed.unwrap_or(0))?;
    let mut text = String::new();
    for v in values.values() {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    match a.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|_| Error::Format(format!("{}:{}: not a number: `{l}`", path.display(), i + 1)))
        })
        .collect()
}

fn entropy(a: EntropyArgs, out: &mut dyn Write) -> Result<i32> {
    match (a.p, a.mu, a.input) {
        (Some(p), Some(mu), None) => {
            writeln!(out, "{}", MaxEntDensity::new(p, mu)?.entropy_bits())?;
        }
        (None, None, Some(path)) => {
            let values = read_values(&path)?;
            let est = knn_entropy(&EnsembleMatrix::from_columns(&[&values])?, a.k_neighbors)?;
            writeln!(out, "{}", est.value)?;
        }
        _ => return Err(Error::invalid("give either --p and --mu, or --input")),
    }
    Ok(EXIT_OK)
}

fn bound(a: BoundArgs, out: &mut dyn Write) -> Result<i32> {
    if !a.entropy.is_finite() {
        return Err(Error::invalid("entropy must be finite"));
    }
    let rows: Vec<(PExponent, f64)> = a.p.iter().map(|&p| (p, lp_bound(a.entropy, p))).collect();
    match a.format {
        ReportFormat::Json => {
            let doc: Vec<serde_json::Value> = rows
                .iter()
                .map(|(p, b)| serde_json::json!({ "p": p, "entropy_bits": a.entropy, "bound": b }))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        ReportFormat::Csv => {
            writeln!(out, "p,entropy_bits,bound")?;
            for (p, b) in rows {
                writeln!(out, "{p},{},{b}", a.entropy)?;
            }
        }
        ReportFormat::Svg => return Err(Error::Unsupported("bound prints csv or json".into())),
    }
    Ok(EXIT_OK)
}

fn run(a: RunArgs, out: &mut dyn Write) -> Result<i32> {
    let mut config = ExperimentConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let dir = a.out.or(config.output.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let report = run_experiment(&config)?;
    let formats = if a.format.is_empty() { ReportFormat::ALL.to_vec() } else { a.format };
    for path in render::render_report(&report, &formats, &dir)? {
        writeln!(out, "{}", path.display())?;
    }
    if report.has_violations() {
        for row in report.rows.iter().filter(|r| r.violated) {
            eprintln!(
                "violation: {} k={:?} p={} empirical {:?} < bound {} - {} se ({})",
                row.scenario, row.k, row.report.p, row.report.empirical_lp, row.report.bound_value,
                config.violation_sigmas, row.standard_error
            );
        }
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

fn render_cmd(a: RenderArgs, out: &mut dyn Write) -> Result<i32> {
    let report = render::from_json(&fs::read_to_string(&a.input)?)?;
    let dir = a.out.unwrap_or_else(|| a.input.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf));
    let formats = if a.format.is_empty() { vec![ReportFormat::Svg] } else { a.format };
    for path in render::render_report(&report, &formats, &dir)? {
        writeln!(out, "{}", path.display())?;
    }
    Ok(EXIT_OK)
}
