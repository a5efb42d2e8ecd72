//! Command-line front end. [`run`] parses arguments and returns the process
//! exit code: 0 on success, 1 on usage or input errors, 2 when a fit did not
//! converge (results are still written).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{funnel_points, parse_dataset, write_funnel_csv, Dataset, Design};
use crate::error::{MetaError, Result};
use crate::estimation::{fit_conditional, FitOptions, FitResult};
use crate::models::{Family, Model, ModelSpec};
use crate::quadrature::DEFAULT_ORDER;
use crate::selection::SelectionMethod;
use crate::sensitivity::{default_grid, sensitivity_scan};
use crate::simulation::{run_experiment, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NONCONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sparse-meta",
    version,
    about = "Publication-bias sensitivity analysis for sparse meta-analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model, unadjusted (`--p 1`, the default) or at a fixed `p`.
    Fit(FitArgs),
    /// Fit over a grid of marginal publication probabilities.
    Sensitivity(SensitivityArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Simulate(SimulateArgs),
    /// Export `study,effect,se` points for a funnel plot.
    Funnel(FunnelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_family)]
    pub model: Family,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = parse_design)]
    pub design: Design,
    /// Gauss–Hermite order.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub quad: usize,
    #[arg(long, value_parser = parse_method, default_value = "exact")]
    pub method: SelectionMethod,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub common: ModelArgs,
    /// Comma-separated values of `p`; defaults to 1.0, 0.9, …, 0.1.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Summary CSV (or JSON with `--format json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional event-rate CSV (full vs published).
    #[arg(long)]
    pub rates: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FunnelArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = parse_design)]
    pub design: Design,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: MetaError| e.to_string())
}

fn parse_design(s: &str) -> std::result::Result<Design, String> {
    s.parse().map_err(|e: MetaError| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<SelectionMethod, String> {
    s.parse().map_err(|e: MetaError| e.to_string())
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Runs a parsed command. Errors are input errors; the `Ok` value
/// distinguishes success from non-convergence.
pub fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Fit(a) => cmd_fit(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Funnel(a) => cmd_funnel(a),
    }
}

fn read_dataset(path: &Path, design: Design) -> Result<Dataset> {
    let text =
        fs::read_to_string(path).map_err(|e| MetaError::Io(format!("{}: {e}", path.display())))?;
    let mut ds = parse_dataset(&text, design)?;
    ds.source = path.display().to_string();
    Ok(ds)
}

fn load(a: &ModelArgs) -> Result<(Model, Dataset, FitOptions)> {
    let ds = read_dataset(&a.data, a.design)?;
    a.model.check(ds.design())?;
    let model = Model::new(ModelSpec::new(a.model).with_order(a.quad))?;
    let opts = FitOptions {
        method: a.method,
        ..FitOptions::default()
    };
    Ok((model, ds, opts))
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| MetaError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(body.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn fit_text(fit: &FitResult, format: Format) -> String {
    match format {
        Format::Json => fit.to_json() + "\n",
        Format::Csv => format!("{}\n{}\n", FitResult::CSV_HEADER, fit.csv_row()),
    }
}

pub fn cmd_fit(a: &FitArgs) -> Result<i32> {
    let (model, ds, opts) = load(&a.common)?;
    let fit = fit_conditional(&model, &ds, a.p, &opts)?;
    emit(a.common.out.as_deref(), &fit_text(&fit, a.common.format))?;
    Ok(if fit.converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGED
    })
}

pub fn cmd_sensitivity(a: &SensitivityArgs) -> Result<i32> {
    let (model, ds, opts) = load(&a.common)?;
    let grid = a.grid.clone().unwrap_or_else(default_grid);
    let table = sensitivity_scan(&model, &ds, &grid, &opts)?;
    let body = match a.common.format {
        Format::Json => table.to_json() + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    emit(a.common.out.as_deref(), &body)?;
    Ok(if table.all_converged() {
        EXIT_OK
    } else {
        EXIT_NONCONVERGED
    })
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| MetaError::Io(format!("{}: {e}", a.config.display())))?;
    let mut cfg = SimConfig::from_json(&text)?;
    if let Some(r) = a.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let summary = run_experiment(&cfg)?;
    let body = match a.format {
        Format::Json => serde_json::to_string_pretty(&summary).expect("summaries serialize") + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            summary.write_summary(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    emit(a.out.as_deref(), &body)?;
    if let Some(path) = &a.rates {
        let mut buf = Vec::new();
        summary.write_event_rates(&mut buf)?;
        fs::write(path, buf).map_err(|e| MetaError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_funnel(a: &FunnelArgs) -> Result<i32> {
    let ds = read_dataset(&a.data, a.design)?;
    let points = funnel_points(&ds)?;
    let mut buf = Vec::new();
    write_funnel_csv(&points, &mut buf)?;
    emit(
        a.out.as_deref(),
        &String::from_utf8(buf).expect("csv is utf-8"),
    )?;
    Ok(EXIT_OK)
}
