//! `zetacast`: zeta-corrected inflation forecasting from the command line.
//!
//! Each subcommand resolves its flags and the optional TOML config into a [`job::Job`],
//! runs it into the output directory and records a `manifest.json` there. Data goes to
//! files only; diagnostics go to stderr. Exit status is 0 on success, 1 when a stage
//! fails or a replay diverges, and 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod input;
mod job;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use zetacast_core::arima::ArimaSpec;
use zetacast_core::data::{IndexMode, DEFAULT_BETA};
use zetacast_core::forecast::{default_alpha_grid, ZetaMean};
use zetacast_core::mcdm::ScoringMethod;
use zetacast_core::pipeline::PipelineOptions;
use zetacast_core::spectral::Window;
use zetacast_core::stochastic::{ShockSpec, DEFAULT_SEED};
use zetacast_core::zeta::{inclusive_grid, SignalMode};

use config::FileConfig;
use job::{
    ArimaJob, CalibrateJob, CompareJob, ForecastJob, Job, ObsInput, PhasesJob, PipelineJob, SeriesInput, SimulateJob,
    SpectrumJob, SpectrumSource, ZetaJob,
};

#[derive(Parser, Debug)]
#[command(name = "zetacast", version, about = "Zeta-corrected inflation forecasting")]
struct Cli {
    /// TOML file with default values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample ζ(1/2 + it) on a grid and search for zeros.
    Zeta(ZetaArgs),
    /// Apply the cyclical correction to a baseline forecast.
    Forecast(ForecastArgs),
    /// Grid-search the correction strength against actual inflation.
    Calibrate(CalibrateArgs),
    /// Phase posteriors and the most likely phase path.
    Phases(PhasesArgs),
    /// Fourier decomposition and dominant frequencies.
    Spectrum(SpectrumArgs),
    /// Monte Carlo shock bands around the corrected forecast.
    Simulate(SimulateArgs),
    /// Rank models on a criteria table.
    Compare(CompareArgs),
    /// Fit an ARIMA baseline and forecast ahead.
    Arima(ArimaArgs),
    /// Every stage on one macro panel.
    Pipeline(PipelineArgs),
    /// Write the embedded reference tables.
    Fixtures,
    /// Run a recorded manifest again and compare checksums.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct ZetaArgs {
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// real-part or modulus.
    #[arg(long)]
    mode: Option<SignalMode>,
    /// Largest refined |ζ| reported as a zero candidate.
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
    /// Window width for zero density.
    #[arg(long, default_value_t = 10.0)]
    density_window: f64,
}

/// Signal and baseline source shared by forecast, calibrate and simulate.
#[derive(Args, Debug)]
struct SeriesArgs {
    /// Numeric table (path or fixture:<name>) with signal and baseline columns.
    #[arg(long, conflicts_with = "input")]
    table: Option<String>,
    /// Macro panel CSV (path or fixture:<name>); the signal is evaluated at each period's t.
    #[arg(long)]
    input: Option<String>,
    /// Signal column of --table [default: zeta].
    #[arg(long)]
    signal_column: Option<String>,
    /// Baseline forecast column [default: fpas for tables].
    #[arg(long)]
    baseline_column: Option<String>,
    /// Actual inflation column.
    #[arg(long)]
    actual_column: Option<String>,
    /// Policy-rate coefficient of the t transform.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// raw or rank.
    #[arg(long)]
    index: Option<IndexMode>,
    /// real-part or modulus.
    #[arg(long)]
    mode: Option<SignalMode>,
    /// `window` or a fixed number.
    #[arg(long)]
    zeta_mean: Option<String>,
}

#[derive(Args, Debug)]
struct ForecastArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// `lo:step:hi` or a comma-separated list.
    #[arg(long)]
    grid: Option<String>,
}

/// One observed series.
#[derive(Args, Debug)]
struct ObsArgs {
    /// Numeric table (path or fixture:<name>).
    #[arg(long, conflicts_with = "input")]
    table: Option<String>,
    /// Macro panel; its actual inflation is used.
    #[arg(long)]
    input: Option<String>,
    /// Column of --table.
    #[arg(long)]
    column: Option<String>,
}

#[derive(Args, Debug)]
struct PhasesArgs {
    #[command(flatten)]
    obs: ObsArgs,
    /// HMM model JSON.
    #[arg(long)]
    model: Option<String>,
    /// Baum-Welch iterations before decoding.
    #[arg(long, default_value_t = 0)]
    train: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Numeric table; without it the zeta signal is sampled on a grid.
    #[arg(long)]
    table: Option<String>,
    #[arg(long, requires = "table")]
    column: Option<String>,
    /// Sample spacing [default: 1 for tables, 0.1 for the zeta grid].
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long, default_value_t = 10.0, conflicts_with = "table")]
    t_min: f64,
    #[arg(long, default_value_t = 256, conflicts_with = "table")]
    len: usize,
    #[arg(long)]
    mode: Option<SignalMode>,
    /// none or hann.
    #[arg(long)]
    window: Option<Window>,
    #[arg(long)]
    peaks: Option<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Shock standard deviation, percentage points.
    #[arg(long)]
    std: Option<f64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Criteria table: a model column then one column per criterion.
    #[arg(long)]
    table: Option<String>,
    /// row-sum, range-ratio, standard-topsis or all.
    #[arg(long)]
    method: Option<String>,
    /// Pairwise comparison CSV for criterion weights.
    #[arg(long)]
    pairwise: Option<String>,
}

#[derive(Args, Debug)]
struct ArimaArgs {
    #[command(flatten)]
    obs: ObsArgs,
    /// Orders as `p,d,q`.
    #[arg(long)]
    arima: Option<ArimaSpec>,
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    /// Macro panel with actual inflation (path or fixture:<name>).
    #[arg(long)]
    input: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Trailing periods held out for calibration.
    #[arg(long)]
    holdout: Option<usize>,
    #[arg(long)]
    arima: Option<ArimaSpec>,
    #[arg(long)]
    mode: Option<SignalMode>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    std: Option<f64>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// Manifest file or the directory holding it.
    manifest: PathBuf,
}

/// Bad flags or config values. Maps to exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Parses a config string with the flag's parser.
fn from_config<T: FromStr>(key: &str, value: Option<&String>) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .map(|v| v.parse::<T>().map_err(|e| usage(format!("config key {key}: {e}"))))
        .transpose()
}

fn parse_zeta_mean(s: &str) -> Result<ZetaMean> {
    if s == "window" {
        return Ok(ZetaMean::Window);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(ZetaMean::Fixed(v)),
        _ => Err(usage(format!("zeta mean must be 'window' or a number, got '{s}'"))),
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || usage(format!("grid must be 'lo:step:hi' or a comma list, got '{s}'"));
    if s.contains(':') {
        let parts = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let [lo, step, hi] = parts[..] else { return Err(bad()) };
        if !(step > 0.0 && hi >= lo) {
            return Err(bad());
        }
        Ok(inclusive_grid(lo, hi, step))
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be finite")))
    }
}

struct Ctx {
    cfg: FileConfig,
    seed: u64,
}

impl Ctx {
    fn zeta_mean(&self, flag: &Option<String>) -> Result<ZetaMean> {
        flag.as_ref()
            .or(self.cfg.zeta_mean.as_ref())
            .map(|s| parse_zeta_mean(s))
            .transpose()
            .map(Option::unwrap_or_default)
    }

    fn alpha(&self, flag: Option<f64>) -> Result<f64> {
        finite("alpha", flag.or(self.cfg.alpha).unwrap_or(0.5))
    }

    fn mode(&self, flag: Option<SignalMode>) -> Result<SignalMode> {
        Ok(flag
            .or(from_config("signal_mode", self.cfg.signal_mode.as_ref())?)
            .unwrap_or_default())
    }

    fn schema(&self) -> zetacast_core::data::SchemaConfig {
        self.cfg.schema.clone().unwrap_or_default()
    }

    fn shocks(&self, iterations: Option<usize>, std: Option<f64>) -> Result<ShockSpec> {
        let d = ShockSpec::default();
        let spec = ShockSpec {
            std: std.or(self.cfg.shock_std).unwrap_or(d.std),
            iterations: iterations.or(self.cfg.iterations).unwrap_or(d.iterations),
            seed: self.seed,
        };
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }

    fn series(&self, a: &SeriesArgs) -> Result<SeriesInput> {
        let (table, input) = if a.table.is_some() || a.input.is_some() {
            (a.table.clone(), a.input.clone())
        } else {
            (self.cfg.table.clone(), self.cfg.input.clone())
        };
        let actual_column = a.actual_column.clone().or(self.cfg.actual_column.clone());
        match (table, input) {
            (Some(_), Some(_)) => Err(usage("config names both table and input; pick one")),
            (None, None) => Err(usage("no input given: pass --table or --input")),
            (Some(table), None) => Ok(SeriesInput::Table {
                table: input::resolve(&table)?,
                signal_column: a
                    .signal_column
                    .clone()
                    .or(self.cfg.signal_column.clone())
                    .unwrap_or("zeta".into()),
                baseline_column: a
                    .baseline_column
                    .clone()
                    .or(self.cfg.baseline_column.clone())
                    .unwrap_or("fpas".into()),
                actual_column,
            }),
            (None, Some(input)) => Ok(SeriesInput::Macro {
                input: input::resolve(&input)?,
                beta: finite("beta", a.beta.or(self.cfg.beta).unwrap_or(DEFAULT_BETA))?,
                schema: self.schema(),
                index: a
                    .index
                    .or(from_config("index", self.cfg.index.as_ref())?)
                    .unwrap_or_default(),
                mode: self.mode(a.mode)?,
                baseline_column: a
                    .baseline_column
                    .clone()
                    .or(self.cfg.baseline_column.clone())
                    .ok_or_else(|| usage("--baseline-column is required with --input"))?,
                actual_column,
            }),
        }
    }

    fn obs(&self, a: &ObsArgs) -> Result<ObsInput> {
        let (table, input) = if a.table.is_some() || a.input.is_some() {
            (a.table.clone(), a.input.clone())
        } else {
            (self.cfg.table.clone(), self.cfg.input.clone())
        };
        match (table, input) {
            (Some(_), Some(_)) => Err(usage("config names both table and input; pick one")),
            (None, None) => Err(usage("no input given: pass --table or --input")),
            (Some(table), None) => Ok(ObsInput::Table {
                table: input::resolve(&table)?,
                column: a
                    .column
                    .clone()
                    .or(self.cfg.actual_column.clone())
                    .ok_or_else(|| usage("--column is required with --table"))?,
            }),
            (None, Some(input)) => Ok(ObsInput::Macro {
                input: input::resolve(&input)?,
                schema: self.schema(),
            }),
        }
    }
}

fn resolve(command: Command, ctx: &Ctx) -> Result<Job> {
    let cfg = &ctx.cfg;
    Ok(match command {
        Command::Zeta(a) => {
            for (name, v) in [
                ("t-min", a.t_min),
                ("t-max", a.t_max),
                ("step", a.step),
                ("threshold", a.threshold),
            ] {
                finite(name, v)?;
            }
            if a.t_min < 0.0 {
                return Err(usage("t-min must be nonnegative"));
            }
            if !(a.step > 0.0) || a.t_max < a.t_min {
                return Err(usage(format!(
                    "empty range: t from {} to {} by {}",
                    a.t_min, a.t_max, a.step
                )));
            }
            if !(a.density_window > 0.0) {
                return Err(usage("density-window must be positive"));
            }
            Job::Zeta(ZetaJob {
                t_min: a.t_min,
                t_max: a.t_max,
                step: a.step,
                mode: ctx.mode(a.mode)?,
                threshold: a.threshold,
                density_window: a.density_window,
            })
        }
        Command::Forecast(a) => Job::Forecast(ForecastJob {
            series: ctx.series(&a.series)?,
            alpha: ctx.alpha(a.alpha)?,
            zeta_mean: ctx.zeta_mean(&a.series.zeta_mean)?,
        }),
        Command::Calibrate(a) => Job::Calibrate(CalibrateJob {
            series: ctx.series(&a.series)?,
            zeta_mean: ctx.zeta_mean(&a.series.zeta_mean)?,
            grid: match (&a.grid, &cfg.alpha_grid) {
                (Some(g), _) => parse_grid(g)?,
                (None, Some(g)) => g.clone(),
                (None, None) => default_alpha_grid(),
            },
        }),
        Command::Phases(a) => Job::Phases(PhasesJob {
            obs: ctx.obs(&a.obs)?,
            model: a
                .model
                .or(cfg.hmm_model.clone())
                .map(|m| input::resolve(&m))
                .transpose()?,
            train: a.train,
            tol: a.tol,
        }),
        Command::Spectrum(a) => {
            let source = match a.table.or(cfg.table.clone()) {
                Some(table) => SpectrumSource::Table {
                    table: input::resolve(&table)?,
                    column: a
                        .column
                        .or(cfg.signal_column.clone())
                        .ok_or_else(|| usage("--column is required with --table"))?,
                    spacing: a.spacing.unwrap_or(1.0),
                },
                None => SpectrumSource::Grid {
                    t_min: finite("t-min", a.t_min)?,
                    spacing: a.spacing.unwrap_or(0.1),
                    len: a.len,
                    mode: ctx.mode(a.mode)?,
                },
            };
            Job::Spectrum(SpectrumJob {
                source,
                window: a
                    .window
                    .or(from_config("window", cfg.window.as_ref())?)
                    .unwrap_or_default(),
                peaks: a.peaks.or(cfg.peaks).unwrap_or(3),
            })
        }
        Command::Simulate(a) => Job::Simulate(SimulateJob {
            series: ctx.series(&a.series)?,
            alpha: ctx.alpha(a.alpha)?,
            zeta_mean: ctx.zeta_mean(&a.series.zeta_mean)?,
            shocks: ctx.shocks(a.iterations, a.std)?,
        }),
        Command::Compare(a) => {
            let table = a
                .table
                .or(cfg.table.clone())
                .ok_or_else(|| usage("no input given: pass --table"))?;
            let method = a.method.or(cfg.method.clone()).unwrap_or("row-sum".into());
            let methods = if method == "all" {
                vec![
                    ScoringMethod::RowSum,
                    ScoringMethod::RangeRatio,
                    ScoringMethod::StandardTopsis,
                ]
            } else {
                vec![method.parse().map_err(|e: zetacast_core::Error| usage(e.to_string()))?]
            };
            Job::Compare(CompareJob {
                table: input::resolve(&table)?,
                methods,
                pairwise: a
                    .pairwise
                    .or(cfg.pairwise.clone())
                    .map(|p| input::resolve(&p))
                    .transpose()?,
            })
        }
        Command::Arima(a) => Job::Arima(ArimaJob {
            obs: ctx.obs(&a.obs)?,
            spec: a
                .arima
                .or(from_config("arima", cfg.arima.as_ref())?)
                .unwrap_or_default(),
            horizon: a.horizon.or(cfg.horizon).unwrap_or(4),
        }),
        Command::Pipeline(a) => {
            let input = a
                .input
                .or(cfg.input.clone())
                .ok_or_else(|| usage("no input given: pass --input"))?;
            let d = PipelineOptions::default();
            Job::Pipeline(PipelineJob {
                input: input::resolve(&input)?,
                beta: finite("beta", a.beta.or(cfg.beta).unwrap_or(DEFAULT_BETA))?,
                schema: ctx.schema(),
                options: PipelineOptions {
                    holdout: a.holdout.or(cfg.holdout).unwrap_or(d.holdout),
                    arima: a.arima.or(from_config("arima", cfg.arima.as_ref())?).unwrap_or(d.arima),
                    signal_mode: ctx.mode(a.mode)?,
                    alpha_grid: cfg.alpha_grid.clone().unwrap_or(d.alpha_grid),
                    shocks: ctx.shocks(a.iterations, a.std)?,
                    ..d
                },
            })
        }
        Command::Fixtures => Job::Fixtures,
        Command::Replay(_) => unreachable!("replay is handled before resolution"),
    })
}

fn replay(manifest_path: &Path, out: Option<PathBuf>) -> Result<bool> {
    let recorded = manifest::load(manifest_path)?;
    let out = match out {
        Some(o) => o,
        None => {
            let dir = if manifest_path.is_dir() {
                manifest_path.to_path_buf()
            } else {
                manifest_path.parent().map(Path::to_path_buf).unwrap_or_default()
            };
            dir.join("replay")
        }
    };
    let mismatches = manifest::replay(&recorded, &out)?;
    for m in &mismatches {
        eprintln!("replay: {m}");
    }
    if mismatches.is_empty() {
        eprintln!(
            "replay: {} artifacts identical ({} in {})",
            recorded.artifacts.len(),
            recorded.job.name(),
            out.display()
        );
    }
    Ok(mismatches.is_empty())
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(|e| usage(format!("{e:#}")))?,
        None => FileConfig::default(),
    };
    if let Command::Replay(a) = &cli.command {
        return replay(&a.manifest, cli.out.clone());
    }
    let out = cli
        .out
        .clone()
        .or(cfg.out.clone().map(PathBuf::from))
        .unwrap_or_else(|| "out".into());
    let ctx = Ctx {
        seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        cfg,
    };
    let job = resolve(cli.command, &ctx)?;
    let manifest = manifest::run(&job, &out).with_context(|| format!("{} failed", job.name()))?;
    eprintln!(
        "{}: wrote {} files and {} to {}",
        job.name(),
        manifest.artifacts.len(),
        manifest::MANIFEST_FILE,
        out.display()
    );
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.chain().any(|e| e.is::<Usage>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
