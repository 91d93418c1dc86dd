//! Fully resolved invocations and their execution.
//!
//! A [`Job`] carries every parameter a subcommand needs after config and flag merging,
//! with inputs resolved to absolute paths or fixture names. It is what a manifest stores
//! and what `replay` runs again.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use zetacast_core::arima::{self, ArimaSpec};
use zetacast_core::data::{index_map, t_transform, IndexMode, SchemaConfig};
use zetacast_core::forecast::{calibrate_alpha, correct, write_correction_csv, AccuracyReport, ZetaMean};
use zetacast_core::hmm::{
    baum_welch, default_phase_emissions, forward_filter, phase_distribution, viterbi, write_shares_csv,
};
use zetacast_core::mcdm::{ahp_weights, read_decision_csv, read_pairwise, score, write_ranking_csv, ScoringMethod};
use zetacast_core::pipeline::{self, PipelineOptions};
use zetacast_core::spectral::{decompose_windowed, top_peaks, write_spectrum_csv, Peak, Window};
use zetacast_core::stochastic::{simulate, write_bands_csv, ShockSpec};
use zetacast_core::zeta::{
    inclusive_grid, locate_zero_candidates, sample_signal, zero_density, SignalMode, ZeroCandidate,
};
use zetacast_core::{HmmModel, ZetaSignal};

use crate::input::{load_macro, load_table, read_bytes};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Zeta(ZetaJob),
    Forecast(ForecastJob),
    Calibrate(CalibrateJob),
    Phases(PhasesJob),
    Spectrum(SpectrumJob),
    Simulate(SimulateJob),
    Compare(CompareJob),
    Arima(ArimaJob),
    Pipeline(PipelineJob),
    Fixtures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaJob {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub mode: SignalMode,
    /// Zero candidates are reported where the refined `|ζ|` falls below this.
    pub threshold: f64,
    /// Width of the sliding window for zero density.
    pub density_window: f64,
}

/// Where the signal, baseline and (optionally) actual series come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
pub enum SeriesInput {
    /// Signal and baseline are columns of a numeric table indexed by `t`.
    Table {
        table: String,
        signal_column: String,
        baseline_column: String,
        actual_column: Option<String>,
    },
    /// Macro panel; the signal is evaluated at the transformed `t` of each period.
    Macro {
        input: String,
        beta: f64,
        schema: SchemaConfig,
        index: IndexMode,
        mode: SignalMode,
        baseline_column: String,
        /// Defaults to the schema's actual-inflation column.
        actual_column: Option<String>,
    },
}

/// Single observed series for phases and ARIMA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObsInput {
    Table {
        table: String,
        column: String,
    },
    /// Actual inflation of a macro panel.
    Macro {
        input: String,
        schema: SchemaConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastJob {
    pub series: SeriesInput,
    pub alpha: f64,
    pub zeta_mean: ZetaMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrateJob {
    pub series: SeriesInput,
    pub zeta_mean: ZetaMean,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasesJob {
    pub obs: ObsInput,
    /// JSON model file; the four-phase default when absent.
    pub model: Option<String>,
    /// Baum-Welch iterations to run before decoding; zero decodes with the model as given.
    pub train: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectrumSource {
    Table {
        table: String,
        column: String,
        spacing: f64,
    },
    /// `len` critical-line samples from `t_min` at `spacing`.
    Grid {
        t_min: f64,
        spacing: f64,
        len: usize,
        mode: SignalMode,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJob {
    pub source: SpectrumSource,
    pub window: Window,
    pub peaks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateJob {
    pub series: SeriesInput,
    pub alpha: f64,
    pub zeta_mean: ZetaMean,
    pub shocks: ShockSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareJob {
    pub table: String,
    pub methods: Vec<ScoringMethod>,
    /// Pairwise comparison CSV; criterion weights come from its principal eigenvector.
    pub pairwise: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaJob {
    pub obs: ObsInput,
    pub spec: ArimaSpec,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineJob {
    pub input: String,
    pub beta: f64,
    pub schema: SchemaConfig,
    pub options: PipelineOptions,
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Zeta(_) => "zeta",
            Job::Forecast(_) => "forecast",
            Job::Calibrate(_) => "calibrate",
            Job::Phases(_) => "phases",
            Job::Spectrum(_) => "spectrum",
            Job::Simulate(_) => "simulate",
            Job::Compare(_) => "compare",
            Job::Arima(_) => "arima",
            Job::Pipeline(_) => "pipeline",
            Job::Fixtures => "fixtures",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Job::Simulate(j) => Some(j.shocks.seed),
            Job::Pipeline(j) => Some(j.options.shocks.seed),
            _ => None,
        }
    }

    /// Every input location the job reads.
    pub fn inputs(&self) -> Vec<&str> {
        fn series(s: &SeriesInput) -> &str {
            match s {
                SeriesInput::Table { table, .. } => table,
                SeriesInput::Macro { input, .. } => input,
            }
        }
        fn obs(o: &ObsInput) -> &str {
            match o {
                ObsInput::Table { table, .. } => table,
                ObsInput::Macro { input, .. } => input,
            }
        }
        match self {
            Job::Zeta(_) | Job::Fixtures => vec![],
            Job::Forecast(j) => vec![series(&j.series)],
            Job::Calibrate(j) => vec![series(&j.series)],
            Job::Simulate(j) => vec![series(&j.series)],
            Job::Phases(j) => std::iter::once(obs(&j.obs)).chain(j.model.as_deref()).collect(),
            Job::Arima(j) => vec![obs(&j.obs)],
            Job::Spectrum(j) => match &j.source {
                SpectrumSource::Table { table, .. } => vec![table],
                SpectrumSource::Grid { .. } => vec![],
            },
            Job::Compare(j) => std::iter::once(j.table.as_str()).chain(j.pairwise.as_deref()).collect(),
            Job::Pipeline(j) => vec![&j.input],
        }
    }

    /// Runs the job, writing into `out`. Returns the artifact file names in write order.
    pub fn execute(&self, out: &Path) -> Result<Vec<String>> {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let mut sink = Sink {
            dir: out.to_path_buf(),
            files: Vec::new(),
        };
        match self {
            Job::Zeta(j) => run_zeta(j, &mut sink)?,
            Job::Forecast(j) => run_forecast(j, &mut sink)?,
            Job::Calibrate(j) => run_calibrate(j, &mut sink)?,
            Job::Phases(j) => run_phases(j, &mut sink)?,
            Job::Spectrum(j) => run_spectrum(j, &mut sink)?,
            Job::Simulate(j) => run_simulate(j, &mut sink)?,
            Job::Compare(j) => run_compare(j, &mut sink)?,
            Job::Arima(j) => run_arima(j, &mut sink)?,
            Job::Pipeline(j) => run_pipeline(j, &mut sink)?,
            Job::Fixtures => {
                for (name, contents) in zetacast_core::fixtures::ALL {
                    sink.write(name, |w| Ok(w.write_all(contents.as_bytes())?))?;
                }
            }
        }
        Ok(sink.files)
    }
}

struct Sink {
    dir: PathBuf,
    files: Vec<String>,
}

impl Sink {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            Ok(w.write_all(b"\n")?)
        })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        self.write(name, |w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(header)?;
            for row in rows {
                c.write_record(&row)?;
            }
            c.flush()?;
            Ok(())
        })
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn zeros_csv(sink: &mut Sink, name: &str, zeros: &[ZeroCandidate]) -> Result<()> {
    sink.csv(
        name,
        &["t", "modulus"],
        zeros.iter().map(|z| vec![num(z.t), num(z.modulus)]),
    )
}

fn run_zeta(job: &ZetaJob, sink: &mut Sink) -> Result<()> {
    let grid = inclusive_grid(job.t_min, job.t_max, job.step);
    let signal = sample_signal(&grid, job.mode)?;
    sink.csv(
        "zeta_signal.csv",
        &["t", "re", "im", "modulus", "signal"],
        signal.samples.iter().map(|s| {
            let v = s.value.unwrap_or_default();
            vec![num(s.t), num(v.re), num(v.im), num(v.norm()), num(s.signal)]
        }),
    )?;
    // the zero search needs a strictly positive lower edge
    let lo = job.t_min.max(job.step);
    let (zeros, density) = if job.t_max > lo {
        let zeros = locate_zero_candidates(lo, job.t_max, job.step, job.threshold)?;
        let window = job.density_window.min(job.t_max - lo);
        let density = zero_density(&zeros, lo, job.t_max, window, window)?;
        (zeros, density)
    } else {
        (Vec::new(), Vec::new())
    };
    zeros_csv(sink, "zeta_zeros.csv", &zeros)?;
    sink.json(
        "zeta.json",
        &serde_json::json!({
            "rows": signal.len(),
            "signal_mean": signal.mean,
            "zeros": zeros,
            "zero_density": density,
        }),
    )
}

struct Loaded {
    signal: ZetaSignal,
    baseline: Vec<f64>,
    actual: Option<Vec<f64>>,
}

fn load_series(input: &SeriesInput) -> Result<Loaded> {
    match input {
        SeriesInput::Table {
            table,
            signal_column,
            baseline_column,
            actual_column,
        } => {
            let t = load_table(table)?;
            let times = t.numeric_periods()?;
            let signal = ZetaSignal::from_values(&times, &t.column(signal_column)?)?;
            let actual = actual_column.as_deref().map(|c| t.column(c)).transpose()?;
            Ok(Loaded {
                signal,
                baseline: t.column(baseline_column)?,
                actual,
            })
        }
        SeriesInput::Macro {
            input,
            beta,
            schema,
            index,
            mode,
            baseline_column,
            actual_column,
        } => {
            let series = load_macro(input, schema, *beta)?;
            let t = index_map(&t_transform(&series), *index)?;
            let signal = ZetaSignal::evaluate_at(&t, *mode)?;
            let column = |name: &str| -> Result<Vec<f64>> {
                series
                    .records
                    .iter()
                    .map(|r| {
                        let v = if name == schema.inflation_actual {
                            r.inflation_actual
                        } else {
                            r.extra.get(name).copied()
                        };
                        v.with_context(|| format!("period {} has no value in column '{name}'", r.period))
                    })
                    .collect()
            };
            let actual_name = actual_column.as_deref().unwrap_or(&schema.inflation_actual);
            let has_actual = series.records.iter().all(|r| {
                if actual_name == schema.inflation_actual {
                    r.inflation_actual.is_some()
                } else {
                    r.extra.contains_key(actual_name)
                }
            });
            let actual = if actual_column.is_some() || has_actual {
                Some(column(actual_name)?)
            } else {
                None
            };
            Ok(Loaded {
                signal,
                baseline: column(baseline_column)?,
                actual,
            })
        }
    }
}

fn load_obs(input: &ObsInput) -> Result<Vec<f64>> {
    match input {
        ObsInput::Table { table, column } => Ok(load_table(table)?.column(column)?),
        ObsInput::Macro { input, schema } => {
            // beta only affects the transform, which is not used here
            let series = load_macro(input, schema, 0.0)?;
            series
                .records
                .iter()
                .map(|r| {
                    r.inflation_actual
                        .with_context(|| format!("period {} has no {}", r.period, schema.inflation_actual))
                })
                .collect()
        }
    }
}

fn run_forecast(job: &ForecastJob, sink: &mut Sink) -> Result<()> {
    let data = load_series(&job.series)?;
    let series = correct(&data.baseline, &data.signal, job.alpha, job.zeta_mean)?;
    let (baseline_accuracy, accuracy) = match &data.actual {
        Some(a) => (
            Some(AccuracyReport::compute(&series.baseline, a)?),
            Some(AccuracyReport::compute(&series.corrected, a)?),
        ),
        None => (None, None),
    };
    sink.write("forecast.csv", |w| Ok(write_correction_csv(&series, w)?))?;
    sink.json(
        "forecast.json",
        &serde_json::json!({
            "series": series,
            "baseline_accuracy": baseline_accuracy,
            "accuracy": accuracy,
        }),
    )
}

fn run_calibrate(job: &CalibrateJob, sink: &mut Sink) -> Result<()> {
    let data = load_series(&job.series)?;
    let actual = data.actual.context("calibration needs an actual series")?;
    let cal = calibrate_alpha(&data.baseline, &data.signal, job.zeta_mean, &actual, &job.grid)?;
    let accuracy = AccuracyReport::compute(&cal.forecast_series.corrected, &actual)?;
    sink.json(
        "calibration.json",
        &serde_json::json!({ "calibration": cal, "accuracy": accuracy }),
    )?;
    sink.csv(
        "rmse_curve.csv",
        &["alpha", "rmse"],
        cal.rmse_curve.iter().map(|(a, r)| vec![num(*a), num(*r)]),
    )?;
    sink.write("forecast.csv", |w| Ok(write_correction_csv(&cal.forecast_series, w)?))
}

fn run_phases(job: &PhasesJob, sink: &mut Sink) -> Result<()> {
    let obs = load_obs(&job.obs)?;
    let model = match &job.model {
        Some(loc) => {
            let model: HmmModel =
                serde_json::from_slice(&read_bytes(loc)?).with_context(|| format!("parsing model {loc}"))?;
            model.validate()?;
            model
        }
        None => HmmModel::four_phase(default_phase_emissions())?,
    };
    let (model, training) = if job.train > 0 {
        let fit = baum_welch(&model, &obs, job.train, job.tol)?;
        (fit.model.clone(), Some(fit))
    } else {
        (model, None)
    };
    let filter = forward_filter(&model, &obs)?;
    let shares = phase_distribution(&filter.posterior);
    let path = viterbi(&model, &obs)?;
    sink.write("phase_shares.csv", |w| Ok(write_shares_csv(&shares, w)?))?;
    sink.json(
        "phases.json",
        &serde_json::json!({
            "model": model,
            "log_likelihood": filter.log_likelihood,
            "shares": shares,
            "viterbi": path,
            "training": training.map(|t| serde_json::json!({ "status": t.status, "loglik_trace": t.loglik_trace })),
        }),
    )
}

fn peaks_csv(sink: &mut Sink, peaks: &[Peak]) -> Result<()> {
    sink.csv(
        "peaks.csv",
        &["rank", "omega", "amplitude"],
        peaks
            .iter()
            .enumerate()
            .map(|(i, p)| vec![(i + 1).to_string(), num(p.omega), num(p.amplitude)]),
    )
}

fn run_spectrum(job: &SpectrumJob, sink: &mut Sink) -> Result<()> {
    let (signal, spacing) = match &job.source {
        SpectrumSource::Table { table, column, spacing } => (load_table(table)?.column(column)?, *spacing),
        SpectrumSource::Grid {
            t_min,
            spacing,
            len,
            mode,
        } => {
            let grid: Vec<f64> = (0..*len).map(|i| t_min + i as f64 * spacing).collect();
            (sample_signal(&grid, *mode)?.signals(), *spacing)
        }
    };
    let spectrum = decompose_windowed(&signal, spacing, job.window)?;
    let peaks = top_peaks(&spectrum, job.peaks)?;
    sink.write("spectrum.csv", |w| Ok(write_spectrum_csv(&spectrum, w)?))?;
    peaks_csv(sink, &peaks)?;
    sink.json(
        "spectrum.json",
        &serde_json::json!({ "samples": signal.len(), "spacing": spacing, "peaks": peaks }),
    )
}

fn run_simulate(job: &SimulateJob, sink: &mut Sink) -> Result<()> {
    let data = load_series(&job.series)?;
    let series = correct(&data.baseline, &data.signal, job.alpha, job.zeta_mean)?;
    let bands = simulate(&series, &job.shocks)?;
    sink.write("bands.csv", |w| Ok(write_bands_csv(&bands, w)?))?;
    sink.json(
        "bands.json",
        &serde_json::json!({ "shocks": job.shocks, "forecast": series, "bands": bands }),
    )
}

fn run_compare(job: &CompareJob, sink: &mut Sink) -> Result<()> {
    ensure!(!job.methods.is_empty(), "no scoring method selected");
    let mut matrix = read_decision_csv(read_bytes(&job.table)?.as_slice())?;
    let ahp = match &job.pairwise {
        Some(loc) => {
            let ahp = ahp_weights(&read_pairwise(read_bytes(loc)?.as_slice())?)?;
            if ahp.weights.len() != matrix.criteria.len() {
                bail!(
                    "pairwise matrix covers {} criteria but the table has {}",
                    ahp.weights.len(),
                    matrix.criteria.len()
                );
            }
            matrix.weights = ahp.weights.clone();
            matrix.validate()?;
            Some(ahp)
        }
        None => None,
    };
    let mut reports = Vec::new();
    for &method in &job.methods {
        let report = score(&matrix, method)?;
        let tag = serde_json::to_value(method)?;
        let tag = tag.as_str().unwrap_or("method");
        sink.write(&format!("ranking_{tag}.csv"), |w| Ok(write_ranking_csv(&report, w)?))?;
        reports.push(serde_json::json!({ "method": method, "ranking": report.ranking(), "report": report }));
    }
    sink.json(
        "ranking.json",
        &serde_json::json!({ "weights": matrix.weights, "ahp": ahp, "results": reports }),
    )
}

fn run_arima(job: &ArimaJob, sink: &mut Sink) -> Result<()> {
    let obs = load_obs(&job.obs)?;
    let fit = arima::fit(&obs, job.spec)?;
    let forecast = arima::forecast(&fit, &obs, job.horizon)?;
    sink.csv(
        "arima_forecast.csv",
        &["step", "forecast"],
        forecast
            .iter()
            .enumerate()
            .map(|(h, v)| vec![(h + 1).to_string(), num(*v)]),
    )?;
    sink.json("arima.json", &serde_json::json!({ "fit": fit, "forecast": forecast }))
}

fn run_pipeline(job: &PipelineJob, sink: &mut Sink) -> Result<()> {
    let series = load_macro(&job.input, &job.schema, job.beta)?;
    let report = pipeline::run(&series, &job.options)?;
    sink.json("pipeline.json", &report)?;
    sink.write("forecast.csv", |w| {
        Ok(write_correction_csv(&report.calibration.forecast_series, w)?)
    })?;
    sink.write("bands.csv", |w| Ok(write_bands_csv(&report.bands, w)?))?;
    sink.write("phase_shares.csv", |w| Ok(write_shares_csv(&report.phases, w)?))?;
    peaks_csv(sink, &report.peaks)?;
    zeros_csv(sink, "zeros.csv", &report.zeros)
}
