//! Every stage chained on one macro series.
//!
//! The last `holdout` periods of `inflation_actual` are held out. An ARIMA baseline is
//! fitted on the rest and forecast over the holdout, the zeta signal at those periods'
//! `t` corrects it, `alpha` is calibrated against the held-out actuals, and Monte Carlo
//! bands are drawn around the result. Phase posteriors run over the full inflation
//! history; the spectrum and zero search run on a uniform critical-line grid.

use serde::{Deserialize, Serialize};

use crate::arima::{self, ArimaFit, ArimaSpec};
use crate::data::t_transform;
use crate::forecast::{calibrate_alpha, default_alpha_grid, AccuracyReport, Calibration, ZetaMean};
use crate::hmm::{default_phase_emissions, forward_filter, phase_distribution, viterbi, PhaseShares, ViterbiPath};
use crate::spectral::{decompose, top_peaks, Peak};
use crate::stochastic::{simulate, ForecastBands, ShockSpec};
use crate::zeta::{locate_zero_candidates, sample_signal, zero_density, DensityWindow, SignalMode, ZeroCandidate};
use crate::{Error, HmmModel, MacroSeries, Result, ZetaSignal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub holdout: usize,
    pub arima: ArimaSpec,
    pub signal_mode: SignalMode,
    pub alpha_grid: Vec<f64>,
    pub shocks: ShockSpec,
    /// Start, spacing and length of the grid used for the spectrum.
    pub spectrum_grid: (f64, f64, usize),
    pub peaks: usize,
    /// `t_lo, t_hi, step, threshold` for the zero search.
    pub zero_search: (f64, f64, f64, f64),
    pub density_window: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            holdout: 8,
            arima: ArimaSpec::default(),
            signal_mode: SignalMode::RealPart,
            alpha_grid: default_alpha_grid(),
            shocks: ShockSpec::default(),
            spectrum_grid: (10.0, 0.1, 256),
            peaks: 3,
            zero_search: (10.0, 50.0, 0.05, 1e-3),
            density_window: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub periods: Vec<String>,
    pub t_raw: Vec<f64>,
    pub arima: ArimaFit,
    pub baseline: Vec<f64>,
    pub actual: Vec<f64>,
    pub signal: ZetaSignal,
    pub calibration: Calibration,
    pub baseline_accuracy: AccuracyReport,
    pub corrected_accuracy: AccuracyReport,
    pub bands: ForecastBands,
    pub phases: PhaseShares,
    pub phase_path: ViterbiPath,
    pub peaks: Vec<Peak>,
    pub zeros: Vec<ZeroCandidate>,
    pub zero_density: Vec<DensityWindow>,
}

pub fn run(series: &MacroSeries, options: &PipelineOptions) -> Result<PipelineReport> {
    let inflation: Vec<f64> = series
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.inflation_actual.ok_or_else(|| Error::Validation {
                row: Some(i + 2),
                message: "inflation_actual is required for the pipeline".into(),
            })
        })
        .collect::<Result<_>>()?;
    let n = inflation.len();
    let h = options.holdout;
    if h == 0 || h >= n {
        return Err(Error::InvalidArgument(format!("holdout {h} must lie in 1..{n}")));
    }
    let (train, actual) = inflation.split_at(n - h);
    let t_raw = t_transform(series);

    let fit = arima::fit(train, options.arima)?;
    let baseline = arima::forecast(&fit, train, h)?;
    let signal = ZetaSignal::evaluate_at(&t_raw[n - h..], options.signal_mode)?;
    let calibration = calibrate_alpha(&baseline, &signal, ZetaMean::Window, actual, &options.alpha_grid)?;
    let baseline_accuracy = AccuracyReport::compute(&baseline, actual)?;
    let corrected_accuracy = AccuracyReport::compute(&calibration.forecast_series.corrected, actual)?;
    let bands = simulate(&calibration.forecast_series, &options.shocks)?;

    let model = HmmModel::four_phase(default_phase_emissions())?;
    let phases = phase_distribution(&forward_filter(&model, &inflation)?.posterior);
    let phase_path = viterbi(&model, &inflation)?;

    let (start, dt, len) = options.spectrum_grid;
    let grid: Vec<f64> = (0..len).map(|i| start + i as f64 * dt).collect();
    let sampled = sample_signal(&grid, options.signal_mode)?;
    let peaks = top_peaks(&decompose(&sampled.signals(), dt)?, options.peaks)?;

    let (lo, hi, step, threshold) = options.zero_search;
    let zeros = locate_zero_candidates(lo, hi, step, threshold)?;
    let density = zero_density(&zeros, lo, hi, options.density_window, options.density_window)?;

    Ok(PipelineReport {
        periods: series.records.iter().map(|r| r.period.clone()).collect(),
        t_raw,
        arima: fit,
        baseline,
        actual: actual.to_vec(),
        signal,
        calibration,
        baseline_accuracy,
        corrected_accuracy,
        bands,
        phases,
        phase_path,
        peaks,
        zeros,
        zero_density: density,
    })
}
