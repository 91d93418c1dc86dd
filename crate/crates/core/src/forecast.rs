//! Cyclical correction of a baseline forecast and its calibration.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::zeta::ZetaSignal;
use crate::{Error, Result};

/// Default modulation grid `0.1, 0.2, ..., 1.0`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// Where the neutral point of the correction comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaMean {
    /// Mean of the supplied signal window.
    #[default]
    Window,
    Fixed(f64),
}

impl ZetaMean {
    pub fn resolve(self, signal: &ZetaSignal) -> f64 {
        match self {
            ZetaMean::Window => signal.mean,
            ZetaMean::Fixed(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSeries {
    pub t: Vec<f64>,
    pub signal: Vec<f64>,
    pub baseline: Vec<f64>,
    pub corrected: Vec<f64>,
    pub delta: Vec<f64>,
    pub alpha: f64,
    pub zeta_mean: f64,
}

impl ForecastSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub rmse: f64,
    /// Percent.
    pub mape: f64,
}

impl AccuracyReport {
    pub fn compute(pred: &[f64], actual: &[f64]) -> Result<Self> {
        Ok(Self {
            rmse: rmse(pred, actual)?,
            mape: mape(pred, actual)?,
        })
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

/// `corrected = baseline + alpha * (signal - mean)` element-wise.
pub fn correct(baseline: &[f64], signal: &ZetaSignal, alpha: f64, mean: ZetaMean) -> Result<ForecastSeries> {
    check_lengths(baseline.len(), signal.len())?;
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    let zeta_mean = mean.resolve(signal);
    let signal_values = signal.signals();
    let delta: Vec<f64> = signal_values.iter().map(|s| alpha * (s - zeta_mean)).collect();
    let corrected = baseline.iter().zip(&delta).map(|(b, d)| b + d).collect();
    Ok(ForecastSeries {
        t: signal.t_values(),
        signal: signal_values,
        baseline: baseline.to_vec(),
        corrected,
        delta,
        alpha,
        zeta_mean,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha_star: f64,
    /// `(alpha, rmse)` for every grid point, in grid order.
    pub rmse_curve: Vec<(f64, f64)>,
    pub forecast_series: ForecastSeries,
}

/// Picks the grid `alpha` minimizing RMSE against `actual`; ties go to the smaller `alpha`.
pub fn calibrate_alpha(
    baseline: &[f64],
    signal: &ZetaSignal,
    mean: ZetaMean,
    actual: &[f64],
    grid: &[f64],
) -> Result<Calibration> {
    if grid.is_empty() {
        return Err(Error::Empty("alpha grid"));
    }
    if grid.iter().any(|a| !a.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "alpha grid must be finite and strictly ascending".into(),
        ));
    }
    check_lengths(baseline.len(), signal.len())?;
    check_lengths(actual.len(), signal.len())?;

    let rmse_curve = grid
        .par_iter()
        .map(|&alpha| {
            let fs = correct(baseline, signal, alpha, mean)?;
            Ok((alpha, rmse(&fs.corrected, actual)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, &(_, r)) in rmse_curve.iter().enumerate().skip(1) {
        if r < rmse_curve[best].1 {
            best = i;
        }
    }
    let alpha_star = rmse_curve[best].0;
    Ok(Calibration {
        alpha_star,
        forecast_series: correct(baseline, signal, alpha_star, mean)?,
        rmse_curve,
    })
}

pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(pred.len(), actual.len())?;
    if pred.is_empty() {
        return Err(Error::Empty("rmse input"));
    }
    let sse: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Mean absolute percentage error, in percent.
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(pred.len(), actual.len())?;
    if pred.is_empty() {
        return Err(Error::Empty("mape input"));
    }
    if let Some(i) = actual.iter().position(|&a| a == 0.0) {
        return Err(Error::ZeroActual(i));
    }
    let sum: f64 = pred.iter().zip(actual).map(|(p, a)| ((p - a) / a).abs()).sum();
    Ok(100.0 * sum / pred.len() as f64)
}

fn nature(delta: f64) -> &'static str {
    if delta > 0.0 {
        "Positive"
    } else if delta < 0.0 {
        "Negative"
    } else {
        "Neutral"
    }
}

/// Writes the correction table: `t, zeta, fpas, fpas_zeta, delta, nature`.
pub fn write_correction_csv<W: Write>(series: &ForecastSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "zeta", "fpas", "fpas_zeta", "delta", "nature"])?;
    for i in 0..series.len() {
        w.write_record([
            format!("{}", series.t[i]),
            format!("{}", series.signal[i]),
            format!("{}", series.baseline[i]),
            format!("{}", series.corrected[i]),
            format!("{}", series.delta[i]),
            nature(series.delta[i]).to_string(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}
