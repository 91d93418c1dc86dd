//! Monte Carlo shock bands around a corrected forecast.
//!
//! Shocks are i.i.d. `N(0, std^2)` per period, added to the corrected forecast.
//! Variates come from ChaCha8 (`rand_chacha`) through the ziggurat standard-normal
//! transform (`rand_distr::StandardNormal`). Iteration `i` draws from stream `i` of
//! the generator keyed by the run seed, so results do not depend on how iterations
//! are scheduled across threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forecast::ForecastSeries;
use crate::{Error, Result};

pub const DEFAULT_SHOCK_STD: f64 = 0.8;
pub const DEFAULT_ITERATIONS: usize = 5000;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShockSpec {
    /// Percentage points.
    pub std: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for ShockSpec {
    fn default() -> Self {
        Self {
            std: DEFAULT_SHOCK_STD,
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
        }
    }
}

impl ShockSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.std > 0.0) || !self.std.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shock std must be positive, got {}",
                self.std
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("need at least one iteration".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastBands {
    pub period: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub q05: Vec<f64>,
    pub q50: Vec<f64>,
    pub q95: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// `n` standard-normal variates from stream 0 of ChaCha8 keyed by `seed`.
pub fn gaussian_draws(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn iteration_shocks(seed: u64, iteration: usize, periods: usize, std: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    (0..periods)
        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn simulate(series: &ForecastSeries, spec: &ShockSpec) -> Result<ForecastBands> {
    simulate_with(series, spec, Execution::Parallel)
}

pub fn simulate_with(series: &ForecastSeries, spec: &ShockSpec, execution: Execution) -> Result<ForecastBands> {
    spec.validate()?;
    let periods = series.corrected.len();
    if periods == 0 {
        return Err(Error::Empty("forecast series"));
    }
    let run = |i: usize| iteration_shocks(spec.seed, i, periods, spec.std);
    let shocks: Vec<Vec<f64>> = match execution {
        Execution::Parallel => (0..spec.iterations).into_par_iter().map(run).collect(),
        Execution::Serial => (0..spec.iterations).map(run).collect(),
    };

    let n = spec.iterations as f64;
    let mut bands = ForecastBands {
        period: series.t.clone(),
        mean: Vec::with_capacity(periods),
        std: Vec::with_capacity(periods),
        q05: Vec::with_capacity(periods),
        q50: Vec::with_capacity(periods),
        q95: Vec::with_capacity(periods),
    };
    for p in 0..periods {
        let base = series.corrected[p];
        let mut values: Vec<f64> = shocks.iter().map(|s| base + s[p]).collect();
        let mean = values.iter().sum::<f64>() / n;
        let std = if spec.iterations > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        values.sort_by(f64::total_cmp);
        bands.mean.push(mean);
        bands.std.push(std);
        bands.q05.push(quantile_sorted(&values, 0.05));
        bands.q50.push(quantile_sorted(&values, 0.50));
        bands.q95.push(quantile_sorted(&values, 0.95));
    }
    Ok(bands)
}

/// Bands CSV: `period,mean,std,q05,q50,q95`.
pub fn write_bands_csv<W: Write>(bands: &ForecastBands, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["period", "mean", "std", "q05", "q50", "q95"])?;
    for i in 0..bands.mean.len() {
        w.write_record(
            [
                bands.period[i],
                bands.mean[i],
                bands.std[i],
                bands.q05[i],
                bands.q50[i],
                bands.q95[i],
            ]
            .iter()
            .map(|v| format!("{v}")),
        )?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}
