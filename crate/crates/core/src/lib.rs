//! Zeta-corrected inflation forecasting.
//!
//! The crate takes an exogenous baseline inflation forecast and nudges it with a
//! cyclical signal sampled from the Riemann zeta function on the critical line:
//!
//! ```text
//! corrected(t) = baseline(t) + alpha * (signal(t) - mean(signal))
//! ```
//!
//! Around that core it provides the supporting analysis stages:
//!
//! - [`zeta`]: evaluation of ζ(s) for `Re(s) >= 0`, critical-line signals and zero search.
//! - [`data`]: CSV ingestion of macro series and the `ln GDP + ln M3 + beta * rate` argument map.
//! - [`forecast`]: cyclical correction, grid calibration of `alpha`, RMSE/MAPE.
//! - [`arima`]: conditional-sum-of-squares ARIMA baseline.
//! - [`hmm`]: four-phase Gaussian HMM (forward filter, Viterbi, Baum-Welch).
//! - [`spectral`]: DFT decomposition, reconstruction and peak picking.
//! - [`stochastic`]: seeded Monte Carlo shock bands.
//! - [`mcdm`]: AHP weights and TOPSIS-style model ranking.
//! - [`pipeline`]: all of the above chained on one macro series.
//! - [`fixtures`]: the published reference tables, embedded.
//!
//! # Example
//!
//! ```
//! use zetacast_core::forecast::{correct, ZetaMean};
//! use zetacast_core::zeta::ZetaSignal;
//!
//! let signal = ZetaSignal::from_values(&[1.0, 3.0], &[0.65, 0.81]).unwrap();
//! let series = correct(&[3.75, 4.18], &signal, 0.5, ZetaMean::Fixed(0.73)).unwrap();
//! assert!((series.delta[0] + 0.04).abs() < 1e-12);
//! assert!((series.corrected[1] - 4.22).abs() < 1e-12);
//! ```

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arima;
pub mod data;
mod error;
pub mod fixtures;
pub mod forecast;
pub mod hmm;
pub mod mcdm;
mod optim;
pub mod pipeline;
pub mod spectral;
pub mod stochastic;
pub mod zeta;

pub use error::{Error, Result};

pub use data::{MacroRecord, MacroSeries};
pub use forecast::{AccuracyReport, ForecastSeries};
pub use hmm::HmmModel;
pub use mcdm::DecisionMatrix;
pub use zeta::ZetaSignal;
