//! Riemann zeta evaluation on and near the critical line.
//!
//! ζ(s) is obtained from the alternating Dirichlet eta series,
//! `ζ(s) = η(s) / (1 - 2^(1-s))`, with η summed by the Cohen-Villegas-Zagier
//! acceleration (Borwein's algorithm 2). The weights are built in log space so the
//! term count can grow into the thousands without overflow, which covers heights
//! up to roughly `|t| ~ 10^3`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::optim::golden_section;
use crate::{Error, Result};

/// Default absolute tolerance for [`evaluate`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest number of eta terms [`evaluate`] will sum before giving up.
pub const TERM_BUDGET: usize = 1_000_000;
/// Width to which zero candidates are refined.
pub const ZERO_REFINE_TOL: f64 = 1e-6;

/// A complex argument `s = sigma + i t` with `sigma >= 0` and `s != 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexArg {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexArg {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {sigma}+{t}i")));
        }
        if sigma < 0.0 {
            return Err(Error::Domain(format!(
                "Re(s) = {sigma} is outside the eta-series half plane Re(s) >= 0"
            )));
        }
        if sigma == 1.0 && t == 0.0 {
            return Err(Error::Domain("s = 1 is the pole of zeta".into()));
        }
        Ok(Self { sigma, t })
    }

    /// Point on the critical line `1/2 + i t`.
    pub fn critical(t: f64) -> Result<Self> {
        Self::new(0.5, t)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

/// How a complex zeta value is turned into a real signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalMode {
    #[default]
    RealPart,
    Modulus,
}

impl SignalMode {
    pub fn apply(self, value: Complex64) -> f64 {
        match self {
            SignalMode::RealPart => value.re,
            SignalMode::Modulus => value.norm(),
        }
    }
}

impl std::str::FromStr for SignalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-part" | "real" | "re" => Ok(SignalMode::RealPart),
            "modulus" | "abs" => Ok(SignalMode::Modulus),
            other => Err(Error::InvalidArgument(format!("unknown signal mode '{other}'"))),
        }
    }
}

/// Weights `(d_n - d_k) / d_n` for k = 0..n of the accelerated alternating sum.
fn cvz_weights(n: usize) -> Vec<f64> {
    // log c_i with c_0 = 1 and c_{i+1}/c_i = 2(n+i)(n-i) / ((i+1)(2i+1))
    let nf = n as f64;
    let mut log_c = Vec::with_capacity(n + 1);
    let mut acc = 0.0_f64;
    log_c.push(acc);
    for i in 0..n {
        let i_f = i as f64;
        acc += (2.0 * (nf + i_f) * (nf - i_f)).ln() - ((i_f + 1.0) * (2.0 * i_f + 1.0)).ln();
        log_c.push(acc);
    }
    let max = log_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<f64> = log_c.iter().map(|l| (l - max).exp()).collect();

    // tail[k] = sum_{i > k} c_i, accumulated from the small end
    let mut tail = vec![0.0; n + 1];
    let mut running = 0.0;
    for k in (0..n).rev() {
        running += c[k + 1];
        tail[k] = running;
    }
    let total = running + c[0];
    tail.truncate(n);
    tail.iter_mut().for_each(|w| *w /= total);
    tail
}

fn eta_accelerated(s: Complex64, n: usize) -> Complex64 {
    let weights = cvz_weights(n);
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, w) in weights.iter().enumerate() {
        let ln_k = ((k + 1) as f64).ln();
        let mag = (-s.re * ln_k).exp();
        let phase = -s.im * ln_k;
        let term = Complex64::new(mag * phase.cos(), mag * phase.sin()) * *w;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// `1 - 2^(1-s)`
fn eta_factor(s: Complex64) -> Complex64 {
    let exponent = (Complex64::new(1.0, 0.0) - s) * LN_2;
    Complex64::new(1.0, 0.0) - exponent.exp()
}

/// A priori term count from the error bound `~ (3+sqrt 8)^-n * (1+2|t|) e^{pi |t| / 2}`.
fn initial_terms(s: Complex64, factor_norm: f64, tol: f64) -> usize {
    let t = s.im.abs();
    let rate = (3.0 + 8.0_f64.sqrt()).ln();
    let needed = (1.0 / tol).ln() + PI * t / 2.0 + (3.0 * (1.0 + 2.0 * t)).ln() + (1.0 / factor_norm).ln().max(0.0);
    ((needed / rate).ceil() as usize + 2).max(8)
}

/// Evaluates ζ(s) to absolute accuracy `tol`.
///
/// The term count starts from the a priori bound and is verified by comparing
/// against a longer sum; it doubles until two successive sums agree or
/// [`TERM_BUDGET`] is exhausted.
pub fn evaluate(s: ComplexArg, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let s = s.to_complex();
    let factor = eta_factor(s);
    let factor_norm = factor.norm();
    if factor_norm == 0.0 {
        return Err(Error::Domain(format!("1 - 2^(1-s) vanishes at s = {s}")));
    }

    let mut n = initial_terms(s, factor_norm, tol).min(TERM_BUDGET);
    let mut previous = eta_accelerated(s, n) / factor;
    loop {
        let next_n = (n + (n / 4).max(8)).min(TERM_BUDGET);
        if next_n == n {
            return Err(Error::NonConvergence {
                what: format!("zeta({s}) to tolerance {tol:e}"),
                iterations: n,
            });
        }
        let current = eta_accelerated(s, next_n) / factor;
        if (current - previous).norm() <= tol / 2.0 {
            return Ok(current);
        }
        n = (2 * next_n).min(TERM_BUDGET);
        previous = eta_accelerated(s, n) / factor;
    }
}

/// ζ(s) at [`DEFAULT_TOL`].
pub fn zeta(sigma: f64, t: f64) -> Result<Complex64> {
    evaluate(ComplexArg::new(sigma, t)?, DEFAULT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSample {
    pub t: f64,
    /// Complex value ζ(1/2 + i t); absent when the sample came from a fixture.
    pub value: Option<Complex64>,
    pub signal: f64,
}

/// A real cyclical signal sampled along the critical line, with its window mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaSignal {
    pub samples: Vec<ZetaSample>,
    pub mean: f64,
}

impl ZetaSignal {
    fn from_samples(samples: Vec<ZetaSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("zeta signal"));
        }
        let mean = samples.iter().map(|s| s.signal).sum::<f64>() / samples.len() as f64;
        Ok(Self { samples, mean })
    }

    /// Wraps tabulated signal values without evaluating zeta.
    pub fn from_values(t: &[f64], values: &[f64]) -> Result<Self> {
        if t.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: values.len(),
            });
        }
        Self::from_samples(
            t.iter()
                .zip(values)
                .map(|(&t, &signal)| ZetaSample { t, value: None, signal })
                .collect(),
        )
    }

    /// Evaluates the signal at each `t` in the given order, which need not be sorted.
    ///
    /// This is the path used when arguments come from macro records.
    pub fn evaluate_at(t_values: &[f64], mode: SignalMode) -> Result<Self> {
        let samples = t_values
            .par_iter()
            .map(|&t| {
                let value = evaluate(ComplexArg::critical(t)?, DEFAULT_TOL)?;
                Ok(ZetaSample {
                    t,
                    value: Some(value),
                    signal: mode.apply(value),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn signals(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.signal).collect()
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

/// Samples `mode(ζ(1/2 + i t))` on a strictly increasing grid.
pub fn sample_signal(t_values: &[f64], mode: SignalMode) -> Result<ZetaSignal> {
    if t_values.is_empty() {
        return Err(Error::Empty("t grid"));
    }
    if let Some(i) = t_values.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "t grid must be strictly increasing (index {})",
            i + 1
        )));
    }
    ZetaSignal::evaluate_at(t_values, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCandidate {
    pub t: f64,
    pub modulus: f64,
}

fn critical_modulus(t: f64) -> Result<f64> {
    Ok(evaluate(ComplexArg::critical(t)?, DEFAULT_TOL)?.norm())
}

/// Finds heights in `[t_lo, t_hi]` where `|ζ(1/2 + i t)|` dips below `threshold`.
///
/// Grid local minima are refined by golden-section search over the two adjacent grid
/// cells down to [`ZERO_REFINE_TOL`]; a candidate is kept when the refined modulus is
/// below `threshold`. Results are sorted by `t`.
pub fn locate_zero_candidates(t_lo: f64, t_hi: f64, step: f64, threshold: f64) -> Result<Vec<ZeroCandidate>> {
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    if !(step > 0.0) || !(threshold > 0.0) {
        return Err(Error::InvalidArgument("step and threshold must be positive".into()));
    }
    let grid = inclusive_grid(t_lo, t_hi, step);
    let modulus = grid
        .par_iter()
        .map(|&t| critical_modulus(t))
        .collect::<Result<Vec<_>>>()?;

    let minima: Vec<usize> = (1..grid.len().saturating_sub(1))
        .filter(|&i| modulus[i] <= modulus[i - 1] && modulus[i] < modulus[i + 1])
        .collect();
    let mut found = minima
        .par_iter()
        .map(|&i| {
            let (t, m) = golden_section(critical_modulus, grid[i - 1], grid[i + 1], ZERO_REFINE_TOL)?;
            Ok(ZeroCandidate { t, modulus: m })
        })
        .collect::<Result<Vec<_>>>()?;
    found.retain(|c| c.modulus < threshold);
    found.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(found)
}

/// `lo, lo + step, ...` up to and including `hi` (within a 1e-9 step slack).
pub fn inclusive_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityWindow {
    pub center: f64,
    pub count: usize,
    /// Candidates per unit `t`.
    pub density: f64,
}

/// Sliding-window count of zero candidates per unit height.
///
/// Windows `[a, a + window)` start at `t_lo` and advance by `stride` while they fit
/// inside `[t_lo, t_hi]`; the final window also includes its right edge.
pub fn zero_density(
    candidates: &[ZeroCandidate],
    t_lo: f64,
    t_hi: f64,
    window: f64,
    stride: f64,
) -> Result<Vec<DensityWindow>> {
    if !(window > 0.0) || !(stride > 0.0) {
        return Err(Error::InvalidArgument("window and stride must be positive".into()));
    }
    if !(t_hi - t_lo >= window) {
        return Err(Error::InvalidArgument(format!(
            "window {window} does not fit in [{t_lo}, {t_hi}]"
        )));
    }
    let slack = 1e-9 * window;
    let mut out = Vec::new();
    let mut start = t_lo;
    while start + window <= t_hi + slack {
        let end = start + window;
        let last = end + stride > t_hi + slack;
        let count = candidates
            .iter()
            .filter(|c| c.t >= start && (c.t < end || (last && c.t <= end)))
            .count();
        out.push(DensityWindow {
            center: start + window / 2.0,
            count,
            density: count as f64 / window,
        });
        start += stride;
    }
    Ok(out)
}
