//! ARIMA(p, d, q) baseline fitted by conditional sum of squares.
//!
//! The ARMA part is written in mean form on the `d`-times differenced series `w`:
//!
//! ```text
//! w_t - mu = sum_i phi_i (w_{t-i} - mu) + e_t + sum_j theta_j e_{t-j}
//! ```
//!
//! Residuals start at `t = p` with pre-sample errors set to zero. The CSS is minimized
//! with Nelder-Mead starting from zero AR/MA coefficients and `mu` at the sample mean.

use serde::{Deserialize, Serialize};

use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaSpec {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidArgument("ARIMA needs p + q >= 1".into()));
        }
        if d > 2 {
            return Err(Error::InvalidArgument(format!("differencing order {d} exceeds 2")));
        }
        Ok(Self { p, d, q })
    }

    /// Minimum series length accepted by [`fit`].
    pub fn min_length(&self) -> usize {
        3 * (self.p + self.q + 1) + self.d
    }
}

impl Default for ArimaSpec {
    fn default() -> Self {
        Self { p: 1, d: 1, q: 1 }
    }
}

impl std::str::FromStr for ArimaSpec {
    type Err = Error;

    /// Parses `"p,d,q"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidArgument(format!("expected 'p,d,q', got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n = |x: &str| x.parse::<usize>().map_err(|_| bad());
        Self::new(n(parts[0])?, n(parts[1])?, n(parts[2])?)
    }
}

impl std::fmt::Display for ArimaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.p, self.d, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaFit {
    pub spec: ArimaSpec,
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    /// Mean of the differenced series.
    pub intercept: f64,
    /// Innovation variance, CSS divided by the number of residuals.
    pub sigma2: f64,
    pub css: f64,
    /// CSS at the starting point of the search.
    pub initial_css: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iter: 20_000 }
    }
}

/// Applies first differences `d` times.
pub fn difference(series: &[f64], d: usize) -> Vec<f64> {
    let mut w = series.to_vec();
    for _ in 0..d {
        w = w.windows(2).map(|p| p[1] - p[0]).collect();
    }
    w
}

/// True when `1 - sum_k c_k z^k` has all roots strictly outside the unit circle.
///
/// Runs the Levinson step-down recursion and checks every reflection coefficient.
pub fn is_stationary(coeffs: &[f64]) -> bool {
    let mut a = coeffs.to_vec();
    for k in (1..=a.len()).rev() {
        let r = a[k - 1];
        if !r.is_finite() || r.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..k - 1).map(|j| (a[j] + r * a[k - 2 - j]) / denom).collect();
        a = prev;
    }
    true
}

/// True when `1 + sum_k theta_k z^k` has all roots strictly outside the unit circle.
pub fn is_invertible(ma: &[f64]) -> bool {
    let negated: Vec<f64> = ma.iter().map(|t| -t).collect();
    is_stationary(&negated)
}

fn residuals(w: &[f64], ar: &[f64], ma: &[f64], mu: f64) -> Vec<f64> {
    let p = ar.len();
    let mut e = vec![0.0; w.len()];
    for t in p..w.len() {
        let mut v = w[t] - mu;
        for (i, phi) in ar.iter().enumerate() {
            v -= phi * (w[t - i - 1] - mu);
        }
        for (j, theta) in ma.iter().enumerate() {
            if t >= j + 1 + p {
                v -= theta * e[t - j - 1];
            }
        }
        e[t] = v;
    }
    e
}

/// Conditional sum of squares of the differenced series `w` at the given parameters.
pub fn css(w: &[f64], ar: &[f64], ma: &[f64], mu: f64) -> f64 {
    residuals(w, ar, ma, mu)[ar.len()..].iter().map(|e| e * e).sum()
}

pub fn fit(series: &[f64], spec: ArimaSpec) -> Result<ArimaFit> {
    fit_with(series, spec, &FitOptions::default())
}

pub fn fit_with(series: &[f64], spec: ArimaSpec, options: &FitOptions) -> Result<ArimaFit> {
    let spec = ArimaSpec::new(spec.p, spec.d, spec.q)?;
    if series.len() < spec.min_length() {
        return Err(Error::TooShort {
            needed: spec.min_length(),
            got: series.len(),
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let w = difference(series, spec.d);
    let (p, q) = (spec.p, spec.q);
    let mean = w.iter().sum::<f64>() / w.len() as f64;

    let objective = |x: &[f64]| {
        let (ar, rest) = x.split_at(p);
        let (ma, mu) = rest.split_at(q);
        if !is_stationary(ar) || !is_invertible(ma) {
            return f64::INFINITY;
        }
        css(&w, ar, ma, mu[0])
    };
    let mut x0 = vec![0.0; p + q];
    x0.push(mean);
    let initial_css = objective(&x0);
    let result = nelder_mead(
        objective,
        &x0,
        &NelderMeadOptions {
            max_iter: options.max_iter,
            ..NelderMeadOptions::default()
        },
    );
    if !result.converged {
        return Err(Error::NonConvergence {
            what: format!("ARIMA({spec}) CSS search"),
            iterations: result.iterations,
        });
    }
    let ar_coeffs = result.x[..p].to_vec();
    let ma_coeffs = result.x[p..p + q].to_vec();
    if !is_stationary(&ar_coeffs) {
        return Err(Error::UnstableRoots("AR"));
    }
    if !is_invertible(&ma_coeffs) {
        return Err(Error::UnstableRoots("MA"));
    }
    Ok(ArimaFit {
        spec,
        ar_coeffs,
        ma_coeffs,
        intercept: result.x[p + q],
        sigma2: result.fx / (w.len() - p) as f64,
        css: result.fx,
        initial_css,
        iterations: result.iterations,
    })
}

/// Iterated `horizon`-step forecasts in levels, continuing from the end of `history`.
///
/// Future innovations are zero; in-sample residuals of `history` drive the MA terms.
pub fn forecast(fit: &ArimaFit, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    let spec = fit.spec;
    let needed = spec.p.max(spec.q) + spec.d;
    if history.len() < needed.max(spec.d + 1) {
        return Err(Error::TooShort {
            needed: needed.max(spec.d + 1),
            got: history.len(),
        });
    }
    if horizon == 0 {
        return Ok(Vec::new());
    }
    // last value of the k-times differenced history, k = 0..d
    let mut lasts: Vec<f64> = (0..spec.d)
        .map(|k| *difference(history, k).last().expect("length checked"))
        .collect();
    let mut w = difference(history, spec.d);
    let mut e = residuals(&w, &fit.ar_coeffs, &fit.ma_coeffs, fit.intercept);
    let mu = fit.intercept;

    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let t = w.len();
        let mut next = mu;
        for (i, phi) in fit.ar_coeffs.iter().enumerate() {
            next += phi * (w[t - i - 1] - mu);
        }
        for (j, theta) in fit.ma_coeffs.iter().enumerate() {
            if t > j {
                next += theta * e[t - j - 1];
            }
        }
        w.push(next);
        e.push(0.0);

        let mut level = next;
        for last in lasts.iter_mut().rev() {
            level += *last;
            *last = level;
        }
        out.push(level);
    }
    Ok(out)
}
