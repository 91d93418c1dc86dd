//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the crate's numerical routines: each oracle is a
//! separate, deliberately plain implementation.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use zetacast_core::hmm::{Gaussian, HmmModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// zeta

/// `B_2k` for k = 1..=10.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Euler-Maclaurin summation of `sum n^-s` with cutoff 60 and ten correction terms.
///
/// Valid for any `s != 1`; accurate to roughly machine precision for `|Im s| <= 60`.
pub fn zeta_em(s: Complex64) -> Complex64 {
    let cutoff = 60.0_f64;
    let pow = |n: f64, e: Complex64| (-e * n.ln()).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..60 {
        sum += pow(n as f64, s);
    }
    let one = Complex64::new(1.0, 0.0);
    sum += pow(cutoff, s - one) / (s - one);
    sum += 0.5 * pow(cutoff, s);

    // rising product s (s+1) ... (s+2k-2) and (2k)!
    let mut rising = s;
    let mut factorial = 2.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k + 1;
        if k > 1 {
            let base = (2 * k - 3) as f64;
            rising = rising * (s + base) * (s + base + 1.0);
            factorial *= ((2 * k - 1) * (2 * k)) as f64;
        }
        let exponent = s + (2 * k - 1) as f64;
        sum += b / factorial * rising * pow(cutoff, exponent);
    }
    sum
}

/// Asymptotic Riemann-Siegel theta; plenty for `t >= 10`.
fn theta(t: f64) -> f64 {
    use std::f64::consts::PI;
    t / 2.0 * (t / (2.0 * PI)).ln() - t / 2.0 - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t.powi(3))
        + 31.0 / (80640.0 * t.powi(5))
}

/// Hardy's `Z(t)`, real-valued and changing sign at each critical-line zero.
pub fn hardy_z(t: f64) -> f64 {
    let z = zeta_em(Complex64::new(0.5, t));
    (Complex64::from_polar(1.0, theta(t)) * z).re
}

/// Critical-line zeros in `(lo, hi)` by sign-change bracketing and bisection.
pub fn oracle_zeros(lo: f64, hi: f64) -> Vec<f64> {
    let step = 0.02;
    let mut out = Vec::new();
    let mut a = lo;
    let mut za = hardy_z(a);
    while a < hi {
        let b = (a + step).min(hi);
        let zb = hardy_z(b);
        if za * zb < 0.0 {
            let (mut x0, mut x1, mut z0) = (a, b, za);
            for _ in 0..80 {
                let mid = 0.5 * (x0 + x1);
                let zm = hardy_z(mid);
                if z0 * zm <= 0.0 {
                    x1 = mid;
                } else {
                    x0 = mid;
                    z0 = zm;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        za = zb;
    }
    out
}

// ---------------------------------------------------------------------------
// hmm

fn normal_log_pdf(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    -0.5 * z * z - std.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Every state path of length `len` over `n` states.
pub fn all_paths(n: usize, len: usize) -> Vec<Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut p = vec![0; len];
            for slot in p.iter_mut().rev() {
                *slot = code % n;
                code /= n;
            }
            p
        })
        .collect()
}

/// `log P(path, obs)` computed directly from the model parameters.
pub fn path_log_prob(model: &HmmModel, path: &[usize], obs: &[f64]) -> f64 {
    let e = |s: usize, x: f64| normal_log_pdf(x, model.emissions[s].mean, model.emissions[s].std);
    let mut lp = model.initial[path[0]].ln() + e(path[0], obs[0]);
    for t in 1..path.len() {
        lp += model.transition[path[t - 1]][path[t]].ln() + e(path[t], obs[t]);
    }
    lp
}

/// Total log-likelihood by summing over every path.
pub fn brute_log_likelihood(model: &HmmModel, obs: &[f64]) -> f64 {
    let lps: Vec<f64> = all_paths(model.states.len(), obs.len())
        .iter()
        .map(|p| path_log_prob(model, p, obs))
        .collect();
    log_sum_exp(&lps)
}

/// Best path and its log-probability by exhaustive search.
pub fn brute_viterbi(model: &HmmModel, obs: &[f64]) -> (Vec<usize>, f64) {
    all_paths(model.states.len(), obs.len())
        .into_iter()
        .map(|p| {
            let lp = path_log_prob(model, &p, obs);
            (p, lp)
        })
        .fold(
            (Vec::new(), f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
}

/// `P(s_t | o_1..o_t)` by enumerating prefixes.
pub fn brute_filtered(model: &HmmModel, obs: &[f64]) -> Vec<Vec<f64>> {
    let n = model.states.len();
    (1..=obs.len())
        .map(|len| {
            let mut mass = vec![Vec::new(); n];
            for p in all_paths(n, len) {
                mass[p[len - 1]].push(path_log_prob(model, &p, &obs[..len]));
            }
            let per_state: Vec<f64> = mass.iter().map(|m| log_sum_exp(m)).collect();
            let total = log_sum_exp(&per_state);
            per_state.iter().map(|x| (x - total).exp()).collect()
        })
        .collect()
}

/// One EM step computed from enumerated path posteriors.
pub fn brute_em_step(model: &HmmModel, obs: &[f64]) -> HmmModel {
    let n = model.states.len();
    let len = obs.len();
    let paths = all_paths(n, len);
    let lps: Vec<f64> = paths.iter().map(|p| path_log_prob(model, p, obs)).collect();
    let total = log_sum_exp(&lps);
    let mut gamma = vec![vec![0.0; n]; len];
    let mut xi = vec![vec![0.0; n]; n];
    for (p, lp) in paths.iter().zip(&lps) {
        let w = (lp - total).exp();
        for t in 0..len {
            gamma[t][p[t]] += w;
        }
        for t in 1..len {
            xi[p[t - 1]][p[t]] += w;
        }
    }
    let transition = xi
        .iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter().map(|x| x / s).collect()
        })
        .collect();
    let emissions = (0..n)
        .map(|i| {
            let w: f64 = (0..len).map(|t| gamma[t][i]).sum();
            let mean = (0..len).map(|t| gamma[t][i] * obs[t]).sum::<f64>() / w;
            let var = (0..len).map(|t| gamma[t][i] * (obs[t] - mean).powi(2)).sum::<f64>() / w;
            Gaussian::new(mean, var.sqrt())
        })
        .collect();
    HmmModel {
        states: model.states.clone(),
        initial: gamma[0].clone(),
        transition,
        emissions,
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// A random fully connected model with `n` states.
pub fn random_model(rng: &mut ChaCha8Rng, n: usize) -> HmmModel {
    HmmModel::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        random_simplex(rng, n),
        (0..n).map(|_| random_simplex(rng, n)).collect(),
        (0..n)
            .map(|_| Gaussian::new(rng.random_range(0.0..12.0), rng.random_range(0.5..3.0)))
            .collect(),
    )
    .expect("valid random model")
}

pub fn random_obs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..16.0)).collect()
}

// ---------------------------------------------------------------------------
// time series and signals

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// AR(1) path `x_t = phi x_{t-1} + e_t` after a 200-step burn-in.
pub fn simulate_ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = normals(&mut rng(seed), n + 200);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for (i, e) in e.iter().enumerate() {
        x = phi * x + e;
        if i >= 200 {
            out.push(x);
        }
    }
    out
}

/// Cosines `sum_j amp_j cos(omega_j t)` sampled at `t = i * dt`.
pub fn cosines(components: &[(f64, f64)], n: usize, dt: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            components.iter().map(|(w, a)| a * (w * t).cos()).sum()
        })
        .collect()
}

/// Closed-form principal eigenvalue of the 3x3 reciprocal matrix `[[1,a,b],[1/a,1,c],[1/b,1/c,1]]`.
///
/// With `mu = l - 1` the characteristic equation is `mu^3 - 3 mu = q^3 + q^-3`,
/// `q = (a c / b)^(1/3)`, solved by `mu = q + 1/q`.
pub fn lambda_max_3x3(a: f64, b: f64, c: f64) -> f64 {
    let q = (a * c / b).cbrt();
    1.0 + q + 1.0 / q
}
