//! Gaussian hidden Markov model over inflation observations.
//!
//! The model is generic in the number of states; [`HmmModel::four_phase`] builds the
//! Stable / Growth / Volatile / Crash model used for phase identification. All
//! recursions run in log space so sequences of several hundred steps do not underflow.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Emission standard deviations below this count as a collapsed state.
pub const STD_FLOOR: f64 = 1e-4;
const PROB_TOL: f64 = 1e-9;

/// The four market phases, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Stable,
    Growth,
    Volatile,
    Crash,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::Stable, Phase::Growth, Phase::Volatile, Phase::Crash];

    pub fn label(self) -> &'static str {
        match self {
            Phase::Stable => "Stable",
            Phase::Growth => "Growth",
            Phase::Volatile => "Volatile",
            Phase::Crash => "Crash",
        }
    }
}

/// Published phase transition matrix, rows and columns in [`Phase::ALL`] order.
pub const PHASE_TRANSITIONS: [[f64; 4]; 4] = [
    [0.78, 0.15, 0.05, 0.02],
    [0.20, 0.65, 0.10, 0.05],
    [0.10, 0.25, 0.50, 0.15],
    [0.05, 0.20, 0.30, 0.45],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub std: f64,
}

impl Gaussian {
    pub fn new(mean: f64, std: f64) -> Self {
        Self { mean, std }
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        -0.5 * z * z - self.std.ln() - 0.5 * (2.0 * PI).ln()
    }
}

/// Illustrative emission parameters (inflation, percent) for the four phases.
pub fn default_phase_emissions() -> [Gaussian; 4] {
    [
        Gaussian::new(3.0, 0.7),
        Gaussian::new(6.0, 1.0),
        Gaussian::new(10.0, 2.0),
        Gaussian::new(15.0, 3.5),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmModel {
    pub states: Vec<String>,
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub emissions: Vec<Gaussian>,
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidArgument(format!("{what} has entries outside [0, 1]")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidArgument(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

impl HmmModel {
    pub fn new(
        states: Vec<String>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        emissions: Vec<Gaussian>,
    ) -> Result<Self> {
        let model = Self {
            states,
            initial,
            transition,
            emissions,
        };
        model.validate()?;
        Ok(model)
    }

    /// Stable/Growth/Volatile/Crash model with the published transition matrix,
    /// started from that matrix's stationary distribution.
    pub fn four_phase(emissions: [Gaussian; 4]) -> Result<Self> {
        let transition: Vec<Vec<f64>> = PHASE_TRANSITIONS.iter().map(|r| r.to_vec()).collect();
        let initial = stationary_distribution(&transition)?;
        Self::new(
            Phase::ALL.iter().map(|p| p.label().to_string()).collect(),
            initial,
            transition,
            emissions.to_vec(),
        )
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n == 0 {
            return Err(Error::InvalidArgument("model has no states".into()));
        }
        if self.initial.len() != n || self.transition.len() != n || self.emissions.len() != n {
            return Err(Error::InvalidArgument(format!(
                "model dimensions disagree with {n} states"
            )));
        }
        check_distribution(&self.initial, "initial distribution")?;
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!("transition row {i} has wrong length")));
            }
            check_distribution(row, &format!("transition row {i}"))?;
        }
        for (i, e) in self.emissions.iter().enumerate() {
            if !(e.std > 0.0) || !e.mean.is_finite() || !e.std.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "emission {i} must have finite mean and std > 0"
                )));
            }
        }
        Ok(())
    }

    fn log_initial(&self) -> Vec<f64> {
        self.initial.iter().map(|p| p.ln()).collect()
    }

    fn log_transition(&self) -> Vec<Vec<f64>> {
        self.transition
            .iter()
            .map(|r| r.iter().map(|p| p.ln()).collect())
            .collect()
    }

    fn log_emissions(&self, x: f64) -> Vec<f64> {
        self.emissions.iter().map(|e| e.log_pdf(x)).collect()
    }

    /// Draws a state path and observations of length `len`.
    pub fn sample(&self, len: usize, seed: u64) -> (Vec<usize>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng, p: &[f64]| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, &pi) in p.iter().enumerate() {
                acc += pi;
                if u < acc {
                    return i;
                }
            }
            p.len() - 1
        };
        let mut states: Vec<usize> = Vec::with_capacity(len);
        let mut obs = Vec::with_capacity(len);
        for t in 0..len {
            let s = if t == 0 {
                pick(&mut rng, self.initial.as_slice())
            } else {
                pick(&mut rng, self.transition[states[t - 1]].as_slice())
            };
            let z: f64 = rng.sample(StandardNormal);
            states.push(s);
            obs.push(self.emissions[s].mean + self.emissions[s].std * z);
        }
        (states, obs)
    }
}

/// Stationary distribution of a row-stochastic matrix by power iteration.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transition.len();
    let mut pi = vec![1.0 / n as f64; n];
    for iter in 0..100_000 {
        let mut next = vec![0.0; n];
        for (i, row) in transition.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                next[j] += pi[i] * a;
            }
        }
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let diff = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if diff < 1e-15 && iter > 0 {
            return Ok(pi);
        }
    }
    Err(Error::NonConvergence {
        what: "stationary distribution".into(),
        iterations: 100_000,
    })
}

/// Per-time probability vectors over the model states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePosterior {
    pub states: Vec<String>,
    pub probs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    pub posterior: PhasePosterior,
    pub log_likelihood: f64,
}

fn check_obs(obs: &[f64]) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::Empty("observations"));
    }
    if obs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("observations must be finite".into()));
    }
    Ok(())
}

fn log_forward(model: &HmmModel, obs: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = model.n_states();
    let log_a = model.log_transition();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(obs.len());
    let first: Vec<f64> = model
        .log_initial()
        .iter()
        .zip(model.log_emissions(obs[0]))
        .map(|(p, e)| p + e)
        .collect();
    out.push(first);
    for (t, &x) in obs.iter().enumerate().skip(1) {
        let prev = &out[t - 1];
        let emit = model.log_emissions(x);
        let row: Vec<f64> = (0..n)
            .map(|j| emit[j] + log_sum_exp((0..n).map(|i| prev[i] + log_a[i][j])))
            .collect();
        out.push(row);
    }
    if let Some(step) = out
        .iter()
        .position(|row| log_sum_exp(row.iter().copied()) == f64::NEG_INFINITY)
    {
        return Err(Error::ZeroProbability { step });
    }
    Ok(out)
}

fn log_backward(model: &HmmModel, obs: &[f64]) -> Vec<Vec<f64>> {
    let n = model.n_states();
    let log_a = model.log_transition();
    let len = obs.len();
    let mut out = vec![vec![0.0; n]; len];
    for t in (0..len - 1).rev() {
        let emit = model.log_emissions(obs[t + 1]);
        for i in 0..n {
            out[t][i] = log_sum_exp((0..n).map(|j| log_a[i][j] + emit[j] + out[t + 1][j]));
        }
    }
    out
}

/// Filtered phase probabilities `P(s_t | o_1..o_t)` and the total log-likelihood.
pub fn forward_filter(model: &HmmModel, obs: &[f64]) -> Result<FilterResult> {
    model.validate()?;
    check_obs(obs)?;
    let alpha = log_forward(model, obs)?;
    let probs = alpha
        .iter()
        .map(|row| {
            let norm = log_sum_exp(row.iter().copied());
            row.iter().map(|x| (x - norm).exp()).collect()
        })
        .collect();
    let log_likelihood = log_sum_exp(alpha.last().expect("nonempty").iter().copied());
    Ok(FilterResult {
        posterior: PhasePosterior {
            states: model.states.clone(),
            probs,
        },
        log_likelihood,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViterbiPath {
    pub path: Vec<usize>,
    pub labels: Vec<String>,
    pub log_prob: f64,
}

/// Most probable state sequence; ties go to the lowest state index.
pub fn viterbi(model: &HmmModel, obs: &[f64]) -> Result<ViterbiPath> {
    model.validate()?;
    check_obs(obs)?;
    let n = model.n_states();
    let log_a = model.log_transition();
    let argmax = |xs: &mut dyn Iterator<Item = f64>| {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, x) in xs.enumerate() {
            if x > best.1 {
                best = (i, x);
            }
        }
        best
    };

    let mut delta: Vec<f64> = model
        .log_initial()
        .iter()
        .zip(model.log_emissions(obs[0]))
        .map(|(p, e)| p + e)
        .collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(obs.len());
    for (t, &x) in obs.iter().enumerate().skip(1) {
        let emit = model.log_emissions(x);
        let mut next = vec![0.0; n];
        let mut ptr = vec![0usize; n];
        for j in 0..n {
            let (i, v) = argmax(&mut (0..n).map(|i| delta[i] + log_a[i][j]));
            next[j] = v + emit[j];
            ptr[j] = i;
        }
        if next.iter().all(|v| *v == f64::NEG_INFINITY) {
            return Err(Error::ZeroProbability { step: t });
        }
        back.push(ptr);
        delta = next;
    }
    let (last, log_prob) = argmax(&mut delta.iter().copied());
    if log_prob == f64::NEG_INFINITY {
        return Err(Error::ZeroProbability { step: 0 });
    }
    let mut path = vec![last; obs.len()];
    for t in (1..obs.len()).rev() {
        path[t - 1] = back[t - 1][path[t]];
    }
    Ok(ViterbiPath {
        labels: path.iter().map(|&s| model.states[s].clone()).collect(),
        path,
        log_prob,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaumWelchResult {
    pub model: HmmModel,
    /// Log-likelihood of the starting model followed by that of each re-estimate.
    pub loglik_trace: Vec<f64>,
    pub status: TrainingStatus,
}

struct Expectations {
    log_likelihood: f64,
    /// `gamma[t][i]`
    gamma: Vec<Vec<f64>>,
    /// `sum_t xi_t(i, j)` over `t < T - 1`
    xi_sum: Vec<Vec<f64>>,
}

fn expectations(model: &HmmModel, obs: &[f64]) -> Result<Expectations> {
    let n = model.n_states();
    let alpha = log_forward(model, obs)?;
    let beta = log_backward(model, obs);
    let ll = log_sum_exp(alpha.last().expect("nonempty").iter().copied());
    let gamma: Vec<Vec<f64>> = (0..obs.len())
        .map(|t| (0..n).map(|i| (alpha[t][i] + beta[t][i] - ll).exp()).collect())
        .collect();
    let log_a = model.log_transition();
    let mut xi_sum = vec![vec![0.0; n]; n];
    for t in 0..obs.len().saturating_sub(1) {
        let emit = model.log_emissions(obs[t + 1]);
        for i in 0..n {
            for j in 0..n {
                xi_sum[i][j] += (alpha[t][i] + log_a[i][j] + emit[j] + beta[t + 1][j] - ll).exp();
            }
        }
    }
    Ok(Expectations {
        log_likelihood: ll,
        gamma,
        xi_sum,
    })
}

fn maximize(model: &HmmModel, obs: &[f64], e: &Expectations, iteration: usize) -> Result<HmmModel> {
    let n = model.n_states();
    let len = obs.len();
    let total: f64 = e.gamma[0].iter().sum();
    let initial: Vec<f64> = e.gamma[0].iter().map(|g| g / total).collect();

    let mut transition = Vec::with_capacity(n);
    for i in 0..n {
        let row_mass: f64 = e.xi_sum[i].iter().sum();
        if row_mass > 0.0 {
            transition.push(e.xi_sum[i].iter().map(|x| x / row_mass).collect());
        } else {
            transition.push(model.transition[i].clone());
        }
    }

    let mut emissions = Vec::with_capacity(n);
    for i in 0..n {
        let weight: f64 = (0..len).map(|t| e.gamma[t][i]).sum();
        if !(weight > 0.0) {
            return Err(Error::StateCollapse { state: i, iteration });
        }
        let mean = (0..len).map(|t| e.gamma[t][i] * obs[t]).sum::<f64>() / weight;
        let var = (0..len).map(|t| e.gamma[t][i] * (obs[t] - mean).powi(2)).sum::<f64>() / weight;
        let std = var.sqrt();
        if !(std >= STD_FLOOR) {
            return Err(Error::StateCollapse { state: i, iteration });
        }
        emissions.push(Gaussian::new(mean, std));
    }
    Ok(HmmModel {
        states: model.states.clone(),
        initial,
        transition,
        emissions,
    })
}

/// EM re-estimation of all model parameters.
///
/// Stops once an iteration improves the log-likelihood by less than `tol`, or after
/// `max_iter` re-estimations (reported through [`TrainingStatus`]).
pub fn baum_welch(init: &HmmModel, obs: &[f64], max_iter: usize, tol: f64) -> Result<BaumWelchResult> {
    init.validate()?;
    check_obs(obs)?;
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let mut model = init.clone();
    let mut e = expectations(&model, obs)?;
    let mut trace = vec![e.log_likelihood];
    for iteration in 1..=max_iter {
        let next = maximize(&model, obs, &e, iteration)?;
        let next_e = expectations(&next, obs)?;
        let improvement = next_e.log_likelihood - e.log_likelihood;
        trace.push(next_e.log_likelihood);
        model = next;
        e = next_e;
        if improvement < tol {
            return Ok(BaumWelchResult {
                model,
                loglik_trace: trace,
                status: TrainingStatus::Converged,
            });
        }
    }
    Ok(BaumWelchResult {
        model,
        loglik_trace: trace,
        status: TrainingStatus::MaxIterations,
    })
}

/// Posterior rows expressed as percentage shares per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShares {
    pub states: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn phase_distribution(posterior: &PhasePosterior) -> PhaseShares {
    PhaseShares {
        states: posterior.states.clone(),
        rows: posterior
            .probs
            .iter()
            .map(|row| {
                let sum: f64 = row.iter().sum();
                row.iter().map(|p| 100.0 * p / sum).collect()
            })
            .collect(),
    }
}

/// Stacked-share CSV: `period,<state>...`, periods numbered from 1.
pub fn write_shares_csv<W: Write>(shares: &PhaseShares, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["period".to_string()];
    header.extend(shares.states.iter().cloned());
    w.write_record(&header)?;
    for (t, row) in shares.rows.iter().enumerate() {
        let mut rec = vec![(t + 1).to_string()];
        rec.extend(row.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}
