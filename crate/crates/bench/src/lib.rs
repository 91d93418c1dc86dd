//! Workloads shared by the criterion benches.

use zetacast_core::hmm::{default_phase_emissions, HmmModel};

/// A sum of cosines at angular frequencies 0.5, 1.0 and 2.0.
pub fn three_cosines(n: usize, dt: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            (0.5 * t).cos() + 0.6 * (1.0 * t).cos() + 0.3 * (2.0 * t).cos()
        })
        .collect()
}

/// Observations drawn from the four-phase model.
pub fn phase_observations(len: usize, seed: u64) -> (HmmModel, Vec<f64>) {
    let model = HmmModel::four_phase(default_phase_emissions()).expect("valid model");
    let (_, obs) = model.sample(len, seed);
    (model, obs)
}
