mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use zetacast_core::zeta::{
    evaluate, locate_zero_candidates, sample_signal, zero_density, zeta, ComplexArg, SignalMode, ZeroCandidate,
    DEFAULT_TOL,
};

use common::{oracle_zeros, zeta_em};

#[test]
fn oracle_agrees_with_known_constants() {
    // guards the oracle itself before it is used as a reference
    let basel = zeta_em(Complex64::new(2.0, 0.0));
    assert!((basel.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
    assert!((zeta_em(Complex64::new(0.0, 0.0)).re + 0.5).abs() < 1e-13);
    let zeros = oracle_zeros(10.0, 30.0);
    let known = [14.134725141734693, 21.022039638771555, 25.01085758014569];
    assert_eq!(zeros.len(), 3);
    for (z, k) in zeros.iter().zip(known) {
        assert!((z - k).abs() < 1e-9, "{z} vs {k}");
    }
}

#[test]
fn matches_oracle_across_the_strip() {
    for &(sigma, t) in &[
        (0.5, 0.0),
        (0.5, 1.0),
        (0.5, 7.3),
        (0.5, 30.0),
        (0.5, 49.0),
        (0.1, 3.0),
        (0.9, 12.0),
        (1.5, 20.0),
        (2.0, 45.0),
        (0.0, 5.0),
    ] {
        let got = zeta(sigma, t).unwrap();
        let want = zeta_em(Complex64::new(sigma, t));
        assert!((got - want).norm() < 1e-9, "s = {sigma} + {t}i: {got} vs {want}");
    }
}

#[test]
fn accuracy_ladder() {
    let pi = std::f64::consts::PI;
    let apery = zeta_em(Complex64::new(3.0, 0.0)).re;
    for (s, want) in [(2.0, pi.powi(2) / 6.0), (3.0, apery), (4.0, pi.powi(4) / 90.0)] {
        let got = evaluate(ComplexArg::new(s, 0.0).unwrap(), DEFAULT_TOL).unwrap();
        assert!((got.re - want).abs() <= DEFAULT_TOL, "zeta({s}) = {got}");
        assert!(got.im.abs() <= DEFAULT_TOL);
    }
}

#[test]
fn half_and_first_zero() {
    let half = zeta(0.5, 0.0).unwrap();
    assert!((half.re - zeta_em(Complex64::new(0.5, 0.0)).re).abs() < 1e-10);
    assert!((half.re + 1.4603545088).abs() < 1e-9);
    assert!(zeta(0.5, 14.134725).unwrap().norm() < 1e-6);
}

#[test]
fn signal_modes() {
    let real = sample_signal(&[0.0], SignalMode::RealPart).unwrap();
    assert!((real.samples[0].signal + 1.4603545088).abs() < 1e-9);
    let modulus = sample_signal(&[14.134725], SignalMode::Modulus).unwrap();
    assert!(modulus.samples[0].signal < 1e-6);
    assert!(sample_signal(&[2.0, 1.0], SignalMode::RealPart).is_err());
    assert!(sample_signal(&[], SignalMode::RealPart).is_err());
}

#[test]
fn signal_is_bit_identical_across_runs() {
    let ts: Vec<f64> = (0..40).map(|i| 1.0 + i as f64 * 0.7).collect();
    let a = sample_signal(&ts, SignalMode::RealPart).unwrap();
    let b = sample_signal(&ts, SignalMode::RealPart).unwrap();
    assert_eq!(a, b);
    let mean = a.signals().iter().sum::<f64>() / a.len() as f64;
    assert!((a.mean - mean).abs() < 1e-12);
}

#[test]
fn zero_candidates_match_oracle() {
    let found = locate_zero_candidates(10.0, 30.0, 0.05, 1e-3).unwrap();
    let want = oracle_zeros(10.0, 30.0);
    assert_eq!(found.len(), want.len());
    for (c, w) in found.iter().zip(&want) {
        assert!((c.t - w).abs() < 1e-2, "{} vs {w}", c.t);
    }
    assert!(locate_zero_candidates(1.0, 5.0, 0.05, 1e-3).unwrap().is_empty());
    assert!(oracle_zeros(1.0, 5.0).is_empty());
    assert!(locate_zero_candidates(10.0, 30.0, 0.05, 1e-12).unwrap().is_empty());
}

#[test]
fn density_matches_recount() {
    let zeros: Vec<ZeroCandidate> = oracle_zeros(10.0, 50.0)
        .into_iter()
        .map(|t| ZeroCandidate { t, modulus: 0.0 })
        .collect();
    assert_eq!(zeros.len(), 10);
    let windows = zero_density(&zeros, 10.0, 50.0, 10.0, 10.0).unwrap();
    assert_eq!(windows.len(), 4);
    for w in &windows {
        let lo = w.center - 5.0;
        let count = zeros.iter().filter(|z| z.t >= lo && z.t < lo + 10.0).count();
        assert_eq!(w.count, count);
        assert!((w.density - count as f64 / 10.0).abs() < 1e-15);
    }

    let first_three: Vec<ZeroCandidate> = zeros[..3].to_vec();
    let single = zero_density(&first_three, 10.0, 30.0, 20.0, 20.0).unwrap();
    assert_eq!(single.len(), 1);
    assert!((single[0].density - 0.15).abs() < 1e-15);

    let empty = zero_density(&[], 10.0, 30.0, 5.0, 1.0).unwrap();
    assert!(empty.iter().all(|w| w.density == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_symmetry(sigma in 0.01f64..=2.0, t in -50.0f64..=50.0) {
        prop_assume!((sigma - 1.0).abs() > 1e-3 || t.abs() > 1e-3);
        let up = evaluate(ComplexArg::new(sigma, t).unwrap(), DEFAULT_TOL).unwrap();
        let down = evaluate(ComplexArg::new(sigma, -t).unwrap(), DEFAULT_TOL).unwrap();
        prop_assert!((up.conj() - down).norm() <= 2.0 * DEFAULT_TOL);
    }

    #[test]
    fn agrees_with_oracle(sigma in 0.05f64..=2.0, t in 0.0f64..=50.0) {
        prop_assume!((sigma - 1.0).abs() > 1e-2 || t > 1e-2);
        let got = evaluate(ComplexArg::new(sigma, t).unwrap(), DEFAULT_TOL).unwrap();
        let want = zeta_em(Complex64::new(sigma, t));
        prop_assert!((got - want).norm() < 1e-9, "{} vs {}", got, want);
    }
}
