//! Fourier decomposition of a sampled signal.
//!
//! For `N` samples at spacing `dt` the amplitudes are `a_k = X_k / N` with
//! `X_k = sum_n x_n exp(-2 pi i k n / N)`, reported at angular frequency
//! `omega_k = 2 pi k / (N dt)` (negative for `k > N/2`). With this scaling a unit
//! cosine on a bin shows `|a| = 0.5` at `+omega` and `-omega`, and
//! `x(t) = sum_k a_k exp(i omega_k t)` reproduces the samples at `t = n dt`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Window::None),
            "hann" => Ok(Window::Hann),
            other => Err(Error::InvalidArgument(format!("unknown window '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Angular frequencies in FFT bin order.
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub power: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Keeps only the given bins (and their mirror bins), zeroing the rest.
    pub fn retain_bins(&self, keep: impl Fn(usize, f64) -> bool) -> Spectrum {
        let amplitudes: Vec<Complex64> = self
            .amplitudes
            .iter()
            .zip(&self.frequencies)
            .enumerate()
            .map(|(k, (a, &w))| if keep(k, w) { *a } else { Complex64::new(0.0, 0.0) })
            .collect();
        Spectrum {
            frequencies: self.frequencies.clone(),
            power: amplitudes.iter().map(|a| a.norm_sqr()).collect(),
            amplitudes,
        }
    }
}

fn fft_radix2(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = Complex64::from_polar(1.0, angle * k as f64);
                let u = buf[start + k];
                let v = buf[start + k + len / 2] * w;
                buf[start + k] = u + v;
                buf[start + k + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Direct O(N^2) transform.
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    (0..n)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(m, x)| {
                    // reduce k*m mod n before scaling to keep the angle small
                    let phase = -2.0 * PI * ((k * m) % n) as f64 / n as f64;
                    x * Complex64::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect()
}

/// Forward transform: radix-2 FFT for power-of-two lengths, direct DFT otherwise.
pub fn transform(input: &[Complex64]) -> Vec<Complex64> {
    if input.len().is_power_of_two() {
        let mut buf = input.to_vec();
        fft_radix2(&mut buf);
        buf
    } else {
        dft(input)
    }
}

pub fn bin_frequencies(n: usize, sample_spacing: f64) -> Vec<f64> {
    let span = n as f64 * sample_spacing;
    (0..n)
        .map(|k| {
            let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * signed / span
        })
        .collect()
}

pub fn decompose(signal: &[f64], sample_spacing: f64) -> Result<Spectrum> {
    decompose_windowed(signal, sample_spacing, Window::None)
}

pub fn decompose_windowed(signal: &[f64], sample_spacing: f64, window: Window) -> Result<Spectrum> {
    let n = signal.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    if !(sample_spacing > 0.0) || !sample_spacing.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample spacing must be positive, got {sample_spacing}"
        )));
    }
    let input: Vec<Complex64> = signal
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = match window {
                Window::None => 1.0,
                Window::Hann => 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos(),
            };
            Complex64::new(x * w, 0.0)
        })
        .collect();
    let scale = 1.0 / n as f64;
    let amplitudes: Vec<Complex64> = transform(&input).into_iter().map(|x| x * scale).collect();
    Ok(Spectrum {
        frequencies: bin_frequencies(n, sample_spacing),
        power: amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        amplitudes,
    })
}

/// Real part of `sum_k a_k exp(i omega_k t)` at each `t`.
pub fn reconstruct(spectrum: &Spectrum, t_grid: &[f64]) -> Vec<f64> {
    t_grid
        .iter()
        .map(|&t| {
            spectrum
                .amplitudes
                .iter()
                .zip(&spectrum.frequencies)
                .map(|(a, w)| (a * Complex64::from_polar(1.0, w * t)).re)
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub omega: f64,
    pub amplitude: f64,
}

/// Relative level below which a bin counts as empty.
const NEGLIGIBLE: f64 = 1e-9;

/// The `k` positive-frequency bins with the largest `|a|`, descending, ties to lower omega.
///
/// Bins whose amplitude is negligible next to the signal's total amplitude are never
/// reported, so a pure DC signal yields an empty list.
pub fn top_peaks(spectrum: &Spectrum, k: usize) -> Result<Vec<Peak>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let positive: Vec<usize> = (0..spectrum.len()).filter(|&i| spectrum.frequencies[i] > 0.0).collect();
    if k > positive.len() {
        return Err(Error::TooManyPeaks {
            requested: k,
            available: positive.len(),
        });
    }
    let scale = spectrum.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut peaks: Vec<Peak> = positive
        .into_iter()
        .map(|i| Peak {
            omega: spectrum.frequencies[i],
            amplitude: spectrum.amplitudes[i].norm(),
        })
        .filter(|p| p.amplitude > NEGLIGIBLE * scale)
        .collect();
    peaks.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude).then(a.omega.total_cmp(&b.omega)));
    peaks.truncate(k);
    Ok(peaks)
}

/// Spectrum CSV: `omega,re,im,power`.
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["omega", "re", "im", "power"])?;
    for i in 0..spectrum.len() {
        let a = spectrum.amplitudes[i];
        w.write_record([
            format!("{}", spectrum.frequencies[i]),
            format!("{}", a.re),
            format!("{}", a.im),
            format!("{}", spectrum.power[i]),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}
