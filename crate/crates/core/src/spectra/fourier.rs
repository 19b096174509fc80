use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::series::{uniform_spacing, CorrelationSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    None,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourierOptions {
    pub window: Window,
    /// Zero-pad the series to this length before transforming.
    pub zero_pad_to: Option<usize>,
}

/// Discrete transform X_m = dt sum_k c_k exp(+i w_m t_k) on
/// w_m = 2 pi m / (M dt), m = 0..M, so exp(-i W t) peaks at w = W.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub omegas: Vec<f64>,
    pub transform: Vec<Complex64>,
    /// |X_m|^2 / (2 pi); sum(power) dw equals sum |c_k|^2 dt.
    pub power: Vec<f64>,
}

impl PowerSpectrum {
    pub fn d_omega(&self) -> f64 {
        if self.omegas.len() > 1 {
            self.omegas[1] - self.omegas[0]
        } else {
            0.0
        }
    }

    /// Bin nearest to `omega`.
    pub fn bin_of(&self, omega: f64) -> usize {
        let dw = self.d_omega();
        ((omega / dw).round() as isize).rem_euclid(self.omegas.len() as isize) as usize
    }
}

pub fn omega_grid(dt: f64, m: usize) -> Vec<f64> {
    (0..m).map(|k| 2.0 * PI * k as f64 / (m as f64 * dt)).collect()
}

/// Complex transform of samples on a uniform grid starting at `t0`.
pub fn transform(times: &[f64], values: &[Complex64], options: FourierOptions) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let dt = uniform_spacing(times)?;
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
    }
    let n = values.len();
    let m = options.zero_pad_to.unwrap_or(n);
    if m < n {
        return Err(Error::InvalidArgument(format!("zero padding to {m} is shorter than the series ({n})")));
    }
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| match options.window {
            Window::None => v,
            Window::Hann => v * (0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos()),
        })
        .collect();
    buf.resize(m, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let omegas = omega_grid(dt, m);
    let t0 = times[0];
    let out = buf
        .into_iter()
        .zip(&omegas)
        .map(|(x, &w)| x * dt * Complex64::from_polar(1.0, w * t0))
        .collect();
    Ok((omegas, out))
}

pub fn power_spectrum(series: &CorrelationSeries, options: FourierOptions) -> Result<PowerSpectrum> {
    let (omegas, transform) = transform(&series.times, &series.values, options)?;
    let power = transform.iter().map(|x| x.norm_sqr() / (2.0 * PI)).collect();
    Ok(PowerSpectrum { omegas, transform, power })
}

/// Transform of a unit line exp(-i W t) sampled at t_k = k dt, k = 0..n,
/// evaluated at every w in `omegas`.
pub fn line_kernel(frequency: f64, dt: f64, n: usize, omegas: &[f64]) -> Vec<Complex64> {
    omegas
        .iter()
        .map(|&w| {
            (0..n)
                .map(|k| Complex64::from_polar(dt, (w - frequency) * k as f64 * dt))
                .sum()
        })
        .collect()
}

/// Least-squares amplitudes a_l of sum_l a_l exp(-i W_l t) whose transform
/// best matches `spectrum`. Removes the leakage that raw bin heights carry.
pub fn fit_line_amplitudes(spectrum: &[Complex64], omegas: &[f64], dt: f64, n: usize, frequencies: &[f64]) -> Result<Vec<Complex64>> {
    if spectrum.len() != omegas.len() {
        return Err(Error::DimensionMismatch { expected: omegas.len(), found: spectrum.len() });
    }
    let cols: Vec<Vec<Complex64>> = frequencies.iter().map(|&f| line_kernel(f, dt, n, omegas)).collect();
    let a = DMatrix::from_fn(omegas.len(), frequencies.len(), |r, c| cols[c][r]);
    let y = DVector::from_column_slice(spectrum);
    let svd = a.svd(true, true);
    let x = svd
        .solve(&y, 1e-12)
        .map_err(|e| Error::InvalidArgument(format!("line fit failed: {e}")))?;
    Ok(x.iter().copied().collect())
}

/// Indices of local maxima of `values` (cyclic neighbours), largest first.
pub fn top_peaks(values: &[f64], count: usize) -> Vec<usize> {
    let n = values.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| {
            let prev = values[(k + n - 1) % n];
            let next = values[(k + 1) % n];
            values[k] >= prev && values[k] >= next && values[k] > 0.0
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    peaks.truncate(count);
    peaks
}
