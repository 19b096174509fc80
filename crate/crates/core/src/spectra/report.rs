use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::fourier::{power_spectrum, FourierOptions};
use super::series::CorrelationSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsReport {
    pub rms_time: f64,
    pub rms_freq: f64,
}

/// Part of a complex sample entering an RMS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Real,
    Imag,
    Complex,
}

fn check_grids(a: &CorrelationSeries, b: &CorrelationSeries) -> Result<()> {
    if a.times.len() != b.times.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", a.times.len(), b.times.len())));
    }
    if a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::GridMismatch("sample times differ".into()));
    }
    Ok(())
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// RMS of `series - oracle` over sample indices `range`.
pub fn rms_window(series: &CorrelationSeries, oracle: &CorrelationSeries, range: Range<usize>, component: Component) -> Result<f64> {
    check_grids(series, oracle)?;
    if range.end > series.len() {
        return Err(Error::GridMismatch(format!("window {range:?} exceeds {} samples", series.len())));
    }
    Ok(rms(range.map(|k| {
        let d = series.values[k] - oracle.values[k];
        match component {
            Component::Real => d.re,
            Component::Imag => d.im,
            Component::Complex => d.norm(),
        }
    })))
}

/// Pointwise RMS of the complex difference in time and of the power
/// difference in frequency.
pub fn rms_report(series: &CorrelationSeries, oracle: &CorrelationSeries) -> Result<RmsReport> {
    let rms_time = rms_window(series, oracle, 0..series.len(), Component::Complex)?;
    let pa = power_spectrum(series, FourierOptions::default())?;
    let pb = power_spectrum(oracle, FourierOptions::default())?;
    let rms_freq = rms(pa.power.iter().zip(&pb.power).map(|(x, y)| x - y));
    Ok(RmsReport { rms_time, rms_freq })
}
