use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Evolution, Scheme};
use crate::model::N_SITES;
use crate::statevector::Axis;

/// Correlation channel C^{ab}_{ij} (sites 0-based; labels print them 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Channel {
    pub alpha: Axis,
    pub beta: Axis,
    pub i: usize,
    pub j: usize,
}

impl Channel {
    pub fn new(alpha: Axis, beta: Axis, i: usize, j: usize) -> Self {
        Channel { alpha, beta, i, j }
    }

    /// All 36 (a, b, i, j) combinations.
    pub fn all() -> Vec<Channel> {
        let mut out = Vec::with_capacity(36);
        for alpha in Axis::ALL {
            for beta in Axis::ALL {
                for i in 0..N_SITES {
                    for j in 0..N_SITES {
                        out.push(Channel::new(alpha, beta, i, j));
                    }
                }
            }
        }
        out
    }

    /// a = b channels over every site pair.
    pub fn diagonal() -> Vec<Channel> {
        Channel::all().into_iter().filter(|c| c.alpha == c.beta).collect()
    }

    /// a = b, i = j channels.
    pub fn same_site_diagonal() -> Vec<Channel> {
        Channel::diagonal().into_iter().filter(|c| c.i == c.j).collect()
    }

    pub fn label(&self) -> String {
        format!("C_{}{}_{}_{}", self.alpha, self.beta, self.i + 1, self.j + 1)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// How a series was produced. `scheme = None` means direct matrix
/// arithmetic without measurement circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub evolution: Evolution,
    pub scheme: Option<Scheme>,
    pub mitigated: bool,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scheme = self.scheme.map_or("analytic".to_string(), |s| s.to_string());
        let mit = if self.mitigated { "mitigated" } else { "raw" };
        write!(f, "{}/{}/{}", self.evolution, scheme, mit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub channel: Channel,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// (Re, Im) standard errors per sample, for sampled estimates.
    pub std_errors: Option<Vec<(f64, f64)>>,
    pub provenance: Provenance,
}

impl CorrelationSeries {
    pub fn new(channel: Channel, times: Vec<f64>, values: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
        }
        Ok(CorrelationSeries { channel, times, values, std_errors: None, provenance })
    }

    /// Series on the grid t_k = k dt, k = 0..n.
    pub fn on_grid(channel: Channel, dt: f64, values: Vec<Complex64>, provenance: Provenance) -> Self {
        let times = time_grid(dt, values.len());
        CorrelationSeries { channel, times, values, std_errors: None, provenance }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid spacing, or an error when the grid is not uniform.
    pub fn dt(&self) -> Result<f64> {
        uniform_spacing(&self.times)
    }
}

pub fn time_grid(dt: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * dt).collect()
}

pub(crate) fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::NonUniformGrid);
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 {
        return Err(Error::NonUniformGrid);
    }
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) * (k + 1) as f64 {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok(dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_counts_and_labels() {
        assert_eq!(Channel::all().len(), 36);
        assert_eq!(Channel::diagonal().len(), 12);
        assert_eq!(Channel::same_site_diagonal().len(), 6);
        assert_eq!(Channel::new(Axis::X, Axis::Y, 0, 1).label(), "C_xy_1_2");
    }

    #[test]
    fn grid_checks() {
        assert!((uniform_spacing(&time_grid(0.3, 100)).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(uniform_spacing(&[0.0, 0.1, 0.3]), Err(Error::NonUniformGrid)));
    }
}
