use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::{transform, FourierOptions};
use super::series::{Channel, CorrelationSeries};
use crate::error::{Error, Result};
use crate::model::N_SITES;
use crate::statevector::Axis;

/// R_1 at the origin, R_2 one unit along x.
pub const DEFAULT_POSITIONS: [[f64; 3]; N_SITES] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];

/// Which (i, j) site pairs enter the structure factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelection {
    /// i = j only.
    #[default]
    SameSite,
    All,
}

impl PairSelection {
    pub fn pairs(self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..N_SITES {
            for j in 0..N_SITES {
                if self == PairSelection::All || i == j {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DsfResult {
    pub q: [f64; 3],
    pub omegas: Vec<f64>,
    /// S^{ab}(Q, w) per (a, b).
    pub channels: BTreeMap<(Axis, Axis), Vec<Complex64>>,
}

/// S^{ab}(Q, w) = sum_{ij} exp(-i Q.(R_i - R_j)) X^{ab}_{ij}(w) for every
/// requested (a, b), with one unit cell.
pub fn dynamical_structure_factor(
    series: &[CorrelationSeries],
    axes: &[(Axis, Axis)],
    q: [f64; 3],
    positions: &[[f64; 3]; N_SITES],
    selection: PairSelection,
    options: FourierOptions,
) -> Result<DsfResult> {
    let mut channels = BTreeMap::new();
    let mut omegas: Option<Vec<f64>> = None;
    for &(alpha, beta) in axes {
        let mut total: Option<Vec<Complex64>> = None;
        for (i, j) in selection.pairs() {
            let wanted = Channel::new(alpha, beta, i, j);
            let s = series
                .iter()
                .find(|s| s.channel == wanted)
                .ok_or_else(|| Error::MissingSeries(wanted.label()))?;
            let (w, x) = transform(&s.times, &s.values, options)?;
            match &omegas {
                Some(prev) if prev.len() != w.len() || prev.iter().zip(&w).any(|(a, b)| (a - b).abs() > 1e-9) => {
                    return Err(Error::GridMismatch(format!("{} differs from earlier series", wanted.label())));
                }
                Some(_) => {}
                None => omegas = Some(w),
            }
            let r: f64 = (0..3).map(|d| q[d] * (positions[i][d] - positions[j][d])).sum();
            let phase = Complex64::from_polar(1.0, -r);
            let acc = total.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); x.len()]);
            for (a, v) in acc.iter_mut().zip(x) {
                *a += phase * v;
            }
        }
        if let Some(t) = total {
            channels.insert((alpha, beta), t);
        }
    }
    Ok(DsfResult { q, omegas: omegas.unwrap_or_default(), channels })
}

/// Polarization weighting of the channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Unit weight on xx, yy and zz.
    Isotropic,
    /// delta_ab - q_a q_b for a unit vector q.
    Direction([f64; 3]),
}

impl Weighting {
    pub fn weights(&self) -> Result<BTreeMap<(Axis, Axis), f64>> {
        let mut w = BTreeMap::new();
        match *self {
            Weighting::Isotropic => {
                for a in Axis::ALL {
                    w.insert((a, a), 1.0);
                }
            }
            Weighting::Direction(q) => {
                let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::NonUnitDirection(norm));
                }
                for a in Axis::ALL {
                    for b in Axis::ALL {
                        let delta = if a == b { 1.0 } else { 0.0 };
                        w.insert((a, b), delta - q[a.index()] * q[b.index()]);
                    }
                }
            }
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySpectrum {
    pub omegas: Vec<f64>,
    /// sum_ab w_ab S^{ab}(w).
    pub amplitude: Vec<Complex64>,
    /// Modulus of `amplitude`.
    pub intensity: Vec<f64>,
}

/// Weighted channel sum; channels with weight below 1e-12 may be absent.
pub fn intensity(dsf: &DsfResult, weighting: Weighting) -> Result<IntensitySpectrum> {
    let n = dsf.omegas.len();
    let mut amplitude = vec![Complex64::new(0.0, 0.0); n];
    for ((a, b), w) in weighting.weights()? {
        if w.abs() < 1e-12 {
            continue;
        }
        let s = dsf
            .channels
            .get(&(a, b))
            .ok_or_else(|| Error::MissingSeries(format!("S^{a}{b}")))?;
        for (acc, v) in amplitude.iter_mut().zip(s) {
            *acc += v * w;
        }
    }
    let intensity = amplitude.iter().map(|z| z.norm()).collect();
    Ok(IntensitySpectrum { omegas: dsf.omegas.clone(), amplitude, intensity })
}
