use nalgebra::{DMatrix, DVector};
use rand::RngCore;

use super::Shots;
use crate::error::{Error, Result};
use crate::statevector::{sample_distribution, Confusion, Counts};

const MAX_CONDITION: f64 = 1e6;

/// Column-stochastic map from prepared to observed bitstrings over the
/// measured bits (bit 0 is the most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationMatrix {
    m: DMatrix<f64>,
    condition: f64,
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

impl CalibrationMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        for (j, col) in m.column_iter().enumerate() {
            let s: f64 = col.sum();
            if (s - 1.0).abs() > 1e-9 || col.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidArgument(format!("calibration column {j} is not a distribution")));
            }
        }
        let condition = condition_number(&m);
        if condition > MAX_CONDITION {
            return Err(Error::SingularCalibration(condition));
        }
        Ok(CalibrationMatrix { m, condition })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }
}

/// Calibration over `readout.len()` measured bits. Exact mode forms the
/// tensor product of the confusion matrices; sampled mode prepares every
/// basis bitstring and records `shots` noisy readouts of it.
pub fn build_calibration_matrix(readout: &[Confusion], shots: Shots, rng: &mut dyn RngCore) -> Result<CalibrationMatrix> {
    let n = readout.len();
    let dim = 1usize << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    match shots {
        Shots::Exact => {
            for r in 0..dim {
                for col in 0..dim {
                    m[(r, col)] = (0..n)
                        .map(|k| {
                            let shift = n - 1 - k;
                            readout[k].prob((r >> shift) & 1, (col >> shift) & 1)
                        })
                        .product();
                }
            }
        }
        Shots::Sampled(count) => {
            for col in 0..dim {
                let mut prepared = vec![0.0; dim];
                prepared[col] = 1.0;
                let counts = sample_distribution(&prepared, count, readout, rng)?;
                for (r, f) in counts.frequencies().into_iter().enumerate() {
                    m[(r, col)] = f;
                }
            }
        }
    }
    CalibrationMatrix::from_matrix(m)
}

/// Minimizes ||M p - p_noisy||_2 over the probability simplex.
///
/// The problem is a small convex QP; every candidate support is solved
/// through its equality-constrained KKT system and the feasible candidate
/// with the smallest residual is returned.
pub fn mitigate(noisy: &[f64], cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    let dim = cal.dim();
    if noisy.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: noisy.len() });
    }
    let y = DVector::from_column_slice(noisy);
    let m = cal.matrix();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for support in 1usize..(1 << dim) {
        let cols: Vec<usize> = (0..dim).filter(|k| support >> k & 1 == 1).collect();
        let s = cols.len();
        let a = DMatrix::from_fn(dim, s, |r, c| m[(r, cols[c])]);
        let mut kkt = DMatrix::<f64>::zeros(s + 1, s + 1);
        let ata = a.transpose() * &a;
        let aty = a.transpose() * &y;
        let mut rhs = DVector::<f64>::zeros(s + 1);
        for r in 0..s {
            for c in 0..s {
                kkt[(r, c)] = ata[(r, c)];
            }
            kkt[(r, s)] = 1.0;
            kkt[(s, r)] = 1.0;
            rhs[r] = aty[r];
        }
        rhs[s] = 1.0;
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        if (0..s).any(|k| sol[k] < -1e-12) {
            continue;
        }
        let mut p = vec![0.0; dim];
        for (k, &col) in cols.iter().enumerate() {
            p[col] = sol[k].max(0.0);
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        let residual = (m * DVector::from_column_slice(&p) - &y).norm();
        if best.as_ref().is_none_or(|(r, _)| residual < *r - 1e-15) {
            best = Some((residual, p));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::InvalidArgument("no feasible mitigation candidate".into()))
}

pub fn mitigate_counts(counts: &Counts, cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    mitigate(&counts.frequencies(), cal)
}
