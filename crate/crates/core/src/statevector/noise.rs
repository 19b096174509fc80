use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-stochastic readout map for one qubit: entry (i, j) is the
/// probability of reading bit `i` when the qubit was in state `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confusion(Matrix2<f64>);

impl Confusion {
    pub fn identity() -> Self {
        Confusion(Matrix2::identity())
    }

    /// Same flip probability for both outcomes.
    pub fn symmetric(flip: f64) -> Result<Self> {
        Self::asymmetric(flip, flip)
    }

    /// `p01`: probability of reading 1 when the qubit is 0; `p10` the reverse.
    pub fn asymmetric(p01: f64, p10: f64) -> Result<Self> {
        Self::from_matrix(Matrix2::new(1.0 - p01, p10, p01, 1.0 - p10))
    }

    pub fn from_matrix(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidNoise("confusion entries must lie in [0, 1]".into()));
        }
        for j in 0..2 {
            let s = m[(0, j)] + m[(1, j)];
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidNoise(format!("confusion column {j} sums to {s}")));
            }
        }
        Ok(Confusion(m))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    /// Probability of reading `read` given true bit `actual`.
    pub fn prob(&self, read: usize, actual: usize) -> f64 {
        self.0[(read, actual)]
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Matrix2::identity()
    }
}

/// Depolarizing gate noise plus per-qubit readout error.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    p1: f64,
    p2: f64,
    readout: Vec<Confusion>,
    default_readout: Confusion,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, readout: Confusion) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidNoise(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(NoiseModel { p1, p2, readout: Vec::new(), default_readout: readout })
    }

    pub fn noiseless() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0, readout: Vec::new(), default_readout: Confusion::identity() }
    }

    /// Overrides the readout map of individual qubits.
    pub fn with_qubit_readout(mut self, per_qubit: Vec<Confusion>) -> Self {
        self.readout = per_qubit;
        self
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn readout(&self, qubit: usize) -> Confusion {
        self.readout.get(qubit).copied().unwrap_or(self.default_readout)
    }

    pub fn has_gate_noise(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }
}

/// Serializable description of a [`NoiseModel`] for configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub readout_flip: f64,
}

impl NoiseSpec {
    pub fn build(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.p1, self.p2, Confusion::symmetric(self.readout_flip)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_columns_must_sum_to_one() {
        assert!(Confusion::from_matrix(Matrix2::new(0.9, 0.0, 0.0, 1.0)).is_err());
        let c = Confusion::asymmetric(0.02, 0.05).unwrap();
        assert_eq!(c.prob(1, 0), 0.02);
        assert_eq!(c.prob(0, 1), 0.05);
    }

    #[test]
    fn rejects_out_of_range_rates() {
        assert!(NoiseModel::new(-0.1, 0.0, Confusion::identity()).is_err());
        assert!(NoiseModel::new(0.0, 1.5, Confusion::identity()).is_err());
    }
}
