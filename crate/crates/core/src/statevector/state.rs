use nalgebra::DVector;
use num_complex::Complex64;

use super::pauli::PauliString;
use super::MAX_QUBITS;
use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_deviation, CMatrix, CVector};

const NORM_TOL: f64 = 1e-12;
const EIG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    Pure(CVector),
    Mixed(CMatrix),
}

/// Pure state vector or density matrix over 1 to 3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    repr: Repr,
}

fn width_of(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::UnsupportedWidth(n));
    }
    Ok(n)
}

impl QuantumState {
    /// |0...0>.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedWidth(n_qubits));
        }
        let mut v = DVector::zeros(1 << n_qubits);
        v[0] = c(1.0, 0.0);
        Ok(QuantumState { n_qubits, repr: Repr::Pure(v) })
    }

    /// Computational basis state `index` (qubit 0 is the high bit).
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        if let Repr::Pure(v) = &mut s.repr {
            v[0] = c(0.0, 0.0);
            v[index] = c(1.0, 0.0);
        }
        Ok(s)
    }

    pub fn from_amplitudes(amps: CVector) -> Result<Self> {
        let n_qubits = width_of(amps.len())?;
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm}")));
        }
        Ok(QuantumState { n_qubits, repr: Repr::Pure(amps) })
    }

    /// Normalizes `amps` before validating.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::from_amplitudes(amps / c(norm, 0.0))
    }

    pub fn from_density(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::InvalidState("density matrix is not square".into()));
        }
        let n_qubits = width_of(rho.nrows())?;
        let herm = hermiticity_deviation(&rho);
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min_eig = rho.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -EIG_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(QuantumState { n_qubits, repr: Repr::Mixed(rho) })
    }

    /// Internal constructor for results of trace-preserving maps.
    pub(crate) fn from_repr(n_qubits: usize, repr: Repr) -> Self {
        QuantumState { n_qubits, repr }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(rho) => rho.clone(),
        }
    }

    pub fn to_mixed(&self) -> QuantumState {
        QuantumState { n_qubits: self.n_qubits, repr: Repr::Mixed(self.density_matrix()) }
    }

    /// Tensor product, `self` on the leading qubits.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::UnsupportedWidth(n));
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => Repr::Pure(a.kronecker(b)),
            _ => Repr::Mixed(self.density_matrix().kronecker(&other.density_matrix())),
        };
        Ok(QuantumState { n_qubits: n, repr })
    }

    /// Tr(rho O) for an arbitrary operator.
    pub fn expectation_matrix(&self, op: &CMatrix) -> Result<Complex64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.nrows() });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => v.dotc(&(op * v)),
            Repr::Mixed(rho) => (rho * op).trace(),
        })
    }

    pub fn expectation_pauli(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: pauli.len() });
        }
        Ok(self.expectation_matrix(&pauli.matrix())?.re.clamp(-1.0, 1.0))
    }

    /// Born probabilities over computational basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            Repr::Mixed(rho) => (0..self.dim()).map(|i| rho[(i, i)].re.max(0.0)).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.norm_squared(),
            Repr::Mixed(rho) => rho.trace().re,
        }
    }

    /// |<a|b>|^2 for pure states, Tr(rho sigma) when either is mixed.
    pub fn overlap(&self, other: &QuantumState) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => a.dotc(b).norm_sqr(),
            _ => (self.density_matrix() * other.density_matrix()).trace().re,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_vector() {
        let v = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(QuantumState::from_amplitudes(v.clone()).is_err());
        assert!(QuantumState::normalized(v).is_ok());
    }

    #[test]
    fn rejects_bad_density() {
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = c(1.5, 0.0);
        rho[(1, 1)] = c(-0.5, 0.0);
        assert!(QuantumState::from_density(rho).is_err());
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = c(0.5, 0.0);
        rho[(1, 1)] = c(0.5, 0.0);
        rho[(0, 1)] = c(0.1, 0.0);
        assert!(QuantumState::from_density(rho).is_err());
    }

    #[test]
    fn basis_ordering() {
        let s = QuantumState::basis(2, 2).unwrap();
        let z0: PauliString = "ZI".parse().unwrap();
        assert_eq!(s.expectation_pauli(&z0).unwrap(), -1.0);
    }
}
