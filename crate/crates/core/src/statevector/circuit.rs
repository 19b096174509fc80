use num_complex::Complex64;

use super::gate::GateOp;
use super::MAX_QUBITS;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Ordered sequence of operations on a fixed-width register.
///
/// `global_phase` multiplies the circuit unitary by `exp(i * global_phase)`;
/// it is unobservable but lets compiled circuits match reference matrices
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    pub global_phase: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedWidth(n_qubits));
        }
        Ok(Circuit { n_qubits, ops: Vec::new(), global_phase: 0.0 })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        let targets = op.targets();
        if let Some(&bad) = targets.iter().find(|&&t| t >= self.n_qubits) {
            return Err(Error::TargetOutOfRange { index: bad, n_qubits: self.n_qubits });
        }
        if let super::gate::GateKind::Measure { observable } = &op.kind {
            if observable.len() != self.n_qubits {
                return Err(Error::DimensionMismatch { expected: self.n_qubits, found: observable.len() });
            }
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn with(mut self, op: GateOp) -> Result<Self> {
        self.push(op)?;
        Ok(self)
    }

    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        self.ops.extend(other.ops.iter().cloned());
        self.global_phase += other.global_phase;
        Ok(self)
    }

    /// `count`-fold repetition.
    pub fn repeat(&self, count: usize) -> Circuit {
        let mut ops = Vec::with_capacity(self.ops.len() * count);
        for _ in 0..count {
            ops.extend(self.ops.iter().cloned());
        }
        Circuit { n_qubits: self.n_qubits, ops, global_phase: self.global_phase * count as f64 }
    }

    /// Reversed circuit of gate inverses; fails on channels and measurements.
    pub fn inverse(&self) -> Result<Circuit> {
        let ops = self.ops.iter().rev().map(GateOp::inverse).collect::<Result<Vec<_>>>()?;
        Ok(Circuit { n_qubits: self.n_qubits, ops, global_phase: -self.global_phase })
    }

    /// Embeds this circuit into a wider register, qubit `q` landing on `map[q]`.
    pub fn embedded(&self, map: &[usize], n_total: usize) -> Result<Circuit> {
        if map.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: map.len() });
        }
        let mut out = Circuit::new(n_total)?;
        for op in &self.ops {
            out.push(op.remapped(|q| map[q], n_total))?;
        }
        out.global_phase = self.global_phase;
        Ok(out)
    }

    pub fn two_qubit_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_two_qubit()).count()
    }

    pub fn measurement_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op.kind, super::gate::GateKind::Measure { .. }))
            .count()
    }

    /// Dense unitary of a circuit made only of unitary gates.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut u = CMatrix::identity(dim, dim);
        for op in &self.ops {
            let m = op.full_matrix(self.n_qubits).ok_or(Error::NonUnitaryCircuit(op.name))?;
            u = m * u;
        }
        let phase = Complex64::from_polar(1.0, self.global_phase);
        Ok(u * phase)
    }
}
