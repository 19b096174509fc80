use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::{Axis, Pauli, PauliString};
use crate::error::{Error, Result};
use crate::linalg::{c, embed, hermiticity_deviation, max_abs, unitarity_deviation, CMatrix};

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// 2x2 unitary on one qubit.
    Single { target: usize, matrix: CMatrix },
    /// 4x4 unitary on an ordered pair; the first target is the high bit.
    Two { targets: [usize; 2], matrix: CMatrix },
    ControlledPauli { control: usize, target: usize, pauli: Pauli },
    Depolarizing { targets: Vec<usize>, p: f64 },
    /// Projective measurement of a Pauli observable (a Hermitian involution).
    Measure { observable: PauliString },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub name: &'static str,
    pub angle: Option<f64>,
    pub kind: GateKind,
}

fn rotation(axis: Axis, theta: f64) -> CMatrix {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c(cs, -sn), c(0.0, 0.0), c(0.0, 0.0), c(cs, sn)]),
    }
}

impl GateOp {
    pub fn single(name: &'static str, target: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (2, 2) {
            return Err(Error::DimensionMismatch { expected: 2, found: matrix.nrows() });
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(GateOp { name, angle: None, kind: GateKind::Single { target, matrix } })
    }

    pub fn two(name: &'static str, targets: [usize; 2], matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (4, 4) {
            return Err(Error::DimensionMismatch { expected: 4, found: matrix.nrows() });
        }
        if targets[0] == targets[1] {
            return Err(Error::InvalidArgument("two-qubit gate on a single qubit".into()));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(GateOp { name, angle: None, kind: GateKind::Two { targets, matrix } })
    }

    /// exp(-i theta P / 2) for P in {X, Y, Z}.
    pub fn rotation(axis: Axis, target: usize, theta: f64) -> Self {
        let name = match axis {
            Axis::X => "rx",
            Axis::Y => "ry",
            Axis::Z => "rz",
        };
        GateOp {
            name,
            angle: Some(theta),
            kind: GateKind::Single { target, matrix: rotation(axis, theta) },
        }
    }

    pub fn rx(target: usize, theta: f64) -> Self {
        Self::rotation(Axis::X, target, theta)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::rotation(Axis::Y, target, theta)
    }

    pub fn rz(target: usize, theta: f64) -> Self {
        Self::rotation(Axis::Z, target, theta)
    }

    pub fn pauli(target: usize, pauli: Pauli) -> Self {
        let name = match pauli {
            Pauli::I => "id",
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        };
        GateOp { name, angle: None, kind: GateKind::Single { target, matrix: pauli.matrix() } }
    }

    pub fn h(target: usize) -> Self {
        let s = c(FRAC_1_SQRT_2, 0.0);
        GateOp {
            name: "h",
            angle: None,
            kind: GateKind::Single { target, matrix: DMatrix::from_row_slice(2, 2, &[s, s, s, -s]) },
        }
    }

    pub fn s(target: usize) -> Self {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        GateOp { name: "s", angle: None, kind: GateKind::Single { target, matrix: m } }
    }

    pub fn sdg(target: usize) -> Self {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        GateOp { name: "sdg", angle: None, kind: GateKind::Single { target, matrix: m } }
    }

    pub fn controlled_pauli(control: usize, target: usize, pauli: Pauli) -> Self {
        let name = match pauli {
            Pauli::I => "cid",
            Pauli::X => "cx",
            Pauli::Y => "cy",
            Pauli::Z => "cz",
        };
        GateOp { name, angle: None, kind: GateKind::ControlledPauli { control, target, pauli } }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::controlled_pauli(control, target, Pauli::X)
    }

    pub fn depolarizing(targets: Vec<usize>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidNoise(format!("depolarizing probability {p} outside [0, 1]")));
        }
        Ok(GateOp { name: "depolarize", angle: None, kind: GateKind::Depolarizing { targets, p } })
    }

    pub fn measure(observable: PauliString) -> Self {
        GateOp { name: "measure", angle: None, kind: GateKind::Measure { observable } }
    }

    pub fn targets(&self) -> Vec<usize> {
        match &self.kind {
            GateKind::Single { target, .. } => vec![*target],
            GateKind::Two { targets, .. } => targets.to_vec(),
            GateKind::ControlledPauli { control, target, .. } => vec![*control, *target],
            GateKind::Depolarizing { targets, .. } => targets.clone(),
            GateKind::Measure { observable } => observable.support(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(
            self.kind,
            GateKind::Single { .. } | GateKind::Two { .. } | GateKind::ControlledPauli { .. }
        )
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.kind, GateKind::Two { .. } | GateKind::ControlledPauli { .. })
    }

    /// Local matrix of a unitary gate, ordered like `targets()`.
    pub fn local_matrix(&self) -> Option<CMatrix> {
        match &self.kind {
            GateKind::Single { matrix, .. } | GateKind::Two { matrix, .. } => Some(matrix.clone()),
            GateKind::ControlledPauli { pauli, .. } => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                let p = pauli.matrix();
                for r in 0..2 {
                    for col in 0..2 {
                        m[(2 + r, 2 + col)] = p[(r, col)];
                    }
                }
                Some(m)
            }
            _ => None,
        }
    }

    /// Full-register matrix of a unitary gate.
    pub fn full_matrix(&self, n_qubits: usize) -> Option<CMatrix> {
        self.local_matrix().map(|m| embed(&m, &self.targets(), n_qubits))
    }

    /// Inverse of a unitary gate.
    pub fn inverse(&self) -> Result<Self> {
        let kind = match &self.kind {
            GateKind::Single { target, matrix } => {
                GateKind::Single { target: *target, matrix: matrix.adjoint() }
            }
            GateKind::Two { targets, matrix } => {
                GateKind::Two { targets: *targets, matrix: matrix.adjoint() }
            }
            GateKind::ControlledPauli { .. } => self.kind.clone(),
            GateKind::Depolarizing { .. } => return Err(Error::NonUnitaryCircuit("depolarize")),
            GateKind::Measure { .. } => return Err(Error::NonUnitaryCircuit("measure")),
        };
        Ok(GateOp { name: self.name, angle: self.angle.map(|a| -a), kind })
    }

    /// Same operation with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize, n_total: usize) -> Self {
        let kind = match &self.kind {
            GateKind::Single { target, matrix } => {
                GateKind::Single { target: map(*target), matrix: matrix.clone() }
            }
            GateKind::Two { targets, matrix } => GateKind::Two {
                targets: [map(targets[0]), map(targets[1])],
                matrix: matrix.clone(),
            },
            GateKind::ControlledPauli { control, target, pauli } => GateKind::ControlledPauli {
                control: map(*control),
                target: map(*target),
                pauli: *pauli,
            },
            GateKind::Depolarizing { targets, p } => GateKind::Depolarizing {
                targets: targets.iter().map(|&t| map(t)).collect(),
                p: *p,
            },
            GateKind::Measure { observable } => {
                let mut ops = vec![Pauli::I; n_total];
                for (q, p) in observable.ops().iter().enumerate() {
                    ops[map(q)] = *p;
                }
                GateKind::Measure { observable: PauliString::new(ops) }
            }
        };
        GateOp { name: self.name, angle: self.angle, kind }
    }
}

/// Checks that `g` is a Hermitian involution to within `tol`.
pub fn check_involution(g: &CMatrix, tol: f64) -> Result<()> {
    let n = g.nrows();
    let dev = max_abs(&(g * g - CMatrix::identity(n, n))).max(hermiticity_deviation(g));
    if dev > tol {
        return Err(Error::NotInvolution(dev));
    }
    Ok(())
}

/// exp(i * angle * G) for a Hermitian involution G.
pub fn involution_exp(g: &CMatrix, angle: f64) -> CMatrix {
    let n = g.nrows();
    CMatrix::identity(n, n) * Complex64::new(angle.cos(), 0.0) + g * Complex64::new(0.0, angle.sin())
}
