use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::statevector::{Axis, Circuit, GateOp};

/// Gate of a template: either fixed or a rotation whose angle is read
/// from a parameter slot.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamGate {
    Fixed(GateOp),
    Rot { axis: Axis, qubit: usize, slot: usize },
}

/// Circuit skeleton with `n_params` angle slots. Every slot is used by
/// exactly one rotation, which is what the shift rules rely on.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<ParamGate>,
}

impl Template {
    pub fn new(n_qubits: usize, gates: Vec<ParamGate>) -> Result<Self> {
        let slots: Vec<usize> = gates
            .iter()
            .filter_map(|g| match g {
                ParamGate::Rot { slot, .. } => Some(*slot),
                ParamGate::Fixed(_) => None,
            })
            .collect();
        let n_params = slots.len();
        for k in 0..n_params {
            let uses = slots.iter().filter(|&&s| s == k).count();
            if uses != 1 {
                return Err(Error::InvalidArgument(format!("template slot {k} used {uses} times")));
            }
        }
        let t = Template { n_qubits, n_params, gates };
        // validates qubit indices
        t.circuit(&vec![0.0; n_params])?;
        Ok(t)
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[ParamGate] {
        &self.gates
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params {
            return Err(Error::ParameterLength { what: "template", expected: self.n_params, found: params.len() });
        }
        let mut circ = Circuit::new(self.n_qubits)?;
        for g in &self.gates {
            let op = match g {
                ParamGate::Fixed(op) => op.clone(),
                ParamGate::Rot { axis, qubit, slot } => GateOp::rotation(*axis, *qubit, params[*slot]),
            };
            circ.push(op)?;
        }
        Ok(circ)
    }

    pub fn unitary(&self, params: &[f64]) -> Result<CMatrix> {
        self.circuit(params)?.unitary()
    }
}

/// V(theta, gamma) = W(theta) D(gamma) W(theta)^dagger with diagonal D.
#[derive(Debug, Clone, PartialEq)]
pub struct ReffAnsatz {
    pub w: Template,
    pub d: Template,
    pub name: String,
}

fn fixed(op: GateOp) -> ParamGate {
    ParamGate::Fixed(op)
}

fn rot(axis: Axis, qubit: usize, slot: usize) -> ParamGate {
    ParamGate::Rot { axis, qubit, slot }
}

fn dimer_w_body() -> Vec<ParamGate> {
    vec![
        fixed(GateOp::rx(0, -FRAC_PI_2)),
        fixed(GateOp::rx(1, -FRAC_PI_2)),
        fixed(GateOp::cnot(0, 1)),
        fixed(GateOp::rx(0, FRAC_PI_4)),
        fixed(GateOp::rz(1, FRAC_PI_4)),
        fixed(GateOp::cnot(0, 1)),
        fixed(GateOp::rx(0, FRAC_PI_2)),
        fixed(GateOp::rx(1, FRAC_PI_2)),
        rot(Axis::Z, 0, 0),
    ]
}

/// Rz(g1) (x) Rz(g2) followed by exp(-i g3 ZZ / 2).
fn dimer_d() -> Template {
    Template::new(
        2,
        vec![
            rot(Axis::Z, 0, 0),
            rot(Axis::Z, 1, 1),
            fixed(GateOp::cnot(0, 1)),
            rot(Axis::Z, 1, 2),
            fixed(GateOp::cnot(0, 1)),
        ],
    )
    .expect("static template")
}

impl ReffAnsatz {
    /// Two-qubit ansatz with one W angle and three D angles; V compiles to
    /// six CNOTs.
    pub fn dimer() -> Self {
        ReffAnsatz {
            w: Template::new(2, dimer_w_body()).expect("static template"),
            d: dimer_d(),
            name: "dimer".into(),
        }
    }

    /// Same as [`ReffAnsatz::dimer`] with an extra Rz slot on qubit 1.
    pub fn dimer_extended() -> Self {
        let mut w = dimer_w_body();
        w.push(rot(Axis::Z, 1, 1));
        ReffAnsatz {
            w: Template::new(2, w).expect("static template"),
            d: dimer_d(),
            name: "dimer-extended".into(),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "dimer" => Ok(Self::dimer()),
            "dimer-extended" => Ok(Self::dimer_extended()),
            _ => Err(Error::InvalidArgument(format!("unknown ansatz {name:?}"))),
        }
    }

    pub fn new(name: impl Into<String>, w: Template, d: Template) -> Result<Self> {
        if w.n_qubits() != d.n_qubits() {
            return Err(Error::DimensionMismatch { expected: w.n_qubits(), found: d.n_qubits() });
        }
        Ok(ReffAnsatz { w, d, name: name.into() })
    }

    pub fn n_theta(&self) -> usize {
        self.w.n_params()
    }

    pub fn n_gamma(&self) -> usize {
        self.d.n_params()
    }

    pub fn n_qubits(&self) -> usize {
        self.w.n_qubits()
    }

    fn check(&self, theta: &[f64], gamma: &[f64]) -> Result<()> {
        if theta.len() != self.n_theta() {
            return Err(Error::ParameterLength { what: "theta", expected: self.n_theta(), found: theta.len() });
        }
        if gamma.len() != self.n_gamma() {
            return Err(Error::ParameterLength { what: "gamma", expected: self.n_gamma(), found: gamma.len() });
        }
        Ok(())
    }

    /// W(theta_left) D(scale * gamma) W(theta_right)^dagger as a circuit.
    pub fn split_circuit(&self, theta_left: &[f64], gamma: &[f64], theta_right: &[f64], scale: usize) -> Result<Circuit> {
        self.check(theta_left, gamma)?;
        self.check(theta_right, gamma)?;
        let scaled: Vec<f64> = gamma.iter().map(|g| g * scale as f64).collect();
        let mut circ = self.w.circuit(theta_right)?.inverse()?;
        circ.append(&self.d.circuit(&scaled)?)?;
        circ.append(&self.w.circuit(theta_left)?)?;
        Ok(circ)
    }

    /// V = W(theta) D(N gamma) W(theta)^dagger as a circuit.
    pub fn circuit(&self, theta: &[f64], gamma: &[f64], scale: usize) -> Result<Circuit> {
        self.split_circuit(theta, gamma, theta, scale)
    }

    pub fn split_unitary(&self, theta_left: &[f64], gamma: &[f64], theta_right: &[f64], scale: usize) -> Result<CMatrix> {
        self.check(theta_left, gamma)?;
        self.check(theta_right, gamma)?;
        let scaled: Vec<f64> = gamma.iter().map(|g| g * scale as f64).collect();
        let wl = self.w.unitary(theta_left)?;
        let wr = if theta_left == theta_right { wl.clone() } else { self.w.unitary(theta_right)? };
        Ok(wl * self.d.unitary(&scaled)? * wr.adjoint())
    }

    pub fn unitary(&self, theta: &[f64], gamma: &[f64], scale: usize) -> Result<CMatrix> {
        self.split_unitary(theta, gamma, theta, scale)
    }

    /// Parameter names: theta1.., gamma1...
    pub fn parameter_names(&self) -> Vec<String> {
        (1..=self.n_theta())
            .map(|k| format!("theta{k}"))
            .chain((1..=self.n_gamma()).map(|k| format!("gamma{k}")))
            .collect()
    }
}

/// W(theta) D(N gamma) W(theta)^dagger.
pub fn build_ansatz_unitary(ansatz: &ReffAnsatz, theta: &[f64], gamma: &[f64], scale: usize) -> Result<CMatrix> {
    ansatz.unitary(theta, gamma, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::{build_hamiltonian, SpinModel};

    #[test]
    fn six_cnots() {
        let a = ReffAnsatz::dimer();
        assert_eq!(a.circuit(&[0.3], &[0.1, 0.2, 0.3], 1).unwrap().two_qubit_count(), 6);
        assert_eq!(a.w.circuit(&[0.0]).unwrap().two_qubit_count(), 2);
        assert_eq!(a.d.circuit(&[0.0; 3]).unwrap().two_qubit_count(), 2);
    }

    #[test]
    fn zero_scale_is_identity() {
        let u = build_ansatz_unitary(&ReffAnsatz::dimer(), &[0.7], &[1.0, -2.0, 0.5], 0).unwrap();
        assert!(max_abs(&(u - CMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn w_diagonalizes_heisenberg_at_quarter_turn() {
        let w = ReffAnsatz::dimer().w.unitary(&[FRAC_PI_2]).unwrap();
        let h = build_hamiltonian(&SpinModel::heisenberg(1.0, 1.0));
        let diag = w.adjoint() * h * &w;
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    assert!(diag[(r, col)].norm() < 1e-12, "{r},{col}: {}", diag[(r, col)]);
                }
            }
        }
    }

    #[test]
    fn d_is_diagonal() {
        let d = ReffAnsatz::dimer().d.unitary(&[0.4, -1.2, 2.5]).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    assert!(d[(r, col)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn length_mismatch() {
        let a = ReffAnsatz::dimer();
        assert!(matches!(a.unitary(&[0.1, 0.2], &[0.0; 3], 1), Err(Error::ParameterLength { what: "theta", .. })));
        assert!(matches!(a.unitary(&[0.1], &[0.0; 2], 1), Err(Error::ParameterLength { what: "gamma", .. })));
    }

    #[test]
    fn slots_must_be_used_once() {
        let gates = vec![rot(Axis::Z, 0, 0), rot(Axis::X, 1, 0)];
        assert!(Template::new(2, gates).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(ReffAnsatz::dimer().parameter_names(), vec!["theta1", "gamma1", "gamma2", "gamma3"]);
        assert_eq!(ReffAnsatz::dimer_extended().n_theta(), 2);
    }
}
