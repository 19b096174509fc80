//! First-order Trotter circuits for the dimer Hamiltonian.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, CMatrix};
use crate::model::{exact_evolution, SpinModel, Term};
use crate::statevector::{Circuit, GateOp};

/// Step size, term order and step count of a Trotterized evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub dt: f64,
    pub term_order: Vec<Term>,
    pub n_steps: usize,
}

impl TrotterPlan {
    pub fn new(model: &SpinModel, dt: f64, n_steps: usize) -> Result<Self> {
        check_dt(dt)?;
        model.validate()?;
        Ok(TrotterPlan { dt, term_order: model.active_terms(), n_steps })
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    Ok(())
}

/// exp(-i (a XX + b YY + c ZZ)) with three CNOTs. The three terms commute,
/// so the fused block equals the ordered product of their exponentials.
fn push_coupling_block(circ: &mut Circuit, a: f64, b: f64, c: f64) -> Result<()> {
    circ.push(GateOp::rz(1, FRAC_PI_2))?;
    circ.push(GateOp::cnot(1, 0))?;
    circ.push(GateOp::rz(0, 2.0 * c + FRAC_PI_2))?;
    circ.push(GateOp::ry(1, 2.0 * a + FRAC_PI_2))?;
    circ.push(GateOp::cnot(0, 1))?;
    circ.push(GateOp::ry(1, -2.0 * b - FRAC_PI_2))?;
    circ.push(GateOp::cnot(1, 0))?;
    circ.push(GateOp::rz(0, -FRAC_PI_2))?;
    circ.global_phase += FRAC_PI_4;
    Ok(())
}

/// One step of prod_j exp(-i H_j dt) in the order XX, YY, ZZ, field.
pub fn trotter_step_circuit(model: &SpinModel, dt: f64) -> Result<Circuit> {
    let plan = TrotterPlan::new(model, dt, 1)?;
    let mut circ = Circuit::new(2)?;
    let coupled = plan.term_order.iter().any(|t| *t != Term::Field);
    if coupled {
        push_coupling_block(&mut circ, model.jxx * dt, model.jyy * dt, model.jzz * dt)?;
    }
    if plan.term_order.contains(&Term::Field) {
        // exp(-i h dt Z) = Rz(2 h dt)
        circ.push(GateOp::rz(0, 2.0 * model.h * dt))?;
        circ.push(GateOp::rz(1, 2.0 * model.h * dt))?;
    }
    Ok(circ)
}

/// `n_steps` repetitions of the step circuit.
pub fn trotter_evolution(model: &SpinModel, dt: f64, n_steps: usize) -> Result<Circuit> {
    Ok(trotter_step_circuit(model, dt)?.repeat(n_steps))
}

/// Dense unitary of `n_steps` Trotter steps.
pub fn trotter_unitary(model: &SpinModel, dt: f64, n_steps: usize) -> Result<CMatrix> {
    let step = trotter_step_circuit(model, dt)?.unitary()?;
    Ok(step.pow(n_steps as u32))
}

/// ||U_exact(N dt) - U_step^N||_2.
pub fn trotter_error(model: &SpinModel, dt: f64, n_steps: usize) -> Result<f64> {
    let approx = trotter_unitary(model, dt, n_steps)?;
    let exact = exact_evolution(model, dt * n_steps as f64);
    Ok(spectral_norm(&(exact - approx)))
}
