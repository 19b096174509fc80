use num_complex::Complex64;
use rand::RngCore;

use super::{parity_estimate, recorded_distribution, z_measure, Estimate, EstimatorConfig, SiteOp};
use crate::error::{Error, Result};
use crate::statevector::{Circuit, GateOp, QuantumState, MAX_QUBITS};

/// Hadamard test on ancilla qubit 0 with the system shifted up by one.
///
/// The ancilla's Z expectation is Re (b = 0) or Im (b = 1) of
/// <psi| U^dagger s^a_i U s^b_j |psi>.
pub fn hadamard_test_circuit(evolution: &Circuit, alpha: SiteOp, beta: SiteOp, b: u8) -> Result<Circuit> {
    let n = evolution.n_qubits();
    if n + 1 > MAX_QUBITS {
        return Err(Error::MissingAncilla(n));
    }
    if b > 1 {
        return Err(Error::InvalidArgument(format!("Hadamard-test selector b = {b}")));
    }
    for op in [alpha, beta] {
        if op.site >= n {
            return Err(Error::TargetOutOfRange { index: op.site, n_qubits: n });
        }
    }
    let map: Vec<usize> = (1..=n).collect();
    let mut circ = Circuit::new(n + 1)?;
    circ.push(GateOp::h(0))?;
    circ.push(GateOp::controlled_pauli(0, beta.site + 1, beta.axis.pauli()))?;
    circ.append(&evolution.embedded(&map, n + 1)?)?;
    circ.push(GateOp::controlled_pauli(0, alpha.site + 1, alpha.axis.pauli()))?;
    if b == 1 {
        circ.push(GateOp::sdg(0))?;
    }
    circ.push(GateOp::h(0))?;
    circ.push(z_measure(n + 1, 0)?)?;
    Ok(circ)
}

/// Indirect estimate: one Hadamard test per component, each with the full
/// shot budget.
pub fn indirect_estimate(
    evolution: &Circuit,
    alpha: SiteOp,
    beta: SiteOp,
    state0: &QuantumState,
    config: &EstimatorConfig,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    let input = QuantumState::zero(1)?.tensor(state0)?;
    let mut parts = [(0.0, 0.0); 2];
    for (b, part) in parts.iter_mut().enumerate() {
        let circ = hadamard_test_circuit(evolution, alpha, beta, b as u8)?;
        let (dist, confusions) = recorded_distribution(&input, &circ, config.noise.as_ref())?;
        *part = parity_estimate(&dist, &confusions, config.shots, config.mitigation, rng)?;
    }
    Ok(Estimate {
        value: Complex64::new(parts[0].0, parts[1].0),
        re_std_error: parts[0].1,
        im_std_error: parts[1].1,
    })
}
