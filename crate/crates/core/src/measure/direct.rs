use std::f64::consts::FRAC_PI_4;

use log::warn;
use num_complex::Complex64;
use rand::RngCore;

use super::{basis_change, parity_estimate, recorded_distribution, z_measure, Estimate, EstimatorConfig, Shots, SiteOp};
use crate::error::{Error, Result};
use crate::statevector::{involution_exp, Circuit, GateOp, QuantumState};

const BRANCH_WARN: f64 = 1e-12;

/// Ancilla-free circuits of the direct scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectCircuits {
    /// Mid-circuit measurement of s^b_j, evolution, readout of s^a_i.
    pub real: Circuit,
    /// exp(+i pi/4 s^b_j), evolution, readout of s^a_i.
    pub imag_plus: Circuit,
    /// exp(-i pi/4 s^b_j), evolution, readout of s^a_i.
    pub imag_minus: Circuit,
}

impl DirectCircuits {
    pub fn two_qubit_count(&self) -> usize {
        [&self.real, &self.imag_plus, &self.imag_minus]
            .iter()
            .map(|c| c.two_qubit_count())
            .max()
            .unwrap_or(0)
    }
}

fn with_readout(prefix: Circuit, evolution: &Circuit, alpha: SiteOp) -> Result<Circuit> {
    let n = evolution.n_qubits();
    let mut circ = prefix;
    circ.append(evolution)?;
    for op in basis_change(alpha.axis, alpha.site) {
        circ.push(op)?;
    }
    circ.push(z_measure(n, alpha.site)?)?;
    Ok(circ)
}

pub fn direct_circuits(evolution: &Circuit, alpha: SiteOp, beta: SiteOp) -> Result<DirectCircuits> {
    let n = evolution.n_qubits();
    for op in [alpha, beta] {
        if op.site >= n {
            return Err(Error::TargetOutOfRange { index: op.site, n_qubits: n });
        }
    }
    let g = beta.pauli_string(n)?;
    let real = with_readout(Circuit::new(n)?.with(GateOp::measure(g))?, evolution, alpha)?;
    let local = beta.axis.pauli().matrix();
    let kick = |sign: f64| -> Result<Circuit> {
        let op = GateOp::single("phase_kick", beta.site, involution_exp(&local, sign * FRAC_PI_4))?;
        with_readout(Circuit::new(n)?.with(op)?, evolution, alpha)
    };
    Ok(DirectCircuits { real, imag_plus: kick(1.0)?, imag_minus: kick(-1.0)? })
}

/// Direct estimate of <psi| U^dagger s^a_i U s^b_j |psi>.
///
/// Re = p(+) <O>_+ - p(-) <O>_- from the product of the mid-circuit and
/// final outcomes; Im = -(<O>_{+pi/4} - <O>_{-pi/4}) / 2. With sampling the
/// real circuit receives `shots` and each phase-kick circuit half of them.
pub fn direct_estimate(
    evolution: &Circuit,
    alpha: SiteOp,
    beta: SiteOp,
    state0: &QuantumState,
    config: &EstimatorConfig,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    let circuits = direct_circuits(evolution, alpha, beta)?;
    let noise = config.noise.as_ref();

    let (dist, confusions) = recorded_distribution(state0, &circuits.real, noise)?;
    for (outcome, p) in [("+1", dist[0] + dist[1]), ("-1", dist[2] + dist[3])] {
        if p < BRANCH_WARN {
            warn!("mid-circuit branch {outcome} has probability {p:.3e}; it contributes nothing");
        }
    }
    let (re, re_se) = parity_estimate(&dist, &confusions, config.shots, config.mitigation, rng)?;

    let half = match config.shots {
        Shots::Exact => Shots::Exact,
        Shots::Sampled(n) => Shots::Sampled((n / 2).max(1)),
    };
    let mut kicked = [(0.0, 0.0); 2];
    for (slot, circ) in kicked.iter_mut().zip([&circuits.imag_plus, &circuits.imag_minus]) {
        let (dist, confusions) = recorded_distribution(state0, circ, noise)?;
        *slot = parity_estimate(&dist, &confusions, half, config.mitigation, rng)?;
    }
    let im = -0.5 * (kicked[0].0 - kicked[1].0);
    let im_se = 0.5 * (kicked[0].1.powi(2) + kicked[1].1.powi(2)).sqrt();
    Ok(Estimate { value: Complex64::new(re, im), re_std_error: re_se, im_std_error: im_se })
}
