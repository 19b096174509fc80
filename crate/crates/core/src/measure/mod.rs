//! Estimators for C = <psi| U^dagger s^a_i U s^b_j |psi>: the ancilla-based
//! Hadamard test and the ancilla-free direct scheme, with optional
//! finite-shot sampling, noise and readout mitigation.

mod direct;
mod hadamard;
mod mitigation;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use direct::{direct_circuits, direct_estimate, DirectCircuits};
pub use hadamard::{hadamard_test_circuit, indirect_estimate};
pub use mitigation::{build_calibration_matrix, mitigate, mitigate_counts, CalibrationMatrix};

use crate::error::{Error, Result};
use crate::statevector::{
    apply_readout, enumerate_branches, sample_distribution, Axis, Circuit, Confusion, GateKind, GateOp, NoiseModel,
    Pauli, PauliString, QuantumState,
};

/// Pauli operator on one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteOp {
    pub axis: Axis,
    pub site: usize,
}

impl SiteOp {
    pub fn new(axis: Axis, site: usize) -> Self {
        SiteOp { axis, site }
    }

    pub fn pauli_string(&self, n_qubits: usize) -> Result<PauliString> {
        PauliString::single(n_qubits, self.site, self.axis.pauli())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Indirect,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evolution {
    Exact,
    Trotter,
    Reff,
}

macro_rules! text_enum {
    ($ty:ident { $($variant:ident => $text:literal),* }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $text),* })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)*
                    _ => Err(Error::InvalidArgument(format!("unknown {} {s:?}", stringify!($ty).to_lowercase()))),
                }
            }
        }
    };
}

text_enum!(Scheme { Indirect => "indirect", Direct => "direct" });
text_enum!(Evolution { Exact => "exact", Trotter => "trotter", Reff => "reff" });

/// Exact expectations, or a finite number of shots per estimated component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Sampled(u64),
}

impl Shots {
    pub fn validate(self) -> Result<Self> {
        match self {
            Shots::Sampled(0) => Err(Error::InvalidArgument("shots must be at least 1".into())),
            s => Ok(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub scheme: Scheme,
    pub evolution: Evolution,
    pub shots: Shots,
    pub mitigation: bool,
    pub noise: Option<NoiseModel>,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            scheme: Scheme::Direct,
            evolution: Evolution::Exact,
            shots: Shots::Exact,
            mitigation: false,
            noise: None,
            seed: 0,
        }
    }
}

/// Complex estimate with per-component standard errors (zero in exact mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub re_std_error: f64,
    pub im_std_error: f64,
}

/// Estimates the correlator with the configured scheme.
pub fn estimate(
    evolution: &Circuit,
    alpha: SiteOp,
    beta: SiteOp,
    state0: &QuantumState,
    config: &EstimatorConfig,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    match config.scheme {
        Scheme::Indirect => indirect_estimate(evolution, alpha, beta, state0, config, rng),
        Scheme::Direct => direct_estimate(evolution, alpha, beta, state0, config, rng),
    }
}

/// Gates rotating the eigenbasis of `axis` onto the computational basis.
pub(crate) fn basis_change(axis: Axis, qubit: usize) -> Vec<GateOp> {
    match axis {
        Axis::X => vec![GateOp::h(qubit)],
        Axis::Y => vec![GateOp::sdg(qubit), GateOp::h(qubit)],
        Axis::Z => vec![],
    }
}

pub(crate) fn z_measure(n_qubits: usize, qubit: usize) -> Result<GateOp> {
    Ok(GateOp::measure(PauliString::single(n_qubits, qubit, Pauli::Z)?))
}

/// Joint distribution of the recorded bits of `circuit` (bit = 0 for
/// outcome +1; the first measurement is the most significant bit) and the
/// readout map of each bit.
pub(crate) fn recorded_distribution(
    state0: &QuantumState,
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
) -> Result<(Vec<f64>, Vec<Confusion>)> {
    let confusions: Vec<Confusion> = circuit
        .ops()
        .iter()
        .filter_map(|op| match &op.kind {
            GateKind::Measure { observable } => {
                let q = observable.support().first().copied().unwrap_or(0);
                Some(noise.map_or(Confusion::identity(), |n| n.readout(q)))
            }
            _ => None,
        })
        .collect();
    let n_bits = confusions.len();
    let mut dist = vec![0.0; 1 << n_bits];
    for branch in enumerate_branches(state0, circuit, noise)? {
        let index = branch.outcomes.iter().fold(0usize, |acc, &o| (acc << 1) | usize::from(o < 0));
        dist[index] += branch.probability;
    }
    Ok((dist, confusions))
}

/// Mean and standard error of the parity (-1)^(sum of bits) after readout,
/// optional sampling and optional mitigation.
pub(crate) fn parity_estimate(
    dist: &[f64],
    confusions: &[Confusion],
    shots: Shots,
    mitigation: bool,
    rng: &mut dyn RngCore,
) -> Result<(f64, f64)> {
    let (observed, n) = match shots.validate()? {
        Shots::Exact => (apply_readout(dist, confusions)?, None),
        Shots::Sampled(count) => (sample_distribution(dist, count, confusions, rng)?.frequencies(), Some(count)),
    };
    let probs = if mitigation {
        let cal = build_calibration_matrix(confusions, shots, rng)?;
        mitigate(&observed, &cal)?
    } else {
        observed
    };
    let mean: f64 = probs
        .iter()
        .enumerate()
        .map(|(k, p)| if k.count_ones() % 2 == 0 { *p } else { -*p })
        .sum();
    let se = n.map_or(0.0, |n| ((1.0 - mean * mean).max(0.0) / n as f64).sqrt());
    Ok((mean, se))
}
