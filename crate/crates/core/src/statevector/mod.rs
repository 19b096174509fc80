//! Dense few-qubit simulator.
//!
//! Qubit 0 is the leftmost tensor factor, so the basis index of
//! `|b0 b1 ... b(n-1)>` has `b0` as its most significant bit, and
//! `|0> = |up> = (1, 0)^T`. Noisy evolution runs on density matrices;
//! sampling noise is only added by [`sample_counts`].

mod circuit;
mod gate;
mod noise;
mod pauli;
mod state;

use std::fmt;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore};

pub use circuit::Circuit;
pub use gate::{check_involution, involution_exp, GateKind, GateOp};
pub use noise::{Confusion, NoiseModel, NoiseSpec};
pub use pauli::{Axis, Pauli, PauliString};
pub use state::{QuantumState, Repr};

use crate::error::{Error, Result};
use crate::linalg::{c, embed, CMatrix};

pub const MAX_QUBITS: usize = 3;

const BRANCH_TOL: f64 = 1e-14;
const INVOLUTION_TOL: f64 = 1e-10;

/// Result of running a circuit with mid-circuit measurements.
#[derive(Debug, Clone)]
pub struct Execution {
    pub state: QuantumState,
    /// One +/-1 entry per measurement, in circuit order.
    pub outcomes: Vec<i8>,
}

/// Applies `circuit` to `state`.
///
/// With `noise`, every unitary gate is followed by a depolarizing channel on
/// its qubits (`p1` for one-qubit gates, `p2` jointly for two-qubit gates)
/// and the state is promoted to a density matrix. Measurements need `rng`.
pub fn apply_circuit(
    state: &QuantumState,
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    rng: Option<&mut dyn RngCore>,
) -> Result<QuantumState> {
    run_circuit(state, circuit, noise, rng).map(|e| e.state)
}

/// Like [`apply_circuit`] but also returns the sampled measurement record.
pub fn run_circuit(
    state: &QuantumState,
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    mut rng: Option<&mut dyn RngCore>,
) -> Result<Execution> {
    check_width(state, circuit)?;
    let mut current = initial_repr(state, circuit, noise);
    let mut outcomes = Vec::new();
    for op in circuit.ops() {
        match &op.kind {
            GateKind::Measure { observable } => {
                let rng = rng.as_deref_mut().ok_or(Error::MissingRng)?;
                let (outcome, post, _) = project_measure(&current, &observable.matrix(), rng)?;
                outcomes.push(outcome);
                current = post;
            }
            _ => current = apply_op(current, op, noise)?,
        }
    }
    Ok(Execution { state: with_phase(current, circuit.global_phase), outcomes })
}

/// One branch of a circuit's measurement tree.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<i8>,
    pub probability: f64,
    /// Normalized post-measurement state at the end of the circuit.
    pub state: QuantumState,
}

/// Deterministically enumerates every measurement branch of `circuit`.
/// Branches whose probability falls below 1e-14 are dropped.
pub fn enumerate_branches(
    state: &QuantumState,
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
) -> Result<Vec<Branch>> {
    check_width(state, circuit)?;
    let mut branches = vec![Branch {
        outcomes: Vec::new(),
        probability: 1.0,
        state: initial_repr(state, circuit, noise),
    }];
    for op in circuit.ops() {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for b in branches {
            match &op.kind {
                GateKind::Measure { observable } => {
                    let g = observable.matrix();
                    for outcome in [1i8, -1] {
                        match project_branch(&b.state, &g, outcome) {
                            Ok((post, p)) => {
                                let mut outcomes = b.outcomes.clone();
                                outcomes.push(outcome);
                                next.push(Branch { outcomes, probability: b.probability * p, state: post });
                            }
                            Err(Error::DegenerateBranch { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                _ => next.push(Branch { state: apply_op(b.state, op, noise)?, ..b }),
            }
        }
        branches = next;
    }
    Ok(branches
        .into_iter()
        .map(|b| Branch { state: with_phase(b.state, circuit.global_phase), ..b })
        .collect())
}

fn check_width(state: &QuantumState, circuit: &Circuit) -> Result<()> {
    if state.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch { expected: circuit.n_qubits(), found: state.n_qubits() });
    }
    Ok(())
}

fn initial_repr(state: &QuantumState, circuit: &Circuit, noise: Option<&NoiseModel>) -> QuantumState {
    let needs_mixed = noise.is_some_and(NoiseModel::has_gate_noise)
        || circuit.ops().iter().any(|op| matches!(op.kind, GateKind::Depolarizing { .. }));
    if needs_mixed {
        state.to_mixed()
    } else {
        state.clone()
    }
}

fn with_phase(state: QuantumState, phase: f64) -> QuantumState {
    match state.repr() {
        Repr::Pure(v) if phase != 0.0 => {
            let n = state.n_qubits();
            QuantumState::from_repr(n, Repr::Pure(v * Complex64::from_polar(1.0, phase)))
        }
        _ => state,
    }
}

fn apply_op(state: QuantumState, op: &GateOp, noise: Option<&NoiseModel>) -> Result<QuantumState> {
    let n = state.n_qubits();
    match &op.kind {
        GateKind::Depolarizing { targets, p } => Ok(depolarize(&state, targets, *p)),
        GateKind::Measure { .. } => Err(Error::MissingRng),
        _ => {
            let u = op.full_matrix(n).expect("unitary gate");
            let evolved = apply_unitary(&state, &u);
            match noise {
                Some(model) if model.has_gate_noise() => {
                    let p = if op.is_two_qubit() { model.p2() } else { model.p1() };
                    if p > 0.0 {
                        Ok(depolarize(&evolved, &op.targets(), p))
                    } else {
                        Ok(evolved)
                    }
                }
                _ => Ok(evolved),
            }
        }
    }
}

/// U|psi> or U rho U^dagger with a full-register matrix.
pub fn apply_unitary(state: &QuantumState, u: &CMatrix) -> QuantumState {
    let repr = match state.repr() {
        Repr::Pure(v) => Repr::Pure(u * v),
        Repr::Mixed(rho) => Repr::Mixed(u * rho * u.adjoint()),
    };
    QuantumState::from_repr(state.n_qubits(), repr)
}

/// rho -> (1 - p) rho + p (I/d on `targets`) (x) Tr_targets(rho),
/// evaluated as a uniform Pauli twirl over the targets.
pub fn depolarize(state: &QuantumState, targets: &[usize], p: f64) -> QuantumState {
    let n = state.n_qubits();
    let rho = state.density_matrix();
    let k = targets.len();
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut twirl = CMatrix::zeros(rho.nrows(), rho.ncols());
    for code in 0..4usize.pow(k as u32) {
        let local = (0..k).fold(CMatrix::identity(1, 1), |acc, pos| {
            let digit = (code / 4usize.pow((k - 1 - pos) as u32)) % 4;
            acc.kronecker(&paulis[digit].matrix())
        });
        let full = embed(&local, targets, n);
        twirl += &full * &rho * full.adjoint();
    }
    let scale = p / 4f64.powi(k as i32);
    let mixed = rho * c(1.0 - p, 0.0) + twirl * c(scale, 0.0);
    QuantumState::from_repr(n, Repr::Mixed(mixed))
}

/// Post-measurement state and probability of outcome `outcome` (+1 or -1)
/// of the Hermitian involution `g`.
pub fn project_branch(state: &QuantumState, g: &CMatrix, outcome: i8) -> Result<(QuantumState, f64)> {
    check_involution(g, INVOLUTION_TOL)?;
    let dim = state.dim();
    if g.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: g.nrows() });
    }
    let sign = if outcome >= 0 { 1.0 } else { -1.0 };
    let proj = (CMatrix::identity(dim, dim) + g * c(sign, 0.0)) * c(0.5, 0.0);
    let (repr, prob) = match state.repr() {
        Repr::Pure(v) => {
            let w = &proj * v;
            let prob = w.norm_squared();
            (Repr::Pure(w / c(prob.sqrt().max(f64::MIN_POSITIVE), 0.0)), prob)
        }
        Repr::Mixed(rho) => {
            let m = &proj * rho * &proj;
            let prob = m.trace().re;
            (Repr::Mixed(m / c(prob.max(f64::MIN_POSITIVE), 0.0)), prob)
        }
    };
    if prob < BRANCH_TOL {
        return Err(Error::DegenerateBranch { outcome: sign as i8, probability: prob });
    }
    Ok((QuantumState::from_repr(state.n_qubits(), repr), prob))
}

/// Samples a projective measurement of `g`: returns the outcome, the
/// normalized post-measurement state and the probability of that outcome.
pub fn project_measure(
    state: &QuantumState,
    g: &CMatrix,
    rng: &mut dyn RngCore,
) -> Result<(i8, QuantumState, f64)> {
    check_involution(g, INVOLUTION_TOL)?;
    let p_plus = ((state.expectation_matrix(g)?.re + state.trace()) / 2.0).clamp(0.0, 1.0);
    let mut outcome = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
    let sampled = if outcome == 1 { p_plus } else { 1.0 - p_plus };
    if sampled < BRANCH_TOL {
        outcome = -outcome;
    }
    let (post, prob) = project_branch(state, g, outcome)?;
    Ok((outcome, post, prob))
}

/// Histogram over measured bitstrings; index 0 of a bitstring is the
/// first measured bit (most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    n_bits: usize,
    counts: Vec<u64>,
}

impl Counts {
    pub fn new(n_bits: usize) -> Self {
        Counts { n_bits, counts: vec![0; 1 << n_bits] }
    }

    pub fn from_vec(n_bits: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1 << n_bits {
            return Err(Error::DimensionMismatch { expected: 1 << n_bits, found: counts.len() });
        }
        Ok(Counts { n_bits, counts })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, bitstring: &str) -> Option<u64> {
        if bitstring.len() != self.n_bits {
            return None;
        }
        usize::from_str_radix(bitstring, 2).ok().map(|i| self.counts[i])
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts.iter().map(|&n| n as f64 / total).collect()
    }

    pub fn bitstring(&self, index: usize) -> String {
        format!("{:0width$b}", index, width = self.n_bits)
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, n)| format!("{}:{}", self.bitstring(i), n))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn bit(index: usize, pos: usize, n_bits: usize) -> usize {
    (index >> (n_bits - 1 - pos)) & 1
}

/// Distribution of read bitstrings given the true distribution `probs`
/// and independent per-bit readout maps.
pub fn apply_readout(probs: &[f64], readout: &[Confusion]) -> Result<Vec<f64>> {
    let n_bits = readout.len();
    if probs.len() != 1 << n_bits {
        return Err(Error::DimensionMismatch { expected: 1 << n_bits, found: probs.len() });
    }
    let dim = probs.len();
    let mut out = vec![0.0; dim];
    for (read, slot) in out.iter_mut().enumerate() {
        *slot = (0..dim)
            .map(|actual| {
                let flip: f64 = (0..n_bits)
                    .map(|k| readout[k].prob(bit(read, k, n_bits), bit(actual, k, n_bits)))
                    .product();
                flip * probs[actual]
            })
            .sum();
    }
    Ok(out)
}

/// Draws `shots` samples from `probs` and passes each bit through its
/// readout map.
pub fn sample_distribution(
    probs: &[f64],
    shots: u64,
    readout: &[Confusion],
    rng: &mut dyn RngCore,
) -> Result<Counts> {
    let n_bits = readout.len();
    if probs.len() != 1 << n_bits {
        return Err(Error::DimensionMismatch { expected: 1 << n_bits, found: probs.len() });
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let weights: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidArgument(format!("invalid probability vector: {e}")))?;
    let mut counts = Counts::new(n_bits);
    for _ in 0..shots {
        let actual = dist.sample(rng);
        let mut read = 0usize;
        for (k, conf) in readout.iter().enumerate() {
            let b = bit(actual, k, n_bits);
            let flipped = rng.gen::<f64>() < conf.prob(1 - b, b);
            let r = if flipped { 1 - b } else { b };
            read = (read << 1) | r;
        }
        counts.counts[read] += 1;
    }
    Ok(counts)
}

/// Measures every qubit of `state` `shots` times in the computational basis.
pub fn sample_counts(
    state: &QuantumState,
    shots: u64,
    readout: &[Confusion],
    rng: &mut dyn RngCore,
) -> Result<Counts> {
    if readout.len() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: readout.len() });
    }
    sample_distribution(&state.probabilities(), shots, readout, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn singlet() -> QuantumState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::from_amplitudes(nalgebra::DVector::from_vec(vec![
            c(0.0, 0.0),
            c(s, 0.0),
            c(-s, 0.0),
            c(0.0, 0.0),
        ]))
        .unwrap()
    }

    #[test]
    fn identity_circuit_leaves_state() {
        let s = singlet();
        let out = apply_circuit(&s, &Circuit::new(2).unwrap(), None, None).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn x_flips_qubit_zero() {
        let s = QuantumState::zero(2).unwrap();
        let c = Circuit::new(2).unwrap().with(GateOp::pauli(0, Pauli::X)).unwrap();
        let out = apply_circuit(&s, &c, None, None).unwrap();
        assert_eq!(out, QuantumState::basis(2, 0b10).unwrap());
    }

    #[test]
    fn singlet_expectations() {
        let s = singlet();
        for label in ["ZZ", "XX", "YY"] {
            let v = s.expectation_pauli(&label.parse().unwrap()).unwrap();
            assert!((v + 1.0).abs() < 1e-14, "{label}: {v}");
        }
        let z = QuantumState::zero(1).unwrap();
        assert_eq!(z.expectation_pauli(&"Z".parse().unwrap()).unwrap(), 1.0);
        assert!(s.expectation_pauli(&"Z".parse().unwrap()).is_err());
    }

    #[test]
    fn measurement_without_rng_fails() {
        let c = Circuit::new(1)
            .unwrap()
            .with(GateOp::measure("Z".parse().unwrap()))
            .unwrap();
        let s = QuantumState::zero(1).unwrap();
        assert!(matches!(apply_circuit(&s, &c, None, None), Err(Error::MissingRng)));
    }

    #[test]
    fn projective_measurement_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = Pauli::Z.matrix();
        let (o, post, p) = project_measure(&QuantumState::zero(1).unwrap(), &z, &mut rng).unwrap();
        assert_eq!((o, p), (1, 1.0));
        assert_eq!(post, QuantumState::zero(1).unwrap());

        let s = singlet();
        let x2 = "IX".parse::<PauliString>().unwrap().matrix();
        let (_, p_plus) = project_branch(&s, &x2, 1).unwrap();
        let (_, p_minus) = project_branch(&s, &x2, -1).unwrap();
        assert!((p_plus - 0.5).abs() < 1e-14 && (p_minus - 0.5).abs() < 1e-14);

        let z1 = "ZI".parse::<PauliString>().unwrap().matrix();
        let (post, p) = project_branch(&s, &z1, 1).unwrap();
        assert!((p - 0.5).abs() < 1e-14);
        assert!((post.overlap(&QuantumState::basis(2, 0b01).unwrap()).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            project_branch(&QuantumState::zero(1).unwrap(), &z, -1),
            Err(Error::DegenerateBranch { .. })
        ));
    }

    #[test]
    fn depolarizing_keeps_trace_and_hermiticity() {
        let s = singlet().to_mixed();
        let out = depolarize(&s, &[0, 1], 0.3);
        let rho = out.density_matrix();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(max_abs(&(&rho - rho.adjoint())) < 1e-12);
        // full two-qubit depolarizing scales traceless parts by (1 - p)
        let zz = out.expectation_pauli(&"ZZ".parse().unwrap()).unwrap();
        assert!((zz + 0.7).abs() < 1e-12);
    }

    #[test]
    fn counts_from_zero_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = QuantumState::zero(2).unwrap();
        let counts = sample_counts(&s, 8000, &[Confusion::identity(); 2], &mut rng).unwrap();
        assert_eq!(counts.get("00"), Some(8000));
        assert_eq!(counts.total(), 8000);
    }

    #[test]
    fn readout_distribution_is_tensor_product() {
        let conf = Confusion::symmetric(0.02).unwrap();
        let noisy = apply_readout(&[1.0, 0.0, 0.0, 0.0], &[conf, conf]).unwrap();
        assert!((noisy[0] - 0.98 * 0.98).abs() < 1e-15);
        assert!((noisy[1] - 0.98 * 0.02).abs() < 1e-15);
        assert!((noisy[3] - 0.02 * 0.02).abs() < 1e-15);
    }
}
