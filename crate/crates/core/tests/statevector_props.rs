use dimer_core::linalg::{c, max_abs, CMatrix};
use dimer_core::model::{prepare_state, SpinModel, Term};
use dimer_core::statevector::*;
use dimer_core::trotter::trotter_step_circuit;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_gate(kind: u8, a: usize, b: usize, angle: f64) -> GateOp {
    let b = if a == b { (a + 1) % 2 } else { b };
    match kind % 6 {
        0 => GateOp::rx(a, angle),
        1 => GateOp::ry(a, angle),
        2 => GateOp::rz(a, angle),
        3 => GateOp::h(a),
        4 => GateOp::cnot(a, b),
        _ => GateOp::controlled_pauli(a, b, Pauli::Y),
    }
}

fn circuit_from(spec: &[(u8, usize, usize, f64)]) -> Circuit {
    let mut circ = Circuit::new(2).unwrap();
    for &(k, a, b, t) in spec {
        circ.push(random_gate(k, a, b, t)).unwrap();
    }
    circ
}

fn gate_specs(len: usize) -> impl Strategy<Value = Vec<(u8, usize, usize, f64)>> {
    prop::collection::vec((0u8..6, 0usize..2, 0usize..2, -3.2f64..3.2), len)
}

#[test]
fn norm_survives_a_thousand_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    use rand::Rng;
    let spec: Vec<_> = (0..1000)
        .map(|_| (rng.gen_range(0..6u8), rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(-3.2..3.2)))
        .collect();
    let circ = circuit_from(&spec);
    let out = apply_circuit(&prepare_state("singlet").unwrap(), &circ, None, None).unwrap();
    assert!((out.trace() - 1.0).abs() < 1e-10);
    let mixed = apply_circuit(&prepare_state("singlet").unwrap().to_mixed(), &circ, None, None).unwrap();
    assert!((mixed.trace() - 1.0).abs() < 1e-10);
}

#[test]
fn trotter_step_on_singlet_matches_term_product() {
    let model = SpinModel::heisenberg(1.0, 1.0);
    let dt = 0.3;
    let circ = trotter_step_circuit(&model, dt).unwrap();
    let singlet = prepare_state("singlet").unwrap();
    let out = apply_circuit(&singlet, &circ, None, None).unwrap();
    let product = Term::ALL.iter().fold(CMatrix::identity(4, 4), |acc, &t| {
        (t.operator() * c(0.0, -model.coefficient(t) * dt)).exp() * acc
    });
    let want = product * singlet.amplitudes().unwrap();
    assert!((out.amplitudes().unwrap() - want).norm() < 1e-10);
}

#[test]
fn xx_on_singlet_by_matrix_vector_product() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = DVector::from_vec(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]);
    let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let xx = x.kronecker(&x);
    let oracle = v.dotc(&(xx * &v)).re;
    let singlet = QuantumState::from_amplitudes(v).unwrap();
    assert!((singlet.expectation_pauli(&"XX".parse().unwrap()).unwrap() - oracle).abs() < 1e-14);
    assert!((oracle + 1.0).abs() < 1e-14);
}

#[test]
fn malformed_pauli_label() {
    assert!(matches!("XQ".parse::<PauliString>(), Err(dimer_core::Error::MalformedPauli(_))));
}

/// Largest |z| score of multinomial counts against expected probabilities.
fn max_z(counts: &Counts, probs: &[f64]) -> f64 {
    let n = counts.total() as f64;
    counts
        .as_slice()
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0 && p < 1.0)
        .map(|(&k, &p)| (k as f64 - n * p).abs() / (n * p * (1.0 - p)).sqrt())
        .fold(0.0, f64::max)
}

#[test]
fn readout_flips_follow_binomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let conf = Confusion::symmetric(0.02).unwrap();
    let counts = sample_counts(&QuantumState::zero(2).unwrap(), 8000, &[conf, conf], &mut rng).unwrap();
    let p00 = 0.98f64 * 0.98;
    let expected = 8000.0 * p00;
    assert!((expected - 7683.2).abs() < 1e-9);
    let sigma = (8000.0 * p00 * (1.0 - p00)).sqrt();
    assert!((counts.get("00").unwrap() as f64 - expected).abs() < 5.0 * sigma);
}

#[test]
fn uniform_superposition_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let circ = Circuit::new(2).unwrap().with(GateOp::h(0)).unwrap().with(GateOp::h(1)).unwrap();
    let plus = apply_circuit(&QuantumState::zero(2).unwrap(), &circ, None, None).unwrap();
    let counts = sample_counts(&plus, 8000, &[Confusion::identity(); 2], &mut rng).unwrap();
    assert_eq!(counts.total(), 8000);
    assert!(max_z(&counts, &[0.25; 4]) < 5.0);
}

#[test]
fn frequencies_converge_to_born_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let circ = Circuit::new(2).unwrap().with(GateOp::ry(0, 1.1)).unwrap().with(GateOp::cnot(0, 1)).unwrap();
    let state = apply_circuit(&QuantumState::zero(2).unwrap(), &circ, None, None).unwrap();
    let counts = sample_counts(&state, 200_000, &[Confusion::identity(); 2], &mut rng).unwrap();
    assert!(max_z(&counts, &state.probabilities()) < 5.0);
}

#[test]
fn noisy_run_promotes_to_density_matrix() {
    let noise = NoiseModel::new(0.01, 0.05, Confusion::identity()).unwrap();
    let circ = Circuit::new(2).unwrap().with(GateOp::h(0)).unwrap().with(GateOp::cnot(0, 1)).unwrap();
    let out = apply_circuit(&QuantumState::zero(2).unwrap(), &circ, Some(&noise), None).unwrap();
    assert!(!out.is_pure());
    let rho = out.density_matrix();
    assert!((rho.trace().re - 1.0).abs() < 1e-12);
    // Bell-state ZZ correlation shrinks by the two-qubit depolarizing factor only
    let zz = out.expectation_pauli(&"ZZ".parse().unwrap()).unwrap();
    assert!((zz - 0.95).abs() < 1e-12);
}

#[test]
fn sampled_mid_circuit_measurement_records_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let circ = Circuit::new(2)
        .unwrap()
        .with(GateOp::measure("ZI".parse().unwrap()))
        .unwrap()
        .with(GateOp::measure("IZ".parse().unwrap()))
        .unwrap();
    let singlet = prepare_state("singlet").unwrap();
    for _ in 0..20 {
        let run = run_circuit(&singlet, &circ, None, Some(&mut rng)).unwrap();
        assert_eq!(run.outcomes.len(), 2);
        assert_eq!(run.outcomes[0], -run.outcomes[1]);
    }
    let branches = enumerate_branches(&singlet, &circ, None).unwrap();
    assert_eq!(branches.len(), 2);
    assert!(branches.iter().all(|b| (b.probability - 0.5).abs() < 1e-14));
}

proptest! {
    #[test]
    fn pure_and_mixed_backends_agree(spec in gate_specs(30)) {
        let circ = circuit_from(&spec);
        let s = prepare_state("triplet0").unwrap();
        let pure = apply_circuit(&s, &circ, None, None).unwrap();
        let mixed = apply_circuit(&s.to_mixed(), &circ, None, None).unwrap();
        prop_assert!(max_abs(&(pure.density_matrix() - mixed.density_matrix())) < 1e-10);
    }

    #[test]
    fn depolarizing_is_a_valid_channel(spec in gate_specs(10), p in 0.0f64..1.0, two in any::<bool>()) {
        let circ = circuit_from(&spec);
        let s = apply_circuit(&QuantumState::zero(2).unwrap(), &circ, None, None).unwrap();
        let targets: Vec<usize> = if two { vec![0, 1] } else { vec![1] };
        let out = depolarize(&s, &targets, p);
        let rho = out.density_matrix();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(max_abs(&(&rho - rho.adjoint())) < 1e-12);
        prop_assert!(QuantumState::from_density(rho).is_ok());
    }

    #[test]
    fn measurement_probabilities_sum_to_one(spec in gate_specs(12), label in "[IXYZ]{2}") {
        let g: PauliString = label.parse().unwrap();
        prop_assume!(!g.support().is_empty());
        let circ = circuit_from(&spec);
        let s = apply_circuit(&QuantumState::zero(2).unwrap(), &circ, None, None).unwrap();
        let m = g.matrix();
        let p = |o: i8| project_branch(&s, &m, o).map(|(_, p)| p).unwrap_or(0.0);
        prop_assert!((p(1) + p(-1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectations_stay_in_range(spec in gate_specs(12), label in "[IXYZ]{2}") {
        let circ = circuit_from(&spec);
        let s = apply_circuit(&QuantumState::zero(2).unwrap(), &circ, None, None).unwrap();
        let v = s.expectation_pauli(&label.parse().unwrap()).unwrap();
        prop_assert!((-1.0..=1.0).contains(&v));
    }
}
