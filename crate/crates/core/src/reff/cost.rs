use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ansatz::ReffAnsatz;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

/// Product states with every qubit drawn independently from the Haar
/// measure on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    n_qubits: usize,
    states: Vec<CVector>,
}

fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> CVector {
    let mut draw = || c(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let v = DVector::from_vec(vec![draw(), draw()]);
    let norm = v.norm();
    v / c(norm, 0.0)
}

impl TrainingSet {
    pub fn haar_product<R: Rng + ?Sized>(n_qubits: usize, count: usize, rng: &mut R) -> Self {
        let states = (0..count)
            .map(|_| {
                (1..n_qubits).fold(haar_qubit(rng), |acc, _| acc.kronecker(&haar_qubit(rng)))
            })
            .collect();
        TrainingSet { n_qubits, states }
    }

    pub fn from_states(n_qubits: usize, states: Vec<CVector>) -> Result<Self> {
        for s in &states {
            if s.len() != 1 << n_qubits {
                return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: s.len() });
            }
            if (s.norm_squared() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidState(format!("training state norm {}", s.norm())));
            }
        }
        Ok(TrainingSet { n_qubits, states })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }
}

/// 1 - mean_j |<psi_j| V^dagger U |psi_j>|^2, clamped to [0, 1].
pub fn cost_of_unitary(target: &CMatrix, v: &CMatrix, training: &TrainingSet) -> Result<f64> {
    if training.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if target.shape() != v.shape() || target.nrows() != 1 << training.n_qubits() {
        return Err(Error::DimensionMismatch { expected: v.nrows(), found: target.nrows() });
    }
    let mean = training
        .states()
        .iter()
        .map(|psi| (v * psi).dotc(&(target * psi)).norm_sqr())
        .sum::<f64>()
        / training.len() as f64;
    Ok((1.0 - mean).clamp(0.0, 1.0))
}

pub fn cost(target: &CMatrix, ansatz: &ReffAnsatz, theta: &[f64], gamma: &[f64], training: &TrainingSet) -> Result<f64> {
    cost_of_unitary(target, &ansatz.unitary(theta, gamma, 1)?, training)
}

/// Mean fidelity |<psi|V^dagger U|psi>|^2 over `states`.
pub fn average_fidelity(target: &CMatrix, v: &CMatrix, states: &TrainingSet) -> Result<f64> {
    Ok(1.0 - cost_of_unitary(target, v, states)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Theta(usize),
    Gamma(usize),
}

/// Where a shifted copy of a parameter sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    /// The W factor.
    WLeft,
    /// The W^dagger factor.
    WRight,
    D,
}

/// One shifted cost evaluation: `weight * C(param at position + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftTerm {
    pub position: Position,
    pub shift: f64,
    pub weight: f64,
}

/// Shift-rule terms for `param`: four for a W angle (it appears in W and
/// in W^dagger), two for a D angle.
pub fn shift_plan(param: Param) -> Vec<ShiftTerm> {
    use std::f64::consts::FRAC_PI_2;
    let pair = |position| {
        [
            ShiftTerm { position, shift: FRAC_PI_2, weight: 0.5 },
            ShiftTerm { position, shift: -FRAC_PI_2, weight: -0.5 },
        ]
    };
    match param {
        Param::Theta(_) => pair(Position::WLeft).into_iter().chain(pair(Position::WRight)).collect(),
        Param::Gamma(_) => pair(Position::D).to_vec(),
    }
}

/// Gradient of [`cost`] from shifted cost evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.theta.iter().chain(&self.gamma).map(|g| g * g).sum::<f64>().sqrt()
    }
}

pub fn grad(target: &CMatrix, ansatz: &ReffAnsatz, theta: &[f64], gamma: &[f64], training: &TrainingSet) -> Result<Gradient> {
    let eval = |param: Param| -> Result<f64> {
        let mut total = 0.0;
        for term in shift_plan(param) {
            let (mut left, mut right, mut g) = (theta.to_vec(), theta.to_vec(), gamma.to_vec());
            match (param, term.position) {
                (Param::Theta(l), Position::WLeft) => left[l] += term.shift,
                (Param::Theta(l), Position::WRight) => right[l] += term.shift,
                (Param::Gamma(l), Position::D) => g[l] += term.shift,
                _ => unreachable!("shift plan pairs parameters with their positions"),
            }
            let v = ansatz.split_unitary(&left, &g, &right, 1)?;
            total += term.weight * cost_of_unitary(target, &v, training)?;
        }
        Ok(total)
    };
    if theta.len() != ansatz.n_theta() || gamma.len() != ansatz.n_gamma() {
        // surfaces the length error
        ansatz.unitary(theta, gamma, 1)?;
    }
    Ok(Gradient {
        theta: (0..theta.len()).map(|l| eval(Param::Theta(l))).collect::<Result<_>>()?,
        gamma: (0..gamma.len()).map(|l| eval(Param::Gamma(l))).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn training_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = TrainingSet::haar_product(2, 6, &mut rng);
        assert_eq!(set.len(), 6);
        for s in set.states() {
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cost_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = TrainingSet::haar_product(2, 6, &mut rng);
        let a = ReffAnsatz::dimer();
        let v = a.unitary(&[0.3], &[0.1, -0.4, 0.9], 1).unwrap();
        assert!(cost_of_unitary(&v, &v, &set).unwrap() < 1e-12);
        let shifted = &v * Complex64::from_polar(1.0, 1.234);
        assert!(cost_of_unitary(&shifted, &v, &set).unwrap() < 1e-12);
    }

    #[test]
    fn empty_training_set() {
        let set = TrainingSet::from_states(2, vec![]).unwrap();
        let id = CMatrix::identity(4, 4);
        assert!(matches!(cost_of_unitary(&id, &id, &set), Err(Error::EmptyTrainingSet)));
    }

    #[test]
    fn plan_shapes() {
        let theta = shift_plan(Param::Theta(0));
        assert_eq!(theta.len(), 4);
        assert_eq!(theta.iter().filter(|t| t.position == Position::WLeft).count(), 2);
        assert_eq!(theta.iter().filter(|t| t.position == Position::WRight).count(), 2);
        let gamma = shift_plan(Param::Gamma(2));
        assert_eq!(gamma.len(), 2);
        assert!(gamma.iter().all(|t| t.position == Position::D));
    }
}
