use log::debug;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::ansatz::ReffAnsatz;
use super::cost::{cost, grad, TrainingSet};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// eps / (16 n_targ^2) - eps^2 / (4 (2^n + 1)).
pub fn threshold(epsilon: f64, n_targ: usize, n_qubits: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if n_targ == 0 {
        return Err(Error::InvalidArgument("n_targ must be at least 1".into()));
    }
    let dim = 2f64.powi(n_qubits as i32);
    let value = epsilon / (16.0 * (n_targ * n_targ) as f64) - epsilon * epsilon / (4.0 * (dim + 1.0));
    if value <= 0.0 {
        return Err(Error::InfeasibleThreshold(value));
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    TargetCost(f64),
    Threshold { epsilon: f64, n_targ: usize },
}

impl StopRule {
    pub fn value(&self, n_qubits: usize) -> Result<f64> {
        match *self {
            StopRule::TargetCost(c) => Ok(c),
            StopRule::Threshold { epsilon, n_targ } => threshold(epsilon, n_targ, n_qubits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Every parameter uniform in (-half_width, half_width).
    Uniform { half_width: f64 },
    Zeros,
    Explicit { theta: Vec<f64>, gamma: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub n_train: usize,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub max_halvings: usize,
    pub stop: StopRule,
    pub init: Init,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            n_train: 6,
            max_iterations: 5000,
            initial_step: 0.1,
            max_halvings: 40,
            stop: StopRule::TargetCost(1e-6),
            init: Init::Uniform { half_width: 0.1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub theta_opt: Vec<f64>,
    pub gamma_opt: Vec<f64>,
    pub final_cost: f64,
    pub iterations: usize,
    /// Cost before the first update followed by one entry per accepted step.
    pub cost_history: Vec<f64>,
    pub converged: bool,
    pub threshold: f64,
}

/// Draws the training set and the initial point from `rng`, then trains.
pub fn train(target: &CMatrix, ansatz: &ReffAnsatz, config: &OptimizerConfig, rng: &mut dyn RngCore) -> Result<TrainResult> {
    let training = TrainingSet::haar_product(ansatz.n_qubits(), config.n_train, rng);
    let (theta, gamma) = match &config.init {
        Init::Uniform { half_width } => {
            let w = *half_width;
            let mut draw = |n: usize| -> Vec<f64> {
                (0..n).map(|_| if w > 0.0 { rng.gen_range(-w..w) } else { 0.0 }).collect()
            };
            let theta = draw(ansatz.n_theta());
            (theta, draw(ansatz.n_gamma()))
        }
        Init::Zeros => (vec![0.0; ansatz.n_theta()], vec![0.0; ansatz.n_gamma()]),
        Init::Explicit { theta, gamma } => (theta.clone(), gamma.clone()),
    };
    train_from(target, ansatz, &training, theta, gamma, config)
}

/// Gradient descent with backtracking: each iteration starts from
/// `initial_step` and halves it until the cost does not increase.
pub fn train_from(
    target: &CMatrix,
    ansatz: &ReffAnsatz,
    training: &TrainingSet,
    mut theta: Vec<f64>,
    mut gamma: Vec<f64>,
    config: &OptimizerConfig,
) -> Result<TrainResult> {
    let thr = config.stop.value(ansatz.n_qubits())?;
    let mut current = cost(target, ansatz, &theta, &gamma, training)?;
    let mut history = vec![current];
    let mut iterations = 0;
    while current > thr && iterations < config.max_iterations {
        let g = grad(target, ansatz, &theta, &gamma, training)?;
        if g.norm() == 0.0 {
            break;
        }
        let mut step = config.initial_step;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let t: Vec<f64> = theta.iter().zip(&g.theta).map(|(p, d)| p - step * d).collect();
            let gm: Vec<f64> = gamma.iter().zip(&g.gamma).map(|(p, d)| p - step * d).collect();
            let trial = cost(target, ansatz, &t, &gm, training)?;
            if trial <= current {
                accepted = Some((t, gm, trial));
                break;
            }
            step *= 0.5;
        }
        let Some((t, gm, trial)) = accepted else {
            debug!("line search exhausted at cost {current:.3e}");
            break;
        };
        theta = t;
        gamma = gm;
        current = trial;
        history.push(current);
        iterations += 1;
    }
    debug!("training stopped after {iterations} iterations at cost {current:.3e}");
    Ok(TrainResult {
        theta_opt: theta,
        gamma_opt: gamma,
        final_cost: current,
        iterations,
        cost_history: history,
        converged: current <= thr,
        threshold: thr,
    })
}
