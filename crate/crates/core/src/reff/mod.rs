//! Variational fast-forwarding: V(theta, gamma) = W(theta) D(gamma) W(theta)^dagger
//! with diagonal D, trained against a short-time evolution so that
//! D(N gamma) reaches N steps at fixed depth.

mod ansatz;
mod cost;
mod params;
mod train;

pub use ansatz::{build_ansatz_unitary, ParamGate, ReffAnsatz, Template};
pub use cost::{
    average_fidelity, cost, cost_of_unitary, grad, shift_plan, Gradient, Param, Position, ShiftTerm, TrainingSet,
};
pub use params::{NamedValue, ReffParameters};
pub use train::{threshold, train, train_from, Init, OptimizerConfig, StopRule, TrainResult};
