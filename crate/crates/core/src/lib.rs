//! Simulation of two-spin dimer correlation functions and dynamical
//! structure factors with exact, Trotterized and variationally
//! fast-forwarded (REFF) evolution.

pub mod error;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod reff;
pub mod seed;
pub mod spectra;
pub mod statevector;
pub mod trotter;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
