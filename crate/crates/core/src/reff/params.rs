use serde::{Deserialize, Serialize};

use super::ansatz::ReffAnsatz;
use super::train::TrainResult;
use crate::error::{Error, Result};
use crate::model::SpinModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// Trained REFF parameters with the metadata needed to reuse them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReffParameters {
    pub ansatz: String,
    pub model: SpinModel,
    pub dt: f64,
    pub parameters: Vec<NamedValue>,
    pub final_cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ReffParameters {
    pub fn from_result(ansatz: &ReffAnsatz, model: &SpinModel, dt: f64, result: &TrainResult) -> Self {
        let parameters = ansatz
            .parameter_names()
            .into_iter()
            .zip(result.theta_opt.iter().chain(&result.gamma_opt))
            .map(|(name, &value)| NamedValue { name, value })
            .collect();
        ReffParameters {
            ansatz: ansatz.name.clone(),
            model: *model,
            dt,
            parameters,
            final_cost: result.final_cost,
            iterations: result.iterations,
            converged: result.converged,
        }
    }

    /// Resolves the ansatz and splits the values into (theta, gamma).
    pub fn unpack(&self) -> Result<(ReffAnsatz, Vec<f64>, Vec<f64>)> {
        let ansatz = ReffAnsatz::by_name(&self.ansatz)?;
        let names = ansatz.parameter_names();
        if names.len() != self.parameters.len() {
            return Err(Error::ParameterLength {
                what: "parameter file",
                expected: names.len(),
                found: self.parameters.len(),
            });
        }
        let mut values = Vec::with_capacity(names.len());
        for name in &names {
            let v = self
                .parameters
                .iter()
                .find(|p| &p.name == name)
                .ok_or_else(|| Error::InvalidArgument(format!("parameter file lacks {name}")))?;
            values.push(v.value);
        }
        let gamma = values.split_off(ansatz.n_theta());
        Ok((ansatz, values, gamma))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameters serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("parameter file: {e}")))
    }
}
