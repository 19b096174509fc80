use num_complex::Complex64;
use rayon::prelude::*;

use super::series::{time_grid, Channel, CorrelationSeries, Provenance};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::measure::{estimate, Evolution, EstimatorConfig, SiteOp};
use crate::model::{exact_evolution, ground_state, site_operator, SpinModel};
use crate::reff::{ReffAnsatz, ReffParameters};
use crate::seed::child_rng;
use crate::statevector::{Circuit, GateOp, QuantumState};
use crate::trotter::{trotter_evolution, trotter_step_circuit};

/// Trained REFF parameters ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReffSolution {
    pub ansatz: ReffAnsatz,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl ReffSolution {
    pub fn from_parameters(p: &ReffParameters) -> Result<Self> {
        let (ansatz, theta, gamma) = p.unpack()?;
        Ok(ReffSolution { ansatz, theta, gamma })
    }
}

/// Description of a correlation sweep over t_k = k dt, k = 0..n_points.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: SpinModel,
    pub dt: f64,
    pub n_points: usize,
    pub channels: Vec<Channel>,
    /// Evolution method, scheme, shots, noise and seed.
    pub estimator: EstimatorConfig,
    /// Evaluate <0|U^dagger s U s|0> by matrix arithmetic, bypassing the
    /// measurement circuits (scheme, shots and noise are then unused).
    pub analytic: bool,
    pub reff: Option<ReffSolution>,
}

impl SweepSpec {
    pub fn analytic(model: SpinModel, dt: f64, n_points: usize, channels: Vec<Channel>, evolution: Evolution) -> Self {
        SweepSpec {
            model,
            dt,
            n_points,
            channels,
            estimator: EstimatorConfig { evolution, ..Default::default() },
            analytic: true,
            reff: None,
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            evolution: self.estimator.evolution,
            scheme: if self.analytic { None } else { Some(self.estimator.scheme) },
            mitigated: !self.analytic && self.estimator.mitigation,
        }
    }
}

/// Evolution circuit for `k` steps of size `dt`.
pub fn evolution_circuit(
    method: Evolution,
    model: &SpinModel,
    dt: f64,
    k: usize,
    reff: Option<&ReffSolution>,
) -> Result<Circuit> {
    match method {
        Evolution::Exact => {
            let u = exact_evolution(model, dt * k as f64);
            Circuit::new(2)?.with(GateOp::two("exact", [0, 1], u)?)
        }
        Evolution::Trotter => trotter_evolution(model, dt, k),
        Evolution::Reff => {
            let r = reff.ok_or(Error::MissingReffParameters)?;
            r.ansatz.circuit(&r.theta, &r.gamma, k)
        }
    }
}

fn evolution_unitary(method: Evolution, model: &SpinModel, dt: f64, k: usize, reff: Option<&ReffSolution>) -> Result<CMatrix> {
    match method {
        Evolution::Exact => Ok(exact_evolution(model, dt * k as f64)),
        Evolution::Trotter => Ok(trotter_step_circuit(model, dt)?.unitary()?.pow(k as u32)),
        Evolution::Reff => {
            let r = reff.ok_or(Error::MissingReffParameters)?;
            r.ansatz.unitary(&r.theta, &r.gamma, k)
        }
    }
}

/// <psi| U^dagger s^a_i U s^b_j |psi> by matrix arithmetic.
pub fn correlator_from_unitary(u: &CMatrix, channel: Channel, state0: &QuantumState) -> Result<Complex64> {
    let a = site_operator(channel.alpha, channel.i)?;
    let b = site_operator(channel.beta, channel.j)?;
    let op = u.adjoint() * a * u * b;
    state0.expectation_matrix(&op)
}

fn sample(spec: &SweepSpec, state0: &QuantumState, channel: Channel, k: usize) -> Result<(Complex64, (f64, f64))> {
    let method = spec.estimator.evolution;
    if spec.analytic {
        let u = evolution_unitary(method, &spec.model, spec.dt, k, spec.reff.as_ref())?;
        return Ok((correlator_from_unitary(&u, channel, state0)?, (0.0, 0.0)));
    }
    let circuit = evolution_circuit(method, &spec.model, spec.dt, k, spec.reff.as_ref())?;
    let mut rng = child_rng(spec.estimator.seed, &format!("{}/{}", channel.label(), k));
    let e = estimate(
        &circuit,
        SiteOp::new(channel.alpha, channel.i),
        SiteOp::new(channel.beta, channel.j),
        state0,
        &spec.estimator,
        &mut rng,
    )?;
    Ok((e.value, (e.re_std_error, e.im_std_error)))
}

/// Evaluates every requested channel on the time grid, starting from the
/// model's ground state. Samples run in parallel; each (channel, k) draws
/// from its own seeded stream, so results do not depend on thread count.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<CorrelationSeries>> {
    if spec.dt.is_nan() || spec.dt <= 0.0 {
        return Err(Error::InvalidArgument(format!("time step {} must be positive", spec.dt)));
    }
    if spec.estimator.evolution == Evolution::Reff && spec.reff.is_none() {
        return Err(Error::MissingReffParameters);
    }
    let state0 = ground_state(&spec.model)?;
    spec.channels
        .par_iter()
        .map(|&channel| {
            let samples = (0..spec.n_points)
                .into_par_iter()
                .map(|k| sample(spec, &state0, channel, k))
                .collect::<Result<Vec<_>>>()?;
            let (values, errors): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
            let sampled = !spec.analytic && matches!(spec.estimator.shots, crate::measure::Shots::Sampled(_));
            Ok(CorrelationSeries {
                channel,
                times: time_grid(spec.dt, spec.n_points),
                values,
                std_errors: sampled.then_some(errors),
                provenance: spec.provenance(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::Axis;

    #[test]
    fn zz_same_site_is_a_pure_phase() {
        let spec = SweepSpec::analytic(
            SpinModel::heisenberg(1.0, 1.0),
            0.3,
            100,
            vec![Channel::new(Axis::Z, Axis::Z, 0, 0)],
            Evolution::Exact,
        );
        let s = &sweep(&spec).unwrap()[0];
        for (t, v) in s.times.iter().zip(&s.values) {
            assert!((v - Complex64::from_polar(1.0, -4.0 * t)).norm() < 1e-10);
        }
    }

    #[test]
    fn reff_without_parameters() {
        let spec = SweepSpec::analytic(SpinModel::default(), 0.3, 4, Channel::same_site_diagonal(), Evolution::Reff);
        assert!(matches!(sweep(&spec), Err(Error::MissingReffParameters)));
    }
}
