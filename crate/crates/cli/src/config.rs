//! Run configuration: one JSON document, every block optional, unknown
//! keys rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use dimer_core::measure::{EstimatorConfig, Evolution, Scheme, Shots};
use dimer_core::model::SpinModel;
use dimer_core::reff::{Init, OptimizerConfig, StopRule};
use dimer_core::spectra::{Channel, FourierOptions, PairSelection, Weighting, Window};
use dimer_core::statevector::NoiseSpec;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: SpinModel,
    pub evolution: EvolutionBlock,
    pub estimator: EstimatorBlock,
    pub reff: ReffBlock,
    pub spectrum: SpectrumBlock,
    pub output: OutputBlock,
    pub experiment: Option<ExperimentBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionBlock {
    pub method: Evolution,
    pub dt: f64,
    /// Number of grid points t_k = k dt, k = 0..n_steps.
    pub n_steps: usize,
}

impl Default for EvolutionBlock {
    fn default() -> Self {
        EvolutionBlock { method: Evolution::Exact, dt: 0.3, n_steps: 100 }
    }
}

/// Shot count, or the string "exact" for exact expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotsSpec(pub Shots);

impl Serialize for ShotsSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Sampled(n) => s.serialize_u64(n),
        }
    }
}

impl<'de> Deserialize<'de> for ShotsSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ShotsSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive shot count or \"exact\"")
            }

            fn visit_u64<E: de::Error>(self, n: u64) -> Result<ShotsSpec, E> {
                if n == 0 {
                    return Err(E::custom("shots must be at least 1"));
                }
                Ok(ShotsSpec(Shots::Sampled(n)))
            }

            fn visit_i64<E: de::Error>(self, n: i64) -> Result<ShotsSpec, E> {
                u64::try_from(n).map_err(|_| E::custom("shots must be positive")).and_then(|n| self.visit_u64(n))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<ShotsSpec, E> {
                if s == "exact" {
                    Ok(ShotsSpec(Shots::Exact))
                } else {
                    Err(E::custom(format!("unknown shots value {s:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

pub const DEFAULT_NOISE: NoiseSpec = NoiseSpec { p1: 3e-4, p2: 7e-3, readout_flip: 0.01 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorBlock {
    pub scheme: Scheme,
    pub shots: ShotsSpec,
    pub mitigation: bool,
    /// `null` for noiseless circuits.
    pub noise: Option<NoiseSpec>,
    pub seed: u64,
    /// Skip the measurement circuits and evaluate correlators by matrix
    /// arithmetic on the evolution unitary.
    pub analytic: bool,
}

impl Default for EstimatorBlock {
    fn default() -> Self {
        EstimatorBlock {
            scheme: Scheme::Direct,
            shots: ShotsSpec(Shots::Sampled(8000)),
            mitigation: false,
            noise: Some(DEFAULT_NOISE),
            seed: 0,
            analytic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReffBlock {
    pub ansatz: String,
    pub n_train: usize,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub max_halvings: usize,
    pub target_cost: f64,
    /// With `n_targ`, replaces `target_cost` by the threshold rule.
    pub epsilon: Option<f64>,
    pub n_targ: Option<usize>,
    pub init_half_width: f64,
    /// Previously trained parameters; skips training when set.
    pub parameters: Option<PathBuf>,
}

impl Default for ReffBlock {
    fn default() -> Self {
        ReffBlock {
            ansatz: "dimer".into(),
            n_train: 6,
            max_iterations: 5000,
            initial_step: 0.1,
            max_halvings: 40,
            target_cost: 1e-6,
            epsilon: None,
            n_targ: None,
            init_half_width: 0.1,
            parameters: None,
        }
    }
}

impl ReffBlock {
    pub fn optimizer(&self) -> OptimizerConfig {
        let stop = match (self.epsilon, self.n_targ) {
            (Some(epsilon), Some(n_targ)) => StopRule::Threshold { epsilon, n_targ },
            _ => StopRule::TargetCost(self.target_cost),
        };
        OptimizerConfig {
            n_train: self.n_train,
            max_iterations: self.max_iterations,
            initial_step: self.initial_step,
            max_halvings: self.max_halvings,
            stop,
            init: Init::Uniform { half_width: self.init_half_width },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSet {
    /// All 36 (alpha, beta, i, j).
    #[default]
    All,
    /// alpha = beta, every site pair.
    Diagonal,
    /// alpha = beta, i = j.
    SameSite,
}

impl ChannelSet {
    pub fn channels(self) -> Vec<Channel> {
        match self {
            ChannelSet::All => Channel::all(),
            ChannelSet::Diagonal => Channel::diagonal(),
            ChannelSet::SameSite => Channel::same_site_diagonal(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumBlock {
    pub channels: ChannelSet,
    pub q: [f64; 3],
    pub weighting: Weighting,
    pub pairs: PairSelection,
    pub window: Window,
    pub zero_pad_to: Option<usize>,
}

impl Default for SpectrumBlock {
    fn default() -> Self {
        SpectrumBlock {
            channels: ChannelSet::All,
            q: [0.0; 3],
            weighting: Weighting::Isotropic,
            pairs: PairSelection::SameSite,
            window: Window::None,
            zero_pad_to: None,
        }
    }
}

impl SpectrumBlock {
    pub fn fourier(&self) -> FourierOptions {
        FourierOptions { window: self.window, zero_pad_to: self.zero_pad_to }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("out"), format: Format::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub path: PathBuf,
    /// Factor applied to the energy column on ingestion.
    #[serde(default = "unit")]
    pub energy_scale: f64,
    /// Energy window of the peak the model accounts for; defaults to the
    /// whole table.
    #[serde(default)]
    pub middle_window: Option<[f64; 2]>,
}

fn unit() -> f64 {
    1.0
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::config(message()))
    }
}

impl RunConfig {
    /// Reads and validates a configuration; relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.reff.parameters.as_mut() {
            rebase(p);
        }
        if let Some(e) = cfg.experiment.as_mut() {
            rebase(&mut e.path);
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = if text.trim().is_empty() { "{}" } else { text };
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }

    /// Range checks and file existence.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(|e| CliError::config(format!("model: {e}")))?;
        let ev = &self.evolution;
        check(ev.dt.is_finite() && ev.dt > 0.0, || format!("evolution.dt must be positive, got {}", ev.dt))?;
        check(ev.n_steps >= 2, || format!("evolution.n_steps must be at least 2, got {}", ev.n_steps))?;
        check(ev.n_steps <= 100_000, || format!("evolution.n_steps {} exceeds 100000", ev.n_steps))?;
        if let Some(noise) = &self.estimator.noise {
            noise.build().map_err(|e| CliError::config(format!("estimator.noise: {e}")))?;
        }
        let r = &self.reff;
        dimer_core::reff::ReffAnsatz::by_name(&r.ansatz).map_err(|e| CliError::config(format!("reff.ansatz: {e}")))?;
        check(r.n_train >= 1, || "reff.n_train must be at least 1".into())?;
        check(r.initial_step > 0.0 && r.initial_step.is_finite(), || "reff.initial_step must be positive".into())?;
        check(r.target_cost >= 0.0 && r.target_cost < 1.0, || format!("reff.target_cost {} outside [0, 1)", r.target_cost))?;
        check(r.init_half_width >= 0.0 && r.init_half_width.is_finite(), || "reff.init_half_width must be non-negative".into())?;
        check(r.epsilon.is_some() == r.n_targ.is_some(), || "reff.epsilon and reff.n_targ must be given together".into())?;
        if let Some(p) = &r.parameters {
            check(p.is_file(), || format!("reff.parameters: {} does not exist", p.display()))?;
        }
        let s = &self.spectrum;
        check(s.q.iter().all(|x| x.is_finite()), || "spectrum.q must be finite".into())?;
        if let Some(m) = s.zero_pad_to {
            check(m >= ev.n_steps, || format!("spectrum.zero_pad_to {m} is shorter than the series"))?;
        }
        s.weighting.weights().map_err(|e| CliError::config(format!("spectrum.weighting: {e}")))?;
        if let Some(e) = &self.experiment {
            check(e.path.is_file(), || format!("experiment.path: {} does not exist", e.path.display()))?;
            check(e.energy_scale.is_finite() && e.energy_scale > 0.0, || "experiment.energy_scale must be positive".into())?;
            if let Some([lo, hi]) = e.middle_window {
                check(lo < hi, || format!("experiment.middle_window [{lo}, {hi}] is empty"))?;
            }
        }
        Ok(())
    }

    pub fn estimator(&self) -> Result<EstimatorConfig, CliError> {
        let noise = match &self.estimator.noise {
            Some(spec) => Some(spec.build().map_err(|e| CliError::config(format!("estimator.noise: {e}")))?),
            None => None,
        };
        Ok(EstimatorConfig {
            scheme: self.estimator.scheme,
            evolution: self.evolution.method,
            shots: self.estimator.shots.0,
            mitigation: self.estimator.mitigation,
            noise,
            seed: self.estimator.seed,
        })
    }

    /// SHA-256 of the canonical JSON form, excluding the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.model, SpinModel::heisenberg(1.0, 1.0));
        assert_eq!(cfg.evolution.n_steps, 100);
        assert_eq!(cfg.evolution.dt, 0.3);
        assert_eq!(cfg.estimator.shots, ShotsSpec(Shots::Sampled(8000)));
        assert_eq!(RunConfig::parse("{}").unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse(r#"{"modle": {}}"#).is_err());
        assert!(RunConfig::parse(r#"{"evolution": {"dt": 0.1, "steps": 3}}"#).is_err());
    }

    #[test]
    fn shots_accept_count_or_exact() {
        let c = RunConfig::parse(r#"{"estimator": {"shots": "exact", "noise": null}}"#).unwrap();
        assert_eq!(c.estimator.shots.0, Shots::Exact);
        assert_eq!(c.estimator.noise, None);
        assert!(RunConfig::parse(r#"{"estimator": {"shots": 0}}"#).is_err());
        assert!(RunConfig::parse(r#"{"estimator": {"shots": "many"}}"#).is_err());
    }

    #[test]
    fn range_checks() {
        let bad = RunConfig::parse(r#"{"evolution": {"dt": -0.3}}"#).unwrap();
        assert!(bad.validate().is_err());
        let bad = RunConfig::parse(r#"{"reff": {"epsilon": 0.1}}"#).unwrap();
        assert!(bad.validate().is_err());
        let bad = RunConfig::parse(r#"{"experiment": {"path": "/nonexistent/table.csv"}}"#).unwrap();
        assert!(bad.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output.dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.estimator.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
