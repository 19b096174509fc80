//! Subcommand implementations.

use std::collections::BTreeMap;

use dimer_core::linalg::spectral_norm;
use dimer_core::measure::{Evolution, Scheme, Shots};
use dimer_core::model::{eigensystem, lehmann_terms, SpinModel};
use dimer_core::reff::{train, ReffAnsatz, ReffParameters, TrainResult};
use dimer_core::seed::child_rng;
use dimer_core::spectra::{
    dynamical_structure_factor, intensity, power_spectrum, rms_report, rms_window, sweep, top_peaks, Channel, Component,
    CorrelationSeries, IntensitySpectrum, ReffSolution, SweepSpec, Weighting,
};
use dimer_core::statevector::Axis;
use dimer_core::trotter::{trotter_error, trotter_step_circuit};
use log::{info, warn};
use serde_json::json;

use crate::config::{RunConfig, ShotsSpec};
use crate::error::CliError;
use crate::experiment::ingest_experiment;
use crate::output::{Cell, Output};

/// Frozen grid and shot budget of the reproduction recipes.
pub const RECIPE_DT: f64 = 0.3;
pub const RECIPE_STEPS: usize = 100;
pub const RECIPE_SHOTS: u64 = 8000;
/// Finer grid for the XY+ZZ model, whose gaps exceed the 0.3 grid's
/// frequency window.
pub const FIG8_DT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig2,
    Fig4,
    Fig5,
    Fig8,
}

fn xx11() -> Channel {
    Channel::new(Axis::X, Axis::X, 0, 0)
}

/// Exact correlators on the configured grid, computed from the spectral
/// decomposition.
fn oracle(model: &SpinModel, dt: f64, n: usize, channels: Vec<Channel>) -> Result<Vec<CorrelationSeries>, CliError> {
    Ok(sweep(&SweepSpec::analytic(*model, dt, n, channels, Evolution::Exact))?)
}

fn find(series: &[CorrelationSeries], ch: Channel) -> &CorrelationSeries {
    series.iter().find(|s| s.channel == ch).expect("oracle covers every channel")
}

/// Trains (or loads) REFF parameters for the Trotter step of `model`.
fn reff_solution(cfg: &RunConfig, model: &SpinModel, dt: f64, out: &mut Output) -> Result<ReffSolution, CliError> {
    if let Some(path) = &cfg.reff.parameters {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let p = ReffParameters::from_json(&text).map_err(|e| CliError::config(format!("reff.parameters: {e}")))?;
        if p.model != *model || (p.dt - dt).abs() > 1e-12 {
            return Err(CliError::config(format!("reff.parameters were trained for {:?} at dt = {}", p.model, p.dt)));
        }
        out.metric("reff.loaded_cost", p.final_cost);
        return Ok(ReffSolution::from_parameters(&p)?);
    }
    let (ansatz, result) = run_training(cfg, model, dt)?;
    if !result.converged {
        warn!("REFF training stopped at cost {:.3e} above threshold {:.3e}", result.final_cost, result.threshold);
    }
    write_training(out, &ansatz, model, dt, &result)?;
    Ok(ReffSolution { ansatz, theta: result.theta_opt, gamma: result.gamma_opt })
}

fn run_training(cfg: &RunConfig, model: &SpinModel, dt: f64) -> Result<(ReffAnsatz, TrainResult), CliError> {
    let ansatz = ReffAnsatz::by_name(&cfg.reff.ansatz).map_err(|e| CliError::config(e.to_string()))?;
    let target = trotter_step_circuit(model, dt)?.unitary()?;
    let mut rng = child_rng(cfg.estimator.seed, "reff-train");
    let result = train(&target, &ansatz, &cfg.reff.optimizer(), &mut rng)?;
    info!("REFF training: cost {:.3e} after {} iterations", result.final_cost, result.iterations);
    Ok((ansatz, result))
}

fn write_training(out: &mut Output, ansatz: &ReffAnsatz, model: &SpinModel, dt: f64, r: &TrainResult) -> Result<(), CliError> {
    let params = ReffParameters::from_result(ansatz, model, dt, r);
    out.write("reff_parameters.json", &params.to_json())?;
    let rows: Vec<Vec<Cell>> = r
        .cost_history
        .iter()
        .enumerate()
        .map(|(k, c)| vec![Cell::Int(k as u64), Cell::Num(*c)])
        .collect();
    out.table("cost_history", &["iteration", "cost"], &rows)?;
    out.metric("reff.final_cost", r.final_cost);
    out.metric("reff.iterations", r.iterations);
    out.metric("reff.converged", r.converged);
    out.metric("reff.threshold", r.threshold);
    Ok(())
}

/// Sweep with the configured estimator and `method`.
fn measured(
    cfg: &RunConfig,
    model: &SpinModel,
    dt: f64,
    n: usize,
    channels: Vec<Channel>,
    method: Evolution,
    reff: Option<&ReffSolution>,
) -> Result<Vec<CorrelationSeries>, CliError> {
    let mut estimator = cfg.estimator()?;
    estimator.evolution = method;
    let spec = SweepSpec {
        model: *model,
        dt,
        n_points: n,
        channels,
        estimator,
        analytic: cfg.estimator.analytic,
        reff: reff.cloned(),
    };
    Ok(sweep(&spec)?)
}

/// Writes each series and its power spectrum, and records RMS figures
/// against the oracle.
fn emit_series(
    out: &mut Output,
    cfg: &RunConfig,
    prefix: &str,
    series: &[CorrelationSeries],
    truth: &[CorrelationSeries],
) -> Result<(), CliError> {
    for s in series {
        let label = s.channel.label();
        out.series(&format!("{prefix}series_{label}"), s)?;
        out.spectrum(&format!("{prefix}spectrum_{label}"), &power_spectrum(s, cfg.spectrum.fourier())?)?;
        let key = format!("{prefix}{label} {}", s.provenance);
        out.rms(key, rms_report(s, find(truth, s.channel))?);
    }
    Ok(())
}

fn structure(cfg: &RunConfig, series: &[CorrelationSeries], weighting: Weighting) -> Result<IntensitySpectrum, CliError> {
    let axes: Vec<(Axis, Axis)> = weighting
        .weights()
        .map_err(|e| CliError::config(format!("spectrum.weighting: {e}")))?
        .into_iter()
        .filter(|(_, w)| w.abs() > 1e-12)
        .map(|(k, _)| k)
        .collect();
    let s = &cfg.spectrum;
    let dsf = dynamical_structure_factor(series, &axes, s.q, &dimer_core::spectra::DEFAULT_POSITIONS, s.pairs, s.fourier())?;
    Ok(intensity(&dsf, weighting)?)
}

/// Channels an intensity spectrum needs under the configured weighting
/// and pair selection.
fn dsf_channels(cfg: &RunConfig) -> Result<Vec<Channel>, CliError> {
    let weights = cfg.spectrum.weighting.weights().map_err(|e| CliError::config(e.to_string()))?;
    let mut out = Vec::new();
    for ((a, b), w) in weights {
        if w.abs() > 1e-12 {
            for (i, j) in cfg.spectrum.pairs.pairs() {
                out.push(Channel::new(a, b, i, j));
            }
        }
    }
    Ok(out)
}

fn peak_omegas(spec: &IntensitySpectrum, count: usize) -> Vec<f64> {
    let mut w: Vec<f64> = top_peaks(&spec.intensity, count).into_iter().map(|k| spec.omegas[k]).collect();
    w.sort_by(f64::total_cmp);
    w
}

pub fn exact_spectrum(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let eig = eigensystem(&cfg.model);
    let rows: Vec<Vec<Cell>> = eig
        .energies
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let label = eig.label(k).map_or(Cell::Empty, |l| Cell::Text(l.to_string()));
            vec![Cell::Int(k as u64), Cell::Num(*e), label]
        })
        .collect();
    out.table("energies", &["level", "energy", "label"], &rows)?;
    let mut terms = Vec::new();
    for ch in cfg.spectrum.channels.channels() {
        for t in lehmann_terms(&cfg.model, ch.alpha, ch.beta, ch.i, ch.j)? {
            terms.push(vec![Cell::Text(ch.label()), Cell::Num(t.omega), Cell::Num(t.amplitude.re), Cell::Num(t.amplitude.im)]);
        }
    }
    out.table("lehmann", &["channel", "omega", "re", "im"], &terms)?;
    out.metric("ground_energy", eig.ground_energy());
    out.metric("excitation_energies", eig.excitation_energies());
    Ok(())
}

pub fn trotter_sim(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let (dt, n) = (cfg.evolution.dt, cfg.evolution.n_steps);
    let channels = cfg.spectrum.channels.channels();
    let truth = oracle(&cfg.model, dt, n, channels.clone())?;
    let series = measured(cfg, &cfg.model, dt, n, channels, Evolution::Trotter, None)?;
    emit_series(out, cfg, "", &series, &truth)?;
    let mut rows = Vec::new();
    for k in 1..n {
        rows.push(vec![Cell::Int(k as u64), Cell::Num(dt * k as f64), Cell::Num(trotter_error(&cfg.model, dt, k)?)]);
    }
    out.table("trotter_error", &["step", "t", "error"], &rows)?;
    Ok(())
}

pub fn reff_train(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let dt = cfg.evolution.dt;
    let (ansatz, result) = run_training(cfg, &cfg.model, dt)?;
    write_training(out, &ansatz, &cfg.model, dt, &result)?;
    let n = cfg.evolution.n_steps;
    let v1 = ansatz.unitary(&result.theta_opt, &result.gamma_opt, 1)?;
    let vn = ansatz.unitary(&result.theta_opt, &result.gamma_opt, n)?;
    out.metric("reff.fast_forward_deviation", spectral_norm(&(vn - v1.pow(n as u32))));
    if !result.converged {
        warn!("REFF training stopped at cost {:.3e} above threshold {:.3e}", result.final_cost, result.threshold);
    }
    Ok(())
}

pub fn correlate(cfg: &RunConfig, out: &mut Output) -> Result<Vec<CorrelationSeries>, CliError> {
    correlate_channels(cfg, out, cfg.spectrum.channels.channels())
}

fn correlate_channels(cfg: &RunConfig, out: &mut Output, channels: Vec<Channel>) -> Result<Vec<CorrelationSeries>, CliError> {
    let (dt, n) = (cfg.evolution.dt, cfg.evolution.n_steps);
    let reff = match cfg.evolution.method {
        Evolution::Reff => Some(reff_solution(cfg, &cfg.model, dt, out)?),
        _ => None,
    };
    let truth = oracle(&cfg.model, dt, n, channels.clone())?;
    let series = measured(cfg, &cfg.model, dt, n, channels, cfg.evolution.method, reff.as_ref())?;
    emit_series(out, cfg, "", &series, &truth)?;
    Ok(series)
}

pub fn dsf(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let mut channels = dsf_channels(cfg)?;
    for ch in cfg.spectrum.channels.channels() {
        if !channels.contains(&ch) {
            channels.push(ch);
        }
    }
    let series = correlate_channels(cfg, out, channels.clone())?;
    let (dt, n) = (cfg.evolution.dt, cfg.evolution.n_steps);
    let truth = oracle(&cfg.model, dt, n, channels)?;
    let measured = structure(cfg, &series, cfg.spectrum.weighting)?;
    let exact = structure(cfg, &truth, cfg.spectrum.weighting)?;
    out.intensity("dsf", &measured)?;
    out.intensity("dsf_exact", &exact)?;
    out.metric("dsf.peaks", peak_omegas(&measured, 3));
    out.metric("dsf_exact.peaks", peak_omegas(&exact, 3));
    Ok(())
}

/// Dominant transition frequency of the same-site sigma^x channel.
fn sigma_x_gap(model: &SpinModel) -> Result<f64, CliError> {
    let terms = lehmann_terms(model, Axis::X, Axis::X, 0, 0)?;
    terms
        .iter()
        .max_by(|a, b| a.amplitude.norm().total_cmp(&b.amplitude.norm()))
        .map(|t| t.omega)
        .ok_or_else(|| CliError::numerical("sigma^x channel has no spectral weight"))
}

/// sigma^x peak of `series` against the oracle gap and, when configured,
/// the experiment's middle-peak window.
fn overlay(cfg: &RunConfig, out: &mut Output, stem: &str, series: &[CorrelationSeries]) -> Result<(), CliError> {
    let s = &cfg.spectrum;
    let dsf = dynamical_structure_factor(
        series,
        &[(Axis::X, Axis::X)],
        s.q,
        &dimer_core::spectra::DEFAULT_POSITIONS,
        s.pairs,
        s.fourier(),
    )?;
    let amplitude = &dsf.channels[&(Axis::X, Axis::X)];
    let spectrum = IntensitySpectrum {
        omegas: dsf.omegas.clone(),
        amplitude: amplitude.clone(),
        intensity: amplitude.iter().map(|z| z.norm()).collect(),
    };
    out.intensity(stem, &spectrum)?;
    let peak_bin = top_peaks(&spectrum.intensity, 1).first().copied().unwrap_or(0);
    let peak = spectrum.omegas[peak_bin];
    let gap = sigma_x_gap(&cfg.model)?;
    let bin = spectrum.omegas.get(1).copied().unwrap_or(0.0);
    let mut report = BTreeMap::new();
    report.insert("simulated_peak", json!(peak));
    report.insert("oracle_gap", json!(gap));
    report.insert("bin_width", json!(bin));
    report.insert("within_one_bin", json!((peak - gap).abs() <= bin));
    if let Some(exp) = &cfg.experiment {
        let table = ingest_experiment(&exp.path, exp.energy_scale)?;
        let energies = table.energies();
        let [lo, hi] = exp.middle_window.unwrap_or([energies[0], energies[energies.len() - 1]]);
        let rows: Vec<Vec<Cell>> = table
            .rows
            .iter()
            .map(|r| vec![Cell::Num(r.energy), Cell::Num(r.intensity), r.error.map_or(Cell::Empty, Cell::Num)])
            .collect();
        out.table("experiment", &["energy", "intensity", "error"], &rows)?;
        let exp_peak = table.peak_in(lo, hi).map(|r| r.energy);
        report.insert("window", json!([lo, hi]));
        report.insert("experiment_peak", json!(exp_peak));
        report.insert("offset", json!(exp_peak.map(|e| peak - e)));
        report.insert("aligned", json!(peak >= lo && peak <= hi));
    }
    out.json(&format!("{stem}_overlay.json"), &report)?;
    out.metric(format!("{stem}.peak"), peak);
    out.metric(format!("{stem}.oracle_gap"), gap);
    Ok(())
}

pub fn compare_experiment(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    if cfg.experiment.is_none() {
        return Err(CliError::config("compare-experiment needs an experiment block"));
    }
    let channels: Vec<Channel> = cfg.spectrum.pairs.pairs().into_iter().map(|(i, j)| Channel::new(Axis::X, Axis::X, i, j)).collect();
    let series = correlate_channels(cfg, out, channels)?;
    overlay(cfg, out, "dsf_xx", &series)
}

/// Applies the frozen caption parameters of a recipe.
fn recipe_config(cfg: &RunConfig, figure: Figure) -> RunConfig {
    let mut c = cfg.clone();
    c.evolution.dt = RECIPE_DT;
    c.evolution.n_steps = RECIPE_STEPS;
    c.estimator.shots = ShotsSpec(Shots::Sampled(RECIPE_SHOTS));
    match figure {
        Figure::Fig2 | Figure::Fig4 | Figure::Fig5 => c.model = SpinModel::heisenberg(1.0, 1.0),
        Figure::Fig8 => {
            c.model = SpinModel::xy_zz(11.4, 0.16);
            c.evolution.dt = FIG8_DT;
        }
    }
    c
}

/// RMS of Re over the first and last thirds of the grid, and their ratio.
fn thirds(series: &CorrelationSeries, truth: &CorrelationSeries) -> Result<[f64; 3], CliError> {
    let n = series.len();
    let first = rms_window(series, truth, 0..n / 3, Component::Real)?;
    let last = rms_window(series, truth, n - n / 3..n, Component::Real)?;
    Ok([first, last, last / first])
}

pub fn reproduce(cfg: &RunConfig, figure: Figure, out: &mut Output) -> Result<(), CliError> {
    let c = recipe_config(cfg, figure);
    let (dt, n) = (c.evolution.dt, c.evolution.n_steps);
    out.metric("recipe.dt", dt);
    out.metric("recipe.n_steps", n);
    out.metric("recipe.shots", RECIPE_SHOTS);
    match figure {
        Figure::Fig2 => {
            let truth = oracle(&c.model, dt, n, vec![xx11()])?;
            let reff = reff_solution(&c, &c.model, dt, out)?;
            out.series("exact_series_C_xx_1_1", &truth[0])?;
            for scheme in [Scheme::Indirect, Scheme::Direct] {
                for method in [Evolution::Trotter, Evolution::Reff] {
                    let mut cc = c.clone();
                    cc.estimator.scheme = scheme;
                    let s = measured(&cc, &c.model, dt, n, vec![xx11()], method, Some(&reff))?;
                    let prefix = format!("{method}_{scheme}_");
                    emit_series(out, &c, &prefix, &s, &truth)?;
                    out.metric(format!("{prefix}thirds_re_rms"), thirds(&s[0], &truth[0])?);
                }
            }
        }
        Figure::Fig4 => {
            let channels = dsf_channels(&c)?;
            let truth = oracle(&c.model, dt, n, channels.clone())?;
            let exact = structure(&c, &truth, c.spectrum.weighting)?;
            out.intensity("dsf_exact", &exact)?;
            out.metric("dsf_exact.peaks", peak_omegas(&exact, 3));
            let reff = reff_solution(&c, &c.model, dt, out)?;
            for mitigation in [false, true] {
                let mut cc = c.clone();
                cc.estimator.mitigation = mitigation;
                let s = measured(&cc, &c.model, dt, n, channels.clone(), Evolution::Reff, Some(&reff))?;
                let stem = if mitigation { "dsf_reff_mitigated" } else { "dsf_reff" };
                let spec = structure(&c, &s, c.spectrum.weighting)?;
                out.intensity(stem, &spec)?;
                out.metric(format!("{stem}.peaks"), peak_omegas(&spec, 3));
                for series in &s {
                    out.rms(format!("{stem} {} {}", series.channel.label(), series.provenance), rms_report(series, find(&truth, series.channel))?);
                }
            }
        }
        Figure::Fig5 => {
            let channels = vec![xx11(), Channel::new(Axis::Z, Axis::Z, 0, 0)];
            let truth = oracle(&c.model, dt, n, channels.clone())?;
            let reff = reff_solution(&c, &c.model, dt, out)?;
            for method in [Evolution::Trotter, Evolution::Reff] {
                for mitigation in [false, true] {
                    let mut cc = c.clone();
                    cc.estimator.mitigation = mitigation;
                    cc.estimator.scheme = Scheme::Direct;
                    let s = measured(&cc, &c.model, dt, n, channels.clone(), method, Some(&reff))?;
                    let prefix = format!("{method}_{}_", if mitigation { "mitigated" } else { "raw" });
                    emit_series(out, &c, &prefix, &s, &truth)?;
                }
            }
        }
        Figure::Fig8 => {
            let channels: Vec<Channel> = c.spectrum.pairs.pairs().into_iter().map(|(i, j)| Channel::new(Axis::X, Axis::X, i, j)).collect();
            let truth = oracle(&c.model, dt, n, channels.clone())?;
            overlay(&c, out, "dsf_xx_exact", &truth)?;
            let reff = reff_solution(&c, &c.model, dt, out)?;
            for mitigation in [false, true] {
                let mut cc = c.clone();
                cc.estimator.mitigation = mitigation;
                cc.estimator.scheme = Scheme::Direct;
                let s = measured(&cc, &c.model, dt, n, channels.clone(), Evolution::Reff, Some(&reff))?;
                let prefix = if mitigation { "reff_mitigated_" } else { "reff_raw_" };
                emit_series(out, &c, prefix, &s, &truth)?;
                overlay(&c, out, &format!("{prefix}dsf_xx"), &s)?;
            }
        }
    }
    Ok(())
}
