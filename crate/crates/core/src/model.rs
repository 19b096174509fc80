//! Two-site spin Hamiltonians, their exact spectra and the Lehmann
//! (spectral-sum) form of the dynamical correlation functions.

use std::fmt;
use std::str::FromStr;

use log::warn;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, fix_phase, CMatrix, CVector};
use crate::statevector::{Axis, Pauli, PauliString, QuantumState};

pub const N_SITES: usize = 2;

const DEGENERACY_TOL: f64 = 1e-9;

/// H = Jxx XX + Jyy YY + Jzz ZZ + h (Z1 + Z2) on two sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinModel {
    pub jxx: f64,
    pub jyy: f64,
    pub jzz: f64,
    #[serde(default)]
    pub h: f64,
}

impl Default for SpinModel {
    fn default() -> Self {
        SpinModel::heisenberg(1.0, 1.0)
    }
}

impl SpinModel {
    pub fn new(jxx: f64, jyy: f64, jzz: f64, h: f64) -> Result<Self> {
        let m = SpinModel { jxx, jyy, jzz, h };
        m.validate()?;
        Ok(m)
    }

    /// Isotropic coupling `j` with field `h`.
    pub fn heisenberg(j: f64, h: f64) -> Self {
        SpinModel { jxx: j, jyy: j, jzz: j, h }
    }

    /// XY coupling with a ZZ perturbation and no field.
    pub fn xy_zz(jxy: f64, jz: f64) -> Self {
        SpinModel { jxx: jxy, jyy: jxy, jzz: jz, h: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("jxx", self.jxx), ("jyy", self.jyy), ("jzz", self.jzz), ("h", self.h)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} = {v} is not finite")));
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, term: Term) -> f64 {
        match term {
            Term::XX => self.jxx,
            Term::YY => self.jyy,
            Term::ZZ => self.jzz,
            Term::Field => self.h,
        }
    }

    /// Terms with nonzero coefficient, in the fixed order XX, YY, ZZ, field.
    pub fn active_terms(&self) -> Vec<Term> {
        Term::ALL.into_iter().filter(|&t| self.coefficient(t) != 0.0).collect()
    }

    pub fn hamiltonian(&self) -> CMatrix {
        build_hamiltonian(self)
    }
}

/// Summand of the Hamiltonian with unit coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    XX,
    YY,
    ZZ,
    /// Z1 + Z2.
    Field,
}

impl Term {
    pub const ALL: [Term; 4] = [Term::XX, Term::YY, Term::ZZ, Term::Field];

    pub fn operator(self) -> CMatrix {
        let pp = |p: Pauli| PauliString::new(vec![p, p]).matrix();
        match self {
            Term::XX => pp(Pauli::X),
            Term::YY => pp(Pauli::Y),
            Term::ZZ => pp(Pauli::Z),
            Term::Field => {
                PauliString::new(vec![Pauli::Z, Pauli::I]).matrix()
                    + PauliString::new(vec![Pauli::I, Pauli::Z]).matrix()
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Term::XX => "xx",
            Term::YY => "yy",
            Term::ZZ => "zz",
            Term::Field => "z",
        };
        f.write_str(s)
    }
}

pub fn build_hamiltonian(model: &SpinModel) -> CMatrix {
    Term::ALL
        .iter()
        .fold(CMatrix::zeros(4, 4), |acc, &t| acc + t.operator() * c(model.coefficient(t), 0.0))
}

/// sigma^axis on `site` of the two-site register.
pub fn site_operator(axis: Axis, site: usize) -> Result<CMatrix> {
    Ok(PauliString::single(N_SITES, site, axis.pauli())?.matrix())
}

/// Ascending energies with orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub energies: Vec<f64>,
    pub states: Vec<CVector>,
}

impl EigenSystem {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// E_k - E_0 for every level.
    pub fn excitation_energies(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e - self.energies[0]).collect()
    }

    /// Number of levels within tolerance of the ground energy.
    pub fn ground_multiplicity(&self) -> usize {
        self.energies.iter().take_while(|&&e| e - self.energies[0] < DEGENERACY_TOL).count()
    }

    /// Spin label of level `k` if it overlaps a reference singlet/triplet
    /// vector by more than one half.
    pub fn label(&self, k: usize) -> Option<StateLabel> {
        StateLabel::ALL.into_iter().find(|l| {
            let reference = l.vector();
            reference.dotc(&self.states[k]).norm_sqr() > 0.5
        })
    }

    /// Sum_k E_k |v_k><v_k|.
    pub fn reconstruct(&self) -> CMatrix {
        self.energies
            .iter()
            .zip(&self.states)
            .fold(CMatrix::zeros(4, 4), |acc, (&e, v)| acc + v * v.adjoint() * c(e, 0.0))
    }
}

/// Diagonalizes the model Hamiltonian.
///
/// Degenerate levels get a deterministic basis: the projector onto the
/// level is applied to e_0, e_1, ... in turn and the results are
/// Gram-Schmidt orthonormalized. Every vector's first non-negligible entry
/// is made real and positive.
pub fn eigensystem(model: &SpinModel) -> EigenSystem {
    let h = build_hamiltonian(model);
    let dim = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let raw: Vec<CVector> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();

    let mut states = Vec::with_capacity(dim);
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && energies[end] - energies[start] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start == 1 {
            states.push(raw[start].clone());
        } else {
            let proj = raw[start..end].iter().fold(CMatrix::zeros(dim, dim), |acc, v| acc + v * v.adjoint());
            let mut block: Vec<CVector> = Vec::new();
            for e in 0..dim {
                if block.len() == end - start {
                    break;
                }
                let mut w = proj.column(e).into_owned();
                for u in &block {
                    let overlap = u.dotc(&w);
                    w -= u * overlap;
                }
                let norm = w.norm();
                if norm > 1e-6 {
                    block.push(w / c(norm, 0.0));
                }
            }
            states.extend(block);
        }
        start = end;
    }
    for v in &mut states {
        fix_phase(v, 1e-9);
    }
    EigenSystem { energies, states }
}

/// Reference two-spin states with |up> = |0>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateLabel {
    #[serde(rename = "singlet")]
    Singlet,
    #[serde(rename = "triplet+")]
    TripletPlus,
    #[serde(rename = "triplet0")]
    Triplet0,
    #[serde(rename = "triplet-")]
    TripletMinus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 4] =
        [StateLabel::Singlet, StateLabel::TripletPlus, StateLabel::Triplet0, StateLabel::TripletMinus];

    pub fn vector(self) -> CVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match self {
            StateLabel::Singlet => [0.0, s, -s, 0.0],
            StateLabel::TripletPlus => [1.0, 0.0, 0.0, 0.0],
            StateLabel::Triplet0 => [0.0, s, s, 0.0],
            StateLabel::TripletMinus => [0.0, 0.0, 0.0, 1.0],
        };
        DVector::from_iterator(4, amps.iter().map(|&a| c(a, 0.0)))
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StateLabel::Singlet => "singlet",
            StateLabel::TripletPlus => "triplet+",
            StateLabel::Triplet0 => "triplet0",
            StateLabel::TripletMinus => "triplet-",
        };
        f.write_str(s)
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateLabel::ALL
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::UnknownStateLabel(s.to_string()))
    }
}

pub fn prepare_state(label: &str) -> Result<QuantumState> {
    let label: StateLabel = label.parse()?;
    QuantumState::from_amplitudes(label.vector())
}

/// U(t) = Sum_k exp(-i E_k t) |v_k><v_k|.
pub fn exact_evolution(model: &SpinModel, t: f64) -> CMatrix {
    evolution_from(&eigensystem(model), t)
}

pub fn evolution_from(eig: &EigenSystem, t: f64) -> CMatrix {
    eig.energies.iter().zip(&eig.states).fold(CMatrix::zeros(4, 4), |acc, (&e, v)| {
        acc + v * v.adjoint() * Complex64::from_polar(1.0, -e * t)
    })
}

fn nondegenerate(eig: &EigenSystem) -> Result<()> {
    let multiplicity = eig.ground_multiplicity();
    if multiplicity > 1 {
        warn!("ground state is {multiplicity}-fold degenerate at E = {}", eig.energies[0]);
        return Err(Error::DegenerateGround { multiplicity, energy: eig.energies[0] });
    }
    Ok(())
}

/// The non-degenerate ground state of `model`.
pub fn ground_state(model: &SpinModel) -> Result<QuantumState> {
    let eig = eigensystem(model);
    nondegenerate(&eig)?;
    QuantumState::from_amplitudes(eig.states[0].clone())
}

/// One frequency component of a correlation function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LehmannTerm {
    /// Excitation energy E_p - E_0.
    pub omega: f64,
    pub amplitude: Complex64,
}

/// Spectral weights of C^{ab}_{ij}: amplitudes <0|s^a_i|p><p|s^b_j|0>,
/// merged over levels sharing an excitation energy, in ascending omega.
/// Components with amplitude below 1e-12 are dropped.
pub fn lehmann_terms(model: &SpinModel, alpha: Axis, beta: Axis, i: usize, j: usize) -> Result<Vec<LehmannTerm>> {
    let eig = eigensystem(model);
    nondegenerate(&eig)?;
    let a = site_operator(alpha, i)?;
    let b = site_operator(beta, j)?;
    let g = &eig.states[0];
    let bra = a.adjoint() * g;
    let ket = &b * g;
    let mut terms: Vec<LehmannTerm> = Vec::new();
    for (e, p) in eig.energies.iter().zip(&eig.states) {
        let omega = e - eig.energies[0];
        let amplitude = bra.dotc(p) * p.dotc(&ket);
        match terms.last_mut() {
            Some(last) if (omega - last.omega).abs() < DEGENERACY_TOL => last.amplitude += amplitude,
            _ => terms.push(LehmannTerm { omega, amplitude }),
        }
    }
    terms.retain(|t| t.amplitude.norm() > 1e-12);
    Ok(terms)
}

/// C^{ab}_{ij}(t) = Sum_p exp(-i (E_p - E_0) t) <0|s^a_i|p><p|s^b_j|0>.
pub fn lehmann_correlation(model: &SpinModel, alpha: Axis, beta: Axis, i: usize, j: usize, t: f64) -> Result<Complex64> {
    Ok(lehmann_terms(model, alpha, beta, i, j)?
        .iter()
        .map(|term| term.amplitude * Complex64::from_polar(1.0, -term.omega * t))
        .sum())
}
