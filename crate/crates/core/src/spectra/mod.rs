//! Correlation sweeps, power spectra, the dynamical structure factor and
//! error reports.

mod dsf;
mod fourier;
mod io;
mod report;
mod series;
mod sweep;

pub use dsf::{dynamical_structure_factor, intensity, DsfResult, IntensitySpectrum, PairSelection, Weighting, DEFAULT_POSITIONS};
pub use fourier::{
    fit_line_amplitudes, line_kernel, omega_grid, power_spectrum, top_peaks, transform, FourierOptions, PowerSpectrum,
    Window,
};
pub use io::{fmt_num, intensity_csv, series_csv, spectrum_csv};
pub use report::{rms_report, rms_window, Component, RmsReport};
pub use series::{time_grid, Channel, CorrelationSeries, Provenance};
pub use sweep::{correlator_from_unitary, evolution_circuit, sweep, ReffSolution, SweepSpec};
