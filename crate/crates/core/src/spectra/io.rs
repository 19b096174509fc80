use std::fmt::Write;

use super::dsf::IntensitySpectrum;
use super::fourier::PowerSpectrum;
use super::series::CorrelationSeries;

/// Twelve significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn table<'a>(header: &str, rows: impl Iterator<Item = Vec<f64>> + 'a) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_num).collect();
        writeln!(out, "{}", cells.join(",")).expect("write to string");
    }
    out
}

/// Columns t, re, im.
pub fn series_csv(series: &CorrelationSeries) -> String {
    table("t,re,im", series.times.iter().zip(&series.values).map(|(t, v)| vec![*t, v.re, v.im]))
}

/// Columns omega, power.
pub fn spectrum_csv(spectrum: &PowerSpectrum) -> String {
    table("omega,power", spectrum.omegas.iter().zip(&spectrum.power).map(|(w, p)| vec![*w, *p]))
}

/// Columns omega, intensity.
pub fn intensity_csv(spectrum: &IntensitySpectrum) -> String {
    table("omega,intensity", spectrum.omegas.iter().zip(&spectrum.intensity).map(|(w, p)| vec![*w, *p]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-0.123456789012345), "-1.23456789012e-1");
    }
}
