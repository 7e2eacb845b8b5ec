//! Power spectrum of a pmf or empirical histogram, and its peak candidates.
//!
//! With `ν_j = j / N_DFT`,
//!
//! ```text
//! a(ν) = Σ w_n cos(2πνn),   b(ν) = Σ w_n sin(2πνn),   Ψ(ν) = (a(ν)² + b(ν)²) / a(0)²
//! ```
//!
//! so `Ψ(0) = 1` and `Ψ(ν) = Ψ(1 − ν)`. A peak at `ν` estimates the generalizer
//! mean as `E[B] = 1 / (ν + m)` for some alias index `m = 0, 1, …`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dist::{self, DistributionSpec};
use crate::{Error, Result};

pub const DEFAULT_N_DFT: usize = 1024;
pub const DEFAULT_ALIAS_MAX: u32 = 3;

/// Cosine and sine partial sums on the DFT grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DftSums {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// `a_j = Σ w_n cos(2π j n / n_dft)`, `b_j = Σ w_n sin(2π j n / n_dft)`, with the
/// weights zero-padded to `n_dft`.
pub fn dft_sums(weights: &[f64], n_dft: usize) -> Result<DftSums> {
    if weights.is_empty() {
        return Err(Error::Data("no weights to transform".into()));
    }
    if n_dft < 2 {
        return Err(Error::Data(format!("DFT length must be at least 2, got {n_dft}")));
    }
    if weights.len() > n_dft {
        return Err(Error::Data(format!(
            "{} weights do not fit in a DFT of length {n_dft}",
            weights.len()
        )));
    }
    if let Some(bad) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::Data(format!("weights must be finite, got {bad}")));
    }

    let mut buffer: Vec<Complex<f64>> = weights
        .iter()
        .map(|&w| Complex::new(w, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(n_dft)
        .collect();
    FftPlanner::new().plan_fft_forward(n_dft).process(&mut buffer);

    // The forward transform uses e^{-iθ}: X_j = a_j − i b_j.
    let a = buffer.iter().map(|c| c.re).collect();
    let mut b: Vec<f64> = buffer.iter().map(|c| -c.im).collect();
    b[0] = 0.0;
    Ok(DftSums { a, b })
}

/// Normalized power spectrum on the grid `ν_j = j / n_dft`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    n_dft: usize,
    psi: Vec<f64>,
    a0: f64,
}

impl PowerSpectrum {
    pub fn n_dft(&self) -> usize {
        self.n_dft
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// Cosine sum at ν = 0 before normalization (the total weight).
    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn frequency(&self, j: usize) -> f64 {
        j as f64 / self.n_dft as f64
    }

    /// `(ν_j, Ψ_j)` pairs over the full grid.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.psi.iter().enumerate().map(|(j, &v)| (self.frequency(j), v))
    }
}

/// `Ψ_j = (a_j² + b_j²) / a_0²` for non-negative weights that are not all zero.
///
/// Entries above the midpoint are copied from their mirror so the symmetry
/// `Ψ(ν) = Ψ(1 − ν)` holds exactly.
pub fn power_spectrum(weights: &[f64], n_dft: usize) -> Result<PowerSpectrum> {
    if let Some(bad) = weights.iter().find(|w| **w < 0.0) {
        return Err(Error::Data(format!("weights must be non-negative, got {bad}")));
    }
    let sums = dft_sums(weights, n_dft)?;
    let a0 = sums.a[0];
    if !(a0 > 0.0) {
        return Err(Error::Data("weights are all zero".into()));
    }
    let norm = a0 * a0;
    let mut psi: Vec<f64> = sums
        .a
        .iter()
        .zip(&sums.b)
        .map(|(a, b)| (a * a + b * b) / norm)
        .collect();
    psi[0] = 1.0;
    for j in (n_dft / 2 + 1)..n_dft {
        psi[j] = psi[n_dft - j];
    }
    Ok(PowerSpectrum { n_dft, psi, a0 })
}

/// Spectrum of a model pmf truncated to `n_dft` terms.
pub fn model_spectrum(spec: &DistributionSpec, n_dft: usize) -> Result<PowerSpectrum> {
    let pmf = dist::family_pmf(spec, n_dft)?;
    power_spectrum(pmf.masses(), n_dft)
}

/// Where a peak candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakSource {
    /// Grid local maximum on `(0, ½]`.
    LocalMax,
    /// Reflection `1 − ν` of a local maximum.
    Mirror,
    /// `ν = 1`, the global maximum at the origin seen through aliasing.
    Endpoint,
}

impl PeakSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PeakSource::LocalMax => "local-max",
            PeakSource::Mirror => "mirror",
            PeakSource::Endpoint => "endpoint",
        }
    }
}

/// A spectral peak, possibly shifted to an alias branch, and the generalizer
/// mean it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakCandidate {
    /// Grid index `j` with `ν = j / n_dft`; equals `n_dft` for the endpoint.
    pub grid_index: usize,
    pub n_dft: usize,
    pub nu_grid: f64,
    pub alias_m: u32,
    /// `1 / (nu_grid + alias_m)`.
    pub e_b: f64,
    pub source: PeakSource,
}

impl PeakCandidate {
    fn at(grid_index: usize, n_dft: usize, alias_m: u32, source: PeakSource) -> Self {
        let nu_grid = grid_index as f64 / n_dft as f64;
        Self { grid_index, n_dft, nu_grid, alias_m, e_b: 1.0 / (nu_grid + f64::from(alias_m)), source }
    }

    /// The aliased frequency `ν + m`.
    pub fn shifted_nu(&self) -> f64 {
        self.nu_grid + f64::from(self.alias_m)
    }
}

/// Local maxima of the spectrum with their mirrors, plus the endpoint `ν = 1`,
/// in ascending order of frequency.
///
/// A local maximum is a grid point above both neighbours; on a plateau the
/// smallest index is reported. The midpoint `ν = ½` is its own mirror and is
/// reported once.
pub fn find_peaks(ps: &PowerSpectrum) -> Vec<PeakCandidate> {
    let n = ps.n_dft;
    let psi = &ps.psi;
    // Interior indices are 1..upper; psi[upper] exists and mirrors psi[n - upper].
    let upper = n.div_ceil(2);
    let mut peaks = Vec::new();

    let mut j = 1;
    while j < upper {
        if psi[j] > psi[j - 1] {
            let mut end = j;
            while end + 1 < upper && psi[end + 1] == psi[j] {
                end += 1;
            }
            if psi[end + 1] < psi[j] {
                peaks.push(PeakCandidate::at(j, n, 0, PeakSource::LocalMax));
                peaks.push(PeakCandidate::at(n - j, n, 0, PeakSource::Mirror));
            }
            j = end + 1;
        } else {
            j += 1;
        }
    }
    if n % 2 == 0 && n >= 4 && psi[n / 2] > psi[n / 2 - 1] {
        peaks.push(PeakCandidate::at(n / 2, n, 0, PeakSource::LocalMax));
    }
    peaks.push(PeakCandidate::at(n, n, 0, PeakSource::Endpoint));
    peaks.sort_by_key(|p| p.grid_index);
    peaks
}

/// Expands each candidate into alias branches `m = 0..=m_max`, ordered by
/// frequency and then by `m`.
pub fn candidate_means(peaks: &[PeakCandidate], m_max: u32) -> Vec<PeakCandidate> {
    let mut out: Vec<PeakCandidate> = peaks
        .iter()
        .flat_map(|p| (0..=m_max).map(move |m| PeakCandidate::at(p.grid_index, p.n_dft, m, p.source)))
        .collect();
    out.sort_by_key(|p| (p.grid_index, p.alias_m));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_at_origin_is_flat() {
        let sums = dft_sums(&[1.0], 8).unwrap();
        for j in 0..8 {
            assert!((sums.a[j] - 1.0).abs() < 1e-15);
            assert!(sums.b[j].abs() < 1e-15);
        }
    }

    #[test]
    fn single_tone() {
        let sums = dft_sums(&[0.0, 1.0], 4).unwrap();
        let (a, b) = ([1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]);
        for j in 0..4 {
            assert!((sums.a[j] - a[j]).abs() < 1e-15);
            assert!((sums.b[j] - b[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(dft_sums(&[], 8).is_err());
        assert!(dft_sums(&[1.0; 9], 8).is_err());
        assert!(dft_sums(&[1.0], 1).is_err());
        assert!(power_spectrum(&[0.0, 0.0], 8).is_err());
        assert!(power_spectrum(&[1.0, -0.5], 8).is_err());
    }

    #[test]
    fn normalization_and_symmetry() {
        let ps = power_spectrum(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0], 32).unwrap();
        assert_eq!(ps.psi()[0], 1.0);
        for j in 1..32 {
            assert_eq!(ps.psi()[j], ps.psi()[32 - j]);
            assert!(ps.psi()[j] >= 0.0);
        }
        assert_eq!(ps.a0(), 25.0);
    }

    #[test]
    fn monotone_spectrum_gives_only_endpoint() {
        // Geometric weights have Ψ decreasing on (0, ½).
        let w: Vec<f64> = (0..40).map(|n| 0.5f64.powi(n)).collect();
        let ps = power_spectrum(&w, 64).unwrap();
        let peaks = find_peaks(&ps);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].source, PeakSource::Endpoint);
        assert_eq!(peaks[0].nu_grid, 1.0);
        assert_eq!(peaks[0].e_b, 1.0);
    }

    #[test]
    fn peaks_come_with_mirrors() {
        // Mass at 0 and 4: Ψ has maxima at ν = 0, ¼, ½, ¾.
        let ps = power_spectrum(&[1.0, 0.0, 0.0, 0.0, 1.0], 16).unwrap();
        let peaks = find_peaks(&ps);
        let idx: Vec<usize> = peaks.iter().map(|p| p.grid_index).collect();
        assert_eq!(idx, vec![4, 8, 12, 16]);
        assert_eq!(peaks[0].source, PeakSource::LocalMax);
        assert_eq!(peaks[1].source, PeakSource::LocalMax);
        assert_eq!(peaks[2].source, PeakSource::Mirror);
    }

    #[test]
    fn plateau_reports_smallest_index() {
        let ps = PowerSpectrum {
            n_dft: 12,
            psi: vec![1.0, 0.2, 0.5, 0.5, 0.5, 0.1, 0.05, 0.1, 0.5, 0.5, 0.5, 0.2],
            a0: 1.0,
        };
        let peaks = find_peaks(&ps);
        assert_eq!(peaks[0].grid_index, 2);
        assert_eq!(peaks[0].source, PeakSource::LocalMax);
    }

    #[test]
    fn alias_expansion() {
        let ps = power_spectrum(&[1.0, 0.0, 1.0], 4).unwrap();
        let peaks = find_peaks(&ps);
        let expanded = candidate_means(&peaks, 1);
        let half = expanded.iter().find(|c| c.grid_index == 2 && c.alias_m == 1).unwrap();
        assert!((half.e_b - 2.0 / 3.0).abs() < 1e-15);
        let end = expanded.iter().find(|c| c.grid_index == 4 && c.alias_m == 0).unwrap();
        assert_eq!(end.e_b, 1.0);
        let quarter = PeakCandidate::at(256, 1024, 1, PeakSource::LocalMax);
        assert!((quarter.e_b - 0.8).abs() < 1e-15);
        for w in expanded.windows(2) {
            assert!((w[0].grid_index, w[0].alias_m) < (w[1].grid_index, w[1].alias_m));
        }
    }
}
