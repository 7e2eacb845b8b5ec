//! Parameter estimation from count histograms.
//!
//! Moment estimators (with `x̄` the sample mean and `s²` the sample variance):
//!
//! | family            | estimator                                                   |
//! |-------------------|-------------------------------------------------------------|
//! | Neyman Type A     | `φ̂ = (s² − x̄)/x̄`, `λ̂ = x̄/φ̂`                                |
//! | geometric Poisson | `λ̂ = 2x̄²/(s² + x̄)`, `p̂ = (s² − x̄)/(s² + x̄)`                |
//! | geometric Poisson | `λ̂ = −ln(c_0/N_c)`, `q̂ = (c_1/c_0)/λ̂` (first two bins)      |
//! | Poisson-binomial  | `p̂ = (s² − x̄)/((k − 1)x̄)`, `λ̂ = x̄/(k p̂)`, `k` given         |
//! | Poisson-Pascal    | `P̂ = (s² − x̄)/((k + 1)x̄)`, `Λ̂ = x̄/(k P̂)`, `k` given         |
//! | negative binomial | `k̂ = x̄²/(s² − x̄)`, `p̂ = k̂/(k̂ + x̄)`                          |
//!
//! The power-spectrum estimator reads candidate generalizer means `E[B]` off
//! the peaks of the empirical spectrum (see [`crate::spectrum`]), maps each to
//! family parameters with the mean fixed at `x̄`, and keeps the candidate with
//! the smallest Δ.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::CountHistogram;
use crate::dist::{self, DistributionSpec, Family};
use crate::gof;
use crate::spectrum::{self, PeakCandidate, PowerSpectrum, DEFAULT_ALIAS_MAX, DEFAULT_N_DFT};
use crate::{Error, Result};

/// Model mass that the fit range must cover.
pub const FIT_RANGE_MASS: f64 = 1.0 - 1e-9;

/// Denominator of the sample variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DenominatorMode {
    #[default]
    #[serde(rename = "n-1")]
    NMinusOne,
    #[serde(rename = "n")]
    N,
}

impl DenominatorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DenominatorMode::NMinusOne => "n-1",
            DenominatorMode::N => "n",
        }
    }

    fn divisor(self, n_c: u64) -> Result<f64> {
        match self {
            DenominatorMode::NMinusOne if n_c < 2 => {
                Err(Error::Data(format!("need at least 2 observations for an n-1 variance, got {n_c}")))
            }
            DenominatorMode::NMinusOne => Ok((n_c - 1) as f64),
            DenominatorMode::N => Ok(n_c as f64),
        }
    }
}

impl FromStr for DenominatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n-1" => Ok(Self::NMinusOne),
            "n" => Ok(Self::N),
            other => Err(Error::Unsupported(format!("unknown denominator '{other}'"))),
        }
    }
}

/// Integer moment sums `Σ x_i` and `Σ x_i²` of a sample of counts.
///
/// These are exact, so every statistic derived from them is reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentSums {
    pub n_c: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl MomentSums {
    pub fn from_histogram(hist: &CountHistogram) -> Self {
        let (sum, sum_sq) = hist.counts().iter().enumerate().fold((0u128, 0u128), |(s, s2), (n, &c)| {
            let (n, c) = (n as u128, u128::from(c));
            (s + n * c, s2 + n * n * c)
        });
        Self { n_c: hist.n_c(), sum, sum_sq }
    }

    /// Recovers the integer sums behind a mean and variance quoted to
    /// `decimals` decimal places.
    ///
    /// Returns `None` unless the rounding interval pins down a unique pair of
    /// integers whose statistics round back to the quoted values.
    pub fn recover(n_c: u64, mean: f64, variance: f64, mode: DenominatorMode, decimals: i32) -> Option<Self> {
        if n_c == 0 || !mean.is_finite() || !variance.is_finite() || mean < 0.0 || variance < 0.0 {
            return None;
        }
        let n = n_c as f64;
        let divisor = mode.divisor(n_c).ok()?;
        let half_unit = 0.5 * 10f64.powi(-decimals);

        let sum_f = mean * n;
        if half_unit * n >= 0.5 {
            return None;
        }
        let sum = sum_f.round();
        // Σx² = s²·d + (Σx)²/N.
        let sum_sq_f = variance * divisor + sum * sum / n;
        if half_unit * divisor >= 0.5 {
            return None;
        }
        let sum_sq = sum_sq_f.round();
        let candidate = Self { n_c, sum: sum as u128, sum_sq: sum_sq as u128 };

        let stats = SampleStats::from_sums(candidate, mode).ok()?;
        let rounds_back = |x: f64, quoted: f64| (x - quoted).abs() <= half_unit * (1.0 + 1e-9);
        (rounds_back(stats.mean, mean) && rounds_back(stats.variance, variance)).then_some(candidate)
    }
}

/// Sample mean and variance of a histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n_c: u64,
    pub mean: f64,
    pub variance: f64,
    pub denominator: DenominatorMode,
}

impl SampleStats {
    /// `x̄ = Σ n c_n / N_c`, `s² = Σ c_n (n − x̄)² / d` with `d = N_c − 1` or `N_c`.
    pub fn from_histogram(hist: &CountHistogram, mode: DenominatorMode) -> Result<Self> {
        Self::from_sums(MomentSums::from_histogram(hist), mode)
    }

    pub fn from_sums(sums: MomentSums, mode: DenominatorMode) -> Result<Self> {
        if sums.n_c == 0 {
            return Err(Error::Data("histogram is empty".into()));
        }
        let divisor = mode.divisor(sums.n_c)?;
        let n = sums.n_c as f64;
        let mean = sums.sum as f64 / n;
        // N·Σx² − (Σx)² is exact in integers and non-negative.
        let centered = sums
            .sum_sq
            .checked_mul(u128::from(sums.n_c))
            .and_then(|a| sums.sum.checked_mul(sums.sum).map(|b| a - b))
            .map(|v| v as f64 / n)
            .ok_or_else(|| Error::Data("moment sums overflow".into()))?;
        Ok(Self { n_c: sums.n_c, mean, variance: centered / divisor, denominator: mode })
    }

    /// Statistics quoted directly, e.g. from a publication.
    pub fn from_summary(n_c: u64, mean: f64, variance: f64, mode: DenominatorMode) -> Result<Self> {
        mode.divisor(n_c)?;
        if !(mean.is_finite() && mean >= 0.0 && variance.is_finite() && variance >= 0.0) {
            return Err(Error::Data(format!("invalid summary statistics: mean {mean}, variance {variance}")));
        }
        Ok(Self { n_c, mean, variance, denominator: mode })
    }

    fn require_overdispersion(&self) -> Result<()> {
        if self.mean > 0.0 && self.variance > self.mean {
            Ok(())
        } else {
            Err(Error::Overdispersion { mean: self.mean, variance: self.variance })
        }
    }
}

/// Neyman Type A by moments: returns `(λ̂, φ̂)`.
pub fn mom_neyman(stats: &SampleStats) -> Result<(f64, f64)> {
    stats.require_overdispersion()?;
    let phi = (stats.variance - stats.mean) / stats.mean;
    Ok((stats.mean / phi, phi))
}

/// Geometric Poisson by moments: returns `(λ̂, p̂)`.
pub fn mom_geometric(stats: &SampleStats) -> Result<(f64, f64)> {
    stats.require_overdispersion()?;
    let (x, s2) = (stats.mean, stats.variance);
    Ok((2.0 * x * x / (s2 + x), (s2 - x) / (s2 + x)))
}

/// Geometric Poisson from the first two bins: returns `(λ̂, q̂)`.
pub fn geometric_p0h1(hist: &CountHistogram) -> Result<(f64, f64)> {
    let n_c = hist.n_c();
    let c0 = hist.count(0);
    let c1 = hist.count(1);
    if c0 == 0 {
        return Err(Error::Estimation("first-bin estimator needs c_0 > 0".into()));
    }
    if c0 >= n_c {
        return Err(Error::Estimation("first-bin estimator needs c_0 < N_c".into()));
    }
    let lambda = -(c0 as f64 / n_c as f64).ln();
    let q = (c1 as f64 / c0 as f64) / lambda;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Estimation(format!("first-bin estimate q = {q} lies outside (0, 1)")));
    }
    Ok((lambda, q))
}

/// Poisson-binomial by moments with `k` fixed: returns `(λ̂, p̂)`.
pub fn mom_poisson_binomial(stats: &SampleStats, k: u32) -> Result<(f64, f64)> {
    if k < 2 {
        return Err(Error::Domain(format!("Poisson-binomial moments need k >= 2, got {k}")));
    }
    stats.require_overdispersion()?;
    let p = (stats.variance - stats.mean) / (f64::from(k - 1) * stats.mean);
    if p >= 1.0 {
        return Err(Error::Estimation(format!("moment estimate p = {p} is not below 1 for k = {k}")));
    }
    Ok((stats.mean / (f64::from(k) * p), p))
}

/// Poisson-Pascal by moments with `k` fixed: returns `(Λ̂, P̂)`.
pub fn mom_poisson_pascal(stats: &SampleStats, k: u32) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(Error::Domain("Poisson-Pascal needs k >= 1".into()));
    }
    stats.require_overdispersion()?;
    let p = (stats.variance - stats.mean) / (f64::from(k + 1) * stats.mean);
    Ok((stats.mean / (f64::from(k) * p), p))
}

/// Negative binomial by moments: returns `(k̂, p̂)`. With `round_k`, `k̂` is
/// rounded to the nearest positive integer before `p̂` is computed.
pub fn mom_negative_binomial(stats: &SampleStats, round_k: bool) -> Result<(f64, f64)> {
    stats.require_overdispersion()?;
    let x = stats.mean;
    let mut k = x * x / (stats.variance - x);
    if round_k {
        k = k.round().max(1.0);
    }
    Ok((k, k / (k + x)))
}

/// Negative binomial with `k` fixed and `p̂ = k/(k + x̄)`.
pub fn negative_binomial_fixed_k(stats: &SampleStats, k: f64) -> Result<(f64, f64)> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("k must be > 0, got {k}")));
    }
    if !(stats.mean > 0.0) {
        return Err(Error::Estimation("negative binomial needs a positive sample mean".into()));
    }
    Ok((k, k / (k + stats.mean)))
}

/// Estimation procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Method of moments.
    Mm,
    /// Geometric Poisson from `c_0`, `c_1`.
    P0h1,
    /// Power-spectrum peak scan.
    Ps,
    /// Negative binomial by moments.
    #[serde(rename = "nb")]
    NbMm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mm, Method::P0h1, Method::Ps, Method::NbMm];

    pub fn short_name(self) -> &'static str {
        match self {
            Method::Mm => "mm",
            Method::P0h1 => "p0h1",
            Method::Ps => "ps",
            Method::NbMm => "nb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.short_name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown method '{s}'")))
    }
}

/// Families the power-spectrum estimator can map a generalizer mean onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsFamily {
    NeymanTypeA,
    PoissonBinomial { k: u32 },
    PoissonPascal { k: u32 },
}

impl PsFamily {
    /// Parameters with generalizer mean `e_b` and overall mean `mean`, or
    /// `None` when they fall outside the family's domain.
    pub fn spec_for(self, e_b: f64, mean: f64) -> Option<DistributionSpec> {
        let spec = match self {
            PsFamily::NeymanTypeA => DistributionSpec::NeymanTypeA { lambda: mean / e_b, phi: e_b },
            PsFamily::PoissonBinomial { k } => {
                let p = e_b / f64::from(k);
                DistributionSpec::PoissonBinomial { lambda: mean / e_b, k, p }
            }
            PsFamily::PoissonPascal { k } => {
                let p = e_b / f64::from(k);
                DistributionSpec::PoissonPascal { lambda: mean / e_b, k, p }
            }
        };
        spec.validate().ok().map(|()| spec)
    }
}

/// Settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitConfig {
    pub n_dft: usize,
    pub m_max: u32,
    pub denominator: DenominatorMode,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { n_dft: DEFAULT_N_DFT, m_max: DEFAULT_ALIAS_MAX, denominator: DenominatorMode::NMinusOne }
    }
}

/// An estimated distribution and how well it fits the histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub spec: DistributionSpec,
    pub method: Method,
    pub stats: SampleStats,
    /// `f_n = N_c P_n` over the fit range.
    pub fitted_counts: Vec<f64>,
    pub delta: f64,
    pub chi_square: f64,
    /// Selected spectral candidate (power-spectrum fits only).
    pub peak: Option<PeakCandidate>,
}

/// Number of bins used to compare a model with a histogram: up to the last
/// occupied bin or the first bin at which the model mass exceeds
/// [`FIT_RANGE_MASS`], whichever is further.
pub fn fit_bin_count(hist: &CountHistogram, spec: &DistributionSpec) -> Result<usize> {
    let data_bins = hist.last_nonzero().map_or(1, |i| i + 1);
    let mut len = data_bins.max(dist::AUTO_MIN_LEN).next_power_of_two();
    loop {
        let pmf = dist::family_pmf(spec, len)?;
        let mut acc = 0.0;
        let cut = pmf.masses().iter().position(|&m| {
            acc += m;
            acc > FIT_RANGE_MASS
        });
        match cut {
            Some(i) => return Ok(data_bins.max(i + 1)),
            None if len >= dist::AUTO_MAX_LEN => return Ok(data_bins.max(len)),
            None => len *= 2,
        }
    }
}

/// Fitted counts, Δ and χ² of `spec` against `hist` over the fit range.
pub fn evaluate(hist: &CountHistogram, stats: &SampleStats, spec: DistributionSpec, method: Method) -> Result<FitResult> {
    let bins = fit_bin_count(hist, &spec)?;
    let fitted = gof::fitted_counts(&spec, hist.n_c(), bins)?;
    let observed = hist.padded_counts(bins);
    let report = gof::gof_report(&observed, &fitted, hist.n_c(), stats.variance)?;
    Ok(FitResult {
        spec,
        method,
        stats: *stats,
        fitted_counts: fitted,
        delta: report.delta,
        chi_square: report.chi_square,
        peak: None,
    })
}

/// Empirical power spectrum with weights `c_n / N_c`.
pub fn empirical_spectrum(hist: &CountHistogram, n_dft: usize) -> Result<PowerSpectrum> {
    let weights = hist.frequencies();
    let used = hist.last_nonzero().map_or(1, |i| i + 1);
    spectrum::power_spectrum(&weights[..used], n_dft)
}

/// One candidate of the power-spectrum scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub candidate: PeakCandidate,
    /// `None` when the candidate maps outside the family's parameter domain.
    pub fit: Option<FitResult>,
}

/// Evaluates every spectral candidate (peaks, mirrors, endpoint and their
/// alias branches), in candidate order.
pub fn ps_scan(hist: &CountHistogram, family: PsFamily, config: &FitConfig) -> Result<Vec<ScanEntry>> {
    let stats = SampleStats::from_histogram(hist, config.denominator)?;
    if !(stats.variance > 0.0) {
        return Err(Error::Estimation("sample variance is zero; the Δ statistic is undefined".into()));
    }
    let ps = empirical_spectrum(hist, config.n_dft)?;
    let candidates = spectrum::candidate_means(&spectrum::find_peaks(&ps), config.m_max);
    let entries = candidates
        .into_par_iter()
        .map(|candidate| {
            let fit = family.spec_for(candidate.e_b, stats.mean).and_then(|spec| {
                let mut fit = evaluate(hist, &stats, spec, Method::Ps).ok()?;
                fit.peak = Some(candidate);
                fit.delta.is_finite().then_some(fit)
            });
            ScanEntry { candidate, fit }
        })
        .collect();
    Ok(entries)
}

/// Power-spectrum estimate: the scan candidate with the smallest Δ. Ties go
/// to the smaller frequency, then the smaller alias index.
pub fn ps_estimate(hist: &CountHistogram, family: PsFamily, config: &FitConfig) -> Result<FitResult> {
    let entries = ps_scan(hist, family, config)?;
    let mut best: Option<FitResult> = None;
    // Entries are already ordered by (frequency, alias), so strict comparison keeps the first.
    for fit in entries.into_iter().filter_map(|e| e.fit) {
        if best.as_ref().is_none_or(|b| fit.delta < b.delta) {
            best = Some(fit);
        }
    }
    best.ok_or(Error::NoAdmissibleCandidate)
}

/// What to fit: a family, a method and the optional fixed `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRequest {
    pub family: Family,
    pub method: Method,
    /// Required for Poisson-binomial and Poisson-Pascal; optional fixed `k`
    /// for the negative binomial.
    pub k: Option<f64>,
    /// Round the negative-binomial `k̂` to an integer.
    pub round_k: bool,
    pub config: FitConfig,
}

impl FitRequest {
    pub fn new(family: Family, method: Method) -> Self {
        Self { family, method, k: None, round_k: false, config: FitConfig::default() }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    fn integer_k(&self) -> Result<u32> {
        let k = self
            .k
            .ok_or_else(|| Error::Unsupported(format!("family {} needs an integer k", self.family)))?;
        if k.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&k) {
            return Err(Error::Domain(format!("k must be a positive integer, got {k}")));
        }
        Ok(k as u32)
    }
}

fn unsupported(request: &FitRequest) -> Error {
    Error::Unsupported(format!("method {} is not available for family {}", request.method, request.family))
}

/// Runs one estimation procedure and evaluates the resulting fit.
pub fn fit(hist: &CountHistogram, request: &FitRequest) -> Result<FitResult> {
    let stats = SampleStats::from_histogram(hist, request.config.denominator)?;
    if !(stats.variance > 0.0) {
        return Err(Error::Estimation("sample variance is zero; the Δ statistic is undefined".into()));
    }
    let spec = match (request.method, request.family) {
        (Method::Ps, Family::NeymanTypeA) => {
            return ps_estimate(hist, PsFamily::NeymanTypeA, &request.config);
        }
        (Method::Ps, Family::PoissonBinomial) => {
            return ps_estimate(hist, PsFamily::PoissonBinomial { k: request.integer_k()? }, &request.config);
        }
        (Method::Ps, Family::PoissonPascal) => {
            return ps_estimate(hist, PsFamily::PoissonPascal { k: request.integer_k()? }, &request.config);
        }
        (Method::Mm, Family::Poisson) => {
            if !(stats.mean > 0.0) {
                return Err(Error::Estimation("Poisson fit needs a positive sample mean".into()));
            }
            DistributionSpec::Poisson { lambda: stats.mean }
        }
        (Method::Mm, Family::NeymanTypeA) => {
            let (lambda, phi) = mom_neyman(&stats)?;
            DistributionSpec::NeymanTypeA { lambda, phi }
        }
        (Method::Mm, Family::GeometricPoisson) => {
            let (lambda, p) = mom_geometric(&stats)?;
            DistributionSpec::GeometricPoisson { lambda, p }
        }
        (Method::Mm, Family::PoissonBinomial) => {
            let k = request.integer_k()?;
            let (lambda, p) = mom_poisson_binomial(&stats, k)?;
            DistributionSpec::PoissonBinomial { lambda, k, p }
        }
        (Method::Mm, Family::PoissonPascal) => {
            let k = request.integer_k()?;
            let (lambda, p) = mom_poisson_pascal(&stats, k)?;
            DistributionSpec::PoissonPascal { lambda, k, p }
        }
        (Method::Mm | Method::NbMm, Family::NegativeBinomial) => {
            let (k, p) = match request.k {
                Some(k) => negative_binomial_fixed_k(&stats, k)?,
                None => mom_negative_binomial(&stats, request.round_k)?,
            };
            DistributionSpec::NegativeBinomial { k, p }
        }
        (Method::P0h1, Family::GeometricPoisson) => {
            let (lambda, q) = geometric_p0h1(hist)?;
            DistributionSpec::GeometricPoisson { lambda, p: 1.0 - q }
        }
        (Method::P0h1, Family::PoissonPascal) => {
            if request.integer_k()? != 1 {
                return Err(unsupported(request));
            }
            let (lambda, q) = geometric_p0h1(hist)?;
            let mapped = dist::geometric_to_pascal(lambda, 1.0 - q)?;
            DistributionSpec::PoissonPascal { lambda: mapped.lambda, k: 1, p: mapped.p }
        }
        _ => return Err(unsupported(request)),
    };
    spec.validate().map_err(|e| Error::Estimation(format!("estimate outside the parameter domain: {e}")))?;
    evaluate(hist, &stats, spec, request.method)
}

/// Repeats [`fit`] for every integer `k` in `range` and keeps the smallest Δ
/// (ties go to the smaller `k`). Values of `k` for which the estimator fails
/// are skipped.
pub fn scan_k(hist: &CountHistogram, request: &FitRequest, range: RangeInclusive<u32>) -> Result<FitResult> {
    if !matches!(request.family, Family::PoissonBinomial | Family::NegativeBinomial) {
        return Err(Error::Unsupported(format!("k scan is not available for family {}", request.family)));
    }
    if range.is_empty() || *range.start() == 0 {
        return Err(Error::Domain(format!("k scan range must be non-empty and start at 1 or more, got {range:?}")));
    }
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for k in range {
        match fit(hist, &request.with_k(f64::from(k))) {
            Ok(candidate) => {
                if best.as_ref().is_none_or(|b| candidate.delta < b.delta) {
                    best = Some(candidate);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::NoAdmissibleCandidate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn stats(mean: f64, variance: f64) -> SampleStats {
        SampleStats::from_summary(100, mean, variance, DenominatorMode::NMinusOne).unwrap()
    }

    #[test]
    fn sample_stats_small_example() {
        // (x_1..x_10) = (0,0,0,0,0,2,2,2,3,3)
        let hist = CountHistogram::new(vec![5, 0, 3, 2]).unwrap();
        let s = SampleStats::from_histogram(&hist, DenominatorMode::NMinusOne).unwrap();
        assert_eq!(s.n_c, 10);
        assert!(close(s.mean, 1.2, 1e-15));
        assert!(close(s.variance, 15.6 / 9.0, 1e-14));
        let s = SampleStats::from_histogram(&hist, DenominatorMode::N).unwrap();
        assert!(close(s.variance, 1.56, 1e-14));
    }

    #[test]
    fn sample_stats_degenerate_and_errors() {
        let hist = CountHistogram::new(vec![7]).unwrap();
        let s = SampleStats::from_histogram(&hist, DenominatorMode::NMinusOne).unwrap();
        assert_eq!((s.mean, s.variance), (0.0, 0.0));
        let single = CountHistogram::new(vec![0, 1]).unwrap();
        assert!(SampleStats::from_histogram(&single, DenominatorMode::NMinusOne).is_err());
        assert!(SampleStats::from_histogram(&single, DenominatorMode::N).is_ok());
    }

    #[test]
    fn neyman_moments() {
        let (lambda, phi) = mom_neyman(&stats(1.4, 2.3272)).unwrap();
        assert!(close(lambda, 2.1140, 5e-4) && close(phi, 0.6623, 5e-4));
        let (lambda, phi) = mom_neyman(&stats(4.0333, 16.4527)).unwrap();
        assert!(close(lambda, 1.3099, 5e-4) && close(phi, 3.0792, 5e-4));
        assert!(matches!(mom_neyman(&stats(2.0, 2.0)), Err(Error::Overdispersion { .. })));
    }

    #[test]
    fn neyman_moments_from_recovered_sums() {
        // Quoted s² uses the n denominator; the estimates use n-1.
        let sums = MomentSums::recover(31, 17.2581, 121.7399, DenominatorMode::N, 4).unwrap();
        assert_eq!((sums.sum, sums.sum_sq), (535, 13007));
        let s = SampleStats::from_sums(sums, DenominatorMode::NMinusOne).unwrap();
        let (lambda, phi) = mom_neyman(&s).unwrap();
        assert!(close(lambda, 2.7441, 5e-4) && close(phi, 6.2892, 5e-4));
    }

    #[test]
    fn recover_rejects_inconsistent_summaries() {
        assert!(MomentSums::recover(325, 1.4, 2.3272, DenominatorMode::NMinusOne, 4).is_some());
        // Mean 1.40004 * 325 = 455.013: no integer sum rounds back to it at 5 decimals.
        assert!(MomentSums::recover(325, 1.40004, 2.3272, DenominatorMode::NMinusOne, 5).is_none());
        // Too coarse to pin down the sums.
        assert!(MomentSums::recover(100_000, 1.4, 2.3, DenominatorMode::N, 4).is_none());
    }

    #[test]
    fn geometric_moments() {
        let (lambda, p) = mom_geometric(&stats(0.1068, 0.2944)).unwrap();
        assert!(close(lambda, 0.056861, 1e-5) && close(p, 0.46760, 1e-4));
        let (lambda, p) = mom_geometric(&stats(2.4016, 7.0941)).unwrap();
        assert!(close(lambda, 1.2148, 1e-4) && close(p, 0.4942, 1e-4));
        assert!(mom_geometric(&stats(1.0, 1.0)).is_err());
    }

    #[test]
    fn first_two_bins() {
        let mut counts = vec![368, 200];
        counts.push(1000 - 568);
        let hist = CountHistogram::new(counts).unwrap();
        let (lambda, q) = geometric_p0h1(&hist).unwrap();
        assert!(close(lambda, 0.99967, 1e-5));
        assert!(close(q, 0.5436, 1e-4));
        assert!(geometric_p0h1(&CountHistogram::new(vec![10]).unwrap()).is_err());
        assert!(geometric_p0h1(&CountHistogram::new(vec![10, 0, 5]).unwrap()).is_err());
        assert!(geometric_p0h1(&CountHistogram::new(vec![0, 3, 5]).unwrap()).is_err());
    }

    #[test]
    fn poisson_binomial_moments() {
        let s = SampleStats::from_summary(324, 25.633, 82.368, DenominatorMode::N).unwrap();
        let (lambda, p) = mom_poisson_binomial(&s, 4).unwrap();
        assert!(close(p, 0.7378, 1e-4) && close(lambda, 8.686, 1e-3));
        assert!(mom_poisson_binomial(&s, 1).is_err());
        // p̂ ≥ 1 is rejected.
        assert!(mom_poisson_binomial(&stats(1.0, 5.0), 2).is_err());
    }

    #[test]
    fn poisson_binomial_round_trip_small_dispersion() {
        let spec = DistributionSpec::poisson_binomial(40.0, 50, 0.002).unwrap();
        let m = dist::moments(&spec).unwrap();
        let (lambda, p) = mom_poisson_binomial(&stats(m.mean, m.variance), 50).unwrap();
        assert!(close(lambda / 40.0, 1.0, 1e-10) && close(p / 0.002, 1.0, 1e-10));
    }

    #[test]
    fn negative_binomial_moments() {
        let s = stats(5.231, 10.740);
        let (k, _) = mom_negative_binomial(&s, false).unwrap();
        assert!(close(k, 4.97, 0.01));
        let (k, p) = mom_negative_binomial(&s, true).unwrap();
        assert_eq!(k, 5.0);
        assert!(close(p, 0.4887, 5e-4));
        let (k, p) = mom_negative_binomial(&stats(25.633, 82.368), false).unwrap();
        assert!(close(k, 11.58, 0.01) && close(p, 0.3112, 5e-4));
        let (k, p) = mom_negative_binomial(&stats(4.0, 8.0), false).unwrap();
        assert_eq!((k, p), (4.0, 0.5));
        let (k, p) = negative_binomial_fixed_k(&s, 7.0).unwrap();
        assert!(close(p, 0.5723, 5e-5) && k == 7.0);
    }

    #[test]
    fn ps_family_mapping() {
        let spec = PsFamily::PoissonPascal { k: 1 }.spec_for(1.0 / 1.5, 0.1068).unwrap();
        let DistributionSpec::PoissonPascal { lambda, p, .. } = spec else { panic!() };
        assert!(close(p, 2.0 / 3.0, 1e-15));
        assert!(close(lambda, 0.1602, 5e-5));
        assert!(PsFamily::PoissonBinomial { k: 2 }.spec_for(2.5, 3.0).is_none());
        assert!(PsFamily::NeymanTypeA.spec_for(2.0, 0.0).is_none());
    }

    #[test]
    fn unsupported_combinations() {
        let hist = CountHistogram::new(vec![5, 3, 4, 2, 1]).unwrap();
        let err = fit(&hist, &FitRequest::new(Family::NeymanTypeA, Method::P0h1)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let err = fit(&hist, &FitRequest::new(Family::PoissonBinomial, Method::Mm)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let err = scan_k(&hist, &FitRequest::new(Family::NeymanTypeA, Method::Mm), 1..=3).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn negative_binomial_k_scan_prefers_best_delta() {
        let hist = CountHistogram::new(vec![10, 14, 15, 12, 9, 6, 4, 3, 2, 1, 1]).unwrap();
        let request = FitRequest::new(Family::NegativeBinomial, Method::NbMm);
        let best = scan_k(&hist, &request, 1..=30).unwrap();
        for k in 1..=30 {
            let other = fit(&hist, &request.with_k(f64::from(k))).unwrap();
            assert!(best.delta <= other.delta);
        }
    }

    #[test]
    fn zero_mean_has_no_candidate() {
        let hist = CountHistogram::new(vec![4]).unwrap();
        let err = ps_estimate(&hist, PsFamily::NeymanTypeA, &FitConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Estimation(_)));
    }
}
