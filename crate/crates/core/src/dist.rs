//! Probability mass functions and moments of the compound Poisson families.
//!
//! A compound Poisson variate is the sum of `N ~ Poisson(λ)` independent copies
//! of a "generalizer" variate `B`. Its pgf is `exp(λ(G_B(x) − 1))` and its pmf
//! follows from the recursion
//!
//! ```text
//! P_0 = exp(λ(b_0 − 1)),    P_n = (λ/n) Σ_{j=1..n} j b_j P_{n−j}
//! ```
//!
//! which is evaluated here in a rescaled form so that `P_0` may underflow
//! without losing the scaled pmf `h_n = P_n / P_0`.
//!
//! | family            | generalizer `B`                            | parameters      |
//! |-------------------|--------------------------------------------|-----------------|
//! | Poisson           | point mass at 1                            | λ               |
//! | Neyman Type A     | Poisson(φ)                                 | λ, φ            |
//! | Poisson-binomial  | Binomial(k, p)                             | λ, k, p         |
//! | Poisson-Pascal    | negative binomial, pgf `(Q − P x)^{−k}`     | Λ, k, P (Q=1+P) |
//! | geometric Poisson | `b_j = q p^{j−1}`, `j ≥ 1`                  | λ, p            |
//!
//! The negative binomial (real `k`, pmf `C(n+k−1, n) p^k q^n`) is evaluated
//! directly from its closed form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Tail mass below which the automatic truncation stops.
pub const AUTO_TAIL_MASS: f64 = 1e-10;
/// Smallest length chosen by the automatic truncation.
pub const AUTO_MIN_LEN: usize = 64;
/// Largest length chosen by the automatic truncation.
pub const AUTO_MAX_LEN: usize = 1 << 16;

/// Tolerance on `Σ b_j = 1` for an untruncated generalizer.
const NORMALIZATION_TOL: f64 = 1e-9;

/// Values of the rescaled recursion are kept below this bound.
const RESCALE_LIMIT: f64 = 1e280;

/// Distribution family without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "poisson")]
    Poisson,
    #[serde(rename = "neyman")]
    NeymanTypeA,
    #[serde(rename = "pbinom")]
    PoissonBinomial,
    #[serde(rename = "pascal")]
    PoissonPascal,
    #[serde(rename = "geom")]
    GeometricPoisson,
    #[serde(rename = "negbinom")]
    NegativeBinomial,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Poisson,
        Family::NeymanTypeA,
        Family::PoissonBinomial,
        Family::PoissonPascal,
        Family::GeometricPoisson,
        Family::NegativeBinomial,
    ];

    /// Short name used on the command line and in reports.
    pub fn short_name(self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::NeymanTypeA => "neyman",
            Family::PoissonBinomial => "pbinom",
            Family::PoissonPascal => "pascal",
            Family::GeometricPoisson => "geom",
            Family::NegativeBinomial => "negbinom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.short_name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown family '{s}'")))
    }
}

/// A distribution family together with its parameters.
///
/// For `PoissonPascal`, `lambda` is the Poisson rate Λ and `p` is the Pascal
/// parameter P (not a probability); Q = 1 + P is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum DistributionSpec {
    #[serde(rename = "poisson")]
    Poisson { lambda: f64 },
    #[serde(rename = "neyman")]
    NeymanTypeA { lambda: f64, phi: f64 },
    #[serde(rename = "pbinom")]
    PoissonBinomial { lambda: f64, k: u32, p: f64 },
    #[serde(rename = "pascal")]
    PoissonPascal { lambda: f64, k: u32, p: f64 },
    #[serde(rename = "geom")]
    GeometricPoisson { lambda: f64, p: f64 },
    #[serde(rename = "negbinom")]
    NegativeBinomial { k: f64, p: f64 },
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {value}")))
    }
}

fn check_probability(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {value}")))
    }
}

fn check_count(name: &str, value: u32) -> Result<()> {
    if value >= 1 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be a positive integer, got {value}")))
    }
}

impl DistributionSpec {
    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::Poisson { lambda }.validated()
    }

    pub fn neyman(lambda: f64, phi: f64) -> Result<Self> {
        Self::NeymanTypeA { lambda, phi }.validated()
    }

    pub fn poisson_binomial(lambda: f64, k: u32, p: f64) -> Result<Self> {
        Self::PoissonBinomial { lambda, k, p }.validated()
    }

    /// Poisson-Pascal with rate Λ and Pascal parameters (k, P).
    pub fn poisson_pascal(lambda: f64, k: u32, p: f64) -> Result<Self> {
        Self::PoissonPascal { lambda, k, p }.validated()
    }

    pub fn geometric_poisson(lambda: f64, p: f64) -> Result<Self> {
        Self::GeometricPoisson { lambda, p }.validated()
    }

    pub fn negative_binomial(k: f64, p: f64) -> Result<Self> {
        Self::NegativeBinomial { k, p }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks every parameter against its domain.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Poisson { lambda } => check_positive("lambda", lambda),
            Self::NeymanTypeA { lambda, phi } => {
                check_positive("lambda", lambda)?;
                check_positive("phi", phi)
            }
            Self::PoissonBinomial { lambda, k, p } => {
                check_positive("lambda", lambda)?;
                check_count("k", k)?;
                check_probability("p", p)
            }
            Self::PoissonPascal { lambda, k, p } => {
                check_positive("Lambda", lambda)?;
                check_count("k", k)?;
                check_positive("P", p)
            }
            Self::GeometricPoisson { lambda, p } => {
                check_positive("lambda", lambda)?;
                check_probability("p", p)
            }
            Self::NegativeBinomial { k, p } => {
                check_positive("k", k)?;
                check_probability("p", p)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Poisson { .. } => Family::Poisson,
            Self::NeymanTypeA { .. } => Family::NeymanTypeA,
            Self::PoissonBinomial { .. } => Family::PoissonBinomial,
            Self::PoissonPascal { .. } => Family::PoissonPascal,
            Self::GeometricPoisson { .. } => Family::GeometricPoisson,
            Self::NegativeBinomial { .. } => Family::NegativeBinomial,
        }
    }

    /// Named parameter values in a fixed order, for reports.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Poisson { lambda } => vec![("lambda", lambda)],
            Self::NeymanTypeA { lambda, phi } => vec![("lambda", lambda), ("phi", phi)],
            Self::PoissonBinomial { lambda, k, p } => {
                vec![("lambda", lambda), ("k", f64::from(k)), ("p", p)]
            }
            Self::PoissonPascal { lambda, k, p } => {
                vec![("Lambda", lambda), ("k", f64::from(k)), ("P", p), ("Q", 1.0 + p)]
            }
            Self::GeometricPoisson { lambda, p } => {
                vec![("lambda", lambda), ("p", p), ("q", 1.0 - p)]
            }
            Self::NegativeBinomial { k, p } => vec![("k", k), ("p", p)],
        }
    }

    /// Poisson rate of the cluster count, or `None` for the negative binomial.
    pub fn cluster_rate(&self) -> Option<f64> {
        match *self {
            Self::Poisson { lambda }
            | Self::NeymanTypeA { lambda, .. }
            | Self::PoissonBinomial { lambda, .. }
            | Self::PoissonPascal { lambda, .. }
            | Self::GeometricPoisson { lambda, .. } => Some(lambda),
            Self::NegativeBinomial { .. } => None,
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family())?;
        for (i, (name, value)) in self.parameters().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        f.write_str(")")
    }
}

/// Truncated pmf `P_0..P_{N−1}` and, when `P_0 > 0` in exact arithmetic, the
/// scaled pmf `h_n = P_n / P_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfVector {
    masses: Vec<f64>,
    scaled: Option<Vec<f64>>,
    truncated: bool,
}

impl PmfVector {
    /// Wraps a complete (normalized) pmf supplied by the caller.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Data("pmf must have at least one mass".into()));
        }
        if let Some(bad) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::Domain(format!("pmf masses must be finite and >= 0, got {bad}")));
        }
        let scaled = (masses[0] > 0.0).then(|| {
            let p0 = masses[0];
            let mut h: Vec<f64> = masses.iter().map(|m| m / p0).collect();
            h[0] = 1.0;
            h
        });
        Ok(Self { masses, scaled, truncated: false })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `h_n = P_n / P_0`; `None` when the distribution has `P_0 = 0`.
    pub fn scaled(&self) -> Option<&[f64]> {
        self.scaled.as_deref()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// True when non-negligible mass lies beyond the stored range.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.total_mass()).max(0.0)
    }

    pub fn into_masses(self) -> Vec<f64> {
        self.masses
    }
}

/// Mean and variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Data("truncation length must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Builds a pmf from log-masses, flagging truncation when the stored range
/// misses more than rounding-level mass.
fn from_log_masses(log_masses: impl Iterator<Item = f64>) -> PmfVector {
    let masses: Vec<f64> = log_masses.map(f64::exp).collect();
    let total: f64 = masses.iter().sum();
    let truncated = total < 1.0 - 1e-12;
    let scaled = (masses[0] > 0.0).then(|| {
        let p0 = masses[0];
        let mut h: Vec<f64> = masses.iter().map(|m| m / p0).collect();
        h[0] = 1.0;
        h
    });
    PmfVector { masses, scaled, truncated }
}

/// Pmf `b_0..b_{N−1}` of the generalizer of a compound family.
///
/// For the plain Poisson family the generalizer is the point mass at 1. The
/// negative binomial is not built by compounding and is rejected.
pub fn generalizer_pmf(spec: &DistributionSpec, n: usize) -> Result<PmfVector> {
    spec.validate()?;
    check_len(n)?;
    let pmf = match *spec {
        DistributionSpec::Poisson { .. } => {
            let mut masses = vec![0.0; n];
            if n > 1 {
                masses[1] = 1.0;
            }
            PmfVector { masses, scaled: None, truncated: n <= 1 }
        }
        DistributionSpec::NeymanTypeA { phi, .. } => {
            let ln_phi = phi.ln();
            let mut acc = -phi;
            from_log_masses((0..n).map(|j| {
                if j > 0 {
                    acc += ln_phi - (j as f64).ln();
                }
                acc
            }))
        }
        DistributionSpec::PoissonBinomial { k, p, .. } => {
            let q = 1.0 - p;
            let ratio = (p / q).ln();
            let k = k as usize;
            let mut acc = k as f64 * q.ln();
            from_log_masses((0..n).map(|j| {
                if j > k {
                    return f64::NEG_INFINITY;
                }
                if j > 0 {
                    acc += ((k - j + 1) as f64 / j as f64).ln() + ratio;
                }
                acc
            }))
        }
        DistributionSpec::PoissonPascal { k, p, .. } => {
            let big_q = 1.0 + p;
            let ratio = (p / big_q).ln();
            let k = f64::from(k);
            let mut acc = -k * big_q.ln();
            from_log_masses((0..n).map(|j| {
                if j > 0 {
                    let j = j as f64;
                    acc += ((k + j - 1.0) / j).ln() + ratio;
                }
                acc
            }))
        }
        DistributionSpec::GeometricPoisson { p, .. } => {
            let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
            from_log_masses((0..n).map(|j| {
                if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    ln_q + (j - 1) as f64 * ln_p
                }
            }))
        }
        DistributionSpec::NegativeBinomial { .. } => {
            return Err(Error::Unsupported(
                "the negative binomial is not evaluated by compounding".into(),
            ))
        }
    };
    Ok(pmf)
}

/// Pmf of the compound Poisson distribution with rate `lambda` and the given
/// generalizer, truncated to `n` terms.
pub fn compound_pmf(lambda: f64, generalizer: &PmfVector, n: usize) -> Result<PmfVector> {
    check_positive("lambda", lambda)?;
    check_len(n)?;
    let b = generalizer.masses();
    if let Some(bad) = b.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(Error::Domain(format!("generalizer masses must be finite and >= 0, got {bad}")));
    }
    let total: f64 = b.iter().sum();
    if total > 1.0 + NORMALIZATION_TOL
        || (!generalizer.is_truncated() && (total - 1.0).abs() > NORMALIZATION_TOL)
    {
        return Err(Error::Domain(format!("generalizer is not normalized (sum = {total})")));
    }

    // Support actually used by the recursion: trailing zeros contribute nothing.
    let support = b.iter().rposition(|&m| m > 0.0).map_or(0, |i| i + 1).min(n);
    let weights: Vec<f64> = (0..support).map(|j| j as f64 * b[j]).collect();

    let ln_p0 = lambda * (b[0] - 1.0);
    let mut v = Vec::with_capacity(n);
    v.push(1.0);
    // v_n * exp(ln_scale) == h_n
    let mut ln_scale = 0.0;
    for i in 1..n {
        let upper = i.min(support.saturating_sub(1));
        let mut acc = 0.0;
        for j in 1..=upper {
            acc += weights[j] * v[i - j];
        }
        let value = lambda / i as f64 * acc;
        v.push(value);
        if value > RESCALE_LIMIT {
            for x in v.iter_mut() {
                *x /= RESCALE_LIMIT;
            }
            ln_scale += RESCALE_LIMIT.ln();
        }
    }

    let masses: Vec<f64> = v
        .iter()
        .map(|&x| if x > 0.0 { (x.ln() + ln_scale + ln_p0).exp() } else { 0.0 })
        .collect();
    let mut scaled: Vec<f64> = if ln_scale == 0.0 {
        v
    } else {
        v.iter().map(|&x| if x > 0.0 { (x.ln() + ln_scale).exp() } else { 0.0 }).collect()
    };
    scaled[0] = 1.0;
    let total_mass: f64 = masses.iter().sum();
    Ok(PmfVector { masses, scaled: Some(scaled), truncated: total_mass < 1.0 - 1e-12 })
}

fn negative_binomial_pmf(k: f64, p: f64, n: usize) -> PmfVector {
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let ln_gamma_k = ln_gamma(k);
    let log_mass = |i: usize| {
        let x = i as f64;
        ln_gamma(x + k) - ln_gamma_k - ln_gamma(x + 1.0) + k * ln_p + x * ln_q
    };
    let masses: Vec<f64> = (0..n).map(|i| log_mass(i).exp()).collect();
    let mut scaled: Vec<f64> = (0..n).map(|i| (log_mass(i) - k * ln_p).exp()).collect();
    scaled[0] = 1.0;
    let total: f64 = masses.iter().sum();
    PmfVector { masses, scaled: Some(scaled), truncated: total < 1.0 - 1e-12 }
}

/// Pmf of the distribution named by `spec`, truncated to `n` terms.
pub fn family_pmf(spec: &DistributionSpec, n: usize) -> Result<PmfVector> {
    spec.validate()?;
    check_len(n)?;
    match (*spec, spec.cluster_rate()) {
        (DistributionSpec::NegativeBinomial { k, p }, _) => Ok(negative_binomial_pmf(k, p, n)),
        (_, Some(lambda)) => compound_pmf(lambda, &generalizer_pmf(spec, n)?, n),
        (_, None) => unreachable!("only the negative binomial lacks a cluster rate"),
    }
}

/// Pmf truncated at the smallest power of two (at least [`AUTO_MIN_LEN`]) whose
/// tail mass is below [`AUTO_TAIL_MASS`], capped at [`AUTO_MAX_LEN`].
pub fn family_pmf_auto(spec: &DistributionSpec) -> Result<PmfVector> {
    let mut n = AUTO_MIN_LEN;
    loop {
        let pmf = family_pmf(spec, n)?;
        if 1.0 - pmf.total_mass() < AUTO_TAIL_MASS || n >= AUTO_MAX_LEN {
            return Ok(pmf);
        }
        n *= 2;
    }
}

/// Closed-form mean and variance.
pub fn moments(spec: &DistributionSpec) -> Result<Moments> {
    spec.validate()?;
    let (mean, variance) = match *spec {
        DistributionSpec::Poisson { lambda } => (lambda, lambda),
        DistributionSpec::NeymanTypeA { lambda, phi } => (lambda * phi, lambda * phi * (1.0 + phi)),
        DistributionSpec::PoissonBinomial { lambda, k, p } => {
            let kp = f64::from(k) * p;
            (lambda * kp, lambda * kp * (kp + 1.0 - p))
        }
        DistributionSpec::PoissonPascal { lambda, k, p } => {
            let kp = f64::from(k) * p;
            (lambda * kp, lambda * kp * (kp + 1.0 + p))
        }
        DistributionSpec::GeometricPoisson { lambda, p } => {
            let q = 1.0 - p;
            (lambda / q, lambda * (1.0 + p) / (q * q))
        }
        DistributionSpec::NegativeBinomial { k, p } => {
            let q = 1.0 - p;
            (k * q / p, k * q / (p * p))
        }
    };
    Ok(Moments { mean, variance })
}

/// Pascal parameters `(Λ, P)` with `k = 1`; `Q = 1 + P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PascalParams {
    pub lambda: f64,
    pub p: f64,
}

impl PascalParams {
    pub fn q(&self) -> f64 {
        1.0 + self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricParams {
    pub lambda: f64,
    pub p: f64,
}

/// Maps geometric Poisson `(λ, p)` to the equivalent Poisson-Pascal with
/// `k = 1`, using `λ = ΛP/Q`, `p = P/Q`, `q = 1/Q`.
pub fn geometric_to_pascal(lambda: f64, p: f64) -> Result<PascalParams> {
    check_positive("lambda", lambda)?;
    check_probability("p", p)?;
    let q = 1.0 - p;
    Ok(PascalParams { lambda: lambda / p, p: p / q })
}

/// Inverse of [`geometric_to_pascal`].
pub fn pascal_to_geometric(lambda: f64, p: f64) -> Result<GeometricParams> {
    check_positive("Lambda", lambda)?;
    check_positive("P", p)?;
    let big_q = 1.0 + p;
    Ok(GeometricParams { lambda: lambda * p / big_q, p: p / big_q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_boundary_parameters() {
        assert!(DistributionSpec::neyman(1.0, 0.0).is_err());
        assert!(DistributionSpec::neyman(0.0, 1.0).is_err());
        assert!(DistributionSpec::poisson_binomial(1.0, 0, 0.5).is_err());
        assert!(DistributionSpec::poisson_binomial(1.0, 3, 1.0).is_err());
        assert!(DistributionSpec::geometric_poisson(1.0, 0.0).is_err());
        assert!(DistributionSpec::poisson_pascal(1.0, 1, 0.0).is_err());
        assert!(DistributionSpec::negative_binomial(2.5, 0.5).is_ok());
        assert!(DistributionSpec::negative_binomial(f64::NAN, 0.5).is_err());
        let bad = DistributionSpec::NeymanTypeA { lambda: 1.0, phi: 0.0 };
        assert!(generalizer_pmf(&bad, 8).is_err());
    }

    #[test]
    fn bernoulli_generalizer() {
        let spec = DistributionSpec::poisson_binomial(1.0, 1, 0.5).unwrap();
        let b = generalizer_pmf(&spec, 3).unwrap();
        assert!(close(b.masses()[0], 0.5, 1e-15));
        assert!(close(b.masses()[1], 0.5, 1e-15));
        assert_eq!(b.masses()[2], 0.0);
    }

    #[test]
    fn geometric_generalizer_starts_at_one() {
        let spec = DistributionSpec::geometric_poisson(1.3, 0.5).unwrap();
        let b = generalizer_pmf(&spec, 6).unwrap();
        assert_eq!(b.masses()[0], 0.0);
        assert!(close(b.masses()[1], 0.5, 1e-15));
        assert!(close(b.masses()[2], 0.25, 1e-15));
        assert!(b.scaled().is_none());
    }

    #[test]
    fn point_mass_generalizer_gives_poisson() {
        let b = PmfVector::from_masses(vec![0.0, 1.0]).unwrap();
        let pmf = compound_pmf(2.0, &b, 4).unwrap();
        let e = (-2.0f64).exp();
        let want = [e, 2.0 * e, 2.0 * e, 4.0 / 3.0 * e];
        for (got, want) in pmf.masses().iter().zip(want) {
            assert!(close(*got, want, 1e-15), "{got} vs {want}");
        }
    }

    #[test]
    fn compound_rejects_bad_input() {
        let b = PmfVector::from_masses(vec![0.0, 1.0]).unwrap();
        assert!(compound_pmf(0.0, &b, 4).is_err());
        assert!(compound_pmf(-1.0, &b, 4).is_err());
        let unnormalized = PmfVector::from_masses(vec![0.2, 0.3]).unwrap();
        assert!(compound_pmf(1.0, &unnormalized, 4).is_err());
        let excess = PmfVector::from_masses(vec![0.6, 0.6]).unwrap();
        assert!(compound_pmf(1.0, &excess, 4).is_err());
    }

    #[test]
    fn truncated_generalizer_is_accepted() {
        let spec = DistributionSpec::neyman(1.0, 30.0).unwrap();
        let b = generalizer_pmf(&spec, 10).unwrap();
        assert!(b.is_truncated());
        assert!(compound_pmf(1.0, &b, 10).is_ok());
    }

    #[test]
    fn neyman_p0_matches_pgf_at_zero() {
        let (lambda, phi) = (2.3, 1.7);
        let pmf = family_pmf(&DistributionSpec::neyman(lambda, phi).unwrap(), 16).unwrap();
        let want = (lambda * ((-phi).exp() - 1.0)).exp();
        assert!(close(pmf.masses()[0], want, 1e-15));
        assert_eq!(pmf.scaled().unwrap()[0], 1.0);
    }

    #[test]
    fn geometric_h1_is_lambda_q() {
        let (lambda, p) = (0.7, 0.35);
        let pmf = family_pmf(&DistributionSpec::geometric_poisson(lambda, p).unwrap(), 8).unwrap();
        let h = pmf.scaled().unwrap();
        assert!(close(h[1], lambda * (1.0 - p), 1e-15));
        assert!(close(pmf.masses()[0], (-lambda).exp(), 1e-15));
    }

    #[test]
    fn neyman_5_25_normalized_at_1024() {
        let pmf = family_pmf(&DistributionSpec::neyman(5.0, 25.0).unwrap(), 1024).unwrap();
        assert!(pmf.total_mass() >= 1.0 - 1e-9);
        assert!(pmf.total_mass() <= 1.0 + 1e-12);
        assert!(!pmf.is_truncated());
    }

    #[test]
    fn geometric_equals_pascal_k1() {
        let geo = DistributionSpec::geometric_poisson(1.0, 0.5).unwrap();
        let mapped = geometric_to_pascal(1.0, 0.5).unwrap();
        assert!(close(mapped.lambda, 2.0, 1e-15));
        assert!(close(mapped.p, 1.0, 1e-15));
        assert!(close(mapped.q(), 2.0, 1e-15));
        let pascal = DistributionSpec::poisson_pascal(mapped.lambda, 1, mapped.p).unwrap();
        let a = family_pmf(&geo, 200).unwrap();
        let b = family_pmf(&pascal, 200).unwrap();
        for (x, y) in a.masses().iter().zip(b.masses()) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn mapping_round_trip() {
        let g = pascal_to_geometric(3.1460, 0.7634).unwrap();
        let back = geometric_to_pascal(g.lambda, g.p).unwrap();
        assert!(close(back.lambda, 3.1460, 1e-14));
        assert!(close(back.p, 0.7634, 1e-14));
    }

    #[test]
    fn mapping_small_p_approaches_poisson() {
        // As p -> 0 the Pascal side has P -> 0 and Λ P / Q -> λ (Λ itself diverges).
        let lambda = 1.5;
        let m = geometric_to_pascal(lambda, 1e-9).unwrap();
        assert!(m.p < 1e-8);
        assert!(close(m.lambda * m.p / m.q(), lambda, 1e-12));
    }

    #[test]
    fn moments_examples() {
        let m = moments(&DistributionSpec::neyman(5.0, 25.0).unwrap()).unwrap();
        assert_eq!(m.mean, 125.0);
        let m = moments(&DistributionSpec::poisson_binomial(10.0, 1000, 0.1).unwrap()).unwrap();
        assert!(close(m.mean, 1000.0, 1e-9));
        let m = moments(&DistributionSpec::geometric_poisson(1.0, 0.5).unwrap()).unwrap();
        assert_eq!((m.mean, m.variance), (2.0, 6.0));
        let m = moments(&DistributionSpec::negative_binomial(4.0, 0.5).unwrap()).unwrap();
        assert_eq!((m.mean, m.variance), (4.0, 8.0));
    }

    #[test]
    fn auto_truncation_is_power_of_two() {
        let spec = DistributionSpec::neyman(2.0, 5.0).unwrap();
        let pmf = family_pmf_auto(&spec).unwrap();
        assert!(pmf.tail_mass() < AUTO_TAIL_MASS);
        let shorter = family_pmf(&spec, pmf.len() / 2).unwrap();
        assert!(pmf.len() == AUTO_MIN_LEN || shorter.tail_mass() >= AUTO_TAIL_MASS);
        let pmf = family_pmf_auto(&DistributionSpec::neyman(10.0, 100.0).unwrap()).unwrap();
        assert!(pmf.len().is_power_of_two());
        assert!(pmf.tail_mass() < AUTO_TAIL_MASS);
    }

    #[test]
    fn large_rate_keeps_scaled_pmf() {
        // λ(1 − b_0) > 700: P_0 underflows but h_n stays finite and exact at h_0.
        let spec = DistributionSpec::geometric_poisson(800.0, 0.5).unwrap();
        let pmf = family_pmf(&spec, 64).unwrap();
        assert_eq!(pmf.masses()[0], 0.0);
        let h = pmf.scaled().unwrap();
        assert_eq!(h[0], 1.0);
        assert!(close(h[1] / (800.0 * 0.5), 1.0, 1e-12));
    }

    #[test]
    fn large_rate_masses_survive_rescaling() {
        let spec = DistributionSpec::poisson(1500.0).unwrap();
        let pmf = family_pmf(&spec, 2048).unwrap();
        let total = pmf.total_mass();
        assert!(close(total, 1.0, 1e-8), "total {total}");
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.short_name().parse::<Family>().unwrap(), fam);
        }
        assert!("thomas".parse::<Family>().is_err());
    }
}
