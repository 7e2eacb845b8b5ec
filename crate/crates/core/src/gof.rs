//! Goodness of fit: fitted counts, `Δ = Σ (c_n − f_n)² / (N_c s²)` and
//! `χ² = Σ (c_n − f_n)² / f_n`.
//!
//! Neither statistic aggregates sparse bins. Δ is what the estimators minimize;
//! χ² is reported alongside it.

use serde::{Deserialize, Serialize};

use crate::dist::{self, DistributionSpec};
use crate::{Error, Result};

/// Per-bin breakdown of Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinContribution {
    pub n: usize,
    pub observed: f64,
    pub fitted: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub delta: f64,
    pub chi_square: f64,
    pub per_bin: Vec<BinContribution>,
}

/// `f_n = N_c P_n` for `n < n_bins`. Every fitted count must be positive.
pub fn fitted_counts(spec: &DistributionSpec, n_c: u64, n_bins: usize) -> Result<Vec<f64>> {
    if n_c == 0 {
        return Err(Error::Data("total count must be positive".into()));
    }
    let pmf = dist::family_pmf(spec, n_bins)?;
    let total = n_c as f64;
    let fitted: Vec<f64> = pmf.masses().iter().map(|p| total * p).collect();
    if let Some(n) = fitted.iter().position(|&f| !(f > 0.0)) {
        return Err(Error::Estimation(format!("fitted count underflows to zero at bin {n} for {spec}")));
    }
    Ok(fitted)
}

fn check_aligned(observed: &[f64], fitted: &[f64]) -> Result<()> {
    if observed.len() != fitted.len() {
        return Err(Error::Data(format!(
            "observed and fitted counts differ in length ({} vs {})",
            observed.len(),
            fitted.len()
        )));
    }
    Ok(())
}

/// `Δ = Σ (c_n − f_n)² / (N_c s²)`.
pub fn delta_statistic(observed: &[f64], fitted: &[f64], n_c: u64, s2: f64) -> Result<f64> {
    check_aligned(observed, fitted)?;
    if !(s2 > 0.0 && s2.is_finite()) {
        return Err(Error::Data(format!("Δ needs a positive sample variance, got {s2}")));
    }
    let norm = n_c as f64 * s2;
    Ok(observed.iter().zip(fitted).map(|(c, f)| (c - f) * (c - f) / norm).sum())
}

/// `χ² = Σ (c_n − f_n)² / f_n`, without bin aggregation. A bin with
/// `c_n = f_n = 0` contributes nothing.
pub fn chi_square(observed: &[f64], fitted: &[f64]) -> Result<f64> {
    check_aligned(observed, fitted)?;
    let mut total = 0.0;
    for (&c, &f) in observed.iter().zip(fitted) {
        if f > 0.0 {
            total += (c - f) * (c - f) / f;
        } else if !(f == 0.0 && c == 0.0) {
            return Err(Error::Data(format!("χ² needs positive fitted counts, got {f} against {c}")));
        }
    }
    Ok(total)
}

/// Both statistics plus the per-bin Δ contributions.
pub fn gof_report(observed: &[f64], fitted: &[f64], n_c: u64, s2: f64) -> Result<GofReport> {
    let chi_square = chi_square(observed, fitted)?;
    delta_statistic(observed, fitted, n_c, s2)?;
    let norm = n_c as f64 * s2;
    let per_bin: Vec<BinContribution> = observed
        .iter()
        .zip(fitted)
        .enumerate()
        .map(|(n, (&c, &f))| BinContribution { n, observed: c, fitted: f, delta: (c - f) * (c - f) / norm })
        .collect();
    let delta = per_bin.iter().map(|b| b.delta).sum();
    Ok(GofReport { delta, chi_square, per_bin })
}
