//! Published statistics for the historical datasets.
//!
//! The catalog (`fixtures/published.toml`) is compiled in. It holds quoted
//! sample statistics and fit results only; raw bin counts live in optional
//! files under `fixtures/counts/` that must be transcribed from the original
//! sources. [`PublishedDataset::load_counts`] returns `Ok(None)` while such a
//! file is missing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::data::{self, CountHistogram};
use crate::dist::Family;
use crate::estimators::{DenominatorMode, FitConfig, FitRequest, Method, MomentSums, SampleStats};
use crate::spectrum::PeakSource;
use crate::{Error, Result};

const CATALOG: &str = include_str!("../fixtures/published.toml");

/// Directory holding the transcribed count files.
pub fn counts_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("counts")
}

#[derive(Debug, Clone, Deserialize)]
struct Catalog {
    dataset: Vec<PublishedDataset>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PublishedDataset {
    pub id: String,
    pub citation: String,
    pub counts_file: String,
    pub n_c: Option<u64>,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    #[serde(default)]
    pub variance_denominator: DenominatorMode,
    #[serde(default)]
    pub estimate_denominator: DenominatorMode,
    #[serde(default)]
    pub decimals: i32,
    #[serde(default)]
    pub expect: Vec<Expectation>,
    #[serde(default)]
    pub peak_delta: Vec<PeakDelta>,
}

/// A quoted fit.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Expectation {
    pub family: Family,
    pub method: Method,
    pub k: Option<f64>,
    #[serde(default)]
    pub round_k: bool,
    pub scan_k: Option<[u32; 2]>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub delta: Option<f64>,
    pub candidate: Option<ExpectedCandidate>,
}

/// The spectral peak a quoted power-spectrum fit was built on.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct ExpectedCandidate {
    pub nu: f64,
    pub alias_m: u32,
    pub source: PeakSource,
}

impl ExpectedCandidate {
    pub fn shifted_nu(&self) -> f64 {
        self.nu + f64::from(self.alias_m)
    }
}

/// Quoted Δ for the Neyman Type A fit with `φ = 1/ν`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct PeakDelta {
    pub nu: f64,
    pub delta: f64,
}

/// All datasets in the catalog, in file order.
pub fn published() -> Vec<PublishedDataset> {
    let catalog: Catalog = toml::from_str(CATALOG).expect("embedded fixture catalog is valid TOML");
    catalog.dataset
}

/// Looks a dataset up by id.
pub fn dataset(id: &str) -> Option<PublishedDataset> {
    published().into_iter().find(|d| d.id == id)
}

impl PublishedDataset {
    /// Quoted statistics, with the denominator they were quoted with.
    pub fn quoted_stats(&self) -> Option<SampleStats> {
        let (n_c, mean, variance) = (self.n_c?, self.mean?, self.variance?);
        SampleStats::from_summary(n_c, mean, variance, self.variance_denominator).ok()
    }

    /// Integer moment sums consistent with the quoted statistics.
    pub fn recovered_sums(&self) -> Option<MomentSums> {
        MomentSums::recover(self.n_c?, self.mean?, self.variance?, self.variance_denominator, self.decimals)
    }

    /// Statistics on the estimate denominator, rebuilt from the recovered sums
    /// when possible and otherwise taken as quoted.
    pub fn estimate_stats(&self) -> Option<SampleStats> {
        match self.recovered_sums() {
            Some(sums) => SampleStats::from_sums(sums, self.estimate_denominator).ok(),
            None if self.variance_denominator == self.estimate_denominator => self.quoted_stats(),
            None => None,
        }
    }

    pub fn counts_path(&self) -> PathBuf {
        counts_dir().join(&self.counts_file)
    }

    /// Transcribed counts, or `None` while the file has not been provided.
    pub fn load_counts(&self) -> Result<Option<CountHistogram>> {
        let path = self.counts_path();
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        let hist = data::parse_dataset(&text)?;
        let hist = match hist.name() {
            Some(_) => hist,
            None => hist.with_name(self.id.clone()),
        };
        Ok(Some(hist.with_source(self.citation.clone())))
    }

    /// Fit settings matching the publication.
    pub fn config(&self) -> FitConfig {
        FitConfig { denominator: self.estimate_denominator, ..FitConfig::default() }
    }
}

impl Expectation {
    pub fn request(&self, config: FitConfig) -> FitRequest {
        let mut request = FitRequest::new(self.family, self.method);
        request.k = self.k;
        request.round_k = self.round_k;
        request.config = config;
        request
    }

    pub fn label(&self) -> String {
        let mut label = format!("{} {}", self.family, self.method);
        if let Some(k) = self.k {
            label.push_str(&format!(" k={k}"));
        }
        if self.round_k {
            label.push_str(" round-k");
        }
        if let Some([lo, hi]) = self.scan_k {
            label.push_str(&format!(" scan-k={lo}:{hi}"));
        }
        label
    }
}
