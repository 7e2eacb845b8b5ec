//! Report assembly and machine-format emission.
//!
//! CSV output is a sequence of tables, each introduced by a `# <section>` line.
//! Floating-point values are written with 17 significant digits so that they
//! parse back to the same `f64`; JSON uses the shortest round-tripping form.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;

use crate::data::CountHistogram;
use crate::dist::{DistributionSpec, PmfVector};
use crate::estimators::{FitResult, SampleStats};
use crate::gof::{BinContribution, GofReport};
use crate::spectrum::{PeakCandidate, PowerSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Parameter {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub name: Option<String>,
    pub source: Option<String>,
    pub n_c: u64,
    pub bins: usize,
    pub mean: f64,
    pub variance: f64,
    pub denominator: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub label: String,
    pub spec: DistributionSpec,
    pub method: &'static str,
    pub parameters: Vec<Parameter>,
    pub delta: f64,
    pub chi_square: f64,
    pub candidate: Option<PeakCandidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PmfRow {
    pub n: usize,
    pub mass: f64,
    pub scaled: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub j: usize,
    pub nu: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BinRow {
    pub n: usize,
    pub observed: f64,
    pub fitted: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GofSummary {
    pub delta: f64,
    pub chi_square: f64,
    pub per_bin: Vec<BinContribution>,
}

/// Everything one command reports.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub command: &'static str,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<DistributionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<DatasetSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pmf: Vec<PmfRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spectrum: Vec<SpectrumRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<PeakCandidate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bins: Vec<BinRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gof: Option<GofSummary>,
}

impl ReportBundle {
    pub fn new(command: &'static str, format: Format) -> Self {
        Self {
            command,
            format,
            model: None,
            dataset: None,
            fits: Vec::new(),
            pmf: Vec::new(),
            spectrum: Vec::new(),
            candidates: Vec::new(),
            bins: Vec::new(),
            gof: None,
        }
    }

    pub fn with_dataset(mut self, hist: &CountHistogram, stats: &SampleStats) -> Self {
        self.dataset = Some(DatasetSummary {
            name: hist.name().map(str::to_string),
            source: hist.source().map(str::to_string),
            n_c: hist.n_c(),
            bins: hist.counts().len(),
            mean: stats.mean,
            variance: stats.variance,
            denominator: stats.denominator.as_str(),
        });
        self
    }

    pub fn with_pmf(mut self, pmf: &PmfVector) -> Self {
        let scaled = pmf.scaled();
        self.pmf = pmf
            .masses()
            .iter()
            .enumerate()
            .map(|(n, &mass)| PmfRow { n, mass, scaled: scaled.map(|s| s[n]) })
            .collect();
        self
    }

    pub fn with_spectrum(mut self, ps: &PowerSpectrum, candidates: Vec<PeakCandidate>) -> Self {
        self.spectrum = ps.points().enumerate().map(|(j, (nu, psi))| SpectrumRow { j, nu, psi }).collect();
        self.candidates = candidates;
        self
    }

    /// Adds fits and the per-bin table of observed and fitted counts.
    pub fn with_fits(mut self, hist: &CountHistogram, fits: &[(String, FitResult)]) -> Self {
        self.fits = fits
            .iter()
            .map(|(label, fit)| FitSummary {
                label: label.clone(),
                spec: fit.spec,
                method: fit.method.short_name(),
                parameters: fit.spec.parameters().into_iter().map(|(name, value)| Parameter { name, value }).collect(),
                delta: fit.delta,
                chi_square: fit.chi_square,
                candidate: fit.peak,
            })
            .collect();
        let len = fits.iter().map(|(_, f)| f.fitted_counts.len()).max().unwrap_or(0).max(hist.counts().len());
        let observed = hist.padded_counts(len);
        self.bins = (0..len)
            .map(|n| BinRow {
                n,
                observed: observed[n],
                fitted: fits.iter().map(|(_, f)| f.fitted_counts.get(n).copied()).collect(),
            })
            .collect();
        self
    }

    pub fn with_gof(mut self, report: GofReport) -> Self {
        self.gof = Some(GofSummary { delta: report.delta, chi_square: report.chi_square, per_bin: report.per_bin });
        self
    }

    pub fn render(&self) -> String {
        match self.format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(spec) = &self.model {
            section(&mut out, "model");
            out.push_str("family,parameter,value\n");
            for (name, value) in spec.parameters() {
                let _ = writeln!(out, "{},{},{}", spec.family(), name, num(value));
            }
        }
        if let Some(d) = &self.dataset {
            section(&mut out, "dataset");
            out.push_str("name,source,n_c,bins,mean,variance,denominator\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                field(d.name.as_deref().unwrap_or("")),
                field(d.source.as_deref().unwrap_or("")),
                d.n_c,
                d.bins,
                num(d.mean),
                num(d.variance),
                d.denominator
            );
        }
        if !self.fits.is_empty() {
            section(&mut out, "fits");
            out.push_str("fit,family,method,delta,chi_square,peak_nu,alias_m,peak_source,e_b\n");
            for f in &self.fits {
                let peak = match &f.candidate {
                    Some(c) => format!("{},{},{},{}", num(c.nu_grid), c.alias_m, c.source.as_str(), num(c.e_b)),
                    None => ",,,".to_string(),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    field(&f.label),
                    f.spec.family(),
                    f.method,
                    num(f.delta),
                    num(f.chi_square),
                    peak
                );
            }
            section(&mut out, "parameters");
            out.push_str("fit,parameter,value\n");
            for f in &self.fits {
                for p in &f.parameters {
                    let _ = writeln!(out, "{},{},{}", field(&f.label), p.name, num(p.value));
                }
            }
        }
        if !self.pmf.is_empty() {
            section(&mut out, "pmf");
            out.push_str("n,p_n,h_n\n");
            for r in &self.pmf {
                let _ = writeln!(out, "{},{},{}", r.n, num(r.mass), r.scaled.map(num).unwrap_or_default());
            }
        }
        if !self.spectrum.is_empty() {
            section(&mut out, "spectrum");
            out.push_str("j,nu,psi\n");
            for r in &self.spectrum {
                let _ = writeln!(out, "{},{},{}", r.j, num(r.nu), num(r.psi));
            }
        }
        if !self.candidates.is_empty() {
            section(&mut out, "candidates");
            out.push_str("grid_index,nu,alias_m,shifted_nu,e_b,source\n");
            for c in &self.candidates {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.grid_index,
                    num(c.nu_grid),
                    c.alias_m,
                    num(c.shifted_nu()),
                    num(c.e_b),
                    c.source.as_str()
                );
            }
        }
        if !self.bins.is_empty() {
            section(&mut out, "bins");
            out.push_str("n,observed");
            for f in &self.fits {
                let _ = write!(out, ",{}", field(&f.label));
            }
            out.push('\n');
            for r in &self.bins {
                let _ = write!(out, "{},{}", r.n, num(r.observed));
                for v in &r.fitted {
                    let _ = write!(out, ",{}", v.map(num).unwrap_or_default());
                }
                out.push('\n');
            }
        }
        if let Some(g) = &self.gof {
            section(&mut out, "gof");
            out.push_str("delta,chi_square\n");
            let _ = writeln!(out, "{},{}", num(g.delta), num(g.chi_square));
            section(&mut out, "bins");
            out.push_str("n,observed,fitted,delta\n");
            for b in &g.per_bin {
                let _ = writeln!(out, "{},{},{},{}", b.n, num(b.observed), num(b.fitted), num(b.delta));
            }
        }
        out
    }
}

fn section(out: &mut String, name: &str) {
    if !out.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "# {name}");
}

/// 17 significant digits: enough to restore the exact `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace(['\n', '\r'], " "))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, 0.1, 2.1140, 1e-300, 123456.789, f64::MIN_POSITIVE, 1.0 / 3.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_fields_are_quoted() {
        assert_eq!(field("plain"), "plain");
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("say \"x\""), "\"say \"\"x\"\"\"");
    }
}
