//! Fitting compound Poisson distributions to binned count data.
//!
//! The crate covers four compound families (Neyman Type A, Poisson-binomial,
//! Poisson-Pascal, geometric Poisson) plus the plain Poisson and negative
//! binomial distributions used as references. Parameters are estimated either
//! by the method of moments, by the first-two-bins estimator for the geometric
//! Poisson, or from the peaks of the power spectrum of the empirical pmf.
//!
//! Module map:
//!
//! - [`dist`]: pmfs (via the compound Poisson recursion) and closed-form moments.
//! - [`spectrum`]: DFT partial sums, the normalized power spectrum and its peaks.
//! - [`estimators`]: sample statistics and every estimation procedure.
//! - [`gof`]: fitted counts, the Δ statistic and χ².
//! - [`data`]: dataset text format, histograms and Monte Carlo simulation.
//! - [`fixtures`]: summary statistics of published datasets.
//! - [`cli`]: the `cpfit` command-line front end.

pub mod cli;
pub mod data;
pub mod dist;
mod error;
pub mod estimators;
pub mod fixtures;
pub mod gof;
pub mod spectrum;

pub use data::CountHistogram;
pub use dist::{DistributionSpec, Family, Moments, PmfVector};
pub use error::{Error, Result};
pub use estimators::{DenominatorMode, FitResult, Method, SampleStats};
pub use spectrum::{PeakCandidate, PowerSpectrum};
