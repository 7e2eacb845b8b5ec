//! Count histograms, the dataset text format and Monte Carlo simulation.
//!
//! Dataset files are UTF-8 text with one `n count` pair per line (both
//! non-negative integers, whitespace separated). `#` starts a comment;
//! `# name: <text>` and `# source: <text>` set metadata. Bins may appear in
//! any order, missing bins are zero and duplicates are rejected.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Geometric, Poisson};
use rayon::prelude::*;

use crate::dist::DistributionSpec;
use crate::{Error, Result};

/// Largest bin index accepted from a dataset file.
pub const MAX_BIN_INDEX: usize = 1 << 20;

/// Samples drawn from one RNG stream during simulation.
pub const SIMULATION_BLOCK: u64 = 1 << 16;

/// Algorithm and seeding rule of the simulation RNG.
pub const SIMULATION_RNG: &str = "chacha8 (seed_from_u64(seed), stream = block index, 65536 samples per block)";

/// Observed counts `c_0..c_M` per bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountHistogram {
    counts: Vec<u64>,
    n_c: u64,
    name: Option<String>,
    source: Option<String>,
}

impl CountHistogram {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Data("histogram has no bins".into()));
        }
        let n_c = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::Data("total count overflows".into()))?;
        if n_c == 0 {
            return Err(Error::Data("histogram has no observations".into()));
        }
        Ok(Self { counts, n_c, name: None, source: None })
    }

    /// Histogram of raw observations `x_i`.
    pub fn from_observations(observations: &[u64]) -> Result<Self> {
        let max = observations.iter().copied().max().ok_or_else(|| Error::Data("no observations".into()))?;
        let max = usize::try_from(max).map_err(|_| Error::Data("observation too large".into()))?;
        let mut counts = vec![0u64; max + 1];
        for &x in observations {
            counts[x as usize] += 1;
        }
        Self::new(counts)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, n: usize) -> u64 {
        self.counts.get(n).copied().unwrap_or(0)
    }

    /// Total count `N_c`.
    pub fn n_c(&self) -> u64 {
        self.n_c
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn last_nonzero(&self) -> Option<usize> {
        self.counts.iter().rposition(|&c| c > 0)
    }

    /// `c_n / N_c` for every stored bin.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.n_c as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Counts as reals, zero-padded or cut to `len` bins.
    pub fn padded_counts(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.count(n) as f64).collect()
    }

    /// Multiplies every count by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let counts = self
            .counts
            .iter()
            .map(|&c| c.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Data("scaled counts overflow".into()))?;
        let mut out = Self::new(counts)?;
        out.name.clone_from(&self.name);
        out.source.clone_from(&self.source);
        Ok(out)
    }

    /// Serializes in the dataset format, one line per stored bin (zeros
    /// included) so that parsing restores the histogram exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let clean = |s: &str| s.replace(['\n', '\r'], " ").trim().to_string();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "# name: {}", clean(name));
        }
        if let Some(source) = &self.source {
            let _ = writeln!(out, "# source: {}", clean(source));
        }
        for (n, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{n} {c}");
        }
        out
    }
}

fn metadata(comment: &str, key: &str) -> Option<String> {
    let rest = comment.trim_start().strip_prefix(key)?;
    let value = rest.trim_start().strip_prefix(':')?.trim();
    (!value.is_empty()).then(|| value.to_string())
}

/// Splits the text into `(line number, fields)` for data lines, passing
/// comment text to `on_comment`.
fn data_lines<'a>(text: &'a str, mut on_comment: impl FnMut(&'a str)) -> Vec<(usize, Vec<&'a str>)> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let (body, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if body.trim().is_empty() {
                on_comment(c);
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !fields.is_empty() {
            lines.push((i + 1, fields));
        }
    }
    lines
}

fn parse_bin(line: usize, field: &str) -> Result<usize> {
    let n: usize = field
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bin index '{field}' is not a non-negative integer") })?;
    if n > MAX_BIN_INDEX {
        return Err(Error::Parse { line, message: format!("bin index {n} exceeds the limit {MAX_BIN_INDEX}") });
    }
    Ok(n)
}

fn check_pair(line: usize, fields: &[&str]) -> Result<()> {
    if fields.len() != 2 {
        return Err(Error::Parse { line, message: format!("expected 'n count', found {} fields", fields.len()) });
    }
    Ok(())
}

/// Parses a dataset file into a histogram.
pub fn parse_dataset(text: &str) -> Result<CountHistogram> {
    let mut name = None;
    let mut source = None;
    let lines = data_lines(text, |comment| {
        if let Some(v) = metadata(comment, "name") {
            name = Some(v);
        } else if let Some(v) = metadata(comment, "source") {
            source = Some(v);
        }
    });

    let mut entries: Vec<(usize, u64, usize)> = Vec::with_capacity(lines.len());
    for (line, fields) in lines {
        check_pair(line, &fields)?;
        let n = parse_bin(line, fields[0])?;
        let count: u64 = fields[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("count '{}' is not a non-negative integer", fields[1]),
        })?;
        entries.push((n, count, line));
    }
    let len = entries.iter().map(|e| e.0 + 1).max().ok_or_else(|| Error::Data("dataset has no bins".into()))?;
    let mut counts = vec![0u64; len];
    let mut seen = vec![0usize; len];
    for (n, count, line) in entries {
        if seen[n] != 0 {
            return Err(Error::Parse { line, message: format!("bin {n} already given on line {}", seen[n]) });
        }
        seen[n] = line;
        counts[n] = count;
    }
    let mut hist = CountHistogram::new(counts)?;
    hist.name = name;
    hist.source = source;
    Ok(hist)
}

/// Parses `n value` lines with real, non-negative values (e.g. fitted counts).
pub fn parse_fitted_counts(text: &str) -> Result<Vec<f64>> {
    let mut entries = Vec::new();
    for (line, fields) in data_lines(text, |_| {}) {
        check_pair(line, &fields)?;
        let n = parse_bin(line, fields[0])?;
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("value '{}' is not a number", fields[1]) })?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Parse { line, message: format!("value {value} must be finite and non-negative") });
        }
        entries.push((n, value, line));
    }
    let len = entries.iter().map(|e| e.0 + 1).max().ok_or_else(|| Error::Data("no fitted counts".into()))?;
    let mut values = vec![0.0; len];
    let mut seen = vec![0usize; len];
    for (n, value, line) in entries {
        if seen[n] != 0 {
            return Err(Error::Parse { line, message: format!("bin {n} already given on line {}", seen[n]) });
        }
        seen[n] = line;
        values[n] = value;
    }
    Ok(values)
}

/// Poisson draw that tolerates a zero rate.
fn poisson_draw(rate: f64, rng: &mut ChaCha8Rng) -> u64 {
    if rate > 0.0 {
        Poisson::new(rate).expect("rate is positive and finite").sample(rng) as u64
    } else {
        0
    }
}

/// Samples one variate by drawing the cluster count and summing generalizer draws.
struct Sampler {
    spec: DistributionSpec,
}

impl Sampler {
    fn new(spec: DistributionSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self.spec {
            DistributionSpec::NegativeBinomial { k, p } => {
                let gamma = Gamma::new(k, (1.0 - p) / p).expect("validated");
                poisson_draw(gamma.sample(rng), rng)
            }
            spec => {
                let lambda = spec.cluster_rate().expect("compound family");
                let clusters = poisson_draw(lambda, rng);
                (0..clusters).map(|_| self.generalizer(rng)).sum()
            }
        }
    }

    fn generalizer(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self.spec {
            DistributionSpec::Poisson { .. } => 1,
            DistributionSpec::NeymanTypeA { phi, .. } => poisson_draw(phi, rng),
            DistributionSpec::PoissonBinomial { k, p, .. } => {
                Binomial::new(u64::from(k), p).expect("validated").sample(rng)
            }
            DistributionSpec::PoissonPascal { k, p, .. } => {
                // Negative binomial with mean kP as a gamma mixture of Poissons.
                let gamma = Gamma::new(f64::from(k), p).expect("validated");
                poisson_draw(gamma.sample(rng), rng)
            }
            DistributionSpec::GeometricPoisson { p, .. } => {
                1 + Geometric::new(1.0 - p).expect("validated").sample(rng)
            }
            DistributionSpec::NegativeBinomial { .. } => unreachable!("not compound"),
        }
    }
}

/// Draws `n_samples` variates from `spec` and returns their histogram.
///
/// The sample index space is cut into blocks of [`SIMULATION_BLOCK`]; block
/// `i` uses its own ChaCha8 stream `i` seeded from `seed`, so the result does
/// not depend on how blocks are scheduled across threads.
pub fn simulate(spec: &DistributionSpec, n_samples: u64, seed: u64) -> Result<CountHistogram> {
    if n_samples == 0 {
        return Err(Error::Data("need at least one sample".into()));
    }
    let sampler = Sampler::new(*spec)?;
    let blocks = n_samples.div_ceil(SIMULATION_BLOCK);
    let partial: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let len = SIMULATION_BLOCK.min(n_samples - block * SIMULATION_BLOCK);
            let mut counts: Vec<u64> = Vec::new();
            for _ in 0..len {
                let x = sampler.draw(&mut rng) as usize;
                if x >= counts.len() {
                    counts.resize(x + 1, 0);
                }
                counts[x] += 1;
            }
            counts
        })
        .collect();

    let len = partial.iter().map(Vec::len).max().unwrap_or(1);
    let mut counts = vec![0u64; len];
    for block in &partial {
        for (total, c) in counts.iter_mut().zip(block) {
            *total += c;
        }
    }
    Ok(CountHistogram::new(counts)?
        .with_name(format!("simulated {spec}"))
        .with_source(format!("simulate n={n_samples} seed={seed} rng={SIMULATION_RNG}")))
}
