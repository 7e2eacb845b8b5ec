//! Command-line front end.
//!
//! Every number the commands print comes from a library call; this module
//! only parses arguments, reads inputs and formats reports.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 estimation error.

pub mod plot;
pub mod report;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{self, CountHistogram};
use crate::dist::{self, DistributionSpec, Family};
use crate::estimators::{self, DenominatorMode, FitConfig, FitRequest, FitResult, Method, SampleStats};
use crate::gof;
use crate::spectrum::{self, DEFAULT_ALIAS_MAX, DEFAULT_N_DFT};
use crate::Error;

use plot::Series;
use report::{Format, ReportBundle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_ESTIMATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cpfit", version, about = "Fit compound Poisson distributions to binned count data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print P_n and h_n = P_n / P_0 for a distribution.
    Pmf(PmfArgs),
    /// Print the power spectrum of a dataset or distribution and its peak candidates.
    Spectrum(SpectrumArgs),
    /// Fit a family to a dataset with one or more methods.
    Fit(FitArgs),
    /// Goodness of fit of a distribution or of fitted counts against a dataset.
    Gof(GofArgs),
    /// Draw a simulated dataset.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// poisson, neyman, pbinom, pascal, geom or negbinom
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    /// Poisson rate (Λ for pascal)
    #[arg(long)]
    lambda: Option<f64>,
    /// Neyman Type A generalizer mean
    #[arg(long)]
    phi: Option<f64>,
    /// p (P for pascal)
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PmfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of terms (default: until the tail mass is below 1e-10)
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Dataset file; otherwise the distribution given by --family etc.
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_N_DFT)]
    ndft: usize,
    #[arg(long, default_value_t = DEFAULT_ALIAS_MAX)]
    alias_max: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// mm, p0h1, ps or nb; repeat or separate with commas
    #[arg(long, value_parser = parse_method, value_delimiter = ',', default_value = "mm")]
    method: Vec<Method>,
    #[arg(long)]
    k: Option<f64>,
    /// Round the negative binomial k to an integer
    #[arg(long)]
    round_k: bool,
    /// Integer k search, e.g. 1:20
    #[arg(long, value_parser = parse_scan_range)]
    scan_k: Option<RangeInclusive<u32>>,
    #[arg(long, default_value_t = DEFAULT_N_DFT)]
    ndft: usize,
    #[arg(long, default_value_t = DEFAULT_ALIAS_MAX)]
    alias_max: u32,
    #[arg(long, value_parser = parse_denominator, default_value = "n-1")]
    denominator: DenominatorMode,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct GofArgs {
    #[arg(long)]
    data: PathBuf,
    /// Fitted counts file (`n f_n` per line); otherwise the distribution given by --family etc.
    #[arg(long)]
    fitted: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = parse_denominator, default_value = "n-1")]
    denominator: DenominatorMode,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_denominator(s: &str) -> Result<DenominatorMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `min:max` with `1 ≤ min ≤ max`.
pub fn parse_scan_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected <min>:<max>, got '{s}'"))?;
    let lo: u32 = lo.trim().parse().map_err(|_| format!("invalid lower bound '{lo}'"))?;
    let hi: u32 = hi.trim().parse().map_err(|_| format!("invalid upper bound '{hi}'"))?;
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= min <= max, got {lo}:{hi}"));
    }
    Ok(lo..=hi)
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: format!("usage error: {}", message.into()) }
    }

    fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: format!("data error: {}", message.into()) }
    }

    /// Classifies a library error raised while reading inputs or estimating.
    fn from_error(e: Error) -> Self {
        let code = match e {
            Error::Unsupported(_) => EXIT_USAGE,
            Error::Parse { .. } | Error::Data(_) => EXIT_DATA,
            Error::Domain(_) | Error::Overdispersion { .. } | Error::Estimation(_) | Error::NoAdmissibleCandidate => {
                EXIT_ESTIMATION
            }
        };
        let class = match code {
            EXIT_USAGE => "usage error",
            EXIT_DATA => "data error",
            _ => "estimation error",
        };
        Self { code, message: format!("{class}: {e}") }
    }

    /// Domain errors in user-supplied parameters are usage errors.
    fn from_user_spec(e: Error) -> Self {
        match e {
            Error::Domain(m) => Self::usage(m),
            other => Self::from_error(other),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::from_error(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// status. Reports go to `stdout` unless `--out` is given; diagnostics go to
/// `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Pmf(a) => cmd_pmf(a, stdout),
        Command::Spectrum(a) => cmd_spectrum(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Gof(a) => cmd_gof(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "cpfit: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

fn integer_k(k: Option<f64>, family: Family) -> CliResult<u32> {
    let k = k.ok_or_else(|| Failure::usage(format!("family {family} needs --k")))?;
    if k.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&k) {
        return Err(Failure::usage(format!("--k must be a positive integer for family {family}, got {k}")));
    }
    Ok(k as u32)
}

impl ModelArgs {
    fn given(&self) -> bool {
        self.family.is_some()
    }

    fn spec(&self) -> CliResult<DistributionSpec> {
        let family = self.family.ok_or_else(|| Failure::usage("--family is required"))?;
        let need = |value: Option<f64>, flag: &str| {
            value.ok_or_else(|| Failure::usage(format!("family {family} needs --{flag}")))
        };
        let spec = match family {
            Family::Poisson => DistributionSpec::poisson(need(self.lambda, "lambda")?),
            Family::NeymanTypeA => DistributionSpec::neyman(need(self.lambda, "lambda")?, need(self.phi, "phi")?),
            Family::PoissonBinomial => DistributionSpec::poisson_binomial(
                need(self.lambda, "lambda")?,
                integer_k(self.k, family)?,
                need(self.p, "p")?,
            ),
            Family::PoissonPascal => DistributionSpec::poisson_pascal(
                need(self.lambda, "lambda")?,
                integer_k(self.k, family)?,
                need(self.p, "p")?,
            ),
            Family::GeometricPoisson => DistributionSpec::geometric_poisson(need(self.lambda, "lambda")?, need(self.p, "p")?),
            Family::NegativeBinomial => DistributionSpec::negative_binomial(need(self.k, "k")?, need(self.p, "p")?),
        };
        spec.map_err(Failure::from_user_spec)
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn read_dataset(path: &Path) -> CliResult<CountHistogram> {
    let text = read_text(path)?;
    data::parse_dataset(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display())))
}

fn emit(output: &OutputArgs, report: &ReportBundle, plot: Option<String>, stdout: &mut dyn Write) -> CliResult<()> {
    let text = report.render();
    match &output.out {
        Some(path) => write_file(path, &text)?,
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::data(format!("cannot write output: {e}")))?,
    }
    if let (Some(path), Some(svg)) = (&output.plot, plot) {
        write_file(path, &svg)?;
    }
    Ok(())
}

fn cmd_pmf(args: PmfArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = args.model.spec()?;
    let pmf = match args.n {
        Some(0) => return Err(Failure::usage("--n must be at least 1")),
        Some(n) => dist::family_pmf(&spec, n)?,
        None => dist::family_pmf_auto(&spec)?,
    };
    let plot = args.output.plot.as_ref().map(|_| {
        let (label, values) = match pmf.scaled() {
            Some(h) => ("h_n", h),
            None => ("P_n", pmf.masses()),
        };
        let pts = values.iter().enumerate().map(|(n, &v)| (n as f64, v)).collect();
        plot::render(&spec.to_string(), "n", label, &[Series::line(label, pts)])
    });
    let mut report = ReportBundle::new("pmf", args.output.format).with_pmf(&pmf);
    report.model = Some(spec);
    emit(&args.output, &report, plot, stdout)
}

fn cmd_spectrum(args: SpectrumArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut report = ReportBundle::new("spectrum", args.output.format);
    let (ps, title) = match (&args.data, args.model.given()) {
        (Some(_), true) => return Err(Failure::usage("give either --data or --family, not both")),
        (None, false) => return Err(Failure::usage("give --data or --family")),
        (Some(path), false) => {
            let hist = read_dataset(path)?;
            let stats = SampleStats::from_histogram(&hist, DenominatorMode::default())?;
            let ps = estimators::empirical_spectrum(&hist, args.ndft)?;
            let title = hist.name().unwrap_or("dataset").to_string();
            report = report.with_dataset(&hist, &stats);
            (ps, title)
        }
        (None, true) => {
            let spec = args.model.spec()?;
            report.model = Some(spec);
            (spectrum::model_spectrum(&spec, args.ndft)?, spec.to_string())
        }
    };
    let candidates = spectrum::candidate_means(&spectrum::find_peaks(&ps), args.alias_max);
    let plot = args.output.plot.as_ref().map(|_| {
        let mut pts: Vec<(f64, f64)> = ps.points().collect();
        pts.push((1.0, 1.0));
        plot::render(&format!("power spectrum: {title}"), "nu", "Psi", &[Series::line("Psi", pts)])
    });
    let report = report.with_spectrum(&ps, candidates);
    emit(&args.output, &report, plot, stdout)
}

fn fit_label(fit: &FitResult, scanned: bool) -> String {
    let mut label = format!("{}-{}", fit.spec.family(), fit.method);
    match fit.spec {
        DistributionSpec::PoissonBinomial { k, .. } | DistributionSpec::PoissonPascal { k, .. } => {
            label.push_str(&format!("-k{k}"));
        }
        DistributionSpec::NegativeBinomial { k, .. } if scanned => label.push_str(&format!("-k{k}")),
        _ => {}
    }
    label
}

fn cmd_fit(args: FitArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let hist = read_dataset(&args.data)?;
    if args.ndft < 2 {
        return Err(Failure::usage("--ndft must be at least 2"));
    }
    let stats = SampleStats::from_histogram(&hist, args.denominator)?;
    let config = FitConfig { n_dft: args.ndft, m_max: args.alias_max, denominator: args.denominator };
    let mut methods = args.method.clone();
    methods.dedup();

    let mut fits = Vec::with_capacity(methods.len());
    for method in methods {
        let mut request = FitRequest::new(args.family, method);
        request.k = args.k;
        request.round_k = args.round_k;
        request.config = config;
        let result = match &args.scan_k {
            Some(range) => estimators::scan_k(&hist, &request, range.clone()),
            None => estimators::fit(&hist, &request),
        };
        let fit = result?;
        fits.push((fit_label(&fit, args.scan_k.is_some()), fit));
    }

    let plot = args.output.plot.as_ref().map(|_| {
        let mut series = vec![Series::points(
            "data",
            hist.counts().iter().enumerate().map(|(n, &c)| (n as f64, c as f64)).collect(),
        )];
        for (label, fit) in &fits {
            series.push(Series::line(
                label.clone(),
                fit.fitted_counts.iter().enumerate().map(|(n, &f)| (n as f64, f)).collect(),
            ));
        }
        plot::render(hist.name().unwrap_or("dataset"), "n", "c_n", &series)
    });
    let report = ReportBundle::new("fit", args.output.format).with_dataset(&hist, &stats).with_fits(&hist, &fits);
    emit(&args.output, &report, plot, stdout)
}

fn cmd_gof(args: GofArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let hist = read_dataset(&args.data)?;
    let stats = SampleStats::from_histogram(&hist, args.denominator)?;
    let mut report = ReportBundle::new("gof", args.output.format).with_dataset(&hist, &stats);
    let fitted = match (&args.fitted, args.model.given()) {
        (Some(_), true) => return Err(Failure::usage("give either --fitted or --family, not both")),
        (None, false) => return Err(Failure::usage("give --fitted or --family")),
        (Some(path), false) => {
            let text = read_text(path)?;
            let fitted =
                data::parse_fitted_counts(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            if fitted.len() < hist.last_nonzero().map_or(0, |i| i + 1) {
                return Err(Failure::data(format!(
                    "fitted counts cover {} bins but the dataset has counts up to bin {}",
                    fitted.len(),
                    hist.last_nonzero().unwrap_or(0)
                )));
            }
            fitted
        }
        (None, true) => {
            let spec = args.model.spec()?;
            report.model = Some(spec);
            let bins = estimators::fit_bin_count(&hist, &spec)?;
            gof::fitted_counts(&spec, hist.n_c(), bins)?
        }
    };
    let observed = hist.padded_counts(fitted.len());
    let gof_report = gof::gof_report(&observed, &fitted, hist.n_c(), stats.variance)?;

    let plot = args.output.plot.as_ref().map(|_| {
        let data = observed.iter().enumerate().map(|(n, &c)| (n as f64, c)).collect();
        let fit = fitted.iter().enumerate().map(|(n, &f)| (n as f64, f)).collect();
        plot::render(hist.name().unwrap_or("dataset"), "n", "c_n", &[Series::points("data", data), Series::line("fitted", fit)])
    });
    let report = report.with_gof(gof_report);
    emit(&args.output, &report, plot, stdout)
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = args.model.spec()?;
    if args.samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let hist = data::simulate(&spec, args.samples, args.seed)?
        .with_name(format!("simulated {spec}"))
        .with_source(format!("cpfit simulate, seed {}, rng {}", args.seed, data::SIMULATION_RNG));
    let text = hist.to_text();
    match &args.out {
        Some(path) => write_file(path, &text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::data(format!("cannot write output: {e}"))),
    }
}
