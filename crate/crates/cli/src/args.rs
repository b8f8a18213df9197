use clap::{Args, Parser, Subcommand, ValueEnum};
use locspec::bounds::Theorem;
use locspec::certificates::Target;
use locspec::SpectrumKind;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "locspec", version, about = "Spectra, bounds and certificates for localization operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Spectrum cache directory.
    #[arg(long, global = true, env = "LOCSPEC_CACHE", default_value = ".locspec-cache")]
    pub cache_dir: PathBuf,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Also write an SVG plot (default path: `<command>.svg`).
    #[arg(long, global = true, num_args = 0..=1)]
    pub plot: Option<Option<PathBuf>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of a localization operator.
    Spectrum(SpectrumArgs),
    /// Closed-form bounds and asymptotics.
    Bounds(BoundsArgs),
    /// Min-max lower bound on a single eigenvalue.
    Certify(CertifyArgs),
    /// Built-in experiments.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(value_parser = parse_kind)]
    pub kind: SpectrumKind,
    #[arg(long)]
    pub c: f64,
    /// Nyström order (prolate).
    #[arg(long)]
    pub m: Option<usize>,
    /// Highest basis degree (Fock domains).
    #[arg(long = "N")]
    pub basis: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(value_parser = parse_theorem)]
    pub theorem: Theorem,
    #[arg(long)]
    pub c: f64,
    /// Index or inclusive range `a:b` (1-based).
    #[arg(long, value_parser = parse_range)]
    pub n: Option<IndexRange>,
    /// Plunge threshold (karnik).
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(value_parser = parse_target)]
    pub target: Target,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub experiment: Experiment,
    /// Comma-separated list of c values.
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<f64>,
    /// Comma-separated list of plunge thresholds.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Index range `a:b` for the separation table.
    #[arg(long, value_parser = parse_range)]
    pub n: Option<IndexRange>,
    /// Restrict the counting rows of `gadgets` to one grid variant.
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    FitTime,
    FitCoherent,
    Separation,
    Plunge,
    Gadgets,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::FitTime => "fit-time",
            Experiment::FitCoherent => "fit-coherent",
            Experiment::Separation => "separation",
            Experiment::Plunge => "plunge",
            Experiment::Gadgets => "gadgets",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Lower,
    Upper,
}

/// Inclusive 1-based index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub lo: usize,
    pub hi: usize,
}

impl IndexRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

fn parse_range(s: &str) -> Result<IndexRange, String> {
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (a, b),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad index `{lo}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad index `{hi}`"))?;
    if lo == 0 || hi < lo {
        return Err(format!("need 1 <= a <= b, got {lo}:{hi}"));
    }
    Ok(IndexRange { lo, hi })
}

fn parse_kind(s: &str) -> Result<SpectrumKind, String> {
    s.parse()
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse()
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s {
        "mu-lower" => Ok(Target::MuLower),
        "lambda-lower" => Ok(Target::LambdaLower),
        other => Err(format!("unknown target `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("7").unwrap(), IndexRange { lo: 7, hi: 7 });
        assert_eq!(parse_range("3:9").unwrap().iter().count(), 7);
        assert!(parse_range("0:4").is_err());
        assert!(parse_range("5:4").is_err());
    }
}
