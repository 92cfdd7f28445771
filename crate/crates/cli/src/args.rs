use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use histspec::io::{CsvOptions, Method, ReportFormat};
use histspec::{PNorm, PlottingPositions, ReferenceSpec};

#[derive(Debug, Parser)]
#[command(
    name = "histspec",
    version,
    about = "Least p-norm histogram specification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Specify every column of a CSV against a reference (optimal unique values).
    Specify(SpecifyArgs),
    /// Closed-form quantile transformation, optionally retargeted to a normal.
    Quantile(QuantileArgs),
    /// Compare methods, references and norms on one dataset.
    Compare(CompareArgs),
    /// Specify one grayscale image against another and emit plot data.
    ImageDemo(ImageDemoArgs),
}

/// Reference distribution given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceArg {
    Uniform,
    Normal { mu: f64, sigma: f64 },
    File(PathBuf),
}

impl ReferenceArg {
    /// Generated references only; file references are resolved per column.
    pub fn generated(&self, positions: PlottingPositions) -> Option<ReferenceSpec> {
        match *self {
            ReferenceArg::Uniform => Some(ReferenceSpec::UniformQuantiles(positions)),
            ReferenceArg::Normal { mu, sigma } => Some(ReferenceSpec::Normal { mu, sigma }),
            ReferenceArg::File(_) => None,
        }
    }
}

impl FromStr for ReferenceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(ReferenceArg::Uniform);
        }
        if s == "normal" {
            return Ok(ReferenceArg::Normal {
                mu: 0.0,
                sigma: 1.0,
            });
        }
        if let Some(params) = s.strip_prefix("normal:") {
            let (mu, sigma) = params
                .split_once(',')
                .ok_or_else(|| format!("expected normal:MU,SIGMA, got '{s}'"))?;
            let mu: f64 = mu
                .trim()
                .parse()
                .map_err(|_| format!("invalid mean '{mu}'"))?;
            let sigma: f64 = sigma
                .trim()
                .parse()
                .map_err(|_| format!("invalid standard deviation '{sigma}'"))?;
            if !mu.is_finite() {
                return Err(format!("mean must be finite, got {mu}"));
            }
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(format!("standard deviation must be positive, got {sigma}"));
            }
            return Ok(ReferenceArg::Normal { mu, sigma });
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err("file: needs a path".into());
            }
            return Ok(ReferenceArg::File(PathBuf::from(path)));
        }
        Err(format!(
            "unknown reference '{s}' (expected uniform, normal, normal:MU,SIGMA or file:PATH)"
        ))
    }
}

/// Comma-separated references. The comma inside `normal:MU,SIGMA` binds
/// to the normal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceList(pub Vec<ReferenceArg>);

fn parse_reference_list(s: &str) -> Result<ReferenceList, String> {
    let mut out = Vec::new();
    let mut tokens = s.split(',');
    while let Some(token) = tokens.next() {
        let token = token.trim();
        let entry = if token.starts_with("normal:") {
            let sigma = tokens
                .next()
                .ok_or_else(|| format!("expected normal:MU,SIGMA, got '{token}'"))?;
            format!("{token},{sigma}")
        } else {
            token.to_string()
        };
        match entry.parse()? {
            ReferenceArg::File(_) => {
                return Err("file references are not supported for compare".into())
            }
            reference => out.push(reference),
        }
    }
    Ok(ReferenceList(out))
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!(
            "delimiter must be a single ASCII character, got '{s}'"
        )),
    }
}

#[derive(Debug, Clone, Args)]
pub struct CsvArgs {
    /// Field delimiter (a single character, or "tab").
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// Input files have no header row; columns are named column_1, column_2, ...
    #[arg(long)]
    pub no_header: bool,
}

impl CsvArgs {
    pub fn options(&self) -> CsvOptions {
        CsvOptions {
            delimiter: self.delimiter,
            has_header: !self.no_header,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PositionArgs {
    /// Plotting-position parameter alpha (0 with beta 0 is Hyndman-Fan type 6).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Plotting-position parameter beta.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
}

impl PositionArgs {
    pub fn positions(&self) -> PlottingPositions {
        PlottingPositions::new(self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report path. Defaults to <output>.report.<format>, or standard error
    /// when the output goes to standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub report_format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct SpecifyArgs {
    /// Input CSV.
    pub input: PathBuf,
    /// Norm exponent: 1, 2, inf, or any real >= 1.
    #[arg(long, default_value = "1")]
    pub p: PNorm,
    /// uniform, normal, normal:MU,SIGMA or file:PATH (a CSV of reference columns).
    #[arg(long, default_value = "uniform")]
    pub reference: ReferenceArg,
    #[command(flatten)]
    pub positions: PositionArgs,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    /// Input CSV.
    pub input: PathBuf,
    /// uniform, normal or normal:MU,SIGMA.
    #[arg(long, default_value = "uniform")]
    pub reference: ReferenceArg,
    /// Norm used for the reported error.
    #[arg(long, default_value = "1")]
    pub p: PNorm,
    #[command(flatten)]
    pub positions: PositionArgs,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub report: ReportArgs,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Input CSV.
    pub input: PathBuf,
    /// Comma-separated references: uniform, normal or normal:MU,SIGMA.
    #[arg(long, default_value = "uniform,normal", value_parser = parse_reference_list)]
    pub references: ReferenceList,
    /// Comma-separated norm exponents.
    #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
    pub p: Vec<PNorm>,
    /// Comma-separated methods: algorithm1, algorithm2, estimation_baseline.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "algorithm1,algorithm2,estimation_baseline"
    )]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub positions: PositionArgs,
    /// Plotting-position alpha of the baseline's quantile table (defaults to --alpha).
    #[arg(long, allow_negative_numbers = true)]
    pub baseline_alpha: Option<f64>,
    /// Plotting-position beta of the baseline's quantile table (defaults to --beta).
    #[arg(long, allow_negative_numbers = true)]
    pub baseline_beta: Option<f64>,
    /// Report path; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub report_format: ReportFormat,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct ImageDemoArgs {
    /// Input PGM image.
    pub input: PathBuf,
    /// Reference PGM image with the same number of pixels.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, default_value = "1")]
    pub p: PNorm,
    /// Rectangle X0,Y0,W,H inscribed into the input before specification.
    #[arg(long, value_delimiter = ',')]
    pub rect: Option<Vec<usize>>,
    /// Intensity of the inscribed rectangle.
    #[arg(long, default_value_t = 148)]
    pub rect_value: u8,
    /// Round the output to 8-bit intensities and write a PGM; otherwise the
    /// real-valued output is written as a CSV grid.
    #[arg(long)]
    pub quantize: bool,
    /// Output image path.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Directory for scan-line, ECDF and report files (defaults to the output's directory).
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub report_format: ReportFormat,
}
