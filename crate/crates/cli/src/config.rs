//! Command-line and config-file parsing.
//!
//! Every setting resolves as: command-line flag, then config file, then the
//! built-in default.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use squintless_core::{AngularRange, ArrayConfig, Scheme, SolveParams};

pub const DEFAULT_NUM_ANTENNAS: usize = 32;
pub const DEFAULT_CARRIER_HZ: f64 = 1e12;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 1e11;
pub const DEFAULT_THETA_MIN_DEG: f64 = 0.0;
pub const DEFAULT_THETA_MAX_DEG: f64 = 60.0;
pub const DEFAULT_HEATMAP_RES: (usize, usize) = (64, 64);
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Cli(#[from] clap::Error),
    #[error("cannot read config file {path}: {message}")]
    File { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Cli(e) => e.exit_code(),
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Solve,
    Benchmark,
    Sweep {
        /// Report JSON whose phases and rotation are swept.
        from: Option<PathBuf>,
        /// Sweep uniform phases at this rotation coefficient instead.
        mu: Option<f64>,
    },
    Validate,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub array: ArrayConfig,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub range: AngularRange,
    pub params: SolveParams,
    pub out_dir: PathBuf,
    pub scheme: Option<Scheme>,
    /// Frequency rows × angle columns.
    pub heatmap_res: (usize, usize),
}

#[derive(Parser, Debug)]
#[command(
    name = "squintless",
    version,
    about = "Wideband analog beamforming with a rotatable linear array",
    after_help = "Without a subcommand, `solve` runs. Set SQUINTLESS_LOG=info (or debug, trace) for progress logs."
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Sub>,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Joint beamforming and rotation; writes report.json and heatmap.csv
    Solve,
    /// All comparison schemes; writes benchmark.json
    Benchmark,
    /// Frequency-angle gain maps; writes heatmap CSV files
    Sweep(SweepArgs),
    /// Runs the built-in invariant checks
    Validate,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Sweep the phases and rotation stored in a report JSON
    #[arg(long, value_name = "PATH", conflicts_with = "mu")]
    from: Option<PathBuf>,
    /// Sweep uniform phases at this rotation coefficient
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// TOML file with any of the settings below (snake_case keys)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of array elements [default: 32]
    #[arg(long, global = true, value_name = "N")]
    num_antennas: Option<usize>,
    /// Carrier frequency in Hz [default: 1e12]
    #[arg(long, global = true, value_name = "HZ", visible_alias = "carrier-freq")]
    carrier_freq_hz: Option<f64>,
    /// Total bandwidth in Hz [default: 1e11]
    #[arg(long, global = true, value_name = "HZ", visible_alias = "bandwidth")]
    bandwidth_hz: Option<f64>,
    /// Lower end of the angular range in degrees [default: 0]
    #[arg(long, global = true, value_name = "DEG", allow_hyphen_values = true)]
    theta_min_deg: Option<f64>,
    /// Upper end of the angular range in degrees [default: 60]
    #[arg(long, global = true, value_name = "DEG", allow_hyphen_values = true)]
    theta_max_deg: Option<f64>,
    /// Grid points on the composite interval [default: 64]
    #[arg(long, global = true, value_name = "L")]
    samples: Option<usize>,
    /// Rank-one penalty weight [default: 20]
    #[arg(long, global = true, value_name = "RHO")]
    penalty_rho: Option<f64>,
    /// Seed for the Gaussian randomization [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Gaussian randomizations in the initialization [default: 100]
    #[arg(long, global = true, value_name = "COUNT")]
    randomizations: Option<usize>,
    /// Starting rotations screened by their relaxation bound; 1 starts at mu = 1 [default: 21]
    #[arg(long, global = true, value_name = "COUNT")]
    mu_candidates: Option<usize>,
    /// Output directory [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Restrict `benchmark` to one scheme: 1, 2, 3, 4 or proposed
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// Heatmap resolution as frequencies x angles [default: 64x64]
    #[arg(long, global = true, value_name = "NFxNA")]
    heatmap_res: Option<String>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    num_antennas: Option<usize>,
    carrier_freq_hz: Option<f64>,
    bandwidth_hz: Option<f64>,
    theta_min_deg: Option<f64>,
    theta_max_deg: Option<f64>,
    samples: Option<usize>,
    penalty_rho: Option<f64>,
    seed: Option<u64>,
    randomizations: Option<usize>,
    mu_candidates: Option<usize>,
    out_dir: Option<PathBuf>,
    scheme: Option<String>,
    heatmap_res: Option<String>,
}

fn read_file_config(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parses `NFxNA`, e.g. `64x48`.
pub fn parse_resolution(s: &str) -> Result<(usize, usize), ConfigError> {
    let bad = || ConfigError::Invalid(format!("--heatmap-res expects NFxNA with positive integers, e.g. 64x64; got '{s}'"));
    let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let nf: usize = a.trim().parse().map_err(|_| bad())?;
    let na: usize = b.trim().parse().map_err(|_| bad())?;
    if nf == 0 || na == 0 {
        return Err(bad());
    }
    Ok((nf, na))
}

/// Parses arguments (including the program name) into a validated config.
pub fn parse_config<I, S>(args: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let file = match &cli.opts.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let o = cli.opts;

    let num_antennas = o.num_antennas.or(file.num_antennas).unwrap_or(DEFAULT_NUM_ANTENNAS);
    if num_antennas < 1 {
        return Err(ConfigError::Invalid("--num-antennas must be at least 1".into()));
    }
    let carrier = o.carrier_freq_hz.or(file.carrier_freq_hz).unwrap_or(DEFAULT_CARRIER_HZ);
    let bandwidth = o.bandwidth_hz.or(file.bandwidth_hz).unwrap_or(DEFAULT_BANDWIDTH_HZ);
    if !(carrier.is_finite() && carrier > 0.0) {
        return Err(ConfigError::Invalid(format!(
            "--carrier-freq-hz must be a positive frequency in Hz, got {carrier}"
        )));
    }
    if !(bandwidth.is_finite() && bandwidth >= 0.0) {
        return Err(ConfigError::Invalid(format!(
            "--bandwidth-hz must be a nonnegative bandwidth in Hz, got {bandwidth}"
        )));
    }
    let array = ArrayConfig::new(num_antennas, carrier, bandwidth)
        .map_err(|e| ConfigError::Invalid(format!("invalid array settings: {e}")))?;

    let theta_min_deg = o.theta_min_deg.or(file.theta_min_deg).unwrap_or(DEFAULT_THETA_MIN_DEG);
    let theta_max_deg = o.theta_max_deg.or(file.theta_max_deg).unwrap_or(DEFAULT_THETA_MAX_DEG);
    let range = AngularRange::from_degrees(theta_min_deg, theta_max_deg)
        .map_err(|e| ConfigError::Invalid(format!("{e} (degrees, within (-180, 180])")))?;

    let defaults = SolveParams::default();
    let params = SolveParams {
        rho: o.penalty_rho.or(file.penalty_rho).unwrap_or(defaults.rho),
        samples: o.samples.or(file.samples).unwrap_or(defaults.samples),
        n_randomizations: o.randomizations.or(file.randomizations).unwrap_or(defaults.n_randomizations),
        mu_candidates: o.mu_candidates.or(file.mu_candidates).unwrap_or(defaults.mu_candidates),
        seed: o.seed.or(file.seed).unwrap_or(defaults.seed),
        ..defaults
    };
    params
        .validate()
        .map_err(|e| ConfigError::Invalid(format!("invalid solver settings: {e}")))?;
    if params.samples == 1 && (bandwidth > 0.0 || theta_min_deg != theta_max_deg) {
        return Err(ConfigError::Invalid(
            "--samples 1 needs a single frequency and direction (bandwidth 0, theta_min = theta_max)".into(),
        ));
    }

    let scheme = o
        .scheme
        .or(file.scheme)
        .map(|s| s.parse::<Scheme>())
        .transpose()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let heatmap_res = match o.heatmap_res.or(file.heatmap_res) {
        Some(s) => parse_resolution(&s)?,
        None => DEFAULT_HEATMAP_RES,
    };
    let out_dir = o
        .out_dir
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    let command = match cli.command {
        None | Some(Sub::Solve) => Command::Solve,
        Some(Sub::Benchmark) => Command::Benchmark,
        Some(Sub::Sweep(a)) => Command::Sweep { from: a.from, mu: a.mu },
        Some(Sub::Validate) => Command::Validate,
    };
    if let Command::Sweep { mu: Some(mu), .. } = command {
        if !(mu.abs() <= 1.0) {
            return Err(ConfigError::Invalid(format!("--mu must lie in [-1, 1], got {mu}")));
        }
    }

    Ok(RunConfig {
        command,
        array,
        theta_min_deg,
        theta_max_deg,
        range,
        params,
        out_dir,
        scheme,
        heatmap_res,
    })
}
