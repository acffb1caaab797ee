use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "amoebalab", version, about = "Monte Carlo experiments on random complete intersections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected multivolume from coamoeba fiber counts.
    Multivolume(MultivolumeArgs),
    /// Fiber-count means at two fixed angle vectors (or one against uniform).
    ThetaInvariance(ThetaArgs),
    /// Expected number of real zeros of real Kostlan systems.
    ShubSmale(ShubSmaleArgs),
    /// Multivolume ratio between a toric ensemble and its dilate.
    ToricScaling(ToricArgs),
    /// Mikhalkin and amoeba-area bounds.
    Bounds(BoundsArgs),
    /// Jacobian determinants of Log and Arg on random curves.
    JacobianCheck(JacobianArgs),
    /// Amoeba raster image of a plane curve.
    Raster(RasterArgs),
    /// Mixed volume (or Mikhalkin alpha) of lattice polytopes.
    MixedVolume(MixedVolumeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Multivolume(_) => "multivolume",
            Self::ThetaInvariance(_) => "theta-invariance",
            Self::ShubSmale(_) => "shub-smale",
            Self::ToricScaling(_) => "toric-scaling",
            Self::Bounds(_) => "bounds",
            Self::JacobianCheck(_) => "jacobian-check",
            Self::Raster(_) => "raster",
            Self::MixedVolume(_) => "mixed-volume",
        }
    }
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for trial streams, images and the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Key = value file of default flag values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct MultivolumeArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Comma-separated equation degrees.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub degrees: Vec<u32>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub trials: usize,
    /// Fixed angle vector (comma-separated); uniform angles when absent.
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    /// Toric support (JSON); replaces the dense ensemble.
    #[arg(long)]
    pub support_file: Option<PathBuf>,
    /// Dilation of the toric support.
    #[arg(long, default_value_t = 1)]
    pub dilation: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct ThetaArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub degrees: Vec<u32>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub trials: usize,
    /// Angle vector; give it twice to compare two fixed values, once to
    /// compare against uniform angles.
    #[arg(long, required = true, action = clap::ArgAction::Append)]
    pub theta: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct ShubSmaleArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub degrees: Vec<u32>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct ToricArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub support_file: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub dilation: u32,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct RasterOpts {
    /// Half-width of the log window.
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 600)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1200)]
    pub samples: usize,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub degrees: Vec<u32>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub trials: usize,
    /// Random curves in the mean-area comparison (n = 1 only; 0 skips it).
    #[arg(long, default_value_t = 50)]
    pub curves: usize,
    #[command(flatten)]
    pub raster: RasterOpts,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct JacobianArgs {
    #[arg(long, default_value_t = 20)]
    pub curves: usize,
    /// Points per curve.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Curve degrees cycle through 1..=max-degree.
    #[arg(long, default_value_t = 4)]
    pub max_degree: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct RasterArgs {
    /// Curve in the polynomial text format; a random Kostlan curve otherwise.
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Degree of the random curve.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub degrees: Vec<u32>,
    #[command(flatten)]
    pub raster: RasterOpts,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone, serde::Serialize)]
pub struct MixedVolumeArgs {
    #[arg(long)]
    pub support_file: PathBuf,
    /// Repeat every polytope twice (Mikhalkin alpha).
    #[arg(long)]
    pub doubled: bool,
    #[command(flatten)]
    pub common: Common,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Builds the effective argument list: flags from a `--config` file are
/// inserted after the subcommand unless the command line sets them.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_owned(),
        None => argv
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| CliError::Usage("--config needs a path".into()))?,
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let given: Vec<&str> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut extra = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{path}:{}: expected key = value", lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("{path}:{}: invalid key", lineno + 1)));
        }
        if given.contains(&key.as_str()) {
            continue;
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => {
                extra.push(format!("--{key}"));
                extra.push(value.to_owned());
            }
        }
    }
    let mut out = argv;
    // after the binary name and the subcommand
    let at = out.len().min(2);
    out.splice(at..at, extra);
    Ok(out)
}
