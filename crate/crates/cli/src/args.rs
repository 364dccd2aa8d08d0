use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use discreg::volume::Dims;

#[derive(Debug, Parser)]
#[command(name = "discreg", version, about = "Discrete deformable registration of 3-D volumes")]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,

    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register a moving volume onto a fixed volume.
    Register(RegisterArgs),
    /// Compute a feature volume.
    Features(FeaturesArgs),
    /// Score label overlap and write a Jaccard report.
    Evaluate(EvaluateArgs),
    /// Register and score every pair of a manifest.
    Batch(BatchArgs),
    /// Generate a seeded synthetic case with known ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeatureKind {
    Intensity,
    Edge,
    Ssc,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StandardizeMode {
    None,
    ToFixed,
    ToReference,
}

/// Flags that override the configuration file; single values apply to every level.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigOverrides {
    #[arg(long, value_enum)]
    pub feature: Option<FeatureKind>,
    /// Precomputed fixed-image features (with --feature external).
    #[arg(long)]
    pub fixed_features: Option<PathBuf>,
    /// Precomputed moving-image features (with --feature external).
    #[arg(long)]
    pub moving_features: Option<PathBuf>,
    /// Rescale each external feature channel to zero mean and unit variance.
    #[arg(long)]
    pub zscore_external: bool,
    /// Displacement quantization step in voxels.
    #[arg(long)]
    pub q: Option<f64>,
    /// Largest displacement per axis in voxels.
    #[arg(long)]
    pub lmax: Option<f64>,
    /// Regularization weight; cost maps are smoothed with sigma = sqrt(alpha).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Half-width of the cost aggregation window.
    #[arg(long)]
    pub patch_radius: Option<usize>,
    /// Run one full-resolution level instead of the configured schedule.
    #[arg(long)]
    pub single_level: bool,
    #[arg(long, value_enum)]
    pub standardize: Option<StandardizeMode>,
    /// Reference volume for --standardize to-reference.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Cost-volume memory budget in MiB.
    #[arg(long, env = "REG_MEMORY_BUDGET_MB")]
    pub memory_budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    #[arg(long)]
    pub fixed: PathBuf,
    #[arg(long)]
    pub moving: PathBuf,
    /// JSON registration config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_field: PathBuf,
    #[arg(long)]
    pub out_warped: PathBuf,
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub descriptor: FeatureKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Lower intensity percentile.
    #[arg(long, default_value_t = 1.0)]
    pub p_low: f64,
    /// Upper intensity percentile.
    #[arg(long, default_value_t = 99.0)]
    pub p_high: f64,
    /// SSC patch half-width.
    #[arg(long, default_value_t = 1)]
    pub ssc_radius: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub noise_floor: f64,
    /// Z-score each channel of an external feature volume.
    #[arg(long)]
    pub zscore: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["warped_labels", "moving_labels"])))]
pub struct EvaluateArgs {
    #[arg(long)]
    pub fixed_labels: PathBuf,
    /// Moving labels already warped onto the fixed grid.
    #[arg(long)]
    pub warped_labels: Option<PathBuf>,
    /// Moving labels to pull through --field.
    #[arg(long, requires = "field")]
    pub moving_labels: Option<PathBuf>,
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Report path; `.json` and `.csv` files are written next to each other.
    #[arg(long)]
    pub out_report: PathBuf,
    /// Also write the warped labels here.
    #[arg(long)]
    pub out_warped_labels: Option<PathBuf>,
    /// Structure labels to score; defaults to every non-zero label present.
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Manifest JSON.
    pub manifest: PathBuf,
    /// Overrides the manifest's output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Count self-pairs when enumerating all pairs (N² instead of N(N-1)).
    #[arg(long)]
    pub include_self: bool,
    /// Write each pair's displacement field into the output directory.
    #[arg(long)]
    pub save_fields: bool,
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKindArg {
    Translation,
    Sinusoid,
    Blobs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKindArg,
    /// Grid size as N or XxYxZ.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output files are named `<prefix>_fixed`, `<prefix>_moving` and so on.
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// Translation in voxels as x,y,z.
    #[arg(long, value_parser = parse_vec3, default_value = "2,0,0")]
    pub shift: [f64; 3],
    /// Peak sinusoidal displacement in voxels.
    #[arg(long, default_value_t = 3.0)]
    pub amplitude: f64,
    /// Sinusoid wavelength in voxels.
    #[arg(long, default_value_t = 32.0)]
    pub period: f64,
    /// Number of blob structures.
    #[arg(long, default_value_t = 12)]
    pub structures: usize,
}

pub fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts: Vec<usize> = s
        .split(['x', 'X', ','])
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad extent {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let d = match parts.as_slice() {
        [n] => Dims::cube(*n),
        [x, y, z] => Dims::new(*x, *y, *z),
        _ => return Err(format!("expected N or XxYxZ, got {s:?}")),
    };
    if d.is_empty() {
        return Err(format!("extents must be positive, got {s:?}"));
    }
    Ok(d)
}

pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad component {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|_| format!("expected x,y,z, got {s:?}"))
}
