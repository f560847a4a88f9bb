use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use scoot_core::report::{ProtocolKnobs, ReportFormat};
use scoot_core::{Direction, ScootConfig, ScootError, StatSet};

/// Scoot sketch similarity: pairwise and batch scoring, meta-measure runs,
/// judgment agreement and parameter sweeps.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 data error.
#[derive(Debug, Parser)]
#[command(name = "scoot", version)]
pub struct Cli {
    /// Worker threads for manifest items (defaults to all cores).
    #[arg(long, global = true, env = "SCOOT_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a synthetic sketch against a reference sketch.
    Score {
        synthetic: PathBuf,
        reference: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score every candidate of a ranked manifest against its reference.
    Batch {
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ranking stability under a slight nearest-neighbour downsizing of each reference.
    Mm1 {
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ranking stability under a slight counter-clockwise rotation of each reference.
    Mm2 {
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Content capture: mean candidate score must beat the reference's light strokes.
    Mm3 {
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Agreement with two-alternative forced-choice judgments in a triplet manifest.
    Judge {
        triplets: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run meta-measures for every (grid k, levels) combination.
    Sweep {
        manifest: PathBuf,
        /// Grid sizes to try, e.g. 1,2,4,8,16,32,64.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        k_list: Vec<usize>,
        /// Quantization levels to try, e.g. 2,4,6,8,16,32,64,128.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,16,32,64,128")]
        levels_list: Vec<usize>,
        /// Meta-measures to run: any of mm1, mm2, mm3, judge.
        #[arg(long, value_delimiter = ',', default_value = "mm1,mm2,mm3")]
        measures: Vec<String>,
        /// Triplet manifest, required when `judge` is among the measures.
        #[arg(long)]
        triplets: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a synthetic sketch fixture set with ranked and triplet manifests.
    Fixtures {
        dir: PathBuf,
        /// Number of reference sketches.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Blocks per side of the spatial grid.
    #[arg(long, default_value_t = 4)]
    pub grid_k: usize,
    /// Number of tone grades.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Statistics to use, letters from H (homogeneity), C (contrast), E (energy).
    #[arg(long, default_value = "CE")]
    pub stats: String,
    /// Pixel offsets as dx,dy pairs separated by ';' (x right, y down).
    #[arg(
        long,
        default_value = "0,1;-1,1;-1,0;-1,-1",
        allow_hyphen_values = true
    )]
    pub directions: String,
}

impl ConfigArgs {
    pub fn to_config(&self) -> Result<ScootConfig, ScootError> {
        let cfg = ScootConfig {
            grid_k: self.grid_k,
            levels: self.levels,
            directions: parse_directions(&self.directions)?,
            stats: self.stats.parse::<StatSet>()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_directions(s: &str) -> Result<Vec<Direction>, ScootError> {
    let bad = || {
        ScootError::InvalidParameter(format!(
            "cannot parse directions '{s}', expected e.g. 0,1;-1,0"
        ))
    };
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (dx, dy) = pair.split_once(',').ok_or_else(bad)?;
            let dx = dx.trim().parse().map_err(|_| bad())?;
            let dy = dy.trim().parse().map_err(|_| bad())?;
            Direction::new(dx, dy)
        })
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    /// Pixels removed from each reference dimension for mm1.
    #[arg(long, default_value_t = 5)]
    pub downsize_px: usize,
    /// Counter-clockwise reference rotation in degrees for mm2.
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub rotate_deg: f64,
    /// Gray threshold separating darker from lighter strokes for mm3.
    #[arg(long, default_value_t = 170)]
    pub stroke_threshold: u16,
}

impl ProtocolArgs {
    pub fn to_knobs(&self) -> Result<ProtocolKnobs, ScootError> {
        if !(self.rotate_deg > -360.0 && self.rotate_deg < 360.0) {
            return Err(ScootError::InvalidParameter(format!(
                "--rotate-deg {} outside (-360, 360)",
                self.rotate_deg
            )));
        }
        if self.stroke_threshold > 256 {
            return Err(ScootError::InvalidParameter(format!(
                "--stroke-threshold {} outside 0..=256",
                self.stroke_threshold
            )));
        }
        Ok(ProtocolKnobs {
            downsize_px: self.downsize_px,
            rotate_deg: self.rotate_deg,
            stroke_threshold: self.stroke_threshold,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Report destination; without it only the aggregate is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format, csv or json (default: from the --out extension, else json).
    #[arg(long)]
    pub format: Option<String>,
}

impl OutputArgs {
    pub fn resolve_format(&self) -> Result<ReportFormat, ScootError> {
        match &self.format {
            Some(f) => f.parse(),
            None => Ok(self
                .out
                .as_deref()
                .and_then(ReportFormat::from_path)
                .unwrap_or_default()),
        }
    }
}
