use clap::{Args, ValueEnum};
use serde::Serialize;
use sr_difficulty::analysis::{Grid, DEFAULT_BIN_WIDTH_DB, DEFAULT_OUTLIER_CUTOFF_DB};
use sr_difficulty::difficulty::{RotationSweep, ScoringOptions, DEFAULT_EDGE_THRESHOLD};
use sr_difficulty::LumaConvention;

use crate::schema::{fixed, Fixed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Luma {
    #[default]
    Studio,
    Full,
}

impl From<Luma> for LumaConvention {
    fn from(l: Luma) -> Self {
        match l {
            Luma::Studio => LumaConvention::Studio,
            Luma::Full => LumaConvention::Full,
        }
    }
}

/// Every tunable knob. Defaults match the library defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub luma: Luma,
    /// Pixels removed from each border before PSNR/PSNR99.
    pub shave: usize,
    pub sweep: RotationSweep,
    pub threshold: f64,
    pub bin_width: f64,
    pub outlier_cutoff: f64,
    pub grid: Grid,
    /// Worker threads; 0 picks the number of CPUs.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            luma: Luma::Studio,
            shave: 0,
            sweep: RotationSweep::default(),
            threshold: DEFAULT_EDGE_THRESHOLD,
            bin_width: DEFAULT_BIN_WIDTH_DB,
            outlier_cutoff: DEFAULT_OUTLIER_CUTOFF_DB,
            grid: Grid::QUADRANTS,
            jobs: 0,
        }
    }
}

impl RunConfig {
    pub fn scoring(&self) -> ScoringOptions {
        ScoringOptions { luma: self.luma.into(), sweep: self.sweep.clone(), threshold: self.threshold }
    }

    pub(crate) fn thread_pool(&self) -> anyhow::Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build()?)
    }

    /// Scoring settings as written into output files. Worker count is left
    /// out so it cannot influence output bytes.
    pub(crate) fn scoring_json(&self) -> ScoringConfigJson {
        ScoringConfigJson {
            luma: self.luma,
            angles: self.sweep.angles().iter().map(|&a| fixed(a, 3)).collect(),
            threshold: fixed(self.threshold, 3),
        }
    }
}

#[derive(Debug, Serialize)]
pub(crate) struct ScoringConfigJson {
    pub luma: Luma,
    pub angles: Vec<Fixed>,
    pub threshold: Fixed,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// RGB to luma convention
    #[arg(long, value_enum, default_value_t = Luma::Studio, global = true)]
    pub luma: Luma,
    /// Border pixels shaved before PSNR / PSNR99
    #[arg(long, default_value_t = 0, global = true)]
    pub shave: usize,
    /// Rotation sweep in degrees, comma separated, starting at 0
    #[arg(long, default_value = "0,20,40,60,80", global = true)]
    pub angles: String,
    /// RIEI above this is labelled edge
    #[arg(long, default_value_t = DEFAULT_EDGE_THRESHOLD, global = true)]
    pub threshold: f64,
    /// Histogram bin width in dB
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH_DB, global = true)]
    pub bin_width: f64,
    /// |PSNR difference| in dB above which an image is an outlier
    #[arg(long, default_value_t = DEFAULT_OUTLIER_CUTOFF_DB, global = true)]
    pub outlier_cutoff: f64,
    /// Quantile grid as HFI_LEVELSxRIEI_LEVELS
    #[arg(long, default_value = "2x2", global = true)]
    pub grid: String,
    /// Worker threads (0 = all CPUs)
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
}

impl TryFrom<&ConfigArgs> for RunConfig {
    type Error = anyhow::Error;

    fn try_from(a: &ConfigArgs) -> anyhow::Result<Self> {
        anyhow::ensure!(a.threshold.is_finite() && a.threshold >= 0.0, "--threshold must be a non-negative number");
        anyhow::ensure!(a.bin_width.is_finite() && a.bin_width > 0.0, "--bin-width must be positive");
        anyhow::ensure!(a.outlier_cutoff.is_finite() && a.outlier_cutoff >= 0.0, "--outlier-cutoff must be non-negative");
        Ok(Self {
            luma: a.luma,
            shave: a.shave,
            sweep: a.angles.parse()?,
            threshold: a.threshold,
            bin_width: a.bin_width,
            outlier_cutoff: a.outlier_cutoff,
            grid: a.grid.parse()?,
            jobs: a.jobs,
        })
    }
}
