//! Difficulty-aware evaluation of super-resolution outputs.
//!
//! The crate scores low-resolution test images by how hard they are to
//! super-resolve and measures sparse, localized reconstruction errors:
//!
//! * [`metrics::compute_hfi`]: high-frequency index, the PSNR between an image
//!   and its own x2 box-downsample / bilinear-upsample round trip.
//! * [`difficulty::edge_index`] and [`difficulty::compute_riei`]: ratio of
//!   oriented to diagonal Symlet-19 detail energy, maximised over a rotation
//!   sweep.
//! * [`metrics::psnr99`]: PSNR over the top 1% largest squared errors.
//! * [`analysis`]: median (or quantile) partitioning of a test set on the
//!   HFI x RIEI plane, per-cell aggregation, and model-vs-model comparison.

pub mod analysis;
pub mod difficulty;
mod error;
pub mod imgproc;
pub mod metrics;
pub mod wavelet;

pub use error::{Error, Result};
pub use imgproc::{LumaConvention, LumaPlane, RgbImage};
