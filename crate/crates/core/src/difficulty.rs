//! Edge Index (EI), Rotation-Invariant Edge Index (RIEI) and the edge/texture
//! label of an LR image.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imgproc::{rgb_to_luma, rotate, LumaConvention, LumaPlane, RgbImage};
use crate::metrics::compute_hfi;
use crate::wavelet::{dwt2, subband_l1, sym19_filters, DetailEnergies};

/// RIEI above this value labels an image as edge-dominated.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 5.14;

/// Below this HH energy the edge index is undefined.
pub const MIN_HH_ENERGY: f64 = 1e-9;

pub const DEFAULT_ANGLES: [f64; 5] = [0.0, 20.0, 40.0, 60.0, 80.0];

/// Rotation angles (degrees) swept by [`compute_riei`].
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSweep(Vec<f64>);

impl RotationSweep {
    /// Angles must include 0, lie in [0, 90) and be strictly increasing.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.first() != Some(&0.0) {
            return Err(Error::InvalidSweep("sweep must start at 0".into()));
        }
        if let Some(&bad) = angles.iter().find(|a| !(0.0..90.0).contains(*a)) {
            return Err(Error::InvalidAngle(bad));
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSweep("angles must be strictly increasing".into()));
        }
        Ok(Self(angles))
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }
}

impl Default for RotationSweep {
    fn default() -> Self {
        Self(DEFAULT_ANGLES.to_vec())
    }
}

impl FromStr for RotationSweep {
    type Err = Error;

    /// Comma-separated degrees, e.g. `0,20,40,60,80`.
    fn from_str(s: &str) -> Result<Self> {
        let angles = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidSweep(format!("bad angle {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(angles)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeTexture {
    Edge,
    Texture,
}

impl EdgeTexture {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeTexture::Edge => "edge",
            EdgeTexture::Texture => "texture",
        }
    }
}

impl fmt::Display for EdgeTexture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeTexture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(EdgeTexture::Edge),
            "texture" => Ok(EdgeTexture::Texture),
            other => Err(Error::InvalidData(format!("unknown label {other:?}"))),
        }
    }
}

/// `(E_LH + E_HL) / E_HH`.
pub fn edge_ratio(e: DetailEnergies) -> Result<f64> {
    if e.e_hh < MIN_HH_ENERGY {
        return Err(Error::DegenerateContent { e_hh: e.e_hh });
    }
    Ok((e.e_lh + e.e_hl) / e.e_hh)
}

/// Edge index of a plane from its Symlet-19 detail energies.
pub fn edge_index(p: &LumaPlane) -> Result<f64> {
    let bands = dwt2(p, &sym19_filters())?;
    edge_ratio(subband_l1(&bands))
}

/// Result of a rotation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationEdgeIndex {
    pub riei: f64,
    pub argmax_angle: f64,
    /// EI at each sweep angle; `None` where the content was degenerate.
    pub per_angle: Vec<(f64, Option<f64>)>,
}

impl RotationEdgeIndex {
    /// EI of the unrotated plane.
    pub fn ei(&self) -> Option<f64> {
        self.per_angle.first().and_then(|&(_, ei)| ei)
    }
}

/// Maximum EI over the sweep. The first listed angle wins ties. Angles whose
/// content is degenerate are skipped; if all are, the error is returned.
pub fn compute_riei(p: &LumaPlane, sweep: &RotationSweep) -> Result<RotationEdgeIndex> {
    let mut per_angle = Vec::with_capacity(sweep.angles().len());
    let mut best: Option<(f64, f64)> = None;
    let mut last_degenerate = None;
    for &angle in sweep.angles() {
        let rotated = rotate(p, angle)?;
        match edge_index(&rotated) {
            Ok(ei) => {
                if best.is_none_or(|(b, _)| ei > b) {
                    best = Some((ei, angle));
                }
                per_angle.push((angle, Some(ei)));
            }
            Err(e @ Error::DegenerateContent { .. }) => {
                last_degenerate = Some(e);
                per_angle.push((angle, None));
            }
            Err(e) => return Err(e),
        }
    }
    match best {
        Some((riei, argmax_angle)) => Ok(RotationEdgeIndex { riei, argmax_angle, per_angle }),
        None => Err(last_degenerate.unwrap_or(Error::InvalidSweep("empty sweep".into()))),
    }
}

/// Edge if `riei > threshold`; the boundary belongs to texture.
pub fn classify_edge_texture(riei: f64, threshold: f64) -> EdgeTexture {
    if riei > threshold {
        EdgeTexture::Edge
    } else {
        EdgeTexture::Texture
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifficultyScores {
    pub image_id: String,
    pub hfi_db: f64,
    pub hfi_capped: bool,
    pub ei: f64,
    pub riei: f64,
    pub argmax_angle: f64,
    pub label: EdgeTexture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringOptions {
    pub luma: LumaConvention,
    pub sweep: RotationSweep,
    pub threshold: f64,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        Self { luma: LumaConvention::Studio, sweep: RotationSweep::default(), threshold: DEFAULT_EDGE_THRESHOLD }
    }
}

/// HFI, EI, RIEI and label of one LR image.
pub fn score_image(image_id: &str, img: &RgbImage, opts: &ScoringOptions) -> Result<DifficultyScores> {
    score_plane(image_id, &rgb_to_luma(img, opts.luma), opts)
}

pub fn score_plane(image_id: &str, luma: &LumaPlane, opts: &ScoringOptions) -> Result<DifficultyScores> {
    let run = || -> Result<DifficultyScores> {
        let hfi = compute_hfi(luma)?;
        let sweep = compute_riei(luma, &opts.sweep)?;
        let ei = match sweep.ei() {
            Some(ei) => ei,
            // EI of the unrotated image is part of the score; recompute for the error.
            None => edge_index(luma)?,
        };
        Ok(DifficultyScores {
            image_id: image_id.to_owned(),
            hfi_db: hfi.value,
            hfi_capped: hfi.capped,
            ei,
            riei: sweep.riei,
            argmax_angle: sweep.argmax_angle,
            label: classify_edge_texture(sweep.riei, opts.threshold),
        })
    };
    run().map_err(|e| e.for_image(image_id))
}
