//! Full-reference fidelity metrics on luma planes: PSNR, PSNR99 (PSNR of the
//! top 1% squared errors), the high-frequency index, and artifact maps.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::imgproc::{bilinear_upsample2, downsample2, LumaPlane, RgbImage};

/// Peak signal value for 8-bit content.
pub const PEAK: f64 = 255.0;

/// Value reported when the MSE is (numerically) zero.
pub const PSNR_CAP_DB: f64 = 100.0;

const MSE_FLOOR: f64 = 1e-12;

/// Color used for the selected pixels in an artifact map.
pub const HIGHLIGHT: [u8; 3] = [255, 0, 0];

/// A PSNR-style value in dB. `capped` is set when the MSE was below 1e-12
/// and the value was pinned to [`PSNR_CAP_DB`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub capped: bool,
}

impl MetricValue {
    pub fn from_mse(mse: f64) -> Self {
        if mse < MSE_FLOOR {
            Self { value: PSNR_CAP_DB, capped: true }
        } else {
            Self { value: 20.0 * (PEAK / mse.sqrt()).log10(), capped: false }
        }
    }
}

fn check_dims(a: &LumaPlane, b: &LumaPlane) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch { left: a.dims(), right: b.dims() });
    }
    Ok(())
}

fn squared_errors(a: &LumaPlane, b: &LumaPlane) -> Vec<f64> {
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y) * (x - y)).collect()
}

pub fn mse(a: &LumaPlane, b: &LumaPlane) -> Result<f64> {
    check_dims(a, b)?;
    let se = squared_errors(a, b);
    Ok(se.iter().sum::<f64>() / se.len() as f64)
}

/// PSNR over every pixel, peak 255.
pub fn psnr(a: &LumaPlane, b: &LumaPlane) -> Result<MetricValue> {
    mse(a, b).map(MetricValue::from_mse)
}

/// Per-pixel squared errors and the mask of the top 1% selected by [`psnr99`].
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap {
    pub width: usize,
    pub height: usize,
    pub squared_error: Vec<f64>,
    pub top_mask: Vec<bool>,
    pub k: usize,
}

/// `ceil(0.01 * n)`, at least 1.
pub fn top_count(n: usize) -> usize {
    n.div_ceil(100).max(1)
}

/// Descending error, ties broken by ascending pixel index.
fn rank_order(se: &[f64], a: usize, b: usize) -> Ordering {
    se[b].total_cmp(&se[a]).then(a.cmp(&b))
}

/// PSNR from the mean of the `ceil(0.01 N)` largest squared errors. Pixels
/// tied at the selection threshold are taken in row-major order, which only
/// affects the mask.
pub fn psnr99(hr: &LumaPlane, sr: &LumaPlane) -> Result<(MetricValue, ErrorMap)> {
    check_dims(hr, sr)?;
    let se = squared_errors(hr, sr);
    let n = se.len();
    let k = top_count(n);

    let mut order: Vec<usize> = (0..n).collect();
    if k < n {
        order.select_nth_unstable_by(k - 1, |&a, &b| rank_order(&se, a, b));
    }
    let top = &mut order[..k];
    // Sum largest-first so the result does not depend on selection internals.
    top.sort_unstable_by(|&a, &b| rank_order(&se, a, b));
    let mse_top = top.iter().map(|&i| se[i]).sum::<f64>() / k as f64;

    let mut top_mask = vec![false; n];
    for &i in top.iter() {
        top_mask[i] = true;
    }
    let map = ErrorMap { width: hr.width(), height: hr.height(), squared_error: se, top_mask, k };
    Ok((MetricValue::from_mse(mse_top), map))
}

/// High-frequency index: PSNR between `lr` (trimmed to even size) and its
/// 2x2-box-downsample / bilinear-upsample round trip. Higher means less
/// high-frequency content.
pub fn compute_hfi(lr: &LumaPlane) -> Result<MetricValue> {
    let low = downsample2(lr)?;
    let (w, h) = (low.width() * 2, low.height() * 2);
    let trimmed = if (w, h) == (lr.width(), lr.height()) { lr.clone() } else { lr.crop(0, 0, w, h)? };
    let round_trip = bilinear_upsample2(&low, w, h)?;
    psnr(&trimmed, &round_trip)
}

/// Gray rendering of `background` with the pixels selected by `map` painted
/// in [`HIGHLIGHT`].
pub fn render_artifact_map(map: &ErrorMap, background: &LumaPlane) -> Result<RgbImage> {
    if (map.width, map.height) != (background.width(), background.height()) {
        return Err(Error::DimensionMismatch {
            left: crate::error::Dims(map.width, map.height),
            right: background.dims(),
        });
    }
    let mut img = RgbImage::from_gray(background)?;
    for (i, _) in map.top_mask.iter().enumerate().filter(|(_, &m)| m) {
        img.put_pixel(i % map.width, i / map.width, HIGHLIGHT);
    }
    Ok(img)
}
