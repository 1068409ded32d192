//! Pixel-domain preprocessing: decoding, luma extraction, x2 resampling and
//! rotation with inscribed-rectangle cropping.
//!
//! All arithmetic is done in `f64`. Quantization to 8 bits only happens when
//! an image is exported.

use std::path::Path;

use image::imageops::FilterType;

use crate::error::{Dims, Error, Result};

/// Smallest accepted width/height for decoded images.
pub const MIN_IMAGE_SIDE: usize = 8;

/// 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width < MIN_IMAGE_SIDE || height < MIN_IMAGE_SIDE {
            return Err(Error::DimensionTooSmall { width, height, min: MIN_IMAGE_SIDE });
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidData(format!(
                "expected {} bytes for {width}x{height} RGB, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Self::new(width, height, data)
    }

    /// Gray image with every channel equal to the (rounded, clamped) luma sample.
    pub fn from_gray(plane: &LumaPlane) -> Result<Self> {
        let data = plane.samples.iter().flat_map(|&v| [quantize(v); 3]).collect();
        Self::new(plane.width, plane.height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Decodes a PNG (or any format the `png` codec handles). Grayscale and
    /// alpha variants are promoted/flattened to RGB by channel replication.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let decoded = image::open(path)?.into_rgb8();
        let (w, h) = decoded.dimensions();
        Self::new(w as usize, h as usize, decoded.into_raw())
    }

    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self> {
        let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?.into_rgb8();
        let (w, h) = decoded.dimensions();
        Self::new(w as usize, h as usize, decoded.into_raw())
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_buffer().save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }

    fn to_buffer(&self) -> image::RgbImage {
        image::RgbImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
            .expect("buffer length checked at construction")
    }

    /// Bicubic (Catmull-Rom, antialiased) downscale by 4, used to stand in
    /// for a missing LR image. Output dimensions are `floor(w/4) x floor(h/4)`.
    pub fn bicubic_downscale4(&self) -> Result<Self> {
        let (w, h) = (self.width / 4, self.height / 4);
        if w < MIN_IMAGE_SIDE || h < MIN_IMAGE_SIDE {
            return Err(Error::DimensionTooSmall { width: w, height: h, min: MIN_IMAGE_SIDE });
        }
        let cropped = image::imageops::crop_imm(&self.to_buffer(), 0, 0, (w * 4) as u32, (h * 4) as u32).to_image();
        let small = image::imageops::resize(&cropped, w as u32, h as u32, FilterType::CatmullRom);
        Self::new(w, h, small.into_raw())
    }
}

fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// RGB to luma weighting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LumaConvention {
    /// ITU-R BT.601 studio swing, Y in [16, 235].
    #[default]
    Studio,
    /// ITU-R BT.601 full range, Y in [0, 255].
    Full,
}

/// Row-major plane of real-valued luminance samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaPlane {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl LumaPlane {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionTooSmall { width, height, min: 1 });
        }
        if samples.len() != width * height {
            return Err(Error::InvalidData(format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height,
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("luma samples"));
        }
        Ok(Self { width, height, samples })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let samples = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(width, height, samples)
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> Dims {
        Dims(self.width, self.height)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0.0; self.samples.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                out[x * self.height + y] = self.samples[y * self.width + x];
            }
        }
        Self { width: self.height, height: self.width, samples: out }
    }

    /// Sub-rectangle starting at `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || x0 + width > self.width || y0 + height > self.height {
            return Err(Error::InvalidData(format!(
                "crop {width}x{height}+{x0}+{y0} outside {}",
                self.dims()
            )));
        }
        let samples = (y0..y0 + height).flat_map(|y| self.row(y)[x0..x0 + width].iter().copied()).collect();
        Ok(Self { width, height, samples })
    }

    /// Removes `border` pixels from each edge.
    pub fn shave(&self, border: usize) -> Result<Self> {
        if border == 0 {
            return Ok(self.clone());
        }
        if self.width <= 2 * border || self.height <= 2 * border {
            return Err(Error::DimensionTooSmall { width: self.width, height: self.height, min: 2 * border + 1 });
        }
        self.crop(border, border, self.width - 2 * border, self.height - 2 * border)
    }

    /// Elementwise `f`; the result must stay finite.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(self.width, self.height, self.samples.iter().map(|&v| f(v)).collect())
    }

    /// Bilinear sample at continuous pixel-center coordinates, clamped to the
    /// valid range.
    fn sample_bilinear(&self, sx: f64, sy: f64) -> f64 {
        let sx = sx.clamp(0.0, (self.width - 1) as f64);
        let sy = sy.clamp(0.0, (self.height - 1) as f64);
        let x0 = sx.floor() as usize;
        let y0 = sy.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = sx - x0 as f64;
        let fy = sy - y0 as f64;
        let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
        let bottom = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Luma of every pixel under the given convention.
pub fn rgb_to_luma(img: &RgbImage, convention: LumaConvention) -> LumaPlane {
    let samples = img
        .data
        .chunks_exact(3)
        .map(|p| {
            let (r, g, b) = (f64::from(p[0]), f64::from(p[1]), f64::from(p[2]));
            match convention {
                LumaConvention::Studio => 16.0 + (65.481 * r + 128.553 * g + 24.966 * b) / 255.0,
                LumaConvention::Full => 0.299 * r + 0.587 * g + 0.114 * b,
            }
        })
        .collect();
    LumaPlane { width: img.width, height: img.height, samples }
}

/// 2x2 box average. A trailing odd row/column is dropped.
pub fn downsample2(p: &LumaPlane) -> Result<LumaPlane> {
    if p.width < MIN_IMAGE_SIDE || p.height < MIN_IMAGE_SIDE {
        return Err(Error::DimensionTooSmall { width: p.width, height: p.height, min: MIN_IMAGE_SIDE });
    }
    let (w, h) = (p.width / 2, p.height / 2);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let (r0, r1) = (p.row(2 * y), p.row(2 * y + 1));
        for x in 0..w {
            out.push((r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]) / 4.0);
        }
    }
    LumaPlane::new(w, h, out)
}

/// Bilinear upsampling to `target_w x target_h` with half-pixel centers
/// (align-corners off). Output is clamped to [0, 255].
pub fn bilinear_upsample2(p: &LumaPlane, target_w: usize, target_h: usize) -> Result<LumaPlane> {
    if target_w < p.width || target_h < p.height {
        return Err(Error::TargetSmallerThanSource { source_dims: p.dims(), target: Dims(target_w, target_h) });
    }
    let scale_x = p.width as f64 / target_w as f64;
    let scale_y = p.height as f64 / target_h as f64;
    let xs: Vec<f64> = (0..target_w).map(|i| (i as f64 + 0.5) * scale_x - 0.5).collect();
    let mut out = Vec::with_capacity(target_w * target_h);
    for j in 0..target_h {
        let sy = (j as f64 + 0.5) * scale_y - 0.5;
        out.extend(xs.iter().map(|&sx| p.sample_bilinear(sx, sy).clamp(0.0, 255.0)));
    }
    LumaPlane::new(target_w, target_h, out)
}

/// Largest axis-aligned rectangle (width, height) inside a `w x h` rectangle
/// rotated by `theta` radians.
pub fn inscribed_rect(w: f64, h: f64, theta: f64) -> (f64, f64) {
    let (sin_a, cos_a) = (theta.sin().abs(), theta.cos().abs());
    if sin_a < 1e-12 {
        return (w, h);
    }
    let width_is_longer = w >= h;
    let (long, short) = if width_is_longer { (w, h) } else { (h, w) };
    if short <= 2.0 * sin_a * cos_a * long || (sin_a - cos_a).abs() < 1e-10 {
        // Two corners of the crop touch the longer side.
        let half = 0.5 * short;
        if width_is_longer {
            (half / sin_a, half / cos_a)
        } else {
            (half / cos_a, half / sin_a)
        }
    } else {
        let cos_2a = cos_a * cos_a - sin_a * sin_a;
        ((w * cos_a - h * sin_a) / cos_2a, (h * cos_a - w * sin_a) / cos_2a)
    }
}

/// Rotates by `theta_deg` degrees about the image center (bilinear) and crops
/// to the largest inscribed axis-aligned rectangle, so no padded samples
/// enter the result. `theta_deg == 0` returns the input unchanged.
pub fn rotate(p: &LumaPlane, theta_deg: f64) -> Result<LumaPlane> {
    if !(0.0..90.0).contains(&theta_deg) {
        return Err(Error::InvalidAngle(theta_deg));
    }
    if theta_deg == 0.0 {
        return Ok(p.clone());
    }
    let theta = theta_deg.to_radians();
    let (rw, rh) = inscribed_rect(p.width as f64, p.height as f64, theta);
    // Shave a hair off before flooring so exact-integer sizes survive rounding noise.
    let out_w = (rw + 1e-9).floor() as usize;
    let out_h = (rh + 1e-9).floor() as usize;
    if out_w < MIN_IMAGE_SIDE || out_h < MIN_IMAGE_SIDE {
        return Err(Error::OutputTooSmall { angle: theta_deg, width: out_w, height: out_h });
    }

    let (sin_t, cos_t) = theta.sin_cos();
    let (cx, cy) = (p.width as f64 / 2.0, p.height as f64 / 2.0);
    let (ox, oy) = (out_w as f64 / 2.0, out_h as f64 / 2.0);
    let mut out = Vec::with_capacity(out_w * out_h);
    for j in 0..out_h {
        let dy = j as f64 + 0.5 - oy;
        for i in 0..out_w {
            let dx = i as f64 + 0.5 - ox;
            // Inverse map: output offset rotated by -theta lands in the source.
            let sx = cx + dx * cos_t + dy * sin_t;
            let sy = cy - dx * sin_t + dy * cos_t;
            out.push(p.sample_bilinear(sx - 0.5, sy - 0.5).clamp(0.0, 255.0));
        }
    }
    LumaPlane::new(out_w, out_h, out)
}
