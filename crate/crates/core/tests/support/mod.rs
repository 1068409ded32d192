//! Independent reference implementations and synthetic image generators
//! shared by the integration and acceptance tests.
//!
//! Nothing here calls into the library's DWT or PSNR99 code paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sr_difficulty::LumaPlane;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Single mirror reflection (`x[-1] = x[0]`, `x[n] = x[n-1]`), valid while
/// the pad does not exceed the signal length.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let j = if i < 0 { -i - 1 } else if i >= n { 2 * n - 1 - i } else { i };
    assert!((0..n).contains(&j), "pad longer than signal");
    j as usize
}

/// Full linear convolution, `len(a) + len(b) - 1` outputs.
fn full_convolution(signal: &[f64], filter: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; signal.len() + filter.len() - 1];
    for (i, &s) in signal.iter().enumerate() {
        for (j, &f) in filter.iter().enumerate() {
            out[i + j] += s * f;
        }
    }
    out
}

/// Extended by `taps - 1` mirrored samples, fully convolved, then every
/// second sample kept starting at the first fully-overlapping position.
fn analyze_reference(line: &[f64], filter: &[f64]) -> Vec<f64> {
    let pad = filter.len() - 1;
    let n = line.len();
    let extended: Vec<f64> = (-(pad as isize)..(n + pad) as isize).map(|i| line[reflect(i, n)]).collect();
    let full = full_convolution(&extended, filter);
    let count = (n + filter.len()) / 2;
    (0..count).map(|k| full[2 * k + pad]).collect()
}

pub struct ReferenceSubbands {
    pub width: usize,
    pub height: usize,
    pub ll: Vec<f64>,
    pub lh: Vec<f64>,
    pub hl: Vec<f64>,
    pub hh: Vec<f64>,
}

fn columns(data: &[f64], width: usize, height: usize) -> Vec<Vec<f64>> {
    (0..width).map(|x| (0..height).map(|y| data[y * width + x]).collect()).collect()
}

/// Brute-force separable DWT (rows, then columns).
pub fn dwt2_reference(p: &LumaPlane, lowpass: &[f64], highpass: &[f64]) -> ReferenceSubbands {
    let h = p.height();
    let rows: Vec<&[f64]> = (0..h).map(|y| p.row(y)).collect();
    let row_lo: Vec<f64> = rows.iter().flat_map(|r| analyze_reference(r, lowpass)).collect();
    let row_hi: Vec<f64> = rows.iter().flat_map(|r| analyze_reference(r, highpass)).collect();
    let sw = row_lo.len() / h;
    let col_pass = |src: &[f64], filter: &[f64]| -> (Vec<f64>, usize) {
        let cols: Vec<Vec<f64>> = columns(src, sw, h).iter().map(|c| analyze_reference(c, filter)).collect();
        let sh = cols[0].len();
        let mut out = vec![0.0; sw * sh];
        for (x, c) in cols.iter().enumerate() {
            for (y, v) in c.iter().enumerate() {
                out[y * sw + x] = *v;
            }
        }
        (out, sh)
    };
    let (ll, sh) = col_pass(&row_lo, lowpass);
    let (lh, _) = col_pass(&row_lo, highpass);
    let (hl, _) = col_pass(&row_hi, lowpass);
    let (hh, _) = col_pass(&row_hi, highpass);
    ReferenceSubbands { width: sw, height: sh, ll, lh, hl, hh }
}

/// Adjoint of the analysis step for one line: rebuilds `n` samples.
fn synthesize_line(lo: &[f64], hi: &[f64], lowpass: &[f64], highpass: &[f64], n: usize) -> Vec<f64> {
    let taps = lowpass.len();
    let pad = taps - 1;
    let mut extended = vec![0.0; n + 2 * pad];
    for k in 0..lo.len() {
        for j in 0..taps {
            // Coefficient k touched extended sample 2k + pad - j through tap j.
            let q = 2 * k + pad - j;
            extended[q] += lo[k] * lowpass[j] + hi[k] * highpass[j];
        }
    }
    extended[pad..pad + n].to_vec()
}

/// Test-only inverse of [`dwt2_reference`] / the library's `dwt2`.
#[allow(clippy::too_many_arguments)]
pub fn idwt2(
    ll: &[f64],
    lh: &[f64],
    hl: &[f64],
    hh: &[f64],
    sw: usize,
    sh: usize,
    lowpass: &[f64],
    highpass: &[f64],
    width: usize,
    height: usize,
) -> Vec<f64> {
    let undo_columns = |low: &[f64], high: &[f64]| -> Vec<f64> {
        let lc = columns(low, sw, sh);
        let hc = columns(high, sw, sh);
        let cols: Vec<Vec<f64>> = lc.iter().zip(&hc).map(|(l, h)| synthesize_line(l, h, lowpass, highpass, height)).collect();
        let mut out = vec![0.0; sw * height];
        for (x, c) in cols.iter().enumerate() {
            for (y, v) in c.iter().enumerate() {
                out[y * sw + x] = *v;
            }
        }
        out
    };
    let row_lo = undo_columns(ll, lh);
    let row_hi = undo_columns(hl, hh);
    (0..height)
        .flat_map(|y| {
            synthesize_line(&row_lo[y * sw..(y + 1) * sw], &row_hi[y * sw..(y + 1) * sw], lowpass, highpass, width)
        })
        .collect()
}

/// Mean of the top `ceil(N / 100)` squared errors after a full descending sort.
pub fn mse_top_full_sort(a: &[f64], b: &[f64]) -> f64 {
    let mut errors: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    errors.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let n = errors.len();
    let mut k = n / 100;
    if !n.is_multiple_of(100) {
        k += 1;
    }
    errors[..k].iter().sum::<f64>() / k as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn uniform_noise(width: usize, height: usize, seed: u64) -> LumaPlane {
    let mut r = rng(seed);
    let samples = (0..width * height).map(|_| r.gen_range(0.0..255.0)).collect();
    LumaPlane::new(width, height, samples).unwrap()
}

/// Horizontal stripes: rows alternate between two levels every `period / 2` rows.
pub fn horizontal_stripes(width: usize, height: usize, period: usize) -> LumaPlane {
    LumaPlane::from_fn(width, height, |_, y| if (y % period) < period / 2 { 60.0 } else { 190.0 }).unwrap()
}

/// Adds i.i.d. uniform noise in `[-amp, amp]`.
pub fn with_noise(p: &LumaPlane, amp: f64, seed: u64) -> LumaPlane {
    let mut r = rng(seed);
    p.map(|v| v + r.gen_range(-amp..amp)).unwrap()
}

/// Hard-edged bands running at 45 degrees.
pub fn diagonal_stripes(size: usize, period: usize) -> LumaPlane {
    LumaPlane::from_fn(size, size, |x, y| if ((x + y) % period) < period / 2 { 50.0 } else { 200.0 }).unwrap()
}

/// `(2r+1)^2` box mean with clamped borders.
pub fn box_smooth(p: &LumaPlane, radius: usize) -> LumaPlane {
    let (w, h) = (p.width() as isize, p.height() as isize);
    let r = radius as isize;
    LumaPlane::from_fn(p.width(), p.height(), |x, y| {
        let mut acc = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = (x as isize + dx).clamp(0, w - 1) as usize;
                let sy = (y as isize + dy).clamp(0, h - 1) as usize;
                acc += p.get(sx, sy);
            }
        }
        acc / ((2 * r + 1) * (2 * r + 1)) as f64
    })
    .unwrap()
}

/// Piecewise-smooth synthetic scene: a smooth gradient, a few oriented
/// occluding edges, and mild texture noise. Values stay inside [20, 235].
pub fn natural_scene(width: usize, height: usize, seed: u64) -> LumaPlane {
    let mut r = rng(seed);
    let base = r.gen_range(60.0..160.0);
    let (gx, gy) = (r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3));
    let edges: Vec<(f64, f64, f64, f64)> = (0..r.gen_range(2..6))
        .map(|_| {
            let angle: f64 = r.gen_range(0.0..std::f64::consts::PI);
            let offset = r.gen_range(-0.4..0.4) * width.min(height) as f64;
            (angle.cos(), angle.sin(), offset, r.gen_range(-35.0..35.0))
        })
        .collect();
    let noise_amp = r.gen_range(1.0..12.0);
    let noise: Vec<f64> = (0..width * height).map(|_| r.gen_range(-1.0..1.0) * noise_amp).collect();
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    LumaPlane::from_fn(width, height, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let mut v = base + gx * dx + gy * dy + noise[y * width + x];
        for &(c, s, off, step) in &edges {
            if dx * c + dy * s > off {
                v += step;
            }
        }
        v.clamp(20.0, 235.0)
    })
    .unwrap()
}
