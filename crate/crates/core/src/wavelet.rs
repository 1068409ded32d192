//! Single-level separable 2-D DWT with the Symlet-19 filter bank.
//!
//! Boundaries use half-point symmetric extension (`... x1 x0 | x0 x1 ... xn-1 | xn-1 xn-2 ...`).
//! Along an axis of length `n` each subband has `ceil((n + 37) / 2)`
//! coefficients; coefficient `k` is the filter applied to extended samples
//! `2k ..= 2k + 37`.

use crate::error::{Error, Result};
use crate::imgproc::LumaPlane;

/// Taps in each Symlet-19 decomposition filter.
pub const SYM19_TAPS: usize = 38;

/// Symlet-19 decomposition lowpass filter (standard published table).
const SYM19_DEC_LO: [f64; SYM19_TAPS] = [
    5.487732768215838e-07,
    -6.463651303345963e-07,
    -1.1880518269823984e-05,
    8.873312173729286e-06,
    0.0001155392333357879,
    -4.612039600210587e-05,
    -0.000635764515004334,
    0.00015915804768084938,
    0.0021214250281823303,
    -0.0011607032572062486,
    -0.005122205002583014,
    0.007968438320613306,
    0.01579743929567463,
    -0.02265199337824595,
    -0.046635983534938946,
    0.0070155738571741596,
    0.008954591173043624,
    -0.06752505804029409,
    0.10902582508127781,
    0.578144945338605,
    0.7195555257163943,
    0.2582661692372836,
    -0.17659686625203097,
    -0.11624173010739675,
    0.09363084341589714,
    0.08407267627924504,
    -0.016908234861345205,
    -0.02770989693131125,
    0.004319351874894969,
    0.008262236955528255,
    -0.0006179223277983108,
    -0.0017049602611649971,
    0.00012930767650701415,
    0.0002762187768573407,
    -1.6821387029373716e-05,
    -2.8151138661550245e-05,
    2.0623170632395688e-06,
    1.7509367995348687e-06,
];

/// Orthogonal decomposition filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilterPair {
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
}

impl WaveletFilterPair {
    pub fn taps(&self) -> usize {
        self.lowpass.len()
    }
}

/// The Symlet-19 pair. The highpass is the quadrature mirror of the lowpass:
/// `g[k] = (-1)^(k+1) h[L-1-k]`.
pub fn sym19_filters() -> WaveletFilterPair {
    let lowpass = SYM19_DEC_LO.to_vec();
    let highpass = (0..SYM19_TAPS)
        .map(|k| {
            let h = SYM19_DEC_LO[SYM19_TAPS - 1 - k];
            if k % 2 == 0 {
                -h
            } else {
                h
            }
        })
        .collect();
    WaveletFilterPair { lowpass, highpass }
}

/// The four first-level subbands, all of the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSubbands {
    pub width: usize,
    pub height: usize,
    pub ll: Vec<f64>,
    /// Lowpass along rows, highpass along columns: horizontal edges.
    pub lh: Vec<f64>,
    /// Highpass along rows, lowpass along columns: vertical edges.
    pub hl: Vec<f64>,
    pub hh: Vec<f64>,
}

/// L1 energies of the three detail subbands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailEnergies {
    pub e_lh: f64,
    pub e_hl: f64,
    pub e_hh: f64,
}

/// Number of coefficients per subband along an axis of length `n`.
pub fn subband_len(n: usize, taps: usize) -> usize {
    (n + taps) / 2
}

/// Index into a half-point symmetric extension of a signal of length `n`.
#[inline]
pub(crate) fn symmetric_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Filters and decimates one line into `lo` and `hi`.
fn analyze_line(line: &[f64], f: &WaveletFilterPair, ext: &mut Vec<f64>, lo: &mut [f64], hi: &mut [f64]) {
    let n = line.len();
    let taps = f.taps();
    let pad = taps - 1;
    ext.clear();
    ext.extend((0..n + 2 * pad).map(|i| line[symmetric_index(i as isize - pad as isize, n)]));
    for k in 0..lo.len() {
        let window = &ext[2 * k..2 * k + taps];
        let mut acc_lo = 0.0;
        let mut acc_hi = 0.0;
        // Convolution: tap j meets sample 2k + (L-1) - j.
        for (j, &x) in window.iter().rev().enumerate() {
            acc_lo += f.lowpass[j] * x;
            acc_hi += f.highpass[j] * x;
        }
        lo[k] = acc_lo;
        hi[k] = acc_hi;
    }
}

/// Single-level 2-D DWT: rows first, then columns.
pub fn dwt2(p: &LumaPlane, f: &WaveletFilterPair) -> Result<WaveletSubbands> {
    let taps = f.taps();
    let (w, h) = (p.width(), p.height());
    if w < taps || h < taps {
        return Err(Error::DimensionTooSmall { width: w, height: h, min: taps });
    }
    let (sw, sh) = (subband_len(w, taps), subband_len(h, taps));
    let mut ext = Vec::with_capacity(w.max(h) + 2 * taps);

    // Row pass: h rows of sw low and sw high coefficients.
    let mut row_lo = vec![0.0; h * sw];
    let mut row_hi = vec![0.0; h * sw];
    for y in 0..h {
        let span = y * sw..(y + 1) * sw;
        analyze_line(p.row(y), f, &mut ext, &mut row_lo[span.clone()], &mut row_hi[span]);
    }

    let mut ll = vec![0.0; sw * sh];
    let mut lh = vec![0.0; sw * sh];
    let mut hl = vec![0.0; sw * sh];
    let mut hh = vec![0.0; sw * sh];
    let mut column = vec![0.0; h];
    let mut lo = vec![0.0; sh];
    let mut hi = vec![0.0; sh];
    for (src, (dst_lo, dst_hi)) in [(&row_lo, (&mut ll, &mut lh)), (&row_hi, (&mut hl, &mut hh))] {
        for x in 0..sw {
            for (y, c) in column.iter_mut().enumerate() {
                *c = src[y * sw + x];
            }
            analyze_line(&column, f, &mut ext, &mut lo, &mut hi);
            for y in 0..sh {
                dst_lo[y * sw + x] = lo[y];
                dst_hi[y * sw + x] = hi[y];
            }
        }
    }

    Ok(WaveletSubbands { width: sw, height: sh, ll, lh, hl, hh })
}

/// Sum of absolute coefficient values of each detail subband.
pub fn subband_l1(s: &WaveletSubbands) -> DetailEnergies {
    let l1 = |v: &[f64]| v.iter().map(|c| c.abs()).sum::<f64>();
    DetailEnergies { e_lh: l1(&s.lh), e_hl: l1(&s.hl), e_hh: l1(&s.hh) }
}
