//! Dataset-level analysis: partitioning records on the HFI x RIEI plane,
//! per-cell aggregation, model-vs-model comparison and correlations.
//!
//! Sums are always accumulated in ascending `image_id` order so results do
//! not depend on input order.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_BIN_WIDTH_DB: f64 = 0.5;
pub const DEFAULT_OUTLIER_CUTOFF_DB: f64 = 4.0;
pub const MIN_PARTITION_RECORDS: usize = 4;

/// Number of quantile levels along the HFI and RIEI axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub hfi_levels: usize,
    pub riei_levels: usize,
}

impl Grid {
    pub const QUADRANTS: Grid = Grid { hfi_levels: 2, riei_levels: 2 };

    pub fn new(hfi_levels: usize, riei_levels: usize) -> Result<Self> {
        if hfi_levels < 2 || riei_levels < 2 {
            return Err(Error::InvalidGrid(hfi_levels, riei_levels));
        }
        Ok(Self { hfi_levels, riei_levels })
    }

    pub fn is_quadrants(&self) -> bool {
        *self == Self::QUADRANTS
    }

    /// Cells in report order. For quadrants this is easy-texture, easy-edge,
    /// hard-texture, hard-edge; otherwise easiest HFI level first, then
    /// ascending RIEI level.
    pub fn cells(&self) -> Vec<Cell> {
        (0..self.hfi_levels)
            .rev()
            .flat_map(|h| (0..self.riei_levels).map(move |r| Cell { hfi_level: h, riei_level: r }))
            .collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::QUADRANTS
    }
}

impl std::str::FromStr for Grid {
    type Err = Error;

    /// `QHxQR`, e.g. `2x2` or `3x3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidData(format!("grid must look like 2x2, got {s:?}"));
        let (h, r) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Grid::new(h.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.hfi_levels, self.riei_levels)
    }
}

/// Position of a record on the HFI x RIEI grid. Level 0 is the lowest
/// quantile band: hardest HFI, most texture-like RIEI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub hfi_level: usize,
    pub riei_level: usize,
}

impl Cell {
    pub const EASY_TEXTURE: Cell = Cell { hfi_level: 1, riei_level: 0 };
    pub const EASY_EDGE: Cell = Cell { hfi_level: 1, riei_level: 1 };
    pub const HARD_TEXTURE: Cell = Cell { hfi_level: 0, riei_level: 0 };
    pub const HARD_EDGE: Cell = Cell { hfi_level: 0, riei_level: 1 };

    pub fn name(&self, grid: Grid) -> String {
        if grid.is_quadrants() {
            let difficulty = if self.hfi_level == 1 { "easy" } else { "hard" };
            let content = if self.riei_level == 1 { "edge" } else { "texture" };
            format!("{difficulty}_{content}")
        } else {
            format!("hfi{}_riei{}", self.hfi_level, self.riei_level)
        }
    }

    pub fn parse(name: &str, grid: Grid) -> Result<Cell> {
        grid.cells()
            .into_iter()
            .find(|c| c.name(grid) == name)
            .ok_or_else(|| Error::InvalidData(format!("unknown cell {name:?} for grid {grid}")))
    }
}

/// One evaluated image.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub image_id: String,
    pub psnr_db: f64,
    pub psnr99_db: f64,
    pub hfi_db: f64,
    pub riei: f64,
    pub cell: Option<Cell>,
}

impl EvalRecord {
    pub fn new(image_id: impl Into<String>, psnr_db: f64, psnr99_db: f64, hfi_db: f64, riei: f64) -> Self {
        Self { image_id: image_id.into(), psnr_db, psnr99_db, hfi_db, riei, cell: None }
    }
}

/// Columns that can be aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Psnr,
    Psnr99,
    Hfi,
    Riei,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Psnr => "psnr_db",
            Metric::Psnr99 => "psnr99_db",
            Metric::Hfi => "hfi_db",
            Metric::Riei => "riei",
        }
    }

    pub fn of(self, r: &EvalRecord) -> f64 {
        match self {
            Metric::Psnr => r.psnr_db,
            Metric::Psnr99 => r.psnr99_db,
            Metric::Hfi => r.hfi_db,
            Metric::Riei => r.riei,
        }
    }
}

/// Linear-interpolation quantile of already sorted data.
/// Order-statistic index below the `num / den` quantile and the
/// interpolation weight of the next one, computed exactly.
fn quantile_position(n: usize, num: usize, den: usize) -> (usize, f64) {
    let scaled = (n - 1) * num;
    (scaled / den, (scaled % den) as f64 / den as f64)
}

/// Linearly interpolated quantile of sorted data at `num / den`.
fn quantile_sorted(sorted: &[f64], num: usize, den: usize) -> f64 {
    let (lo, frac) = quantile_position(sorted.len(), num, den);
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    }
}

fn sorted_copy(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Sample median; even counts average the two middle values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(quantile_sorted(&sorted_copy(values.iter().copied()), 1, 2))
}

/// Cut points that produced a cell assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub grid: Grid,
    pub hfi_median: f64,
    pub riei_median: f64,
    /// Ascending interior cut points; `hfi_levels - 1` of them.
    pub hfi_cuts: Vec<f64>,
    pub riei_cuts: Vec<f64>,
}

/// Number of cuts strictly below `value`. A cut interpolated between two
/// order statistics lies strictly above the lower one, so comparing against
/// that order statistic gives the same answer without rounding effects.
fn level(value: f64, floors: &[f64]) -> usize {
    floors.iter().filter(|&&c| value > c).count()
}

/// Median split of the HFI x RIEI plane. Easy means `hfi > median`, edge
/// means `riei > median`; values equal to a median go to hard / texture.
pub fn partition_quadrants(records: &mut [EvalRecord]) -> Result<Partition> {
    partition_grid(records, Grid::QUADRANTS)
}

/// Quantile split into `grid` cells, cut points at `j / levels`.
pub fn partition_grid(records: &mut [EvalRecord], grid: Grid) -> Result<Partition> {
    if records.len() < MIN_PARTITION_RECORDS {
        return Err(Error::TooFewRecords { got: records.len(), min: MIN_PARTITION_RECORDS });
    }
    if let Some(r) = records.iter().find(|r| !(r.hfi_db.is_finite() && r.riei.is_finite())) {
        return Err(Error::InvalidData(format!("non-finite difficulty score for {}", r.image_id)));
    }
    let hfi = sorted_copy(records.iter().map(|r| r.hfi_db));
    let riei = sorted_copy(records.iter().map(|r| r.riei));
    let cuts = |sorted: &[f64], levels: usize| -> Vec<f64> {
        (1..levels).map(|j| quantile_sorted(sorted, j, levels)).collect()
    };
    let floors = |sorted: &[f64], levels: usize| -> Vec<f64> {
        (1..levels).map(|j| sorted[quantile_position(sorted.len(), j, levels).0]).collect()
    };
    let partition = Partition {
        grid,
        hfi_median: quantile_sorted(&hfi, 1, 2),
        riei_median: quantile_sorted(&riei, 1, 2),
        hfi_cuts: cuts(&hfi, grid.hfi_levels),
        riei_cuts: cuts(&riei, grid.riei_levels),
    };
    let (hfi_floors, riei_floors) = (floors(&hfi, grid.hfi_levels), floors(&riei, grid.riei_levels));
    for r in records.iter_mut() {
        r.cell = Some(Cell { hfi_level: level(r.hfi_db, &hfi_floors), riei_level: level(r.riei, &riei_floors) });
    }
    Ok(partition)
}

/// Count and per-metric means for one cell (or the whole set).
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    /// `None` for the global row.
    pub cell: Option<Cell>,
    pub count: usize,
    /// Mean of each requested metric; `None` when `count == 0`.
    pub means: Vec<(Metric, Option<f64>)>,
}

impl CellStats {
    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.means.iter().find(|(m, _)| *m == metric).and_then(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantReport {
    pub partition: Partition,
    pub cells: Vec<CellStats>,
    pub global: CellStats,
}

impl QuadrantReport {
    pub fn cell(&self, cell: Cell) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.cell == Some(cell))
    }
}

/// Aggregates `(cell, values)` rows already in id order.
fn aggregate(grid: Grid, rows: &[(Cell, Vec<f64>)], metrics: &[Metric]) -> (Vec<CellStats>, CellStats) {
    let stats = |filter: Option<Cell>| {
        let mut sums = vec![0.0; metrics.len()];
        let mut count = 0;
        for (cell, values) in rows.iter().filter(|(c, _)| filter.is_none_or(|f| f == *c)) {
            debug_assert!(filter.is_none_or(|f| f == *cell));
            count += 1;
            for (s, v) in sums.iter_mut().zip(values) {
                *s += v;
            }
        }
        let means = metrics
            .iter()
            .zip(sums)
            .map(|(&m, s)| (m, (count > 0).then(|| s / count as f64)))
            .collect();
        CellStats { cell: filter, count, means }
    };
    let cells = grid.cells().into_iter().map(|c| stats(Some(c))).collect();
    (cells, stats(None))
}

fn sorted_by_id<T>(items: &[T], id: impl Fn(&T) -> &str) -> Vec<&T> {
    let mut v: Vec<&T> = items.iter().collect();
    v.sort_by(|a, b| id(a).cmp(id(b)));
    v
}

/// Per-cell and global means of `metrics`. Empty cells are reported with
/// count 0 and no means.
pub fn quadrant_report(records: &[EvalRecord], partition: &Partition, metrics: &[Metric]) -> Result<QuadrantReport> {
    let rows = sorted_by_id(records, |r| &r.image_id)
        .into_iter()
        .map(|r| {
            let cell = r.cell.ok_or_else(|| Error::Unassigned(r.image_id.clone()))?;
            Ok((cell, metrics.iter().map(|m| m.of(r)).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (cells, global) = aggregate(partition.grid, &rows, metrics);
    Ok(QuadrantReport { partition: partition.clone(), cells, global })
}

/// Fixed-width histogram with 0 on a bin edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    /// `counts.len() + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Bins are `[j w, (j + 1) w)`, covering the data range exactly.
pub fn histogram(values: &[f64], bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidData(format!("bin width must be positive, got {bin_width}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("histogram input"));
    }
    if values.is_empty() {
        return Ok(Histogram { bin_width, edges: vec![0.0], counts: vec![] });
    }
    let bin = |v: f64| (v / bin_width).floor() as i64;
    let first = values.iter().map(|&v| bin(v)).min().unwrap_or(0);
    let last = values.iter().map(|&v| bin(v)).max().unwrap_or(0);
    let mut counts = vec![0usize; (last - first + 1) as usize];
    for &v in values {
        counts[(bin(v) - first) as usize] += 1;
    }
    let edges = (first..=last + 1).map(|j| j as f64 * bin_width).collect();
    Ok(Histogram { bin_width, edges, counts })
}

/// Per-image `A - B` differences.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDifference {
    pub image_id: String,
    pub cell: Cell,
    pub psnr_db: f64,
    pub psnr99_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub grid: Grid,
    pub differences: Vec<PairDifference>,
    /// Means of the differences; metrics are [`Metric::Psnr`] and [`Metric::Psnr99`].
    pub cells: Vec<CellStats>,
    pub global: CellStats,
    /// Histogram of PSNR differences.
    pub histogram: Histogram,
    pub outlier_cutoff: f64,
    /// Images whose |PSNR difference| exceeds the cutoff, in id order.
    pub outliers: Vec<PairDifference>,
}

/// Compares two evaluations of the same image set. Both must carry the same
/// cell assignment (one shared partition from the LR difficulty scores).
pub fn compare_models(
    records_a: &[EvalRecord],
    records_b: &[EvalRecord],
    grid: Grid,
    bin_width: f64,
    outlier_cutoff: f64,
) -> Result<ComparisonReport> {
    let index = |rs: &[EvalRecord]| -> Result<BTreeMap<String, EvalRecord>> {
        let mut m = BTreeMap::new();
        for r in rs {
            if m.insert(r.image_id.clone(), r.clone()).is_some() {
                return Err(Error::InvalidData(format!("duplicate image id {}", r.image_id)));
            }
        }
        Ok(m)
    };
    let (a, b) = (index(records_a)?, index(records_b)?);
    let only_a: Vec<&str> = a.keys().filter(|k| !b.contains_key(*k)).map(String::as_str).collect();
    let only_b: Vec<&str> = b.keys().filter(|k| !a.contains_key(*k)).map(String::as_str).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        let sample = |v: &[&str]| v.iter().take(5).copied().collect::<Vec<_>>().join(", ");
        return Err(Error::IdSetMismatch(format!(
            "{} only in A [{}], {} only in B [{}]",
            only_a.len(),
            sample(&only_a),
            only_b.len(),
            sample(&only_b)
        )));
    }

    let mut differences = Vec::with_capacity(a.len());
    for (id, ra) in &a {
        let rb = &b[id];
        let cell = ra.cell.ok_or_else(|| Error::Unassigned(id.clone()))?;
        if rb.cell != Some(cell) {
            return Err(Error::PartitionMismatch(id.clone()));
        }
        differences.push(PairDifference {
            image_id: id.clone(),
            cell,
            psnr_db: ra.psnr_db - rb.psnr_db,
            psnr99_db: ra.psnr99_db - rb.psnr99_db,
        });
    }

    let metrics = [Metric::Psnr, Metric::Psnr99];
    let rows: Vec<(Cell, Vec<f64>)> = differences.iter().map(|d| (d.cell, vec![d.psnr_db, d.psnr99_db])).collect();
    let (cells, global) = aggregate(grid, &rows, &metrics);
    let psnr_diffs: Vec<f64> = differences.iter().map(|d| d.psnr_db).collect();
    let histogram = histogram(&psnr_diffs, bin_width)?;
    let outliers = differences.iter().filter(|d| d.psnr_db.abs() > outlier_cutoff).cloned().collect();

    Ok(ComparisonReport { grid, differences, cells, global, histogram, outlier_cutoff, outliers })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub pearson: f64,
    pub spearman: f64,
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewSamples { got: x.len(), min: 3 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("correlation input"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the average of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1 ..= end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson and Spearman (Pearson on average ranks) correlations.
pub fn correlations(x: &[f64], y: &[f64]) -> Result<Correlation> {
    let pearson_xy = pearson(x, y)?;
    let spearman = pearson(&average_ranks(x), &average_ranks(y))?;
    Ok(Correlation { pearson: pearson_xy, spearman })
}
