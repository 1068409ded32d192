use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use indexmap::IndexMap;
use rayon::prelude::*;
use sr_difficulty::analysis::{
    compare_models, correlations, median, partition_grid, quadrant_report, Cell, CellStats, EvalRecord, Grid, Metric,
};
use sr_difficulty::difficulty::{score_image, DifficultyScores};
use sr_difficulty::imgproc::rgb_to_luma;
use sr_difficulty::metrics::{psnr, psnr99, render_artifact_map, MetricValue};
use sr_difficulty::{LumaPlane, RgbImage};

use crate::config::RunConfig;
use crate::manifest::{pair, DatasetManifest};
use crate::schema::{
    db, format_fixed, index, quantize, read_score_csv, score_csv_line, write_json, CellJson, CompareConfigJson,
    ComparisonFile, CorrelationJson, Cuts, DatasetStats, DiffJson, EvalConfigJson, EvalFile, EvalFileIn,
    HistogramJson, ImageError, Medians, RecordJson, ScoreSummary, DB_DECIMALS, INDEX_DECIMALS, SCORE_CSV_HEADER,
};
use crate::{CommandError, CommandResult, ExitStatus};

/// Largest tolerated fraction of unpaired or failed images in `eval`.
pub const MAX_FAILED_FRACTION: f64 = 0.10;

fn create(path: &Path) -> Result<BufWriter<File>, CommandError> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CommandError::data)
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CommandError> {
    w.flush().with_context(|| format!("cannot write {}", path.display())).map_err(CommandError::data)
}

fn discover(dir: &Path) -> Result<DatasetManifest, CommandError> {
    DatasetManifest::discover(dir).map_err(CommandError::usage)
}

/// Default summary location next to the score CSV: `scores.csv` -> `scores.summary.json`.
pub fn default_summary_path(out_csv: &Path) -> PathBuf {
    out_csv.with_extension("summary.json")
}

fn stats(hfi: &[f64], riei: &[f64]) -> DatasetStats {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    DatasetStats {
        count: hfi.len(),
        hfi_mean: db(mean(hfi)),
        hfi_median: db(median(hfi).unwrap_or(f64::NAN)),
        riei_mean: index(mean(riei)),
        riei_median: index(median(riei).unwrap_or(f64::NAN)),
    }
}

fn check_scores(s: &DifficultyScores) -> Result<(), CommandError> {
    if s.riei.partial_cmp(&s.ei).is_none_or(|o| o.is_lt()) {
        return Err(CommandError::internal(anyhow!("{}: riei {} below ei {}", s.image_id, s.riei, s.ei)));
    }
    Ok(())
}

/// Scores every PNG under `input`, writing the per-image CSV and a summary
/// JSON with per-dataset mean/median HFI and RIEI.
pub fn cmd_score(input: &Path, out_csv: &Path, summary: Option<&Path>, cfg: &RunConfig) -> CommandResult {
    let manifest = discover(input)?;
    if manifest.is_empty() {
        return Err(CommandError::data(anyhow!("no PNG images under {}", input.display())));
    }
    let opts = cfg.scoring();
    let pool = cfg.thread_pool().map_err(CommandError::internal)?;
    let entries: Vec<(&String, &PathBuf)> = manifest.entries.iter().collect();
    let results: Vec<(String, Result<DifficultyScores, String>)> = pool.install(|| {
        entries
            .par_iter()
            .map(|(id, path)| {
                let scored = RgbImage::load(path)
                    .map_err(|e| e.for_image(id.as_str()))
                    .and_then(|img| score_image(id, &img, &opts))
                    .map_err(|e| e.to_string());
                ((*id).clone(), scored)
            })
            .collect()
    });

    let mut csv = format!("{SCORE_CSV_HEADER}\n");
    let mut groups: IndexMap<String, (Vec<f64>, Vec<f64>)> = IndexMap::new();
    let mut all = (Vec::new(), Vec::new());
    let mut errors = Vec::new();
    for (id, result) in &results {
        match result {
            Ok(s) => {
                check_scores(s)?;
                csv.push_str(&score_csv_line(id, s.hfi_db, s.ei, s.riei, s.argmax_angle, s.label.as_str()));
                let (h, r) = (quantize(s.hfi_db, DB_DECIMALS), quantize(s.riei, INDEX_DECIMALS));
                let g = groups.entry(manifest.dataset_of(id)).or_default();
                g.0.push(h);
                g.1.push(r);
                all.0.push(h);
                all.1.push(r);
            }
            Err(msg) => {
                eprintln!("warning: {msg}");
                errors.push(ImageError { image_id: id.clone(), error: msg.clone() });
            }
        }
    }
    groups.sort_keys();

    let mut w = create(out_csv)?;
    w.write_all(csv.as_bytes()).map_err(CommandError::data)?;
    finish(w, out_csv)?;

    let summary_doc = ScoreSummary {
        config: cfg.scoring_json(),
        scored: all.0.len(),
        failed: errors.len(),
        datasets: groups.iter().map(|(k, (h, r))| (k.clone(), stats(h, r))).collect(),
        overall: (!all.0.is_empty()).then(|| stats(&all.0, &all.1)),
        errors,
    };
    let summary_path = summary.map(Path::to_path_buf).unwrap_or_else(|| default_summary_path(out_csv));
    let mut w = create(&summary_path)?;
    write_json(&mut w, &summary_doc).map_err(CommandError::data)?;
    finish(w, &summary_path)?;

    if summary_doc.scored == 0 {
        eprintln!("error: none of {} images could be scored", results.len());
        return Ok(ExitStatus::Data);
    }
    Ok(ExitStatus::Success)
}

/// Where `eval` gets HFI/RIEI from.
#[derive(Debug, Clone)]
pub enum DifficultySource {
    /// Score LR images paired with HR by id.
    LrDir(PathBuf),
    /// Read a score CSV written by `score`.
    Scores(PathBuf),
    /// Score a bicubic x4 downscale of each HR image.
    SyntheticFromHr,
}

impl DifficultySource {
    fn label(&self) -> &'static str {
        match self {
            DifficultySource::LrDir(_) => "provided",
            DifficultySource::Scores(_) => "scores",
            DifficultySource::SyntheticFromHr => "synthetic",
        }
    }
}

enum Difficulty {
    Lr(DatasetManifest),
    Table(BTreeMap<String, (f64, f64)>),
    Synthetic,
}

struct Evaluated {
    record: EvalRecord,
    psnr: MetricValue,
    psnr99: MetricValue,
}

fn load_luma(path: &Path, cfg: &RunConfig) -> sr_difficulty::Result<(RgbImage, LumaPlane)> {
    let img = RgbImage::load(path)?;
    let luma = rgb_to_luma(&img, cfg.luma.into());
    Ok((img, luma))
}

fn evaluate_one(
    id: &str,
    hr_path: &Path,
    sr_path: &Path,
    difficulty: &Difficulty,
    cfg: &RunConfig,
) -> Result<Evaluated, String> {
    let tag = |e: sr_difficulty::Error| e.for_image(id).to_string();
    let (hr_img, hr) = load_luma(hr_path, cfg).map_err(tag)?;
    let (_, sr) = load_luma(sr_path, cfg).map_err(tag)?;
    let (hr_s, sr_s) = (hr.shave(cfg.shave).map_err(tag)?, sr.shave(cfg.shave).map_err(tag)?);
    let full = psnr(&hr_s, &sr_s).map_err(tag)?;
    let (top, _) = psnr99(&hr_s, &sr_s).map_err(tag)?;

    let (hfi, riei) = match difficulty {
        Difficulty::Table(t) => *t.get(id).ok_or_else(|| format!("{id}: no entry in score CSV"))?,
        Difficulty::Lr(m) => {
            let path = m.entries.get(id).ok_or_else(|| format!("{id}: no LR image"))?;
            let lr = RgbImage::load(path).map_err(tag)?;
            let s = score_image(id, &lr, &cfg.scoring()).map_err(|e| e.to_string())?;
            (quantize(s.hfi_db, DB_DECIMALS), quantize(s.riei, INDEX_DECIMALS))
        }
        Difficulty::Synthetic => {
            let lr = hr_img.bicubic_downscale4().map_err(tag)?;
            let s = score_image(id, &lr, &cfg.scoring()).map_err(|e| e.to_string())?;
            (quantize(s.hfi_db, DB_DECIMALS), quantize(s.riei, INDEX_DECIMALS))
        }
    };
    Ok(Evaluated { record: EvalRecord::new(id, full.value, top.value, hfi, riei), psnr: full, psnr99: top })
}

fn cell_json(stats: &CellStats) -> CellJson {
    CellJson {
        count: stats.count,
        means: stats.means.iter().filter_map(|(m, v)| v.map(|v| (m.name(), db(v)))).collect(),
    }
}

fn cells_json(grid: Grid, cells: &[CellStats]) -> IndexMap<String, CellJson> {
    cells.iter().map(|c| (c.cell.expect("per-cell row").name(grid), cell_json(c))).collect()
}

/// PSNR and PSNR99 for each HR/SR pair, joined with difficulty scores and
/// partitioned on the HFI x RIEI grid.
pub fn cmd_eval(hr_dir: &Path, sr_dir: &Path, source: &DifficultySource, out_json: &Path, cfg: &RunConfig) -> CommandResult {
    let hr = discover(hr_dir)?;
    let sr = discover(sr_dir)?;
    let pairing = pair(&hr, &sr);
    for id in &pairing.unpaired {
        eprintln!("warning: {id} has no HR/SR partner, skipped");
    }
    if pairing.paired.is_empty() {
        return Err(CommandError::data(anyhow!("no HR/SR pairs between {} and {}", hr_dir.display(), sr_dir.display())));
    }

    let difficulty = match source {
        DifficultySource::LrDir(dir) => Difficulty::Lr(discover(dir)?),
        DifficultySource::Scores(path) => {
            let file = File::open(path).with_context(|| format!("cannot read {}", path.display())).map_err(CommandError::usage)?;
            let rows = read_score_csv(file).map_err(CommandError::data)?;
            Difficulty::Table(rows.into_iter().map(|r| (r.image_id, (r.hfi_db, r.riei))).collect())
        }
        DifficultySource::SyntheticFromHr => Difficulty::Synthetic,
    };

    let pool = cfg.thread_pool().map_err(CommandError::internal)?;
    let results: Vec<(String, Result<Evaluated, String>)> = pool.install(|| {
        pairing
            .paired
            .par_iter()
            .map(|id| (id.clone(), evaluate_one(id, &hr.entries[id], &sr.entries[id], &difficulty, cfg)))
            .collect()
    });

    let mut evaluated = Vec::new();
    let mut errors = Vec::new();
    for (id, r) in results {
        match r {
            Ok(e) => evaluated.push(e),
            Err(msg) => {
                eprintln!("warning: {msg}");
                errors.push(ImageError { image_id: id, error: msg });
            }
        }
    }
    for id in &pairing.unpaired {
        errors.push(ImageError { image_id: id.clone(), error: "unpaired".into() });
    }
    errors.sort_by(|a, b| a.image_id.cmp(&b.image_id));

    let mut records: Vec<EvalRecord> = evaluated.iter().map(|e| e.record.clone()).collect();
    let partition = partition_grid(&mut records, cfg.grid).map_err(CommandError::data)?;
    let metrics = [Metric::Psnr, Metric::Psnr99];
    let report = quadrant_report(&records, &partition, &metrics).map_err(CommandError::internal)?;
    if report.cells.iter().map(|c| c.count).sum::<usize>() != report.global.count {
        return Err(CommandError::internal(anyhow!("quadrant counts do not add up to the record count")));
    }

    let grid = cfg.grid;
    let hfi: Vec<f64> = records.iter().map(|r| r.hfi_db).collect();
    let mut corr = IndexMap::new();
    for m in metrics {
        let ys: Vec<f64> = records.iter().map(|r| m.of(r)).collect();
        if let Ok(c) = correlations(&ys, &hfi) {
            let key = if m == Metric::Psnr { "psnr_vs_hfi" } else { "psnr99_vs_hfi" };
            corr.insert(key, CorrelationJson { pearson: db(c.pearson), spearman: db(c.spearman) });
        }
    }

    let doc = EvalFile {
        config: EvalConfigJson { scoring: cfg.scoring_json(), shave: cfg.shave, grid: grid.to_string(), lr_source: source.label() },
        medians: Medians { hfi: db(partition.hfi_median), riei: index(partition.riei_median) },
        cuts: Cuts {
            hfi: partition.hfi_cuts.iter().map(|&v| db(v)).collect(),
            riei: partition.riei_cuts.iter().map(|&v| index(v)).collect(),
        },
        records: records
            .iter()
            .zip(&evaluated)
            .map(|(r, e)| RecordJson {
                image_id: r.image_id.clone(),
                psnr_db: db(r.psnr_db),
                psnr_capped: e.psnr.capped,
                psnr99_db: db(r.psnr99_db),
                psnr99_capped: e.psnr99.capped,
                hfi_db: db(r.hfi_db),
                riei: index(r.riei),
                quadrant: r.cell.expect("partitioned").name(grid),
            })
            .collect(),
        quadrants: cells_json(grid, &report.cells),
        global: cell_json(&report.global),
        correlations: corr,
        errors,
    };
    let mut w = create(out_json)?;
    write_json(&mut w, &doc).map_err(CommandError::data)?;
    finish(w, out_json)?;

    let total = pairing.paired.len() + pairing.unpaired.len();
    let failed = doc.errors.len();
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 {
        eprintln!("error: {failed} of {total} images unpaired or failed");
        return Ok(ExitStatus::Data);
    }
    Ok(ExitStatus::Success)
}

fn read_eval(path: &Path) -> Result<(Grid, Vec<EvalRecord>), CommandError> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display())).map_err(CommandError::usage)?;
    let doc: EvalFileIn = serde_json::from_reader(std::io::BufReader::new(file))
        .with_context(|| format!("{} is not an eval file", path.display()))
        .map_err(CommandError::data)?;
    let grid: Grid = doc.config.grid.parse().map_err(CommandError::data)?;
    let records = doc
        .records
        .into_iter()
        .map(|r| {
            let cell = Cell::parse(&r.quadrant, grid)?;
            Ok(EvalRecord { cell: Some(cell), ..EvalRecord::new(r.image_id, r.psnr_db, r.psnr99_db, r.hfi_db, r.riei) })
        })
        .collect::<sr_difficulty::Result<Vec<_>>>()
        .map_err(CommandError::data)?;
    Ok((grid, records))
}

/// Per-image and per-quadrant `A - B` differences between two eval files.
pub fn cmd_compare(eval_a: &Path, eval_b: &Path, out_json: &Path, cfg: &RunConfig) -> CommandResult {
    let (grid_a, a) = read_eval(eval_a)?;
    let (grid_b, b) = read_eval(eval_b)?;
    if grid_a != grid_b {
        return Err(CommandError::usage(anyhow!("eval files use different grids ({grid_a} vs {grid_b})")));
    }
    let report = compare_models(&a, &b, grid_a, cfg.bin_width, cfg.outlier_cutoff).map_err(CommandError::data)?;
    let diff_json = |d: &sr_difficulty::analysis::PairDifference| DiffJson {
        image_id: d.image_id.clone(),
        quadrant: d.cell.name(grid_a),
        psnr_db: db(d.psnr_db),
        psnr99_db: db(d.psnr99_db),
    };
    let doc = ComparisonFile {
        config: CompareConfigJson { grid: grid_a.to_string(), bin_width: db(cfg.bin_width), outlier_cutoff: db(cfg.outlier_cutoff) },
        count: report.differences.len(),
        quadrants: cells_json(grid_a, &report.cells),
        global: cell_json(&report.global),
        histogram: HistogramJson {
            metric: Metric::Psnr.name(),
            bin_width: db(report.histogram.bin_width),
            bin_edges: report.histogram.edges.iter().map(|&e| db(e)).collect(),
            counts: report.histogram.counts.clone(),
        },
        outliers: report.outliers.iter().map(diff_json).collect(),
        differences: report.differences.iter().map(diff_json).collect(),
    };
    let mut w = create(out_json)?;
    write_json(&mut w, &doc).map_err(CommandError::data)?;
    finish(w, out_json)?;
    Ok(ExitStatus::Success)
}

/// `psnr: 21.19` or `psnr: 100.00 capped`.
pub fn metric_line(name: &str, v: MetricValue) -> String {
    let suffix = if v.capped { " capped" } else { "" };
    format!("{name}: {}{suffix}", format_fixed(v.value, 2))
}

/// Renders the PSNR99 artifact map of an HR/SR pair and prints both metrics.
pub fn cmd_artifact_map(hr_png: &Path, sr_png: &Path, out_png: &Path, cfg: &RunConfig, stdout: &mut dyn Write) -> CommandResult {
    let load = |p: &Path| -> Result<LumaPlane, CommandError> {
        let (_, luma) = load_luma(p, cfg).with_context(|| format!("cannot decode {}", p.display())).map_err(CommandError::data)?;
        luma.shave(cfg.shave).map_err(CommandError::data)
    };
    let (hr, sr) = (load(hr_png)?, load(sr_png)?);
    let full = psnr(&hr, &sr).map_err(CommandError::data)?;
    let (top, map) = psnr99(&hr, &sr).map_err(CommandError::data)?;
    let img = render_artifact_map(&map, &hr).map_err(CommandError::internal)?;
    img.save_png(out_png).with_context(|| format!("cannot write {}", out_png.display())).map_err(CommandError::data)?;
    writeln!(stdout, "{}", metric_line("psnr", full)).map_err(CommandError::internal)?;
    writeln!(stdout, "{}", metric_line("psnr99", top)).map_err(CommandError::internal)?;
    Ok(ExitStatus::Success)
}
