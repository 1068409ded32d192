//! On-disk formats: the score CSV, the eval JSON and the comparison JSON.
//!
//! Numbers are written with a fixed number of decimals (4 for dB values, 3
//! for indices and angles) and keys in a fixed order, so identical inputs
//! give byte-identical files.

use std::io::{Read, Write};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize, Serializer};

pub const DB_DECIMALS: usize = 4;
pub const INDEX_DECIMALS: usize = 3;

pub const SCORE_CSV_HEADER: &str = "image_id,hfi_db,ei,riei,argmax_angle,label";

/// A real number printed with a fixed number of decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed {
    pub value: f64,
    pub decimals: usize,
}

pub fn fixed(value: f64, decimals: usize) -> Fixed {
    Fixed { value, decimals }
}

pub fn db(value: f64) -> Fixed {
    fixed(value, DB_DECIMALS)
}

pub fn index(value: f64) -> Fixed {
    fixed(value, INDEX_DECIMALS)
}

/// `value` formatted with `decimals` places; negative zero prints as zero.
pub fn format_fixed(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_owned()
    } else {
        s
    }
}

/// Rounds through the text representation, so values match what a reader
/// of the written file sees.
pub fn quantize(value: f64, decimals: usize) -> f64 {
    format_fixed(value, decimals).parse().expect("formatted float parses")
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text = format_fixed(self.value, self.decimals);
        serde_json::Number::from_str(&text).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(mut out: impl Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

// Score CSV -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ScoreRow {
    pub image_id: String,
    pub hfi_db: f64,
    pub ei: f64,
    pub riei: f64,
    pub argmax_angle: f64,
    pub label: String,
}

/// Quotes a CSV field when it contains a separator, quote or newline.
fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_owned()
    }
}

pub fn score_csv_line(image_id: &str, hfi_db: f64, ei: f64, riei: f64, argmax_angle: f64, label: &str) -> String {
    format!(
        "{},{},{},{},{},{label}\n",
        csv_field(image_id),
        format_fixed(hfi_db, DB_DECIMALS),
        format_fixed(ei, INDEX_DECIMALS),
        format_fixed(riei, INDEX_DECIMALS),
        format_fixed(argmax_angle, INDEX_DECIMALS),
    )
}

pub fn read_score_csv(input: impl Read) -> anyhow::Result<Vec<ScoreRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    anyhow::ensure!(header.join(",") == SCORE_CSV_HEADER, "unexpected score CSV header {:?}", header.join(","));
    Ok(reader.deserialize().collect::<Result<Vec<ScoreRow>, _>>()?)
}

// Score summary JSON --------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct DatasetStats {
    pub count: usize,
    pub hfi_mean: Fixed,
    pub hfi_median: Fixed,
    pub riei_mean: Fixed,
    pub riei_median: Fixed,
}

#[derive(Debug, Serialize)]
pub struct ImageError {
    pub image_id: String,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct ScoreSummary<C: Serialize> {
    pub config: C,
    pub scored: usize,
    pub failed: usize,
    pub datasets: IndexMap<String, DatasetStats>,
    pub overall: Option<DatasetStats>,
    pub errors: Vec<ImageError>,
}

// Eval JSON -----------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct EvalConfigJson<S: Serialize> {
    #[serde(flatten)]
    pub scoring: S,
    pub shave: usize,
    pub grid: String,
    pub lr_source: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Medians {
    pub hfi: Fixed,
    pub riei: Fixed,
}

#[derive(Debug, Serialize)]
pub struct Cuts {
    pub hfi: Vec<Fixed>,
    pub riei: Vec<Fixed>,
}

#[derive(Debug, Serialize)]
pub struct RecordJson {
    pub image_id: String,
    pub psnr_db: Fixed,
    pub psnr_capped: bool,
    pub psnr99_db: Fixed,
    pub psnr99_capped: bool,
    pub hfi_db: Fixed,
    pub riei: Fixed,
    pub quadrant: String,
}

#[derive(Debug, Serialize)]
pub struct CellJson {
    pub count: usize,
    /// Empty for cells without records.
    pub means: IndexMap<&'static str, Fixed>,
}

#[derive(Debug, Serialize)]
pub struct CorrelationJson {
    pub pearson: Fixed,
    pub spearman: Fixed,
}

#[derive(Debug, Serialize)]
pub struct EvalFile<S: Serialize> {
    pub config: EvalConfigJson<S>,
    pub medians: Medians,
    pub cuts: Cuts,
    pub records: Vec<RecordJson>,
    pub quadrants: IndexMap<String, CellJson>,
    pub global: CellJson,
    /// Correlation of per-image metrics with HFI; absent when undefined.
    pub correlations: IndexMap<&'static str, CorrelationJson>,
    pub errors: Vec<ImageError>,
}

/// The parts of an eval file that `compare` needs.
#[derive(Debug, Deserialize)]
pub struct EvalFileIn {
    pub config: EvalConfigIn,
    pub records: Vec<RecordIn>,
}

#[derive(Debug, Deserialize)]
pub struct EvalConfigIn {
    pub grid: String,
}

#[derive(Debug, Deserialize)]
pub struct RecordIn {
    pub image_id: String,
    pub psnr_db: f64,
    pub psnr99_db: f64,
    pub hfi_db: f64,
    pub riei: f64,
    pub quadrant: String,
}

// Comparison JSON -----------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct CompareConfigJson {
    pub grid: String,
    pub bin_width: Fixed,
    pub outlier_cutoff: Fixed,
}

#[derive(Debug, Serialize)]
pub struct DiffJson {
    pub image_id: String,
    pub quadrant: String,
    pub psnr_db: Fixed,
    pub psnr99_db: Fixed,
}

#[derive(Debug, Serialize)]
pub struct HistogramJson {
    pub metric: &'static str,
    pub bin_width: Fixed,
    pub bin_edges: Vec<Fixed>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct ComparisonFile {
    pub config: CompareConfigJson,
    pub count: usize,
    pub quadrants: IndexMap<String, CellJson>,
    pub global: CellJson,
    pub histogram: HistogramJson,
    pub outliers: Vec<DiffJson>,
    pub differences: Vec<DiffJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting() {
        assert_eq!(format_fixed(24.0, 4), "24.0000");
        assert_eq!(format_fixed(-0.0, 4), "0.0000");
        assert_eq!(format_fixed(-0.00001, 4), "0.0000");
        assert_eq!(format_fixed(-1.25, 3), "-1.250");
        assert_eq!(quantize(5.21549, 3), 5.215);
        let json = serde_json::to_string(&vec![db(100.0), index(6.2404)]).unwrap();
        assert_eq!(json, "[100.0000,6.240]");
    }

    #[test]
    fn score_csv_round_trip() {
        let mut text = format!("{SCORE_CSV_HEADER}\n");
        text.push_str(&score_csv_line("urban100/img_068", 24.12346, 1.7431, 6.2399, 40.0, "edge"));
        let rows = read_score_csv(text.as_bytes()).unwrap();
        assert_eq!(
            rows,
            vec![ScoreRow {
                image_id: "urban100/img_068".into(),
                hfi_db: 24.1235,
                ei: 1.743,
                riei: 6.24,
                argmax_angle: 40.0,
                label: "edge".into()
            }]
        );
        assert!(read_score_csv("id,x\n".as_bytes()).is_err());

        let line = score_csv_line("odd,name", 1.0, 2.0, 3.0, 0.0, "texture");
        let rows = read_score_csv(format!("{SCORE_CSV_HEADER}\n{line}").as_bytes()).unwrap();
        assert_eq!(rows[0].image_id, "odd,name");
    }
}
