//! CSV and text artifacts exchanged between stages.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a value
//! read back from any of these files is bit-identical to the one written.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use stopwords_rmt_core::{PlotRow, SpacingSample, StopwordReport, UnfoldedSeries};

use crate::error::StageError;

pub const SERIES_HEADER: [&str; 4] = ["word", "article_id", "avg_distance", "article_length"];
pub const VOCABULARY_HEADER: [&str; 3] = ["rank", "word", "count"];
pub const FITS_HEADER: [&str; 10] = [
    "word",
    "rank",
    "n_articles",
    "n_spacings",
    "retained",
    "beta",
    "beta_clamped",
    "b",
    "mse",
    "status",
];
pub const STOPWORDS_HEADER: [&str; 7] = [
    "word",
    "rank",
    "n_articles",
    "n_spacings",
    "beta",
    "mse",
    "is_stopword",
];
pub const HISTOGRAM_HEADER: [&str; 5] = ["bin_center", "density", "brody", "poisson", "goe"];
pub const UNFOLDED_HEADER: [&str; 3] = ["index", "value", "spacing"];

pub struct TableWriter {
    inner: csv::Writer<BufWriter<File>>,
    path: std::path::PathBuf,
}

impl TableWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, StageError> {
        let file = File::create(path).map_err(|e| StageError::io(path, e))?;
        let mut w = Self {
            inner: csv::WriterBuilder::new().from_writer(BufWriter::new(file)),
            path: path.to_owned(),
        };
        w.row(header)?;
        Ok(w)
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), StageError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner
            .write_record(fields)
            .map_err(|e| StageError::io(&self.path, e.into()))
    }

    pub fn finish(mut self) -> Result<(), StageError> {
        self.inner
            .flush()
            .map_err(|e| StageError::io(&self.path, e))
    }
}

/// Reads a CSV file with an exact header, calling `visit(line, record)` per row.
pub fn read_table(
    path: &Path,
    header: &[&str],
    mut visit: impl FnMut(u64, &csv::StringRecord) -> Result<(), StageError>,
) -> Result<(), StageError> {
    let file = File::open(path).map_err(|e| StageError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let more = reader
            .read_record(&mut record)
            .map_err(|e| StageError::Parse {
                path: path.to_owned(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if first {
            first = false;
            check_header(path, header, &record)?;
            continue;
        }
        if record.len() != header.len() {
            let column = header
                .get(record.len())
                .unwrap_or(&header[header.len() - 1]);
            return Err(StageError::Schema {
                path: path.to_owned(),
                line,
                column: column.to_string(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        visit(line, &record)?;
    }
    if first {
        return Err(StageError::Schema {
            path: path.to_owned(),
            line: 1,
            column: header[0].to_string(),
            message: "missing header".into(),
        });
    }
    Ok(())
}

fn check_header(
    path: &Path,
    header: &[&str],
    record: &csv::StringRecord,
) -> Result<(), StageError> {
    for (i, want) in header.iter().enumerate() {
        let got = record.get(i);
        if got != Some(*want) {
            return Err(StageError::Schema {
                path: path.to_owned(),
                line: 1,
                column: want.to_string(),
                message: format!(
                    "header has {:?} where {want:?} was expected",
                    got.unwrap_or("")
                ),
            });
        }
    }
    if record.len() != header.len() {
        return Err(StageError::Schema {
            path: path.to_owned(),
            line: 1,
            column: record.get(header.len()).unwrap_or("").to_string(),
            message: format!("expected {} columns, found {}", header.len(), record.len()),
        });
    }
    Ok(())
}

pub fn field<T: FromStr>(
    path: &Path,
    header: &[&str],
    line: u64,
    record: &csv::StringRecord,
    idx: usize,
) -> Result<T, StageError>
where
    T::Err: std::fmt::Display,
{
    let raw = &record[idx];
    raw.parse().map_err(|e: T::Err| StageError::Schema {
        path: path.to_owned(),
        line,
        column: header[idx].to_string(),
        message: format!("cannot parse {raw:?}: {e}"),
    })
}

fn opt_field<T: FromStr>(
    path: &Path,
    header: &[&str],
    line: u64,
    record: &csv::StringRecord,
    idx: usize,
) -> Result<Option<T>, StageError>
where
    T::Err: std::fmt::Display,
{
    if record[idx].is_empty() {
        Ok(None)
    } else {
        field(path, header, line, record, idx).map(Some)
    }
}

fn schema(path: &Path, line: u64, column: &str, message: impl Into<String>) -> StageError {
    StageError::Schema {
        path: path.to_owned(),
        line,
        column: column.to_owned(),
        message: message.into(),
    }
}

// ---- series.csv ----

pub fn write_series<'a>(
    path: &Path,
    series: impl IntoIterator<Item = (&'a str, &'a [SpacingSample<f64>])>,
) -> Result<(), StageError> {
    let mut w = TableWriter::create(path, &SERIES_HEADER)?;
    for (word, samples) in series {
        for s in samples {
            w.row([
                word,
                &s.article_id,
                &s.avg_spacing.to_string(),
                &s.article_length.to_string(),
            ])?;
        }
    }
    w.finish()
}

/// Word series in order of first appearance.
/// `(word, samples)` pairs in first-appearance order.
pub type SeriesTable = Vec<(String, Vec<SpacingSample<f64>>)>;

pub fn read_series(path: &Path) -> Result<SeriesTable, StageError> {
    let h = &SERIES_HEADER;
    let mut out: SeriesTable = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    read_table(path, h, |line, rec| {
        let word = &rec[0];
        if word.is_empty() {
            return Err(schema(path, line, h[0], "empty word"));
        }
        let avg: f64 = field(path, h, line, rec, 2)?;
        if !(avg.is_finite() && avg >= 1.0) {
            return Err(schema(
                path,
                line,
                h[2],
                format!("{avg} is not a distance >= 1"),
            ));
        }
        let length: usize = field(path, h, line, rec, 3)?;
        if length == 0 {
            return Err(schema(path, line, h[3], "article length must be positive"));
        }
        let slot = *index.entry(word.to_owned()).or_insert_with(|| {
            out.push((word.to_owned(), Vec::new()));
            out.len() - 1
        });
        out[slot].1.push(SpacingSample {
            avg_spacing: avg,
            article_length: length,
            article_id: rec[1].to_owned(),
        });
        Ok(())
    })?;
    Ok(out)
}

// ---- vocabulary.csv ----

pub fn write_vocabulary(path: &Path, entries: &[(String, u64)]) -> Result<(), StageError> {
    let mut w = TableWriter::create(path, &VOCABULARY_HEADER)?;
    for (i, (word, count)) in entries.iter().enumerate() {
        w.row([(i + 1).to_string().as_str(), word, &count.to_string()])?;
    }
    w.finish()
}

/// `(word, count)` in rank order.
pub fn read_vocabulary(path: &Path) -> Result<Vec<(String, u64)>, StageError> {
    let h = &VOCABULARY_HEADER;
    let mut out = Vec::new();
    read_table(path, h, |line, rec| {
        let rank: usize = field(path, h, line, rec, 0)?;
        if rank != out.len() + 1 {
            return Err(schema(
                path,
                line,
                h[0],
                format!("expected rank {}, found {rank}", out.len() + 1),
            ));
        }
        out.push((rec[1].to_owned(), field(path, h, line, rec, 2)?));
        Ok(())
    })?;
    Ok(out)
}

// ---- fits.csv ----

#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub retained: usize,
    pub beta: f64,
    pub beta_clamped: f64,
    pub b: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    pub word: String,
    pub rank: usize,
    pub n_articles: usize,
    pub n_spacings: usize,
    /// Fit summary, or the reason the word was skipped.
    pub outcome: Result<FitSummary, String>,
}

pub fn write_fits(path: &Path, records: &[FitRecord]) -> Result<(), StageError> {
    let mut w = TableWriter::create(path, &FITS_HEADER)?;
    for r in records {
        let head = [
            r.word.clone(),
            r.rank.to_string(),
            r.n_articles.to_string(),
            r.n_spacings.to_string(),
        ];
        let tail = match &r.outcome {
            Ok(f) => [
                f.retained.to_string(),
                f.beta.to_string(),
                f.beta_clamped.to_string(),
                f.b.to_string(),
                f.mse.to_string(),
                "ok".to_string(),
            ],
            Err(reason) => [
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("skipped: {reason}"),
            ],
        };
        w.row(head.iter().chain(tail.iter()))?;
    }
    w.finish()
}

pub fn read_fits(path: &Path) -> Result<Vec<FitRecord>, StageError> {
    let h = &FITS_HEADER;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    read_table(path, h, |line, rec| {
        if !seen.insert(rec[0].to_owned()) {
            return Err(schema(
                path,
                line,
                h[0],
                format!("duplicate word {:?}", &rec[0]),
            ));
        }
        let status = &rec[9];
        let outcome = if status == "ok" {
            let mut nums = [0.0; 4];
            for (k, slot) in nums.iter_mut().enumerate() {
                *slot = opt_field(path, h, line, rec, 5 + k)?.ok_or_else(|| {
                    schema(path, line, h[5 + k], "missing value for a fitted word")
                })?;
            }
            Ok(FitSummary {
                retained: opt_field(path, h, line, rec, 4)?
                    .ok_or_else(|| schema(path, line, h[4], "missing value for a fitted word"))?,
                beta: nums[0],
                beta_clamped: nums[1],
                b: nums[2],
                mse: nums[3],
            })
        } else if let Some(reason) = status.strip_prefix("skipped: ") {
            Err(reason.to_owned())
        } else {
            return Err(schema(
                path,
                line,
                h[9],
                format!("unknown status {status:?}"),
            ));
        };
        out.push(FitRecord {
            word: rec[0].to_owned(),
            rank: field(path, h, line, rec, 1)?,
            n_articles: field(path, h, line, rec, 2)?,
            n_spacings: field(path, h, line, rec, 3)?,
            outcome,
        });
        Ok(())
    })?;
    Ok(out)
}

// ---- stopwords.csv / stopwords.txt ----

pub fn write_stopwords_csv(path: &Path, report: &StopwordReport<f64>) -> Result<(), StageError> {
    let mut w = TableWriter::create(path, &STOPWORDS_HEADER)?;
    for r in &report.rows {
        w.row([
            r.word.clone(),
            r.rank.to_string(),
            r.n_articles.to_string(),
            r.n_spacings.to_string(),
            r.beta.map(|b| b.to_string()).unwrap_or_default(),
            r.mse.map(|m| m.to_string()).unwrap_or_default(),
            r.is_stopword.to_string(),
        ])?;
    }
    w.finish()
}

pub fn write_stopwords_txt(path: &Path, report: &StopwordReport<f64>) -> Result<(), StageError> {
    let file = File::create(path).map_err(|e| StageError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for word in report.stopwords() {
        writeln!(w, "{word}").map_err(|e| StageError::io(path, e))?;
    }
    w.flush().map_err(|e| StageError::io(path, e))
}

// ---- per-word dumps ----

pub fn write_histogram_dump(path: &Path, rows: &[PlotRow<f64>]) -> Result<(), StageError> {
    let mut w = TableWriter::create(path, &HISTOGRAM_HEADER)?;
    for r in rows {
        w.row([r.bin_center, r.density, r.brody, r.poisson, r.goe].map(|v| v.to_string()))?;
    }
    w.finish()
}

/// One row per unfolded level; `spacing` is the gap to the next level and is
/// empty on the last row.
pub fn write_unfolded_dump(path: &Path, series: &UnfoldedSeries<f64>) -> Result<(), StageError> {
    let mut w = TableWriter::create(path, &UNFOLDED_HEADER)?;
    for (i, value) in series.unfolded.iter().enumerate() {
        w.row([
            i.to_string(),
            value.to_string(),
            series
                .spacings
                .get(i)
                .map(|s| s.to_string())
                .unwrap_or_default(),
        ])?;
    }
    w.finish()
}

/// File-name-safe form of a word for `hist_<word>.csv` and friends.
pub fn dump_name(prefix: &str, word: &str) -> String {
    let safe: String = word
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect();
    format!("{prefix}_{safe}.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn series_round_trip_preserves_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        let samples = vec![
            SpacingSample {
                avg_spacing: 7.0 / 3.0,
                article_length: 120,
                article_id: "doc, \"quoted\"".into(),
            },
            SpacingSample {
                avg_spacing: 1.0,
                article_length: 3,
                article_id: "b".into(),
            },
        ];
        write_series(&path, [("the", samples.as_slice())]).unwrap();
        let back = read_series(&path).unwrap();
        assert_eq!(back, vec![("the".to_string(), samples)]);
    }

    #[test]
    fn corrupted_header_reports_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        fs::write(
            &path,
            "word,article,avg_distance,article_length\na,x,2,10\n",
        )
        .unwrap();
        let err = read_series(&path).unwrap_err();
        match &err {
            StageError::Schema { line, column, .. } => {
                assert_eq!(*line, 1);
                assert_eq!(column, "article_id");
            }
            other => panic!("unexpected {other}"),
        }
        assert!(err.to_string().contains(":1:"));
    }

    #[test]
    fn bad_row_reports_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        fs::write(
            &path,
            "word,article_id,avg_distance,article_length\na,x,2,10\na,y,abc,10\n",
        )
        .unwrap();
        let err = read_series(&path).unwrap_err();
        assert!(
            matches!(&err, StageError::Schema { line: 3, column, .. } if column == "avg_distance"),
            "{err}"
        );

        fs::write(
            &path,
            "word,article_id,avg_distance,article_length\na,x,2\n",
        )
        .unwrap();
        let err = read_series(&path).unwrap_err();
        assert!(matches!(&err, StageError::Schema { line: 2, .. }), "{err}");

        fs::write(
            &path,
            "word,article_id,avg_distance,article_length\na,x,0.5,10\n",
        )
        .unwrap();
        assert!(read_series(&path).is_err());
    }

    #[test]
    fn fits_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fits.csv");
        let records = vec![
            FitRecord {
                word: "the".into(),
                rank: 1,
                n_articles: 400,
                n_spacings: 399,
                outcome: Ok(FitSummary {
                    retained: 398,
                    beta: 1.0312,
                    beta_clamped: 1.0,
                    b: 0.78,
                    mse: 0.0123,
                }),
            },
            FitRecord {
                word: "rare".into(),
                rank: 2,
                n_articles: 3,
                n_spacings: 2,
                outcome: Err("insufficient samples: need at least 300, got 3".into()),
            },
        ];
        write_fits(&path, &records).unwrap();
        assert_eq!(read_fits(&path).unwrap(), records);
    }

    #[test]
    fn dump_names_are_path_safe() {
        assert_eq!(dump_name("hist", "über"), "hist_über.csv");
        assert_eq!(dump_name("hist", "../x"), "hist____x.csv");
    }
}
