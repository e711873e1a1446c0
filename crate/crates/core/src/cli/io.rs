//! File formats: multi-channel signal CSV, matrix CSV (row = time), raw
//! little-endian `f64` dumps with a JSON sidecar, and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One channel per column, named by the header row.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalFile {
    pub names: Vec<String>,
    pub channels: Vec<Vec<f64>>,
}

impl SignalFile {
    pub fn single(name: impl Into<String>, samples: Vec<f64>) -> Self {
        Self {
            names: vec![name.into()],
            channels: vec![samples],
        }
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::Input {
            path: path.to_path_buf(),
            message: format!("cannot read file: {e}"),
        })?;
        Self::parse(&bytes, path)
    }

    /// Parses CSV text. Every error names the 1-based line (and column where
    /// one applies); `origin` is only used in messages.
    pub fn parse(bytes: &[u8], origin: &Path) -> Result<Self> {
        let fail = |message: String| Error::Input {
            path: origin.to_path_buf(),
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let names: Vec<String> = reader
            .headers()
            .map_err(|e| fail(format!("line 1: malformed header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if names.is_empty() || names.iter().all(String::is_empty) {
            return Err(fail("line 1: missing header row with channel names".into()));
        }
        let mut channels = vec![Vec::new(); names.len()];
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                fail(format!("line {line}: malformed CSV: {e}"))
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() == 1 && record[0].is_empty() && names.len() > 1 {
                continue;
            }
            if record.len() != names.len() {
                return Err(fail(format!(
                    "line {line}: expected {} fields, found {}",
                    names.len(),
                    record.len()
                )));
            }
            for (col, (field, channel)) in record.iter().zip(channels.iter_mut()).enumerate() {
                let value: f64 = field.parse().map_err(|_| {
                    fail(format!(
                        "line {line}, column {} ({}): cannot parse {field:?} as a number",
                        col + 1,
                        names[col]
                    ))
                })?;
                if !value.is_finite() {
                    return Err(fail(format!(
                        "line {line}, column {} ({}): non-finite sample {field:?}",
                        col + 1,
                        names[col]
                    )));
                }
                channel.push(value);
            }
        }
        if channels[0].is_empty() {
            return Err(Error::EmptySignal);
        }
        Ok(Self { names, channels })
    }

    /// Shortest round-trip decimal text, so parse-then-serialize reproduces
    /// the input exactly when it was written this way.
    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.names).map_err(csv_error)?;
        for t in 0..self.len() {
            w.write_record(self.channels.iter().map(|c| c[t].to_string()))
                .map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| Error::Pipeline(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Pipeline(format!("CSV encoding failed: {e}"))
}

/// CSV with a header row and one line per row of `rows`.
pub fn table_csv(header: &[String], rows: ArrayView2<f64>) -> Result<Vec<u8>> {
    if header.len() != rows.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{} header names for {} columns",
            header.len(),
            rows.ncols()
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows.outer_iter() {
        w.write_record(row.iter().map(f64::to_string)).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Pipeline(e.to_string()))
}

/// A band-major `(bands, n)` map written with row = time.
pub fn matrix_csv(header: &[String], band_major: ArrayView2<f64>) -> Result<Vec<u8>> {
    table_csv(header, band_major.t())
}

/// Column names for a set of scales, e.g. `lambda2_2.1435`.
pub fn scale_header(prefix: &str, scales: &[f64]) -> Vec<String> {
    scales.iter().map(|s| format!("{prefix}_{s:.4}")).collect()
}

/// Writes through a sibling temporary file and a rename, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Sidecar describing a raw `f64` dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinarySidecar {
    pub dtype: String,
    /// Row-major shape; the last axis varies fastest.
    pub shape: Vec<usize>,
    pub axes: Vec<String>,
}

/// Little-endian `f64` bytes of `values`.
pub fn f64_le_bytes(values: impl IntoIterator<Item = f64>) -> Vec<u8> {
    values.into_iter().flat_map(f64::to_le_bytes).collect()
}

pub fn read_f64_le(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::ShapeMismatch(format!(
            "{} bytes is not a whole number of f64",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

/// Directory-safe form of a channel name; falls back to `ch<index>`.
pub fn channel_dir_name(name: &str, index: usize, taken: &[String]) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    let base = if cleaned.is_empty() || cleaned.chars().all(|c| c == '.') {
        format!("ch{index}")
    } else {
        cleaned
    };
    if taken.contains(&base) {
        format!("{base}_{index}")
    } else {
        base
    }
}

pub fn relative_to(path: &Path, root: &Path) -> PathBuf {
    path.strip_prefix(root)
        .map(Path::to_path_buf)
        .unwrap_or_else(|_| path.to_path_buf())
}
