//! CSV readers and writers. Numbers are written with 17 significant digits
//! so files round-trip bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::empirical::ScoreMatrix;
use crate::error::{Error, Result};

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn data_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Data {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    data_err(path, line, e.to_string())
}

fn reader(path: &Path, headers: bool) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| data_err(path, 0, e.to_string()))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .from_reader(file))
}

/// Scores file: a header row of detector names, then one row per observation.
pub fn read_scores(path: &Path) -> Result<ScoreMatrix> {
    let mut rdr = reader(path, true)?;
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let k = names.len();
    let mut cols = vec![Vec::new(); k];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != k {
            return Err(data_err(
                path,
                line,
                format!("expected {k} fields, found {}", rec.len()),
            ));
        }
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                data_err(
                    path,
                    line,
                    format!("column '{}': cannot parse '{field}'", names[j]),
                )
            })?;
            if !v.is_finite() {
                return Err(data_err(
                    path,
                    line,
                    format!("column '{}': non-finite value", names[j]),
                ));
            }
            cols[j].push(v);
        }
    }
    ScoreMatrix::from_columns(names, cols).map_err(|e| data_err(path, 0, e.to_string()))
}

/// Single-column sidecar; an optional non-numeric header line is skipped.
fn read_single_column<T>(path: &Path, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let mut rdr = reader(path, false)?;
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(idx + 1, |p| p.line() as usize);
        if rec.len() != 1 {
            return Err(data_err(
                path,
                line,
                format!("expected 1 field, found {}", rec.len()),
            ));
        }
        let field = &rec[0];
        match parse(field) {
            Some(v) => out.push(v),
            None if idx == 0 => continue,
            None => {
                return Err(data_err(
                    path,
                    line,
                    format!("cannot parse label '{field}'"),
                ))
            }
        }
    }
    Ok(out)
}

/// Detector cluster labels: nonnegative integers; `-1`, `noise` or an empty
/// field mark noise.
pub fn read_cluster_labels(path: &Path) -> Result<Vec<Option<usize>>> {
    read_single_column(path, |s| match s {
        "" | "-1" | "noise" => Some(None),
        _ => s.parse::<usize>().ok().map(Some),
    })
}

/// Outlier labels: `1`/`0` or `true`/`false`.
pub fn read_outlier_labels(path: &Path) -> Result<Vec<bool>> {
    read_single_column(path, |s| match s {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    })
}

pub struct CsvOut {
    w: BufWriter<File>,
}

impl CsvOut {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            w: BufWriter::new(File::create(path)?),
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: impl IntoIterator<Item = S>) -> Result<()> {
        let mut first = true;
        for f in fields {
            if !first {
                self.w.write_all(b",")?;
            }
            first = false;
            self.w.write_all(quote(f.as_ref()).as_bytes())?;
        }
        self.w.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_scores(path: &Path, y: &ScoreMatrix) -> Result<()> {
    let mut out = CsvOut::create(path)?;
    out.row(y.names())?;
    for r in 0..y.n_rows() {
        out.row(y.columns().iter().map(|c| fmt_num(c[r])))?;
    }
    out.finish()
}

pub fn write_cluster_labels(path: &Path, header: &str, labels: &[Option<usize>]) -> Result<()> {
    let mut out = CsvOut::create(path)?;
    out.row([header])?;
    for l in labels {
        out.row([l.map_or("-1".to_string(), |c| c.to_string())])?;
    }
    out.finish()
}

pub fn write_outlier_labels(path: &Path, labels: &[bool]) -> Result<()> {
    let mut out = CsvOut::create(path)?;
    out.row(["outlier"])?;
    for &l in labels {
        out.row([if l { "1" } else { "0" }])?;
    }
    out.finish()
}
