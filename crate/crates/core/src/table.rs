//! CSV and JSON Lines output for sweep tables.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::PhasePoint;

pub const CSV_HEADER: [&str; 8] = [
    "delta_hz",
    "phi_pert_rad",
    "phi_gauss_rad",
    "phi_diag_rad",
    "n1",
    "valid_pert",
    "dressed_overlap",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Csv,
    Jsonl,
}

impl TableFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Jsonl => "jsonl",
        }
    }
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_table<W: Write>(points: &[PhasePoint], format: TableFormat, out: W) -> io::Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(CSV_HEADER)?;
            for p in points {
                w.write_record([
                    format_number(p.delta_hz),
                    optional(p.phi_pert_rad),
                    optional(p.phi_gauss_rad),
                    optional(p.phi_diag_rad),
                    optional(p.n1),
                    p.valid_pert.to_string(),
                    optional(p.dressed_overlap),
                    p.error.clone().unwrap_or_default(),
                ])?;
            }
            w.flush()
        }
        TableFormat::Jsonl => {
            let mut out = out;
            for p in points {
                serde_json::to_writer(&mut out, p)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

/// Writes the table to `path`, replacing any existing file.
pub fn emit_table(points: &[PhasePoint], format: TableFormat, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_table(points, format, BufWriter::new(file)).map_err(io_err)
}

pub fn parse_table(text: &str, format: TableFormat) -> Result<Vec<PhasePoint>> {
    match format {
        TableFormat::Csv => parse_csv(text),
        TableFormat::Jsonl => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect(),
    }
}

fn parse_csv(text: &str) -> Result<Vec<PhasePoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |message: String| Error::Parse { line, message };
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let num = |k: usize| -> Result<Option<f64>> {
            let s = field(k);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| bad(format!("`{}` is not a number: {s}", CSV_HEADER[k])))
        };
        points.push(PhasePoint {
            delta_hz: num(0)?.ok_or_else(|| bad("delta_hz is empty".into()))?,
            phi_pert_rad: num(1)?,
            phi_gauss_rad: num(2)?,
            phi_diag_rad: num(3)?,
            n1: num(4)?,
            valid_pert: field(5)
                .parse()
                .map_err(|_| bad(format!("valid_pert: {}", field(5))))?,
            dressed_overlap: num(6)?,
            error: Some(field(7)).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    Ok(points)
}
