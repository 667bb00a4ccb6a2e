//! Tabular results and their CSV and JSON forms.
//!
//! The CSV starts with one `#` line holding the scenario as JSON, then a
//! header row with [`COLUMNS`]. Numbers are written with 17 significant
//! digits so that parsing reproduces them exactly; a missing value (a point
//! that failed) is an empty field in CSV and `null` in JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use harvest_core::{Estimate, HarvestResult};
use serde::{Deserialize, Serialize};

pub const COLUMNS: [&str; 14] = [
    "sweep_var",
    "value",
    "P_A",
    "P_B",
    "Re_X",
    "Im_X",
    "abs_X",
    "sqrt_PAPB",
    "concurrence",
    "negativity",
    "err_P_A",
    "err_P_B",
    "err_X",
    "flags",
];

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub sweep_var: String,
    pub value: f64,
    #[serde(rename = "P_A")]
    pub p_a: Option<f64>,
    #[serde(rename = "P_B")]
    pub p_b: Option<f64>,
    #[serde(rename = "Re_X")]
    pub re_x: Option<f64>,
    #[serde(rename = "Im_X")]
    pub im_x: Option<f64>,
    #[serde(rename = "abs_X")]
    pub abs_x: Option<f64>,
    #[serde(rename = "sqrt_PAPB")]
    pub sqrt_papb: Option<f64>,
    pub concurrence: Option<f64>,
    pub negativity: Option<f64>,
    #[serde(rename = "err_P_A")]
    pub err_p_a: Option<f64>,
    #[serde(rename = "err_P_B")]
    pub err_p_b: Option<f64>,
    #[serde(rename = "err_X")]
    pub err_x: Option<f64>,
    /// Warning codes separated by `;`, or `error:<message>`.
    pub flags: String,
}

impl Row {
    pub fn from_result(sweep_var: &str, value: f64, r: &HarvestResult) -> Self {
        Self {
            sweep_var: sweep_var.into(),
            value,
            p_a: Some(r.p_a),
            p_b: Some(r.p_b),
            re_x: Some(r.x_nonlocal.re),
            im_x: Some(r.x_nonlocal.im),
            abs_x: Some(r.x_nonlocal.norm()),
            sqrt_papb: Some(r.sqrt_papb()),
            concurrence: Some(r.concurrence),
            negativity: Some(r.negativity),
            err_p_a: Some(r.err.p_a),
            err_p_b: Some(r.err.p_b),
            err_x: Some(r.err.x_nonlocal),
            flags: r.warnings.iter().map(|w| w.code()).collect::<Vec<_>>().join(";"),
        }
    }

    /// A single-detector probability with its free-space reference in `P_B`.
    pub fn from_probe(sweep_var: &str, value: f64, p: &Estimate<f64>, free: &Estimate<f64>) -> Self {
        let mut flags = Vec::new();
        if !p.converged {
            flags.push("not_converged:P_A");
        }
        if !free.converged {
            flags.push("not_converged:P_B");
        }
        Self {
            sweep_var: sweep_var.into(),
            value,
            p_a: Some(p.value),
            p_b: Some(free.value),
            re_x: Some(0.0),
            im_x: Some(0.0),
            abs_x: Some(0.0),
            sqrt_papb: Some((p.value * free.value).max(0.0).sqrt()),
            concurrence: Some(0.0),
            negativity: Some(0.0),
            err_p_a: Some(p.err),
            err_p_b: Some(free.err),
            err_x: Some(0.0),
            flags: flags.join(";"),
        }
    }

    pub fn failed(sweep_var: &str, value: f64, message: &str) -> Self {
        Self {
            sweep_var: sweep_var.into(),
            value,
            p_a: None,
            p_b: None,
            re_x: None,
            im_x: None,
            abs_x: None,
            sqrt_papb: None,
            concurrence: None,
            negativity: None,
            err_p_a: None,
            err_p_b: None,
            err_x: None,
            flags: format!("error:{}", message.replace(['\n', '\r'], " ")),
        }
    }

    pub fn is_error(&self) -> bool {
        self.flags.starts_with("error:")
    }

    pub fn has_warnings(&self) -> bool {
        !self.flags.is_empty() && !self.is_error()
    }

    fn numbers(&self) -> [Option<f64>; 11] {
        [
            self.p_a,
            self.p_b,
            self.re_x,
            self.im_x,
            self.abs_x,
            self.sqrt_papb,
            self.concurrence,
            self.negativity,
            self.err_p_a,
            self.err_p_b,
            self.err_x,
        ]
    }
}

/// Rows of one sweep plus the JSON description of the scenario that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: String,
    pub rows: Vec<Row>,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    scenario: serde_json::Value,
    columns: Vec<String>,
    rows: Vec<Row>,
}

/// 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, message: impl Into<String>) -> OutputError {
    OutputError::Format { path: path.to_path_buf(), message: message.into() }
}

pub fn write_csv_to<W: Write>(table: &Table, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# {}", table.header.replace('\n', " "))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in &table.rows {
        let mut record = vec![row.sweep_var.clone(), format_number(row.value)];
        record.extend(row.numbers().iter().map(|v| v.map(format_number).unwrap_or_default()));
        record.push(row.flags.clone());
        w.write_record(&record)?;
    }
    w.flush()
}

pub fn write_csv(table: &Table, path: &Path) -> Result<(), OutputError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_csv_to(table, BufWriter::new(file)).map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<Table, OutputError> {
    let mut reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(io_err(path))?;
    let header = first
        .strip_prefix("# ")
        .ok_or_else(|| format_err(path, "first line must be a `# ` scenario header"))?
        .trim_end()
        .to_string();
    let mut rest = String::new();
    reader.read_to_string(&mut rest).map_err(io_err(path))?;
    let mut csv = csv::Reader::from_reader(rest.as_bytes());
    let columns = csv.headers().map_err(|e| format_err(path, e.to_string()))?.clone();
    for (i, want) in COLUMNS.iter().enumerate() {
        if columns.get(i) != Some(want) {
            return Err(format_err(path, format!("missing column `{want}` at position {i}")));
        }
    }
    let mut rows = Vec::new();
    for (line, record) in csv.records().enumerate() {
        let record = record.map_err(|e| format_err(path, e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse = |i: usize| -> Result<Option<f64>, OutputError> {
            let s = field(i);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| format_err(path, format!("row {}: `{}` = `{s}` is not a number", line + 1, COLUMNS[i])))
        };
        let value = parse(1)?.ok_or_else(|| format_err(path, format!("row {}: empty value", line + 1)))?;
        rows.push(Row {
            sweep_var: field(0).to_string(),
            value,
            p_a: parse(2)?,
            p_b: parse(3)?,
            re_x: parse(4)?,
            im_x: parse(5)?,
            abs_x: parse(6)?,
            sqrt_papb: parse(7)?,
            concurrence: parse(8)?,
            negativity: parse(9)?,
            err_p_a: parse(10)?,
            err_p_b: parse(11)?,
            err_x: parse(12)?,
            flags: field(13).to_string(),
        });
    }
    Ok(Table { header, rows })
}

pub fn write_json_to<W: Write>(table: &Table, out: W) -> std::io::Result<()> {
    let scenario = serde_json::from_str(&table.header).unwrap_or(serde_json::Value::String(table.header.clone()));
    let doc = JsonTable { scenario, columns: COLUMNS.iter().map(|c| c.to_string()).collect(), rows: table.rows.clone() };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

pub fn write_json(table: &Table, path: &Path) -> Result<(), OutputError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_json_to(table, &mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn read_json(path: &Path) -> Result<Table, OutputError> {
    let file = File::open(path).map_err(io_err(path))?;
    let doc: JsonTable = serde_json::from_reader(BufReader::new(file)).map_err(|e| format_err(path, e.to_string()))?;
    let header = match doc.scenario {
        serde_json::Value::String(s) => s,
        v => v.to_string(),
    };
    Ok(Table { header, rows: doc.rows })
}
