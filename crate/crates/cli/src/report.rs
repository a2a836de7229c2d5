//! Line-oriented report records.
//!
//! A record is a `#` header line followed by `key=value` lines. Records in a
//! stream are separated by blank lines. Floats are written with Rust's
//! shortest round-trip formatting, so parsing a record back is lossless.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::CliError;

pub const REPORT_HEADER: &str = "# submatrix-report v1";
pub const SUMMARY_HEADER: &str = "# submatrix-summary v1";

/// One header plus its ordered fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub header: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(header: &str) -> Self {
        Record {
            header: header.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Report(format!("missing key '{key}'")))
    }

    fn parse_field<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|_| CliError::Report(format!("bad value for '{key}': '{raw}'")))
    }

    fn parse_optional<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.parse_field(key).map(Some),
        }
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header)?;
        for (k, v) in &self.fields {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Splits a stream into records. Lines before the first header are rejected.
pub fn parse_records(text: &str) -> Result<Vec<Record>, CliError> {
    let mut records: Vec<Record> = Vec::new();
    let mut open = false;
    for (no, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            open = false;
            continue;
        }
        if line.starts_with('#') {
            records.push(Record::new(line));
            open = true;
            continue;
        }
        if !open {
            return Err(CliError::Report(format!("line {}: field outside a record", no + 1)));
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Report(format!("line {}: expected key=value", no + 1)))?;
        records.last_mut().unwrap().fields.push((k.to_string(), v.to_string()));
    }
    Ok(records)
}

/// Measured quantities of one method run (or the median of several).
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub matrix_id: String,
    pub n: usize,
    pub nnz: usize,
    pub density: f64,
    pub p: u32,
    pub kernel: String,
    pub strategy: String,
    pub workers: usize,
    pub repeats: usize,
    /// Median over repeats.
    pub wall_time_ms: f64,
    pub wall_time_ms_min: f64,
    pub wall_time_ms_max: f64,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub assemble_ms: f64,
    pub per_worker_busy_ms: Vec<f64>,
    pub max_submatrix_dim: usize,
    pub oversized_columns: usize,
    pub residual_norm: Option<f64>,
    pub speedup: Option<f64>,
    pub dense_baseline_ms: Option<f64>,
}

impl RunReport {
    pub fn to_record(&self) -> Record {
        let mut r = Record::new(REPORT_HEADER);
        r.push("matrix_id", &self.matrix_id);
        r.push("n", self.n);
        r.push("nnz", self.nnz);
        r.push("density", self.density);
        r.push("p", self.p);
        r.push("kernel", &self.kernel);
        r.push("strategy", &self.strategy);
        r.push("workers", self.workers);
        r.push("repeats", self.repeats);
        r.push("wall_time_ms", self.wall_time_ms);
        r.push("wall_time_ms_min", self.wall_time_ms_min);
        r.push("wall_time_ms_max", self.wall_time_ms_max);
        r.push("build_ms", self.build_ms);
        r.push("solve_ms", self.solve_ms);
        r.push("assemble_ms", self.assemble_ms);
        let busy: Vec<String> = self.per_worker_busy_ms.iter().map(f64::to_string).collect();
        r.push("per_worker_busy_ms", busy.join(","));
        r.push("max_submatrix_dim", self.max_submatrix_dim);
        r.push("oversized_columns", self.oversized_columns);
        if let Some(v) = self.residual_norm {
            r.push("residual_norm", v);
        }
        if let Some(v) = self.speedup {
            r.push("speedup", v);
        }
        if let Some(v) = self.dense_baseline_ms {
            r.push("dense_baseline_ms", v);
        }
        r
    }

    pub fn from_record(r: &Record) -> Result<Self, CliError> {
        if r.header != REPORT_HEADER {
            return Err(CliError::Report(format!("unexpected header '{}'", r.header)));
        }
        let busy_raw = r.require("per_worker_busy_ms")?;
        let per_worker_busy_ms = if busy_raw.is_empty() {
            Vec::new()
        } else {
            busy_raw
                .split(',')
                .map(|s| {
                    s.parse()
                        .map_err(|_| CliError::Report(format!("bad busy time '{s}'")))
                })
                .collect::<Result<_, _>>()?
        };
        Ok(RunReport {
            matrix_id: r.require("matrix_id")?.to_string(),
            n: r.parse_field("n")?,
            nnz: r.parse_field("nnz")?,
            density: r.parse_field("density")?,
            p: r.parse_field("p")?,
            kernel: r.require("kernel")?.to_string(),
            strategy: r.require("strategy")?.to_string(),
            workers: r.parse_field("workers")?,
            repeats: r.parse_field("repeats")?,
            wall_time_ms: r.parse_field("wall_time_ms")?,
            wall_time_ms_min: r.parse_field("wall_time_ms_min")?,
            wall_time_ms_max: r.parse_field("wall_time_ms_max")?,
            build_ms: r.parse_field("build_ms")?,
            solve_ms: r.parse_field("solve_ms")?,
            assemble_ms: r.parse_field("assemble_ms")?,
            per_worker_busy_ms,
            max_submatrix_dim: r.parse_field("max_submatrix_dim")?,
            oversized_columns: r.parse_field("oversized_columns")?,
            residual_norm: r.parse_optional("residual_norm")?,
            speedup: r.parse_optional("speedup")?,
            dense_baseline_ms: r.parse_optional("dense_baseline_ms")?,
        })
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_record().fmt(f)
    }
}

/// All run reports in a stream, skipping other record kinds.
pub fn parse_reports(text: &str) -> Result<Vec<RunReport>, CliError> {
    parse_records(text)?
        .iter()
        .filter(|r| r.header == REPORT_HEADER)
        .map(RunReport::from_record)
        .collect()
}

/// Writes records separated by blank lines.
pub fn join_records<'a>(records: impl IntoIterator<Item = &'a Record>) -> String {
    let mut out = String::new();
    for (i, r) in records.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write!(out, "{r}").unwrap();
    }
    out
}
