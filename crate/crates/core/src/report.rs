//! Score reports: a config snapshot, per-item rows and the aggregate result.
//!
//! Values are rounded to 6 significant digits when they enter a report, so a
//! JSON report parses back to an equal value and repeated runs serialize to
//! identical bytes. Files are written to a temporary sibling and renamed.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScootError};
use crate::eval::MetaResult;
use crate::metric::ScootConfig;

pub const TOOL_VERSION: &str = concat!("scoot ", env!("CARGO_PKG_VERSION"));

/// Protocol settings of the meta-measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolKnobs {
    pub downsize_px: usize,
    pub rotate_deg: f64,
    pub stroke_threshold: u16,
}

impl Default for ProtocolKnobs {
    fn default() -> Self {
        Self {
            downsize_px: 5,
            rotate_deg: 5.0,
            stroke_threshold: 170,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub item: String,
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportRow {
    pub fn new(item: impl Into<String>) -> Self {
        Self {
            item: item.into(),
            ..Self::default()
        }
    }

    /// Records `value` rounded to 6 significant digits. Non-finite values are
    /// dropped and mentioned in the note instead.
    pub fn with(mut self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            self.values.insert(key.to_string(), round_sig6(value));
        } else {
            self = self.with_note(format!("{key} is not finite"));
        }
        self
    }

    pub fn with_opt(self, key: &str, value: Option<f64>) -> Self {
        match value {
            Some(v) => self.with(key, v),
            None => self,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(prev) => format!("{prev}; {note}"),
            None => note,
        });
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub tool_version: String,
    pub command: String,
    pub config: ScootConfig,
    pub protocol: ProtocolKnobs,
    pub aggregate: MetaResult,
    pub rows: Vec<ReportRow>,
}

impl ScoreReport {
    pub fn new(command: impl Into<String>, config: ScootConfig, protocol: ProtocolKnobs) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.into(),
            config,
            protocol,
            aggregate: MetaResult::default(),
            rows: Vec::new(),
        }
    }

    pub fn set_aggregate(&mut self, aggregate: MetaResult) {
        let r = |v: Option<f64>| v.filter(|x| x.is_finite()).map(round_sig6);
        self.aggregate = MetaResult {
            mm1_theta: r(aggregate.mm1_theta),
            mm2_theta: r(aggregate.mm2_theta),
            mm3_rate: r(aggregate.mm3_rate),
            jud_rate: r(aggregate.jud_rate),
        };
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are always finite");
        s.push('\n');
        s
    }

    /// One line per row: `item`, then every value key in sorted order, then `note`.
    pub fn to_csv(&self) -> String {
        let keys: BTreeSet<&str> = self
            .rows
            .iter()
            .flat_map(|r| r.values.keys().map(String::as_str))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["item"];
        header.extend(keys.iter().copied());
        header.push("note");
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec = vec![row.item.clone()];
            rec.extend(keys.iter().map(|k| {
                row.values
                    .get(*k)
                    .map(|&v| format_sig6(v))
                    .unwrap_or_default()
            }));
            rec.push(row.note.clone().unwrap_or_default());
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Csv,
    #[default]
    Json,
}

impl ReportFormat {
    /// Format implied by a file extension, if any.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            _ => None,
        }
    }
}

impl FromStr for ReportFormat {
    type Err = ScootError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(ScootError::invalid(format!(
                "unknown report format '{other}', expected csv or json"
            ))),
        }
    }
}

pub fn render_report(report: &ScoreReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json(),
    }
}

/// Serializes `report` and atomically replaces `path` with it.
pub fn write_report(
    report: &ScoreReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    write_atomic(path.as_ref(), render_report(report, format).as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| ScootError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ScoreReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScootError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ScootError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Nearest value with at most 6 significant decimal digits.
pub fn round_sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}

/// Decimal text with exactly 6 significant digits, e.g. `0.0372916`, `1.00000`.
/// Magnitudes below 1e-5 or from 1e6 up use exponent notation.
pub fn format_sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-5..6).contains(&exp) {
        return sci;
    }
    let decimals = (5 - exp) as usize;
    format!("{v:.decimals$}")
}
