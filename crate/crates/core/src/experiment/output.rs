use std::io::Write;

use serde::Serialize;

use super::config::{ExperimentConfig, OutputFormat};
use crate::error::{Error, Result};

pub const TOOL: &str = "circlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One line of a result table. Empty cells mean "not applicable".
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Row {
    pub metric: String,
    pub kind: Option<String>,
    pub n: Option<usize>,
    /// Moment order, word, bin index or seed, depending on `metric`.
    pub key: String,
    /// Abscissa for histogram rows.
    pub x: Option<f64>,
    pub count: Option<u128>,
    pub estimate: f64,
    pub target: Option<f64>,
    pub gap: Option<f64>,
    pub std_error: Option<f64>,
    pub threshold: Option<f64>,
    pub pass: Option<bool>,
}

impl Row {
    pub fn new(metric: &str, key: impl Into<String>) -> Self {
        Row {
            metric: metric.to_string(),
            key: key.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    /// Kept out of the serialized record so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn new(config: ExperimentConfig, rows: Vec<Row>) -> Self {
        RunRecord {
            tool: TOOL,
            version: VERSION,
            config,
            rows,
            wall_time_s: 0.0,
        }
    }

    /// No row with a threshold failed it.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        match self.config.format {
            OutputFormat::Csv => write_csv(&self.rows, w),
            OutputFormat::Json => write_json(self, w),
        }
    }

    pub fn render(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(buf)
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(rows: &[Row], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(true).from_writer(w);
    for row in rows {
        wtr.serialize(row).map_err(io)?;
    }
    if rows.is_empty() {
        wtr.write_record([
            "metric",
            "kind",
            "n",
            "key",
            "x",
            "count",
            "estimate",
            "target",
            "gap",
            "std_error",
            "threshold",
            "pass",
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(io)
}

pub fn write_json<W: Write>(record: &RunRecord, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, record).map_err(io)?;
    writeln!(w).map_err(io)
}
