//! Generators, sweeps and report files.

pub mod gen;
mod sweep;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

pub use gen::Generator;
pub use sweep::{
    find_violation, loglog_slope, run_instance, run_sweep, Algorithm, ExperimentSpec, GeneratorSpec, OracleSource,
    OracleVerdict, Param, ReportRow, RowVerdict, Seeds,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("bad experiment spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` means JSON; anything else is CSV.
    pub fn from_path(p: &Path) -> Self {
        match p.extension().and_then(|e| e.to_str()) {
            Some("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub rows: Vec<ReportRow>,
}

const COLUMNS: [&str; 18] = [
    "instance",
    "family",
    "seed",
    "n",
    "m",
    "k",
    "verdict",
    "oracle",
    "oracle_source",
    "rounds_used",
    "light_rounds",
    "heavy_rounds",
    "threshold_fired",
    "threshold_level",
    "witness",
    "wall_time_ms",
    "mismatch",
    "detail",
];

pub fn write_report<W: Write>(rows: &[ReportRow], format: ReportFormat, out: W) -> Result<(), LabError> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(COLUMNS)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let report = Report { schema_version: SCHEMA_VERSION, rows: rows.to_vec() };
            serde_json::to_writer_pretty(out, &report)?;
        }
    }
    Ok(())
}

pub fn emit_report(rows: &[ReportRow], format: ReportFormat, path: &Path) -> Result<(), LabError> {
    write_report(rows, format, File::create(path)?)
}

pub fn read_report_json(text: &str) -> Result<Report, LabError> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_report_csv(text: &str) -> Result<Vec<ReportRow>, LabError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ReportRow> {
        let gen = Generator::Cycle { n: 4 };
        let a = run_instance(0, 0, &gen, 2, Algorithm::C2k, None).unwrap();
        let b = run_instance(1, 3, &Generator::Tree { n: 9 }, 2, Algorithm::C4, None).unwrap();
        vec![a, b]
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_report(&[], ReportFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), COLUMNS.join(","));
    }

    #[test]
    fn csv_columns_follow_fields() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_report(&rows, ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut derived = csv::Writer::from_writer(Vec::new());
        derived.serialize(&rows[0]).unwrap();
        let derived = String::from_utf8(derived.into_inner().unwrap()).unwrap();
        assert_eq!(derived.lines().next(), text.lines().next());
        let back = read_report_csv(&text).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            assert_eq!((a.instance, a.verdict, &a.witness, a.mismatch), (b.instance, b.verdict, &b.witness, b.mismatch));
        }
    }

    #[test]
    fn json_round_trip() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_report(&rows, ReportFormat::Json, &mut buf).unwrap();
        let rep = read_report_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(rep.schema_version, SCHEMA_VERSION);
        assert_eq!(rep.rows, rows);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(ReportFormat::from_path(Path::new("a/b.json")), ReportFormat::Json);
        assert_eq!(ReportFormat::from_path(Path::new("a/b.csv")), ReportFormat::Csv);
        assert_eq!(ReportFormat::from_path(Path::new("noext")), ReportFormat::Csv);
    }
}
