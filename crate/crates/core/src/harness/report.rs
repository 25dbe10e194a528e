use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ExperimentConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `lhs ≤ rhs + tolerance`
    Le,
    /// `lhs ≥ rhs − tolerance`
    Ge,
    /// `|lhs − rhs| ≤ tolerance`
    Eq,
    /// `lhs` is finite; `rhs` unused.
    Finite,
    /// Reported only, never fails.
    Info,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
            Relation::Finite => lhs.is_finite(),
            Relation::Info => true,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
            Relation::Finite => "finite",
            Relation::Info => "info",
        })
    }
}

/// One checked claim on one instance. Equality ignores `runtime`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Record {
    /// Name of the claim this record checks.
    pub anchor: String,
    pub check: String,
    pub instance: usize,
    pub seed: u64,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Wall-clock seconds spent on the instance; not written to reports so
    /// that reruns are byte-identical.
    #[serde(skip)]
    pub runtime: f64,
}

impl PartialEq for Record {
    fn eq(&self, o: &Self) -> bool {
        (&self.anchor, &self.check, self.instance, self.seed, self.relation, self.pass)
            == (&o.anchor, &o.check, o.instance, o.seed, o.relation, o.pass)
            && self.lhs.to_bits() == o.lhs.to_bits()
            && self.rhs.to_bits() == o.rhs.to_bits()
            && self.tolerance.to_bits() == o.tolerance.to_bits()
    }
}

impl Record {
    pub fn new(anchor: &str, check: &str, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        Record {
            anchor: anchor.to_string(),
            check: check.to_string(),
            instance: 0,
            seed: 0,
            lhs,
            relation,
            rhs,
            tolerance,
            pass: relation.holds(lhs, rhs, tolerance),
            runtime: 0.0,
        }
    }

    pub fn info(anchor: &str, check: &str, value: f64) -> Self {
        Record::new(anchor, check, value, Relation::Info, 0.0, 0.0)
    }
}

const CSV_HEADER: [&str; 10] = [
    "anchor", "check", "instance", "seed", "lhs", "relation", "rhs", "tolerance", "pass", "suite",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    anchor: &'a str,
    check: &'a str,
    instance: usize,
    seed: u64,
    lhs: f64,
    relation: Relation,
    rhs: f64,
    tolerance: f64,
    pass: bool,
    suite: &'a str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidArgument(format!("format must be json or csv, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    /// Configuration the report was produced with, sufficient to replay it.
    pub config: ExperimentConfig,
    pub passed: usize,
    pub total: usize,
    pub records: Vec<Record>,
}

impl SuiteReport {
    pub fn new(suite: &str, config: ExperimentConfig, records: Vec<Record>) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            config,
            passed: records.iter().filter(|r| r.pass).count(),
            total: records.len(),
            records,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.passed == self.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Total instance runtime in seconds.
    pub fn runtime(&self) -> f64 {
        self.records.iter().map(|r| r.runtime).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(vec![]);
        let csv_err = |e: csv::Error| Error::InvalidArgument(format!("CSV encoding failed: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &self.records {
            w.serialize(CsvRow {
                anchor: &r.anchor,
                check: &r.check,
                instance: r.instance,
                seed: r.seed,
                lhs: r.lhs,
                relation: r.relation,
                rhs: r.rhs,
                tolerance: r.tolerance,
                pass: r.pass,
                suite: &self.suite,
            })
            .map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("CSV encoding failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
    }

    /// Write the report to `path`.
    pub fn emit(&self, path: &Path, format: ReportFormat) -> Result<()> {
        let body = match format {
            ReportFormat::Json => self.to_json()?,
            ReportFormat::Csv => self.to_csv()?,
        };
        std::fs::write(path, body)?;
        Ok(())
    }
}
