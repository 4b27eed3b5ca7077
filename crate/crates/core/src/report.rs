//! Check records, reports and their JSON/CSV forms.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lowest_weight::ScanRow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Which side of the tolerance passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// `measured ≤ tolerance`
    Max,
    /// `measured ≥ tolerance`
    Min,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    /// `None` when the check could not produce a finite number.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Every convention a cross-implementation comparison needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub bracket: String,
    pub normalization: String,
    pub generator_indexing: String,
    pub harmonics: String,
    pub levi_civita: String,
    pub fourier: String,
    pub affine_level: String,
    pub module_level: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            bracket: "[J^a, J^b] = i f^{ab}_c J^c".into(),
            normalization: "Tr(R^a R^b) = delta^{ab}/2 in the defining rep; Killing metric = delta^{ab}; \
                            d^{abc} = 2 Tr({R^a, R^b} R^c)"
                .into(),
            generator_indexing: "0-based; su(2) = Pauli/2, su(3) = Gell-Mann/2".into(),
            harmonics: "orthonormal Y_lm with Condon-Shortley phase; Y Y = sum_L C Y_L with \
                        C = int Y1 Y2 conj(Y_L)"
                .into(),
            levi_civita: "epsilon^{123} = +1".into(),
            fourier: "T^3 = [0, 2pi)^3, modes exp(+i k.x)".into(),
            affine_level: "omega(J^a_m, J^b_n) = k m delta^{ab} delta_{m+n,0}".into(),
            module_level: "central term k m Tr(R^a R^b) = (k/2) m delta^{ab}; unitarity bound 2j <= k".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub conventions: Conventions,
    pub config: serde_json::Value,
    pub records: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unitarity_scan: Vec<ScanRow>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per record: `suite,name,status,measured,tolerance,bound`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "name", "status", "measured", "tolerance", "bound"])?;
        for r in &self.records {
            let measured = r.measured.map(|v| format!("{v:e}")).unwrap_or_default();
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
            };
            let bound = match r.bound {
                Bound::Max => "max",
                Bound::Min => "min",
            };
            w.write_record([
                self.suite.as_str(),
                r.name.as_str(),
                status,
                measured.as_str(),
                format!("{:e}", r.tolerance).as_str(),
                bound,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn emit(report: &CheckReport, format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<CheckReport> {
    CheckReport::from_json(&std::fs::read_to_string(path)?)
}

/// Collects records for one suite run.
pub struct Recorder {
    pub records: Vec<CheckRecord>,
    timings: bool,
}

impl Recorder {
    pub fn new(timings: bool) -> Self {
        Recorder {
            records: Vec::new(),
            timings,
        }
    }

    /// Runs `f` and records its measurement against `tolerance`.
    pub fn check(&mut self, name: impl Into<String>, bound: Bound, tolerance: f64, f: impl FnOnce() -> Result<f64>) {
        let start = Instant::now();
        let out = f();
        let runtime_ms = self.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
        let (measured, detail) = match out {
            Ok(v) if v.is_finite() => (Some(v), None),
            Ok(v) => (None, Some(format!("non-finite measurement {v}"))),
            Err(e) => (None, Some(e.to_string())),
        };
        let ok = measured.is_some_and(|v| match bound {
            Bound::Max => v <= tolerance,
            Bound::Min => v >= tolerance,
        });
        self.records.push(CheckRecord {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            tolerance,
            bound,
            detail,
            runtime_ms,
        });
    }

    pub fn max(&mut self, name: impl Into<String>, tolerance: f64, f: impl FnOnce() -> Result<f64>) {
        self.check(name, Bound::Max, tolerance, f)
    }

    pub fn min(&mut self, name: impl Into<String>, tolerance: f64, f: impl FnOnce() -> Result<f64>) {
        self.check(name, Bound::Min, tolerance, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CheckReport {
        let mut rec = Recorder::new(false);
        rec.max("b.second", 1e-10, || Ok(3e-12));
        rec.min("a.first", 3.0, || Ok(2.0));
        rec.max("c.error", 1.0, || Err(crate::error::Error::Config("boom".into())));
        let mut r = CheckReport {
            schema_version: SCHEMA_VERSION,
            suite: "demo".into(),
            seed: 7,
            conventions: Conventions::default(),
            config: serde_json::json!({"samples": 8}),
            records: rec.records,
            unitarity_scan: vec![],
        };
        r.sort();
        r
    }

    #[test]
    fn statuses_follow_bounds() {
        let r = sample();
        let names: Vec<_> = r.records.iter().map(|x| x.name.as_str()).collect();
        assert_eq!(names, ["a.first", "b.second", "c.error"]);
        assert_eq!(r.record("a.first").unwrap().status, Status::Fail);
        assert_eq!(r.record("b.second").unwrap().status, Status::Pass);
        let err = r.record("c.error").unwrap();
        assert_eq!(err.measured, None);
        assert!(err.detail.as_deref().unwrap().contains("boom"));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 2);
    }

    #[test]
    fn json_round_trip_and_csv_header() {
        let r = sample();
        let back = CheckReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!r.to_json().contains("runtime_ms"));
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("suite,name,status,measured,tolerance,bound\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn emit_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit(&sample(), Format::Json, &path).unwrap();
        assert_eq!(load(&path).unwrap(), sample());
        assert!(emit(&sample(), Format::Json, &dir.path().join("missing/r.json")).is_err());
    }
}
