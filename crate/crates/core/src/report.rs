//! Report files.
//!
//! Machine-readable files keep full precision (shortest round-trip float
//! formatting):
//!
//! * `methods.csv`: header `backend,metric,value`, one row per metric and
//!   method, methods in [`BackendId`] order, metrics in [`METRICS`] order.
//! * `countries.csv`: header `country,instances,backend,correct,accuracy`,
//!   rows in report order, the pooled row named `other`.
//!
//! Human-readable tables mirror the per-method and per-country layouts with
//! two decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::eval::{ConfusionTally, CountryGroup, CountryReport, CountryRow, MethodMetrics};
use crate::types::BackendId;

/// Metric names in file order.
pub const METRICS: [&str; 19] = [
    "n",
    "tp_f",
    "fp_f",
    "tp_m",
    "fp_m",
    "abstain_f",
    "abstain_m",
    "precision_f",
    "recall_f",
    "f1_f",
    "precision_m",
    "recall_m",
    "f1_m",
    "accuracy",
    "coverage",
    "precision_f_zero_support",
    "precision_m_zero_support",
    "n_f",
    "n_m",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn metric_values(m: &MethodMetrics) -> [String; 19] {
    let t = &m.tally;
    let b = |v: bool| u8::from(v).to_string();
    [
        t.total().to_string(),
        t.tp_f.to_string(),
        t.fp_f.to_string(),
        t.tp_m.to_string(),
        t.fp_m.to_string(),
        t.abstain_f.to_string(),
        t.abstain_m.to_string(),
        m.precision_f.to_string(),
        m.recall_f.to_string(),
        m.f1_f.to_string(),
        m.precision_m.to_string(),
        m.recall_m.to_string(),
        m.f1_m.to_string(),
        m.accuracy.to_string(),
        m.coverage.to_string(),
        b(m.zero_support_f),
        b(m.zero_support_m),
        t.n_female().to_string(),
        t.n_male().to_string(),
    ]
}

pub fn methods_csv(metrics: &BTreeMap<BackendId, MethodMetrics>) -> String {
    let mut out = String::from("backend,metric,value\n");
    for (backend, m) in metrics {
        for (name, value) in METRICS.iter().zip(metric_values(m)) {
            let _ = writeln!(out, "{backend},{name},{value}");
        }
    }
    out
}

pub fn countries_csv(report: &CountryReport) -> String {
    let mut out = String::from("country,instances,backend,correct,accuracy\n");
    for row in &report.rows {
        for backend in &report.backends {
            let correct = row.correct.get(backend).copied().unwrap_or(0);
            let accuracy = row.accuracy(*backend).unwrap_or(0.0);
            let _ = writeln!(
                out,
                "{},{},{backend},{correct},{accuracy}",
                row.group, row.instance_count
            );
        }
    }
    out
}

fn malformed(line: u64, message: impl Into<String>) -> ReportError {
    ReportError::Malformed {
        line,
        message: message.into(),
    }
}

/// Reads `methods.csv` back. Metrics are rebuilt from the stored values.
pub fn parse_methods_csv(text: &str) -> Result<BTreeMap<BackendId, MethodMetrics>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut values: BTreeMap<BackendId, BTreeMap<String, String>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(malformed(line, "expected backend,metric,value"));
        }
        let backend: BackendId = record[0].parse().map_err(|e| malformed(line, format!("{e}")))?;
        values
            .entry(backend)
            .or_default()
            .insert(record[1].to_string(), record[2].to_string());
    }
    values
        .into_iter()
        .map(|(backend, map)| {
            let get = |name: &str| {
                map.get(name)
                    .ok_or_else(|| malformed(0, format!("{backend}: missing metric {name}")))
            };
            let int = |name: &str| -> Result<u64, ReportError> {
                get(name)?
                    .parse()
                    .map_err(|_| malformed(0, format!("{backend}: {name} is not an integer")))
            };
            let real = |name: &str| -> Result<f64, ReportError> {
                get(name)?
                    .parse()
                    .map_err(|_| malformed(0, format!("{backend}: {name} is not a number")))
            };
            let tally = ConfusionTally {
                tp_f: int("tp_f")?,
                fp_f: int("fp_f")?,
                tp_m: int("tp_m")?,
                fp_m: int("fp_m")?,
                abstain_f: int("abstain_f")?,
                abstain_m: int("abstain_m")?,
            };
            Ok((
                backend,
                MethodMetrics {
                    tally,
                    precision_f: real("precision_f")?,
                    recall_f: real("recall_f")?,
                    f1_f: real("f1_f")?,
                    precision_m: real("precision_m")?,
                    recall_m: real("recall_m")?,
                    f1_m: real("f1_m")?,
                    accuracy: real("accuracy")?,
                    coverage: real("coverage")?,
                    zero_support_f: int("precision_f_zero_support")? == 1,
                    zero_support_m: int("precision_m_zero_support")? == 1,
                },
            ))
        })
        .collect()
}

/// Reads `countries.csv` back.
pub fn parse_countries_csv(text: &str, min_instances: usize) -> Result<CountryReport, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows: Vec<CountryRow> = Vec::new();
    let mut backends: Vec<BackendId> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 5 {
            return Err(malformed(line, "expected country,instances,backend,correct,accuracy"));
        }
        let group = match &record[0] {
            "other" => CountryGroup::Other,
            code => CountryGroup::Country(code.parse().map_err(|e| malformed(line, format!("{e}")))?),
        };
        let instances: usize = record[1]
            .parse()
            .map_err(|_| malformed(line, "instances is not an integer"))?;
        let backend: BackendId = record[2].parse().map_err(|e| malformed(line, format!("{e}")))?;
        let correct: usize = record[3]
            .parse()
            .map_err(|_| malformed(line, "correct is not an integer"))?;
        if !backends.contains(&backend) {
            backends.push(backend);
        }
        if rows.last().is_none_or(|r| r.group != group) {
            rows.push(CountryRow {
                group,
                instance_count: instances,
                correct: BTreeMap::new(),
            });
        }
        rows.last_mut().expect("pushed").correct.insert(backend, correct);
    }
    backends.sort();
    Ok(CountryReport {
        min_instances,
        backends,
        rows,
    })
}

fn two(v: f64) -> String {
    format!("{v:.2}")
}

fn flagged(v: f64, zero_support: bool) -> String {
    if zero_support {
        format!("{}*", two(v))
    } else {
        two(v)
    }
}

pub fn method_table(metrics: &BTreeMap<BackendId, MethodMetrics>) -> String {
    let n = metrics.values().next().map_or(0, |m| m.tally.total());
    let mut out = format!("Per-class and overall precision and recall (N = {n})\n");
    let _ = write!(out, "{:<18}", "");
    for backend in metrics.keys() {
        let _ = write!(out, "{:>10}", backend.as_str());
    }
    out.push('\n');

    type Cell = fn(&MethodMetrics) -> String;
    let rows: [(&str, Cell); 8] = [
        ("female precision", |m| flagged(m.precision_f, m.zero_support_f)),
        ("female recall", |m| two(m.recall_f)),
        ("female F1", |m| two(m.f1_f)),
        ("male precision", |m| flagged(m.precision_m, m.zero_support_m)),
        ("male recall", |m| two(m.recall_m)),
        ("male F1", |m| two(m.f1_m)),
        ("accuracy", |m| two(m.accuracy)),
        ("coverage", |m| two(m.coverage)),
    ];
    for (label, cell) in rows {
        let _ = write!(out, "{label:<18}");
        for m in metrics.values() {
            let _ = write!(out, "{:>10}", cell(m));
        }
        out.push('\n');
    }
    if metrics.values().any(|m| m.zero_support_f || m.zero_support_m) {
        out.push_str("* no record was predicted in this class\n");
    }
    out
}

pub fn country_table(report: &CountryReport) -> String {
    let mut out = format!(
        "Accuracy by country (fewer than {} instances pooled into \"other\")\n",
        report.min_instances
    );
    let _ = write!(out, "{:<10}{:>13}", "country", "# instances");
    for backend in &report.backends {
        let _ = write!(out, "{:>10}", backend.as_str());
    }
    out.push('\n');
    for row in &report.rows {
        let _ = write!(out, "{:<10}{:>13}", row.group.to_string(), row.instance_count);
        for backend in &report.backends {
            let cell = row.accuracy(*backend).map_or_else(|| "-".to_string(), two);
            let _ = write!(out, "{cell:>10}");
        }
        out.push('\n');
    }
    out
}
