//! JSON and CSV serialization of metric reports.
//!
//! JSON schema: `{metric: {"items": [...], "mean": m, "sem": s, "n": k}}`
//! with metric keys in insertion order and SEM null for n = 1. CSV rows
//! are `metric,item_id,value` followed by `mean`/`sem`/`n` summary rows.
//! Non-finite values serialize as the string sentinels "inf", "-inf",
//! and "nan".

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use specgate_core::metrics::MetricsReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty report")]
    Empty,
    #[error("malformed report: {0}")]
    Parse(String),
}

fn value_to_json(v: f64) -> Value {
    if v.is_nan() {
        Value::String("nan".into())
    } else if v == f64::INFINITY {
        Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        json!(v)
    }
}

fn value_from_json(v: &Value) -> Result<f64, ReportError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| ReportError::Parse("non-f64 number".into())),
        Value::String(s) => match s.as_str() {
            "nan" => Ok(f64::NAN),
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            other => Err(ReportError::Parse(format!("unknown sentinel '{other}'"))),
        },
        _ => Err(ReportError::Parse("value is not a number".into())),
    }
}

/// Format a value for CSV with the same sentinels as JSON.
fn value_to_csv(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // Round-trippable float formatting.
        let mut s = format!("{v}");
        if !s.contains('.') && !s.contains('e') {
            s.push_str(".0");
        }
        s
    }
}

pub fn report_to_json(report: &MetricsReport) -> Result<String, ReportError> {
    if report.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut root = Map::new();
    for (name, values) in report.metrics() {
        let mut entry = Map::new();
        entry.insert(
            "items".into(),
            Value::Array(values.iter().map(|&v| value_to_json(v)).collect()),
        );
        entry.insert(
            "mean".into(),
            value_to_json(report.mean(name).expect("metric exists")),
        );
        entry.insert(
            "sem".into(),
            report.sem(name).map_or(Value::Null, value_to_json),
        );
        entry.insert("n".into(), json!(values.len()));
        root.insert(name.into(), Value::Object(entry));
    }
    serde_json::to_string_pretty(&Value::Object(root))
        .map_err(|e| ReportError::Parse(e.to_string()))
}

pub fn report_from_json(text: &str) -> Result<MetricsReport, ReportError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| ReportError::Parse("top level must be an object".into()))?;
    let mut report = MetricsReport::new();
    for (name, entry) in obj {
        let items = entry
            .get("items")
            .and_then(Value::as_array)
            .ok_or_else(|| ReportError::Parse(format!("metric '{name}' missing items")))?;
        for item in items {
            report.push(name, value_from_json(item)?);
        }
    }
    if report.is_empty() {
        return Err(ReportError::Empty);
    }
    Ok(report)
}

pub fn report_to_csv(report: &MetricsReport) -> Result<String, ReportError> {
    if report.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut out = String::from("metric,item_id,value\n");
    for (name, values) in report.metrics() {
        for (i, &v) in values.iter().enumerate() {
            out.push_str(&format!("{name},{i},{}\n", value_to_csv(v)));
        }
        out.push_str(&format!(
            "{name},mean,{}\n",
            value_to_csv(report.mean(name).expect("metric exists"))
        ));
        out.push_str(&format!(
            "{name},sem,{}\n",
            report.sem(name).map_or(String::new(), value_to_csv)
        ));
        out.push_str(&format!("{name},n,{}\n", values.len()));
    }
    Ok(out)
}

pub fn write_report(
    report: &MetricsReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<(), ReportError> {
    let text = match format {
        ReportFormat::Json => report_to_json(report)?,
        ReportFormat::Csv => report_to_csv(report)?,
    };
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_item_sem_is_null() {
        let mut report = MetricsReport::new();
        report.push("sdr", 1.0);
        let text = report_to_json(&report).unwrap();
        let root: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(root["sdr"]["mean"], json!(1.0));
        assert_eq!(root["sdr"]["sem"], Value::Null);
        assert_eq!(root["sdr"]["n"], json!(1));
    }

    #[test]
    fn mean_and_sem_arithmetic() {
        let mut report = MetricsReport::new();
        for v in [1.0, 2.0, 3.0] {
            report.push("m", v);
        }
        let text = report_to_json(&report).unwrap();
        let root: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(root["m"]["mean"], json!(2.0));
        let sem = root["m"]["sem"].as_f64().unwrap();
        assert!((sem - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_identical() {
        let mut report = MetricsReport::new();
        report.push("sdr", 12.345678901234);
        report.push("sdr", -3.25);
        report.push("segsnr", 0.1);
        let text = report_to_json(&report).unwrap();
        let back = report_from_json(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn non_finite_sentinels() {
        let mut report = MetricsReport::new();
        report.push("sdr", f64::INFINITY);
        report.push("sdr", f64::NEG_INFINITY);
        report.push("sdr", f64::NAN);
        let text = report_to_json(&report).unwrap();
        assert!(text.contains("\"inf\"") && text.contains("\"-inf\"") && text.contains("\"nan\""));
        let back = report_from_json(&text).unwrap();
        let items = back.values("sdr").unwrap();
        assert_eq!(items[0], f64::INFINITY);
        assert_eq!(items[1], f64::NEG_INFINITY);
        assert!(items[2].is_nan());
        let csv = report_to_csv(&report).unwrap();
        assert!(csv.contains(",inf\n") && csv.contains(",-inf\n") && csv.contains(",nan\n"));
    }

    #[test]
    fn key_order_is_insertion_order() {
        let mut report = MetricsReport::new();
        report.push("zzz", 1.0);
        report.push("aaa", 2.0);
        let text = report_to_json(&report).unwrap();
        assert!(text.find("zzz").unwrap() < text.find("aaa").unwrap());
    }

    #[test]
    fn csv_shape() {
        let mut report = MetricsReport::new();
        report.push("sdr", 1.0);
        report.push("sdr", 3.0);
        let csv = report_to_csv(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines,
            vec![
                "metric,item_id,value",
                "sdr,0,1.0",
                "sdr,1,3.0",
                "sdr,mean,2.0",
                "sdr,sem,1.0",
                "sdr,n,2",
            ]
        );
    }

    #[test]
    fn empty_report_rejected() {
        let report = MetricsReport::new();
        assert!(matches!(report_to_json(&report), Err(ReportError::Empty)));
        assert!(matches!(report_to_csv(&report), Err(ReportError::Empty)));
    }
}
