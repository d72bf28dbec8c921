use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{ExperimentConfig, OutputFormat};
use super::suite::{run_suite, ResultRow, SuiteOutput, SuiteSummary};
use crate::error::Result;

const HEADER: [&str; 10] = [
    "instance_id",
    "algorithm",
    "w",
    "seed",
    "cost",
    "opt_cost",
    "ratio",
    "bound_value",
    "within_bound",
    "tolerance_budget",
];

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn rounded(x: f64) -> Value {
    if x.is_finite() {
        json!(format_sig(x).parse::<f64>().unwrap_or(x))
    } else {
        json!(format_sig(x))
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.instance_id.clone(),
            r.algorithm.clone(),
            r.w.to_string(),
            r.seed.to_string(),
            opt(r.cost),
            opt(r.opt_cost),
            opt(r.ratio),
            opt(r.bound_value),
            r.within_bound.to_string(),
            format_sig(r.tolerance_budget),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rows as JSON objects in CSV column order, plus `error` for failed runs.
pub fn rows_to_json(rows: &[ResultRow]) -> Value {
    let num = |x: Option<f64>| x.map(rounded).unwrap_or(Value::Null);
    Value::Array(
        rows.iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("instance_id".into(), json!(r.instance_id));
                obj.insert("algorithm".into(), json!(r.algorithm));
                obj.insert("w".into(), json!(r.w));
                obj.insert("seed".into(), json!(r.seed));
                obj.insert("cost".into(), num(r.cost));
                obj.insert("opt_cost".into(), num(r.opt_cost));
                obj.insert("ratio".into(), num(r.ratio));
                obj.insert("bound_value".into(), num(r.bound_value));
                obj.insert("within_bound".into(), json!(r.within_bound));
                obj.insert("tolerance_budget".into(), rounded(r.tolerance_budget));
                if let Some(e) = &r.error {
                    obj.insert("error".into(), json!(e));
                }
                Value::Object(obj)
            })
            .collect(),
    )
}

pub fn summary_to_json(summary: &SuiteSummary) -> Value {
    let num = |x: Option<f64>| x.map(rounded).unwrap_or(Value::Null);
    json!({
        "rows": summary.rows,
        "violations": summary.violations,
        "errors": summary.errors,
        "groups": summary.groups.iter().map(|g| json!({
            "algorithm": g.algorithm,
            "w": g.w,
            "runs": g.runs,
            "errors": g.errors,
            "violations": g.violations,
            "max_ratio": num(g.max_ratio),
            "min_margin": num(g.min_margin),
        })).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub output: SuiteOutput,
    pub data_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

impl SweepOutcome {
    /// Process exit code: zero iff every row is within its bound.
    pub fn exit_code(&self) -> i32 {
        if self.output.all_within() {
            0
        } else {
            1
        }
    }
}

/// Path of the summary written next to `data`: `<data>.summary.json`.
pub fn summary_path_for(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// Run the suite and write rows (CSV or JSON) and the summary JSON to the
/// configured output path, if any.
pub fn sweep_and_report(config: &ExperimentConfig) -> Result<SweepOutcome> {
    let output = run_suite(config)?;
    let (mut data_path, mut summary_path) = (None, None);
    if let Some(path) = &config.output.path {
        let body = match config.output.format {
            OutputFormat::Csv => rows_to_csv(&output.rows)?,
            OutputFormat::Json => serde_json::to_string_pretty(&rows_to_json(&output.rows))? + "\n",
        };
        std::fs::write(path, body)?;
        let sp = summary_path_for(path);
        std::fs::write(&sp, serde_json::to_string_pretty(&summary_to_json(&output.summary))? + "\n")?;
        data_path = Some(path.clone());
        summary_path = Some(sp);
    }
    Ok(SweepOutcome {
        output,
        data_path,
        summary_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(1.5), "1.5");
        assert_eq!(format_sig(123456789.0123456), "123456789.012");
        assert_eq!(format_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_rows_have_header_only() {
        let csv = rows_to_csv(&[]).unwrap();
        assert_eq!(
            csv,
            "instance_id,algorithm,w,seed,cost,opt_cost,ratio,bound_value,within_bound,tolerance_budget\n"
        );
    }
}
