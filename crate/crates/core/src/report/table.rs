use std::io::Read;

use crate::classify::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::format::fmt_decimal;
use crate::harness::{curve_from_counts, CostMode, LearningCurve};
use crate::roi::CostParameters;

pub const CURVE_HEADER: [&str; 14] = [
    "fraction",
    "n_train",
    "n_test",
    "tp",
    "fp",
    "fn",
    "tn",
    "precision",
    "recall",
    "f1",
    "cost_usd",
    "penalty_usd",
    "benefit_usd",
    "roi",
];

/// Leading columns that carry the classification results.
const COUNT_COLUMNS: usize = 7;

fn schema(message: String) -> Error {
    Error::Schema {
        module: "report",
        message,
    }
}

/// One row per point, header first, LF line endings.
pub fn emit_curve_csv(curve: &LearningCurve) -> String {
    let mut out = CURVE_HEADER.join(",");
    out.push('\n');
    for p in &curve.points {
        let cells = [
            fmt_decimal(p.fraction),
            p.n_train.to_string(),
            p.n_test.to_string(),
            p.cm.tp.to_string(),
            p.cm.fp.to_string(),
            p.cm.fn_.to_string(),
            p.cm.tn.to_string(),
            fmt_decimal(p.cm.precision()),
            fmt_decimal(p.cm.recall()),
            fmt_decimal(p.f1),
            fmt_decimal(p.econ.cost_usd),
            fmt_decimal(p.econ.penalty_usd),
            fmt_decimal(p.econ.benefit_usd),
            fmt_decimal(p.econ.roi),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// A parsed curve CSV row. Economic columns are absent when the file holds
/// only the seven count columns, as transcribed result tables do.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRecord {
    pub fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub cm: ConfusionMatrix,
    /// precision, recall, f1, cost_usd, penalty_usd, benefit_usd, roi.
    pub derived: Option<[f64; 7]>,
}

/// Parse a curve CSV with either the full header or its first seven columns.
pub fn parse_curve_csv<R: Read>(input: R) -> Result<Vec<CurveRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| schema(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let full = header == CURVE_HEADER;
    if !full && header != CURVE_HEADER[..COUNT_COLUMNS] {
        return Err(schema(format!(
            "expected curve header `{}` or its first {COUNT_COLUMNS} columns, got `{}`",
            CURVE_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| schema(format!("row {row_no}: {e}")))?;
        let float = |c: usize| -> Result<f64> {
            row[c]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| schema(format!("row {row_no}: `{}` is not a number in column {}", &row[c], CURVE_HEADER[c])))
        };
        let count = |c: usize| -> Result<u64> {
            row[c]
                .parse::<u64>()
                .map_err(|_| schema(format!("row {row_no}: `{}` is not a count in column {}", &row[c], CURVE_HEADER[c])))
        };
        let derived = if full {
            let mut d = [0.0; 7];
            for (k, slot) in d.iter_mut().enumerate() {
                *slot = float(COUNT_COLUMNS + k)?;
            }
            Some(d)
        } else {
            None
        };
        out.push(CurveRecord {
            fraction: float(0)?,
            n_train: count(1)? as usize,
            n_test: count(2)? as usize,
            cm: ConfusionMatrix {
                tp: count(3)?,
                fp: count(4)?,
                fn_: count(5)?,
                tn: count(6)?,
            },
            derived,
        });
    }
    Ok(out)
}

/// Rebuild a curve from parsed rows, deriving economics under `p`.
pub fn curve_from_records(
    label: &str,
    records: &[CurveRecord],
    p: &CostParameters,
    mode: CostMode,
) -> Result<LearningCurve> {
    let rows: Vec<_> = records
        .iter()
        .map(|r| (r.fraction, r.n_train, r.n_test, r.cm))
        .collect();
    curve_from_counts(label, &rows, p, mode)
}
