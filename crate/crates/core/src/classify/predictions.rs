//! Prediction rows, the interchange CSV, and confusion-matrix evaluation.

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_decimal;

pub const INTERCHANGE_HEADER: [&str; 4] = ["pair_id", "true_label", "predicted_label", "score"];

/// Binary confusion matrix. `fn_` counts false negatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// tp / (tp + fp), 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// tp / (tp + fn), 0 when there are no positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Output of a classifier for one text, before it is tied to a pair id.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub label: bool,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub pair_id: String,
    pub true_label: Option<bool>,
    pub predicted_label: bool,
    pub score: Option<f64>,
}

/// Predictions keyed by pair id. Pair ids are unique.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    rows: Vec<PredictionRow>,
}

impl PredictionSet {
    pub fn new(rows: Vec<PredictionRow>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if !seen.insert(row.pair_id.as_str()) {
                return Err(schema(format!(
                    "row {}: duplicate pair_id `{}`",
                    i + 1,
                    row.pair_id
                )));
            }
            if let Some(s) = row.score {
                if !(0.0..=1.0).contains(&s) {
                    return Err(schema(format!("row {}: score {} outside [0, 1]", i + 1, s)));
                }
            }
        }
        Ok(PredictionSet { rows })
    }

    pub fn rows(&self) -> &[PredictionRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Serialize in the interchange format. The score cell is left empty when
    /// a row has no score.
    pub fn to_csv(&self) -> String {
        let mut out = INTERCHANGE_HEADER.join(",");
        out.push('\n');
        for row in &self.rows {
            let truth = match row.true_label {
                Some(t) => (t as u8).to_string(),
                None => String::new(),
            };
            let score = row.score.map(fmt_decimal).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_cell(&row.pair_id),
                truth,
                row.predicted_label as u8,
                score
            ));
        }
        out
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn schema(message: String) -> Error {
    Error::Schema {
        module: "classify",
        message,
    }
}

fn parse_label(cell: &str, column: &str, row: usize) -> Result<bool> {
    match cell.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(schema(format!(
            "row {row}: {column} must be 0 or 1, got `{other}`"
        ))),
    }
}

/// Read an interchange CSV produced by an external model. The header must be
/// `pair_id,true_label,predicted_label,score`; the score column may be
/// omitted entirely and individual score cells may be empty.
pub fn load_external_predictions<R: Read>(input: R) -> Result<PredictionSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let has_score = match header.as_slice() {
        [a, b, c] if [a, b, c] == INTERCHANGE_HEADER[..3] => false,
        [a, b, c, d] if [a, b, c, d] == INTERCHANGE_HEADER => true,
        _ => {
            return Err(schema(format!(
                "expected header `{}`, got `{}`",
                INTERCHANGE_HEADER.join(","),
                header.join(",")
            )))
        }
    };

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 1;
        let record = record.map_err(csv_error)?;
        let pair_id = record[0].trim().to_string();
        if pair_id.is_empty() {
            return Err(schema(format!("row {row_no}: empty pair_id")));
        }
        let true_label = match record[1].trim() {
            "" => None,
            cell => Some(parse_label(cell, "true_label", row_no)?),
        };
        let predicted_label = parse_label(&record[2], "predicted_label", row_no)?;
        let score = if has_score {
            match record[3].trim() {
                "" => None,
                cell => Some(cell.parse::<f64>().map_err(|_| {
                    schema(format!("row {row_no}: score `{cell}` is not a number"))
                })?),
            }
        } else {
            None
        };
        rows.push(PredictionRow {
            pair_id,
            true_label,
            predicted_label,
            score,
        });
    }
    log::debug!("loaded {} external prediction rows", rows.len());
    PredictionSet::new(rows)
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        line,
        message: err.to_string(),
    }
}

/// Count agreement between true and predicted labels.
pub fn evaluate(preds: &PredictionSet) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    for row in preds.rows() {
        let truth = row.true_label.ok_or_else(|| {
            Error::Evaluation(format!("pair `{}` has no true label", row.pair_id))
        })?;
        cm.record(truth, row.predicted_label);
    }
    Ok(cm)
}
