use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{DependencyKind, PairCorpus, RequirementPair, SplitPlan};
use crate::error::{Error, Result};

const CORPUS_HEADER: [&str; 6] = ["pair_id", "left_id", "right_id", "label", "kind", "combined_text"];

fn schema(message: String) -> Error {
    Error::Schema {
        module: "corpus",
        message,
    }
}

fn csv_error(err: csv::Error) -> Error {
    Error::Parse {
        line: err.position().map(|p| p.line()).unwrap_or(0),
        message: err.to_string(),
    }
}

pub fn write_corpus_csv(corpus: &PairCorpus) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CORPUS_HEADER).expect("write to memory");
    for (id, pair) in corpus.pair_ids().iter().zip(corpus.pairs()) {
        let label = if pair.label() { "1" } else { "0" };
        w.write_record([
            id.as_str(),
            pair.left.as_str(),
            pair.right.as_str(),
            label,
            pair.kind.as_str(),
            pair.combined_text.as_str(),
        ])
        .expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

pub fn read_corpus_csv<R: Read>(input: R) -> Result<PairCorpus> {
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header != CORPUS_HEADER {
        return Err(schema(format!(
            "expected corpus header `{}`, got `{}`",
            CORPUS_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut pairs = Vec::new();
    let mut ids = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(csv_error)?;
        let row_no = i + 1;
        let kind = DependencyKind::parse(row[4].trim())
            .ok_or_else(|| schema(format!("row {row_no}: unknown kind `{}`", &row[4])))?;
        let label = match row[3].trim() {
            "0" => false,
            "1" => true,
            other => return Err(schema(format!("row {row_no}: label must be 0 or 1, got `{other}`"))),
        };
        if label != kind.is_dependent() {
            return Err(schema(format!("row {row_no}: label {} contradicts kind {}", label as u8, kind.as_str())));
        }
        let (left, right) = (row[1].trim(), row[2].trim());
        if left == right {
            return Err(schema(format!("row {row_no}: pair joins `{left}` with itself")));
        }
        pairs.push(RequirementPair {
            left: left.to_string(),
            right: right.to_string(),
            kind,
            combined_text: row[5].to_string(),
        });
        ids.push(row[0].trim().to_string());
    }
    PairCorpus::from_pairs(pairs, ids)
}

/// `pair_index,part` rows, test set first, then training pool in draw order.
pub fn split_csv(plan: &SplitPlan) -> String {
    let mut out = String::from("pair_index,part\n");
    for i in &plan.test_set {
        out.push_str(&format!("{i},test\n"));
    }
    for i in plan.train_positive.iter().chain(&plan.train_negative) {
        out.push_str(&format!("{i},train\n"));
    }
    out
}

/// `fraction,pair_index` rows, one per training index per fraction.
pub fn schedule_csv(fractions: &[f64], schedule: &[Vec<usize>]) -> String {
    let mut out = String::from("fraction,pair_index\n");
    for (f, subset) in fractions.iter().zip(schedule) {
        let f = crate::format::fmt_decimal(*f);
        for i in subset {
            out.push_str(&format!("{f},{i}\n"));
        }
    }
    out
}

/// JSON companion of the split and schedule files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSidecar {
    pub seed: u64,
    pub test_fraction: f64,
    pub fractions: Vec<f64>,
    pub corpus_size: usize,
    pub test_count: usize,
    pub train_pool_count: usize,
    pub schedule_sizes: Vec<usize>,
}

impl SplitSidecar {
    pub fn new(plan: &SplitPlan, fractions: &[f64], schedule: &[Vec<usize>]) -> Self {
        SplitSidecar {
            seed: plan.seed,
            test_fraction: plan.test_fraction(),
            fractions: fractions.to_vec(),
            corpus_size: plan.corpus_size,
            test_count: plan.test_set.len(),
            train_pool_count: plan.train_positive.len() + plan.train_negative.len(),
            schedule_sizes: schedule.iter().map(Vec::len).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, split};

    fn corpus() -> PairCorpus {
        let pos: Vec<_> = (0..4)
            .map(|i| RequirementPair::new((&format!("p{i}"), "alpha beta"), (&format!("q{i}"), "gamma"), DependencyKind::Requires).unwrap())
            .collect();
        let neg: Vec<_> = (0..6)
            .map(|i| RequirementPair::new((&format!("n{i}"), "delta"), (&format!("m{i}"), "eps"), DependencyKind::None).unwrap())
            .collect();
        build_corpus(&pos, &neg, 5).unwrap()
    }

    #[test]
    fn corpus_csv_round_trip() {
        let c = corpus();
        let text = write_corpus_csv(&c);
        assert!(text.starts_with("pair_id,left_id,right_id,label,kind,combined_text\n"));
        assert_eq!(read_corpus_csv(text.as_bytes()).unwrap(), c);
    }

    #[test]
    fn corpus_csv_rejects_contradictory_label() {
        let text = "pair_id,left_id,right_id,label,kind,combined_text\n0,a,b,0,REQUIRES,x [SEP] y\n1,c,d,1,NONE,x [SEP] y\n";
        assert!(read_corpus_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn split_files() {
        let c = corpus();
        let plan = split(&c, 0.2, 1).unwrap();
        let text = split_csv(&plan);
        assert_eq!(text.lines().count(), 1 + c.len());
        assert_eq!(text.lines().filter(|l| l.ends_with(",test")).count(), 2);
        let sched = crate::corpus::fraction_schedule(&plan, &[0.4, 0.8]).unwrap();
        let side = SplitSidecar::new(&plan, &[0.4, 0.8], &sched);
        assert_eq!(side.schedule_sizes, vec![3, 6]);
        assert_eq!(schedule_csv(&[0.4, 0.8], &sched).lines().count(), 1 + 9);
    }
}
