//! Requirements mined from issue trackers, labeled dependency pairs, balanced
//! pair corpora and deterministic train/test splits.

mod ingest;
mod io;
mod pairs;
mod split;
pub mod synthetic;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{clean_text, parse_issue_export, Ingested, IssueSchema};
pub use io::{read_corpus_csv, schedule_csv, split_csv, write_corpus_csv, SplitSidecar};
pub use pairs::{build_corpus, extract_positive_pairs, filter_short, generate_negative_pairs, Extracted, Filtered};
pub use split::{default_schedule, fraction_schedule, round_half_up, split, SplitPlan};

/// Token placed between the two requirement texts of a pair. It contains
/// non-letters, so it can never occur inside a normalized description.
pub const PAIR_SEPARATOR: &str = "[SEP]";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    DependsOn,
    Blocks,
    RelatesTo,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub kind: LinkKind,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementRecord {
    pub id: String,
    /// Normalized with [`clean_text`].
    pub text: String,
    pub links: Vec<Link>,
}

impl RequirementRecord {
    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

/// Requirements of one dataset, with unique ids.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RequirementSet {
    source_label: String,
    records: Vec<RequirementRecord>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl RequirementSet {
    pub fn new(source_label: impl Into<String>, records: Vec<RequirementRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.id.is_empty() {
                return Err(Error::Schema {
                    module: "corpus",
                    message: format!("record {} has an empty id", i + 1),
                });
            }
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(RequirementSet {
            source_label: source_label.into(),
            records,
            index,
        })
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn records(&self) -> &[RequirementRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&RequirementRecord> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }
}

impl<'de> Deserialize<'de> for RequirementSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            source_label: String,
            records: Vec<RequirementRecord>,
        }
        let raw = Raw::deserialize(deserializer)?;
        RequirementSet::new(raw.source_label, raw.records).map_err(serde::de::Error::custom)
    }
}

/// Dependency type of a pair. `None` marks an independent pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DependencyKind {
    #[serde(rename = "REQUIRES")]
    Requires,
    #[serde(rename = "RELATES_TO")]
    RelatesTo,
    #[serde(rename = "NONE")]
    None,
}

impl DependencyKind {
    /// Binary label: DEPENDENT (true) for any kind but `None`.
    pub fn is_dependent(self) -> bool {
        self != DependencyKind::None
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DependencyKind::Requires => "REQUIRES",
            DependencyKind::RelatesTo => "RELATES_TO",
            DependencyKind::None => "NONE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "REQUIRES" => Some(DependencyKind::Requires),
            "RELATES_TO" => Some(DependencyKind::RelatesTo),
            "NONE" => Some(DependencyKind::None),
            _ => None,
        }
    }
}

/// Two requirements and their dependency label.
///
/// `Requires` pairs are ordered (dependent, prerequisite). Symmetric kinds
/// (`RelatesTo`, `None`) are stored with the lexicographically smaller id on
/// the left.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementPair {
    pub left: String,
    pub right: String,
    pub kind: DependencyKind,
    pub combined_text: String,
}

impl RequirementPair {
    /// Build a pair, canonicalizing symmetric kinds. Returns `None` for a
    /// self-pair.
    pub fn new(
        left: (&str, &str),
        right: (&str, &str),
        kind: DependencyKind,
    ) -> Option<Self> {
        if left.0 == right.0 {
            return None;
        }
        let (l, r) = if kind != DependencyKind::Requires && right.0 < left.0 {
            (right, left)
        } else {
            (left, right)
        };
        Some(RequirementPair {
            left: l.0.to_string(),
            right: r.0.to_string(),
            kind,
            combined_text: combine_texts(l.1, r.1),
        })
    }

    pub fn label(&self) -> bool {
        self.kind.is_dependent()
    }

    /// Unordered id key.
    pub fn unordered_key(&self) -> (String, String) {
        if self.left <= self.right {
            (self.left.clone(), self.right.clone())
        } else {
            (self.right.clone(), self.left.clone())
        }
    }
}

pub fn combine_texts(left: &str, right: &str) -> String {
    format!("{left} {PAIR_SEPARATOR} {right}")
}

/// Balanced labeled pairs. Positives precede negatives; `pair_ids` parallel
/// `pairs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCorpus {
    pairs: Vec<RequirementPair>,
    pair_ids: Vec<String>,
    positives_count: usize,
    negatives_count: usize,
}

impl PairCorpus {
    /// Wrap pairs after checking balance and id uniqueness.
    pub fn from_pairs(pairs: Vec<RequirementPair>, pair_ids: Vec<String>) -> Result<Self> {
        if pairs.len() != pair_ids.len() {
            return Err(Error::Size(format!(
                "{} pairs but {} pair ids",
                pairs.len(),
                pair_ids.len()
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(pair_ids.len());
        for id in &pair_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Schema {
                    module: "corpus",
                    message: format!("duplicate pair_id `{id}`"),
                });
            }
        }
        let positives_count = pairs.iter().filter(|p| p.label()).count();
        let negatives_count = pairs.len() - positives_count;
        if positives_count != negatives_count {
            return Err(Error::Imbalance {
                positives: positives_count,
                negatives: negatives_count,
            });
        }
        Ok(PairCorpus {
            pairs,
            pair_ids,
            positives_count,
            negatives_count,
        })
    }

    pub fn pairs(&self) -> &[RequirementPair] {
        &self.pairs
    }

    pub fn pair_ids(&self) -> &[String] {
        &self.pair_ids
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives_count(&self) -> usize {
        self.positives_count
    }

    pub fn negatives_count(&self) -> usize {
        self.negatives_count
    }

    pub fn labels(&self) -> Vec<bool> {
        self.pairs.iter().map(RequirementPair::label).collect()
    }

    pub fn text(&self, index: usize) -> &str {
        &self.pairs[index].combined_text
    }
}
