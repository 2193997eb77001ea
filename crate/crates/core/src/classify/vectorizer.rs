//! Unigram TF-IDF vectorizer over normalized text.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sparse row: `(column, value)` pairs sorted by column.
pub type SparseRow = Vec<(u32, f64)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VectorizerConfig {
    /// Terms must occur in at least this many training documents.
    pub min_df: usize,
    /// Keep at most this many terms, highest document frequency first.
    pub max_features: usize,
    /// `ln((1 + D) / (1 + df)) + 1` when set, `ln(D / df) + 1` otherwise.
    pub smooth_idf: bool,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            min_df: 2,
            max_features: 5_000,
            smooth_idf: true,
        }
    }
}

/// Whitespace tokens made only of letters. Reserved tokens such as the pair
/// separator are dropped here.
pub fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
        .filter(|t| t.chars().all(char::is_alphabetic))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVectorizer {
    config: VectorizerConfig,
    vocabulary: HashMap<String, u32>,
    terms: Vec<String>,
    document_frequency: Vec<usize>,
    idf: Vec<f64>,
    n_documents: usize,
}

impl FeatureVectorizer {
    /// Build the vocabulary and idf weights from training texts only.
    pub fn fit<S: AsRef<str>>(train_texts: &[S], config: VectorizerConfig) -> Result<Self> {
        if train_texts.is_empty() {
            return Err(Error::Fit("no training documents".into()));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for text in train_texts {
            let mut tokens: Vec<&str> = tokenize(text.as_ref()).collect();
            tokens.sort_unstable();
            tokens.dedup();
            for t in tokens {
                *df.entry(t).or_default() += 1;
            }
        }

        let mut kept: Vec<(&str, usize)> = df
            .into_iter()
            .filter(|&(_, count)| count >= config.min_df)
            .collect();
        if kept.len() > config.max_features {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            kept.truncate(config.max_features);
            kept.sort_by(|a, b| a.0.cmp(b.0));
        }

        let n_documents = train_texts.len();
        let d = n_documents as f64;
        let mut vocabulary = HashMap::with_capacity(kept.len());
        let mut terms = Vec::with_capacity(kept.len());
        let mut document_frequency = Vec::with_capacity(kept.len());
        let mut idf = Vec::with_capacity(kept.len());
        for (col, (term, count)) in kept.into_iter().enumerate() {
            vocabulary.insert(term.to_string(), col as u32);
            terms.push(term.to_string());
            document_frequency.push(count);
            let c = count as f64;
            idf.push(if config.smooth_idf {
                ((1.0 + d) / (1.0 + c)).ln() + 1.0
            } else {
                (d / c).ln() + 1.0
            });
        }

        Ok(FeatureVectorizer {
            config,
            vocabulary,
            terms,
            document_frequency,
            idf,
            n_documents,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn config(&self) -> &VectorizerConfig {
        &self.config
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn column(&self, term: &str) -> Option<u32> {
        self.vocabulary.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.column(term).map(|c| self.document_frequency[c as usize])
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|c| self.idf[c as usize])
    }

    /// Raw in-vocabulary term counts.
    pub fn transform_counts(&self, text: &str) -> Vec<(u32, u32)> {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for t in tokenize(text) {
            if let Some(&col) = self.vocabulary.get(t) {
                *counts.entry(col).or_default() += 1;
            }
        }
        counts.into_iter().collect()
    }

    /// L2-normalized TF-IDF vector. Texts with no known terms map to the
    /// empty vector.
    pub fn transform(&self, text: &str) -> SparseRow {
        let mut row: SparseRow = self
            .transform_counts(text)
            .into_iter()
            .map(|(col, n)| (col, f64::from(n) * self.idf[col as usize]))
            .collect();
        let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in &mut row {
                *v /= norm;
            }
        }
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(min_df: usize) -> VectorizerConfig {
        VectorizerConfig {
            min_df,
            ..VectorizerConfig::default()
        }
    }

    #[test]
    fn vocabulary_and_df() {
        let v = FeatureVectorizer::fit(&["a b", "b c"], cfg(1)).unwrap();
        assert_eq!(v.terms(), ["a", "b", "c"]);
        assert_eq!(v.document_frequency("b"), Some(2));
        assert_eq!(v.document_frequency("a"), Some(1));
    }

    #[test]
    fn min_df_threshold() {
        let v = FeatureVectorizer::fit(&["a b", "b c"], cfg(2)).unwrap();
        assert_eq!(v.terms(), ["b"]);
    }

    #[test]
    fn idf_of_ubiquitous_term_is_one() {
        let v = FeatureVectorizer::fit(&["a b", "b c"], cfg(1)).unwrap();
        assert!((v.idf("b").unwrap() - 1.0).abs() < 1e-15);
        // ln(3/2) + 1 for a term in one of two documents
        assert!((v.idf("a").unwrap() - (1.5f64.ln() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let empty: [&str; 0] = [];
        assert!(matches!(
            FeatureVectorizer::fit(&empty, VectorizerConfig::default()),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn max_features_keeps_most_frequent() {
        let texts = ["a b c", "a b", "a"];
        let v = FeatureVectorizer::fit(
            &texts,
            VectorizerConfig {
                min_df: 1,
                max_features: 2,
                smooth_idf: true,
            },
        )
        .unwrap();
        assert_eq!(v.terms(), ["a", "b"]);
    }

    #[test]
    fn transform_is_unit_norm_and_skips_separator() {
        let v = FeatureVectorizer::fit(&["a b [SEP] c", "b c"], cfg(1)).unwrap();
        assert!(v.column("[SEP]").is_none());
        let row = v.transform("a a b zzz");
        let norm: f64 = row.iter().map(|(_, x)| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(row.len(), 2);
        assert!(v.transform("zzz").is_empty());
    }

    #[test]
    fn test_texts_never_touch_vocabulary() {
        let v = FeatureVectorizer::fit(&["a b", "b c"], cfg(1)).unwrap();
        let before = v.clone();
        let _ = v.transform("d e f a");
        assert_eq!(v, before);
    }
}
