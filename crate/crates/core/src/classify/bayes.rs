//! Multinomial naive Bayes over raw term counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    alpha: f64,
    /// `[negative, positive]` log priors.
    log_prior: [f64; 2],
    /// Per class, log P(term | class) indexed by column.
    log_likelihood: [Vec<f64>; 2],
}

impl NaiveBayes {
    pub fn fit(counts: &[Vec<(u32, u32)>], labels: &[bool], n_features: usize, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Hyperparameter(format!(
                "smoothing alpha must be positive, got {alpha}"
            )));
        }
        if counts.len() != labels.len() {
            return Err(Error::DegenerateData(format!(
                "{} rows but {} labels",
                counts.len(),
                labels.len()
            )));
        }
        let mut docs = [0usize; 2];
        let mut term_totals = [vec![0.0f64; n_features], vec![0.0f64; n_features]];
        for (row, &label) in counts.iter().zip(labels) {
            let class = label as usize;
            docs[class] += 1;
            for &(col, n) in row {
                term_totals[class][col as usize] += f64::from(n);
            }
        }
        if docs[0] == 0 || docs[1] == 0 {
            return Err(Error::DegenerateData(format!(
                "naive Bayes needs both classes, got {} negative / {} positive",
                docs[0], docs[1]
            )));
        }
        let n_docs = labels.len() as f64;
        let log_prior = [
            (docs[0] as f64 / n_docs).ln(),
            (docs[1] as f64 / n_docs).ln(),
        ];
        let log_likelihood = term_totals.map(|totals| {
            let denom = totals.iter().sum::<f64>() + alpha * n_features as f64;
            totals.iter().map(|&c| ((c + alpha) / denom).ln()).collect()
        });
        Ok(NaiveBayes {
            alpha,
            log_prior,
            log_likelihood,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Unnormalized log joint per class.
    pub fn joint_log_likelihood(&self, counts: &[(u32, u32)]) -> [f64; 2] {
        let mut out = self.log_prior;
        for (class, score) in out.iter_mut().enumerate() {
            for &(col, n) in counts {
                *score += f64::from(n) * self.log_likelihood[class][col as usize];
            }
        }
        out
    }

    /// Posterior probabilities `[P(0 | x), P(1 | x)]`.
    pub fn posterior(&self, counts: &[(u32, u32)]) -> [f64; 2] {
        let [s0, s1] = self.joint_log_likelihood(counts);
        let p1 = 1.0 / (1.0 + (s0 - s1).exp());
        let p0 = 1.0 / (1.0 + (s1 - s0).exp());
        [p0, p1]
    }

    /// Argmax of the joint likelihood; exact ties go to label 0.
    pub fn predict(&self, counts: &[(u32, u32)]) -> bool {
        let [s0, s1] = self.joint_log_likelihood(counts);
        s1 > s0
    }
}
