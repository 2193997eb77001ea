use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::PairCorpus;
use crate::error::{Error, Result};
use crate::rng;

/// `floor(x + 0.5)`, tolerant of representation error just below a half.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Stratified held-out test set plus the per-class training pools, in the
/// shuffled order from which nested training subsets are drawn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    /// Stored as the bit pattern so the plan stays `Eq`.
    test_fraction_bits: u64,
    pub corpus_size: usize,
    /// Ascending pair indices.
    pub test_set: Vec<usize>,
    pub train_positive: Vec<usize>,
    pub train_negative: Vec<usize>,
}

impl SplitPlan {
    pub fn test_fraction(&self) -> f64 {
        f64::from_bits(self.test_fraction_bits)
    }

    /// All training-pool indices, ascending.
    pub fn train_pool(&self) -> Vec<usize> {
        let mut pool: Vec<usize> = self
            .train_positive
            .iter()
            .chain(&self.train_negative)
            .copied()
            .collect();
        pool.sort_unstable();
        pool
    }
}

fn valid_ratio(x: f64) -> bool {
    x.is_finite() && x > 0.0 && x < 1.0
}

/// Stratified split. The test set holds `ceil(t / 2)` pairs per class where
/// `t = round_half_up(N * test_fraction)`, and is fixed for every later
/// training subset.
pub fn split(corpus: &PairCorpus, test_fraction: f64, seed: u64) -> Result<SplitPlan> {
    if !valid_ratio(test_fraction) {
        return Err(Error::Range(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let labels = corpus.labels();
    let mut positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if positives.len() < 2 || negatives.len() < 2 {
        return Err(Error::Size(format!(
            "split needs at least 2 pairs per class, got {} positive / {} negative",
            positives.len(),
            negatives.len()
        )));
    }

    let mut rng = rng::seeded(seed);
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);

    let total = round_half_up(corpus.len() as f64 * test_fraction);
    let per_class = total.div_ceil(2);
    let take = |class: &[usize]| per_class.clamp(1, class.len() - 1);
    let (n_pos, n_neg) = (take(&positives), take(&negatives));

    let mut test_set: Vec<usize> = positives[..n_pos]
        .iter()
        .chain(&negatives[..n_neg])
        .copied()
        .collect();
    test_set.sort_unstable();

    Ok(SplitPlan {
        seed,
        test_fraction_bits: test_fraction.to_bits(),
        corpus_size: corpus.len(),
        test_set,
        train_positive: positives[n_pos..].to_vec(),
        train_negative: negatives[n_neg..].to_vec(),
    })
}

/// 0.05, 0.10, ..., 0.80 of the whole corpus.
pub fn default_schedule() -> Vec<f64> {
    (1..=16).map(|i| f64::from(i) * 5.0 / 100.0).collect()
}

/// Nested, stratified training subsets for each fraction of the whole corpus.
///
/// Each subset holds `round_half_up(N * fraction)` pairs, positives taking
/// the odd one, drawn as prefixes of the plan's shuffled class pools so that
/// earlier subsets are contained in later ones. Returned indices ascend.
pub fn fraction_schedule(plan: &SplitPlan, fractions: &[f64]) -> Result<Vec<Vec<usize>>> {
    let ceiling = 1.0 - plan.test_fraction();
    let mut previous = 0.0;
    let mut out = Vec::with_capacity(fractions.len());
    for &f in fractions {
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::Range(format!("fraction {f} must be positive")));
        }
        if f <= previous {
            return Err(Error::Range(format!(
                "fractions must be strictly increasing ({previous} then {f})"
            )));
        }
        if f > ceiling + 1e-9 {
            return Err(Error::Range(format!(
                "fraction {f} exceeds the training pool ({ceiling} of the corpus)"
            )));
        }
        previous = f;

        let total = round_half_up(plan.corpus_size as f64 * f);
        let n_pos = total.div_ceil(2).min(plan.train_positive.len());
        let n_neg = (total / 2).min(plan.train_negative.len());
        let mut subset: Vec<usize> = plan.train_positive[..n_pos]
            .iter()
            .chain(&plan.train_negative[..n_neg])
            .copied()
            .collect();
        subset.sort_unstable();
        out.push(subset);
    }
    Ok(out)
}
