//! Random forest of Gini-split decision trees over sparse feature rows.
//!
//! Trees are grown on bootstrap samples. At every node the candidate
//! features are visited in random order and the search stops after
//! `ceil(sqrt(d))` non-constant features have been evaluated; features that
//! are constant within the node do not count toward that budget.


use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::vectorizer::SparseRow;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        label: bool,
    },
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

fn value_of(row: &SparseRow, feature: u32) -> f64 {
    match row.binary_search_by_key(&feature, |&(c, _)| c) {
        Ok(i) => row[i].1,
        Err(_) => 0.0,
    }
}

impl DecisionTree {
    pub fn predict(&self, row: &SparseRow) -> bool {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if value_of(row, *feature) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, d)) = stack.pop() {
            best = best.max(d);
            if let Node::Split { left, right, .. } = &self.nodes[at] {
                stack.push((*left as usize, d + 1));
                stack.push((*right as usize, d + 1));
            }
        }
        best
    }
}

/// Weighted class counts `[negatives, positives]`.
type Counts = [f64; 2];

fn gini(c: Counts) -> f64 {
    let n = c[0] + c[1];
    if n <= 0.0 {
        return 0.0;
    }
    let p0 = c[0] / n;
    let p1 = c[1] / n;
    1.0 - p0 * p0 - p1 * p1
}

fn majority(c: Counts) -> bool {
    c[1] > c[0]
}

struct BestSplit {
    feature: u32,
    threshold: f64,
    /// Weighted child impurity, `n_left * gini_left + n_right * gini_right`.
    score: f64,
}

/// Training sample inside a node: row index and bootstrap multiplicity.
#[derive(Clone, Copy)]
struct Member {
    row: usize,
    weight: f64,
}

struct TreeBuilder<'a> {
    rows: &'a [SparseRow],
    labels: &'a [bool],
    mtry: usize,
    max_depth: Option<usize>,
    min_leaf: usize,
}

impl TreeBuilder<'_> {
    fn counts(&self, members: &[Member]) -> Counts {
        let mut c = [0.0; 2];
        for m in members {
            c[self.labels[m.row] as usize] += m.weight;
        }
        c
    }

    fn grow(&self, members: Vec<Member>, rng: &mut rng::Rng) -> DecisionTree {
        let mut nodes = vec![Node::Leaf { label: false }];
        let mut stack = vec![(0usize, members, 0usize)];
        while let Some((slot, members, depth)) = stack.pop() {
            let counts = self.counts(&members);
            let leaf = Node::Leaf {
                label: majority(counts),
            };
            let pure = counts[0] == 0.0 || counts[1] == 0.0;
            let depth_capped = self.max_depth.is_some_and(|d| depth >= d);
            if pure || depth_capped || members.len() < 2 * self.min_leaf {
                nodes[slot] = leaf;
                continue;
            }
            let Some(split) = self.best_split(&members, counts, rng) else {
                nodes[slot] = leaf;
                continue;
            };
            let (left, right): (Vec<Member>, Vec<Member>) = members
                .into_iter()
                .partition(|m| value_of(&self.rows[m.row], split.feature) <= split.threshold);
            let left_slot = nodes.len();
            nodes.push(Node::Leaf { label: false });
            nodes.push(Node::Leaf { label: false });
            nodes[slot] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: left_slot as u32,
                right: (left_slot + 1) as u32,
            };
            stack.push((left_slot + 1, right, depth + 1));
            stack.push((left_slot, left, depth + 1));
        }
        DecisionTree { nodes }
    }

    fn best_split(&self, members: &[Member], total: Counts, rng: &mut rng::Rng) -> Option<BestSplit> {
        // Non-zero entries of the node grouped by feature, ascending by value
        // within a group. Absent entries are zeros, the minimum for
        // non-negative features.
        let mut entries: Vec<(u32, f64, usize)> = Vec::new();
        for (i, m) in members.iter().enumerate() {
            for &(col, v) in &self.rows[m.row] {
                if v != 0.0 {
                    entries.push((col, v, i));
                }
            }
        }
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for end in 1..=entries.len() {
            if end == entries.len() || entries[end].0 != entries[start].0 {
                groups.push((start, end));
                start = end;
            }
        }
        groups.shuffle(rng);

        let parent_score = (total[0] + total[1]) * gini(total);
        let mut best: Option<BestSplit> = None;
        let mut evaluated = 0usize;
        for (start, end) in groups {
            if evaluated >= self.mtry && best.is_some() {
                break;
            }
            let group = &entries[start..end];
            let Some(split) = self.evaluate_feature(group[0].0, group, members, total) else {
                continue;
            };
            evaluated += 1;
            if best.as_ref().is_none_or(|b| split.score < b.score) {
                best = Some(split);
            }
        }
        best.filter(|b| b.score <= parent_score + 1e-12)
    }

    /// Best threshold for one feature, or `None` when the feature is constant
    /// within the node or no threshold respects the leaf-size floor.
    fn evaluate_feature(
        &self,
        feature: u32,
        entries: &[(u32, f64, usize)],
        members: &[Member],
        total: Counts,
    ) -> Option<BestSplit> {
        let n_zero_members = members.len() - entries.len();
        let constant = n_zero_members == 0 && entries.first()?.1 == entries.last()?.1;
        if constant {
            return None;
        }

        // Left side starts with all zero-valued members.
        let mut nonzero = [0.0; 2];
        for &(_, _, i) in entries {
            let m = members[i];
            nonzero[self.labels[m.row] as usize] += m.weight;
        }
        let mut left = [total[0] - nonzero[0], total[1] - nonzero[1]];
        let mut left_n = n_zero_members;
        let mut best: Option<BestSplit> = None;
        let consider = |left: Counts, left_n: usize, lo: f64, hi: f64, best: &mut Option<BestSplit>| {
            let right_n = members.len() - left_n;
            if left_n < self.min_leaf || right_n < self.min_leaf {
                return;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let score = (left[0] + left[1]) * gini(left) + (right[0] + right[1]) * gini(right);
            if best.as_ref().is_none_or(|b| score < b.score) {
                *best = Some(BestSplit {
                    feature,
                    threshold: lo + (hi - lo) / 2.0,
                    score,
                });
            }
        };

        let mut prev = 0.0;
        let mut idx = 0;
        while idx < entries.len() {
            let value = entries[idx].1;
            if left_n > 0 {
                consider(left, left_n, prev, value, &mut best);
            }
            while idx < entries.len() && entries[idx].1 == value {
                let m = members[entries[idx].2];
                left[self.labels[m.row] as usize] += m.weight;
                left_n += 1;
                idx += 1;
            }
            prev = value;
        }
        best
    }
}

/// Trained ensemble. Predicts 1 only on a strict majority of tree votes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    config: ForestConfig,
    n_features: usize,
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(
        rows: &[SparseRow],
        labels: &[bool],
        n_features: usize,
        config: &ForestConfig,
        seed: u64,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DegenerateData(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let positives = labels.iter().filter(|&&l| l).count();
        let negatives = labels.len() - positives;
        if positives < 2 || negatives < 2 {
            return Err(Error::DegenerateData(format!(
                "need at least 2 examples per class, got {positives} positive / {negatives} negative"
            )));
        }
        if config.n_trees == 0 || config.min_samples_leaf == 0 {
            return Err(Error::Hyperparameter(
                "n_trees and min_samples_leaf must be positive".into(),
            ));
        }
        if config.max_depth == Some(0) {
            return Err(Error::Hyperparameter("max_depth must be positive".into()));
        }

        let builder = TreeBuilder {
            rows,
            labels,
            mtry: ((n_features as f64).sqrt().ceil() as usize).max(1),
            max_depth: config.max_depth,
            min_leaf: config.min_samples_leaf,
        };
        let n = rows.len();
        let trees = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng::seeded(rng::derive_seed(seed, t as u64));
                let mut weights = vec![0u32; n];
                for _ in 0..n {
                    weights[rng.gen_range(0..n)] += 1;
                }
                let members = weights
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0)
                    .map(|(row, &w)| Member {
                        row,
                        weight: f64::from(w),
                    })
                    .collect();
                builder.grow(members, &mut rng)
            })
            .collect();

        Ok(RandomForest {
            config: config.clone(),
            n_features,
            trees,
        })
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Fraction of trees voting for label 1.
    pub fn score(&self, row: &SparseRow) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(row)).count();
        votes as f64 / self.trees.len() as f64
    }

    pub fn predict(&self, row: &SparseRow) -> bool {
        let votes = self.trees.iter().filter(|t| t.predict(row)).count();
        2 * votes > self.trees.len()
    }
}
