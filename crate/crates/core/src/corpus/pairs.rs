use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{DependencyKind, LinkKind, PairCorpus, RequirementPair, RequirementSet};
use crate::error::{Error, Result};
use crate::rng;

/// Positive pairs and what was discarded while extracting them.
#[derive(Clone, Debug, PartialEq)]
pub struct Extracted {
    pub pairs: Vec<RequirementPair>,
    /// Links whose target id is not in the set.
    pub dangling: usize,
}

/// Collect labeled positive pairs of one dependency kind.
///
/// For `Requires`, `X depends_on Y` yields `(X, Y)` and `X blocks Y` yields
/// `(Y, X)`. For `RelatesTo`, every relates link yields one canonical pair.
/// Duplicates and self-links are dropped.
pub fn extract_positive_pairs(set: &RequirementSet, kind: DependencyKind) -> Extracted {
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    let mut dangling = 0;
    for record in set.records() {
        for link in &record.links {
            let oriented = match (kind, link.kind) {
                (DependencyKind::Requires, LinkKind::DependsOn) => (record.id.as_str(), link.target.as_str()),
                (DependencyKind::Requires, LinkKind::Blocks) => (link.target.as_str(), record.id.as_str()),
                (DependencyKind::RelatesTo, LinkKind::RelatesTo) => (record.id.as_str(), link.target.as_str()),
                _ => continue,
            };
            let (Some(left), Some(right)) = (set.get(oriented.0), set.get(oriented.1)) else {
                dangling += 1;
                continue;
            };
            let Some(pair) = RequirementPair::new((&left.id, &left.text), (&right.id, &right.text), kind) else {
                continue;
            };
            if seen.insert((pair.left.clone(), pair.right.clone())) {
                pairs.push(pair);
            }
        }
    }
    if dangling > 0 {
        log::warn!("{dangling} links reference requirements outside the set");
    }
    Extracted { pairs, dangling }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filtered {
    pub set: RequirementSet,
    pub removed: usize,
}

/// Drop records whose normalized text has fewer than `min_words` words.
pub fn filter_short(set: &RequirementSet, min_words: usize) -> Filtered {
    let kept: Vec<_> = set
        .records()
        .iter()
        .filter(|r| r.word_count() >= min_words)
        .cloned()
        .collect();
    let removed = set.len() - kept.len();
    Filtered {
        set: RequirementSet::new(set.source_label(), kept).expect("subset of a valid set"),
        removed,
    }
}

/// Sample `count` independent pairs uniformly without replacement.
///
/// Eligible pairs have no recorded link of any kind in either direction and
/// are not among `positives`. Output pairs are canonical (smaller id left).
pub fn generate_negative_pairs(
    set: &RequirementSet,
    positives: &[RequirementPair],
    count: usize,
    seed: u64,
) -> Result<Vec<RequirementPair>> {
    let mut ids: Vec<&str> = set.records().iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    let position = |id: &str| ids.binary_search(&id).ok();

    let mut linked: HashSet<(usize, usize)> = HashSet::new();
    let mut mark = |a: &str, b: &str| {
        if let (Some(i), Some(j)) = (position(a), position(b)) {
            if i != j {
                linked.insert((i.min(j), i.max(j)));
            }
        }
    };
    for record in set.records() {
        for link in &record.links {
            mark(&record.id, &link.target);
        }
    }
    for p in positives {
        mark(&p.left, &p.right);
    }

    let n = ids.len();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let pool = all_pairs - linked.len();
    if count > pool {
        return Err(Error::Capacity {
            requested: count,
            pool,
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }

    let mut rng = rng::seeded(seed);
    let chosen: Vec<(usize, usize)> = if count * 2 <= pool {
        // Sparse request: rejection sampling over ordered draws is uniform
        // over unordered eligible pairs.
        let mut taken = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let key = (i.min(j), i.max(j));
            if linked.contains(&key) || !taken.insert(key) {
                continue;
            }
            out.push(key);
        }
        out
    } else {
        let mut eligible = Vec::with_capacity(pool);
        for i in 0..n {
            for j in i + 1..n {
                if !linked.contains(&(i, j)) {
                    eligible.push((i, j));
                }
            }
        }
        let (sampled, _) = eligible.partial_shuffle(&mut rng, count);
        sampled.to_vec()
    };

    Ok(chosen
        .into_iter()
        .map(|(i, j)| {
            let a = set.get(ids[i]).expect("id from set");
            let b = set.get(ids[j]).expect("id from set");
            RequirementPair::new((&a.id, &a.text), (&b.id, &b.text), DependencyKind::None)
                .expect("distinct ids")
        })
        .collect())
}

/// Balance positives against a seeded shuffle of the negatives.
pub fn build_corpus(
    positives: &[RequirementPair],
    negatives: &[RequirementPair],
    seed: u64,
) -> Result<PairCorpus> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Size(format!(
            "need positive and negative pairs, got {} / {}",
            positives.len(),
            negatives.len()
        )));
    }
    if let Some(p) = positives.iter().find(|p| !p.label()) {
        return Err(Error::Size(format!(
            "pair ({}, {}) in the positive list is labeled independent",
            p.left, p.right
        )));
    }
    if let Some(p) = negatives.iter().find(|p| p.label()) {
        return Err(Error::Size(format!(
            "pair ({}, {}) in the negative list is labeled dependent",
            p.left, p.right
        )));
    }
    if negatives.len() < positives.len() {
        return Err(Error::Imbalance {
            positives: positives.len(),
            negatives: negatives.len(),
        });
    }
    let mut order: Vec<usize> = (0..negatives.len()).collect();
    order.shuffle(&mut rng::seeded(seed));
    order.truncate(positives.len());

    let pairs: Vec<RequirementPair> = positives
        .iter()
        .cloned()
        .chain(order.into_iter().map(|i| negatives[i].clone()))
        .collect();
    let ids = (0..pairs.len()).map(|i| i.to_string()).collect();
    PairCorpus::from_pairs(pairs, ids)
}
