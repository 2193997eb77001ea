//! Seeded synthetic pair corpora with a learnable but gradually acquired
//! class signal.
//!
//! Each class owns a vocabulary of signal terms. A pair's text mixes a few
//! signal terms of its class into shared noise.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{build_corpus, DependencyKind, PairCorpus, RequirementPair};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Total pairs; must be even.
    pub n_pairs: usize,
    /// Signal vocabulary size per class.
    pub signal_terms: usize,
    /// Signal terms drawn into each requirement text.
    pub signal_per_text: usize,
    pub noise_terms: usize,
    pub noise_per_text: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_pairs: 2_000,
            signal_terms: 250,
            signal_per_text: 2,
            noise_terms: 300,
            noise_per_text: 4,
            seed: 2_000,
        }
    }
}

/// Lowercase letters only, so terms survive text normalization.
fn word(prefix: &str, mut index: usize) -> String {
    let mut tail = Vec::new();
    loop {
        tail.push(b'a' + (index % 26) as u8);
        index /= 26;
        if index == 0 {
            break;
        }
    }
    tail.reverse();
    format!("{prefix}{}", String::from_utf8(tail).expect("ascii"))
}

struct Vocab {
    signal: [Vec<String>; 2],
    noise: Vec<String>,
}

fn text(rng: &mut Rng, vocab: &Vocab, class: usize, spec: &SyntheticSpec) -> String {
    let mut words: Vec<&str> = Vec::with_capacity(spec.signal_per_text + spec.noise_per_text);
    for _ in 0..spec.signal_per_text {
        words.push(&vocab.signal[class][rng.gen_range(0..spec.signal_terms)]);
    }
    for _ in 0..spec.noise_per_text {
        words.push(&vocab.noise[rng.gen_range(0..spec.noise_terms)]);
    }
    words.shuffle(rng);
    words.join(" ")
}

/// Balanced corpus of `n_pairs` pairs. Positives are `REQUIRES` pairs,
/// negatives independent ones; identical specs give identical corpora.
pub fn generate(spec: &SyntheticSpec) -> Result<PairCorpus> {
    if spec.n_pairs < 4 || !spec.n_pairs.is_multiple_of(2) {
        return Err(Error::Size(format!(
            "synthetic corpus needs an even pair count of at least 4, got {}",
            spec.n_pairs
        )));
    }
    if spec.signal_terms == 0 || spec.noise_terms == 0 || spec.signal_per_text + spec.noise_per_text == 0 {
        return Err(Error::Size("synthetic vocabularies and texts must be nonempty".into()));
    }
    let vocab = Vocab {
        signal: [
            (0..spec.signal_terms).map(|i| word("ind", i)).collect(),
            (0..spec.signal_terms).map(|i| word("dep", i)).collect(),
        ],
        noise: (0..spec.noise_terms).map(|i| word("w", i)).collect(),
    };
    let mut rng = rng::seeded(spec.seed);
    let half = spec.n_pairs / 2;
    let mut make = |class: usize, kind: DependencyKind, tag: &str| -> Vec<RequirementPair> {
        (0..half)
            .map(|i| {
                let left = (format!("{tag}{i}L"), text(&mut rng, &vocab, class, spec));
                let right = (format!("{tag}{i}R"), text(&mut rng, &vocab, class, spec));
                RequirementPair::new((&left.0, &left.1), (&right.0, &right.1), kind).expect("distinct ids")
            })
            .collect()
    };
    let positives = make(1, DependencyKind::Requires, "P");
    let negatives = make(0, DependencyKind::None, "N");
    build_corpus(&positives, &negatives, rng::derive_seed(spec.seed, 1))
}
