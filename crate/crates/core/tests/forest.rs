use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roiml::classify::{ConfusionMatrix, ForestConfig, RandomForest, SparseRow};
use roiml::roi::f1_score;

const FEATURES: usize = 40;

/// Sparse rows with a handful of random active features. When `signal` is
/// set, positives also carry feature 0 and negatives feature 1.
fn dataset(n: usize, signal: bool, seed: u64) -> (Vec<SparseRow>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2 == 0;
        let mut row: SparseRow = Vec::new();
        if signal {
            row.push((if label { 0 } else { 1 }, 1.0));
        }
        for _ in 0..4 {
            let col = rng.gen_range(2..FEATURES as u32);
            if !row.iter().any(|&(c, _)| c == col) {
                row.push((col, rng.gen_range(0.1..1.0)));
            }
        }
        row.sort_by_key(|&(c, _)| c);
        rows.push(row);
        labels.push(label);
    }
    (rows, labels)
}

fn f1_on(forest: &RandomForest, rows: &[SparseRow], labels: &[bool]) -> f64 {
    let mut cm = ConfusionMatrix::default();
    for (row, &truth) in rows.iter().zip(labels) {
        cm.record(truth, forest.predict(row));
    }
    f1_score(&cm)
}

fn config(n_trees: usize) -> ForestConfig {
    ForestConfig {
        n_trees,
        ..ForestConfig::default()
    }
}

#[test]
fn fits_separable_training_data() {
    let (rows, labels) = dataset(400, true, 1);
    let forest = RandomForest::fit(&rows, &labels, FEATURES, &config(50), 7).unwrap();
    assert!(f1_on(&forest, &rows, &labels) >= 0.99);
    let (test_rows, test_labels) = dataset(200, true, 2);
    assert!(f1_on(&forest, &test_rows, &test_labels) >= 0.99);
}

#[test]
fn shuffled_labels_give_chance_level() {
    let (rows, mut labels) = dataset(600, false, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    use rand::seq::SliceRandom;
    labels.shuffle(&mut rng);
    let forest = RandomForest::fit(&rows, &labels, FEATURES, &config(50), 5).unwrap();
    let (test_rows, mut test_labels) = dataset(1000, false, 6);
    test_labels.shuffle(&mut rng);
    let f1 = f1_on(&forest, &test_rows, &test_labels);
    assert!((f1 - 0.5).abs() <= 0.1, "f1 {f1}");
}

#[test]
fn more_trees_reduce_variance_across_seeds() {
    let (mut rows, labels) = dataset(300, true, 8);
    // Drop the signal from a third of the rows so single trees disagree.
    for row in rows.iter_mut().step_by(3) {
        row.retain(|&(c, _)| c > 1);
    }
    let (test_rows, test_labels) = dataset(300, true, 9);
    let variance = |n_trees: usize| {
        let scores: Vec<f64> = (0..10)
            .map(|seed| {
                let forest = RandomForest::fit(&rows, &labels, FEATURES, &config(n_trees), seed).unwrap();
                f1_on(&forest, &test_rows, &test_labels)
            })
            .collect();
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (scores.len() - 1) as f64
    };
    let (single, many) = (variance(1), variance(100));
    assert!(many <= single, "variance with 100 trees {many} exceeds 1 tree {single}");
}

#[test]
fn same_seed_same_forest() {
    let (rows, labels) = dataset(200, true, 10);
    let a = RandomForest::fit(&rows, &labels, FEATURES, &config(20), 11).unwrap();
    let b = RandomForest::fit(&rows, &labels, FEATURES, &config(20), 11).unwrap();
    assert_eq!(a, b);
}
