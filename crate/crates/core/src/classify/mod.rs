//! Classifier contract: TF-IDF + random forest and multinomial naive Bayes,
//! external prediction ingestion, and confusion-matrix evaluation.

mod bayes;
mod forest;
mod predictions;
mod vectorizer;

use serde::{Deserialize, Serialize};

pub use bayes::NaiveBayes;
pub use forest::{DecisionTree, ForestConfig, RandomForest};
pub use predictions::{
    evaluate, load_external_predictions, ConfusionMatrix, Prediction, PredictionRow, PredictionSet,
    INTERCHANGE_HEADER,
};
pub use vectorizer::{tokenize, FeatureVectorizer, SparseRow, VectorizerConfig};

use crate::error::{Error, Result};
use crate::rng;
use crate::roi::f1_score;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    RandomForest,
    NaiveBayes,
}

/// When the forest grid search runs during a learning curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningMode {
    Off,
    /// Once on the largest training fraction; the winner is reused everywhere.
    #[default]
    Once,
    EveryFraction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSpec {
    pub kind: ModelKind,
    pub forest: ForestConfig,
    pub tuning: TuningMode,
    /// Additive smoothing for naive Bayes.
    pub alpha: f64,
    pub vectorizer: VectorizerConfig,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec {
            kind: ModelKind::RandomForest,
            forest: ForestConfig::default(),
            tuning: TuningMode::Once,
            alpha: 1.0,
            vectorizer: VectorizerConfig::default(),
        }
    }
}

impl ClassifierSpec {
    pub fn label(&self) -> &'static str {
        match self.kind {
            ModelKind::RandomForest => "RF",
            ModelKind::NaiveBayes => "NB",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub kind: ModelKind,
    pub seed: u64,
    pub hyperparameters: serde_json::Value,
    pub n_train: usize,
    pub vocabulary_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Estimator {
    Forest(RandomForest),
    Bayes(NaiveBayes),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    vectorizer: FeatureVectorizer,
    estimator: Estimator,
    metadata: ModelMetadata,
}

fn check_lengths<T>(texts: &[T], labels: &[bool]) -> Result<()> {
    if texts.len() != labels.len() {
        return Err(Error::DegenerateData(format!(
            "{} texts but {} labels",
            texts.len(),
            labels.len()
        )));
    }
    Ok(())
}

fn single_class_guard(labels: &[bool]) -> Result<()> {
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateData(
            "training data contains a single class".into(),
        ));
    }
    Ok(())
}

/// Fit the vectorizer and a random forest on the given texts.
pub fn train_random_forest<S: AsRef<str>>(
    texts: &[S],
    labels: &[bool],
    forest: &ForestConfig,
    vectorizer: &VectorizerConfig,
    seed: u64,
) -> Result<TrainedModel> {
    check_lengths(texts, labels)?;
    single_class_guard(labels)?;
    let vec = FeatureVectorizer::fit(texts, vectorizer.clone())?;
    let rows: Vec<SparseRow> = texts.iter().map(|t| vec.transform(t.as_ref())).collect();
    let model = RandomForest::fit(&rows, labels, vec.len(), forest, seed)?;
    Ok(TrainedModel {
        metadata: ModelMetadata {
            kind: ModelKind::RandomForest,
            seed,
            hyperparameters: serde_json::json!({
                "n_trees": forest.n_trees,
                "max_depth": forest.max_depth,
                "min_samples_leaf": forest.min_samples_leaf,
                "max_features": "ceil_sqrt",
            }),
            n_train: texts.len(),
            vocabulary_size: vec.len(),
        },
        vectorizer: vec,
        estimator: Estimator::Forest(model),
    })
}

/// Fit the vectorizer and a multinomial naive Bayes model on raw counts.
pub fn train_naive_bayes<S: AsRef<str>>(
    texts: &[S],
    labels: &[bool],
    alpha: f64,
    vectorizer: &VectorizerConfig,
) -> Result<TrainedModel> {
    check_lengths(texts, labels)?;
    let vec = FeatureVectorizer::fit(texts, vectorizer.clone())?;
    let counts: Vec<_> = texts
        .iter()
        .map(|t| vec.transform_counts(t.as_ref()))
        .collect();
    let model = NaiveBayes::fit(&counts, labels, vec.len(), alpha)?;
    Ok(TrainedModel {
        metadata: ModelMetadata {
            kind: ModelKind::NaiveBayes,
            seed: 0,
            hyperparameters: serde_json::json!({ "alpha": alpha }),
            n_train: texts.len(),
            vocabulary_size: vec.len(),
        },
        vectorizer: vec,
        estimator: Estimator::Bayes(model),
    })
}

/// Train according to `spec` without any tuning.
pub fn train<S: AsRef<str>>(spec: &ClassifierSpec, texts: &[S], labels: &[bool], seed: u64) -> Result<TrainedModel> {
    match spec.kind {
        ModelKind::RandomForest => train_random_forest(texts, labels, &spec.forest, &spec.vectorizer, seed),
        ModelKind::NaiveBayes => train_naive_bayes(texts, labels, spec.alpha, &spec.vectorizer),
    }
}

impl TrainedModel {
    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn vectorizer(&self) -> &FeatureVectorizer {
        &self.vectorizer
    }

    /// One prediction per text, in input order. The score is the share of
    /// trees voting 1 for a forest and the class-1 posterior for naive Bayes.
    pub fn predict<S: AsRef<str>>(&self, texts: &[S]) -> Vec<Prediction> {
        texts
            .iter()
            .map(|t| match &self.estimator {
                Estimator::Forest(f) => {
                    let row = self.vectorizer.transform(t.as_ref());
                    Prediction {
                        label: f.predict(&row),
                        score: f.score(&row),
                    }
                }
                Estimator::Bayes(nb) => {
                    let counts = self.vectorizer.transform_counts(t.as_ref());
                    Prediction {
                        label: nb.predict(&counts),
                        score: nb.posterior(&counts)[1],
                    }
                }
            })
            .collect()
    }
}

/// Cross-validation folds used by [`tune_random_forest`].
pub const TUNING_FOLDS: usize = 5;

/// Forest grid searched during tuning, in preference order for ties.
pub fn tuning_grid() -> Vec<ForestConfig> {
    let mut grid = Vec::new();
    for n_trees in [50, 100, 200] {
        for max_depth in [None, Some(16)] {
            grid.push(ForestConfig {
                n_trees,
                max_depth,
                min_samples_leaf: 1,
            });
        }
    }
    grid
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub best: ForestConfig,
    pub folds: usize,
    /// Mean cross-validated F1 per grid entry.
    pub scores: Vec<(ForestConfig, f64)>,
}

/// Stratified k-fold assignment: fold index per example.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut fold = vec![0; labels.len()];
    let mut rng = rng::seeded(seed);
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    fold
}

/// Grid search over [`tuning_grid`] by mean F1 under stratified k-fold
/// cross-validation (k = 5, reduced when a class has fewer examples).
/// Ties go to the earlier grid entry, i.e. the smaller forest.
pub fn tune_random_forest<S: AsRef<str> + Sync>(
    texts: &[S],
    labels: &[bool],
    vectorizer: &VectorizerConfig,
    seed: u64,
) -> Result<TuningResult> {
    check_lengths(texts, labels)?;
    let positives = labels.iter().filter(|&&l| l).count();
    let smallest = positives.min(labels.len() - positives);
    let k = smallest.min(TUNING_FOLDS);
    if k < 2 {
        return Err(Error::DegenerateData(format!(
            "cross-validation needs 2 examples per class, smallest class has {smallest}"
        )));
    }
    let fold_of = stratified_folds(labels, k, rng::derive_seed(seed, 0xF01D));

    // Vectorize once per fold; the vocabulary only sees that fold's training part.
    let mut fold_data = Vec::with_capacity(k);
    for fold in 0..k {
        let train_idx: Vec<usize> = (0..texts.len()).filter(|&i| fold_of[i] != fold).collect();
        let test_idx: Vec<usize> = (0..texts.len()).filter(|&i| fold_of[i] == fold).collect();
        let train_texts: Vec<&str> = train_idx.iter().map(|&i| texts[i].as_ref()).collect();
        let vec = FeatureVectorizer::fit(&train_texts, vectorizer.clone())?;
        let rows: Vec<SparseRow> = train_texts.iter().map(|t| vec.transform(t)).collect();
        let train_labels: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
        let test_rows: Vec<SparseRow> = test_idx.iter().map(|&i| vec.transform(texts[i].as_ref())).collect();
        let test_labels: Vec<bool> = test_idx.iter().map(|&i| labels[i]).collect();
        fold_data.push((rows, train_labels, vec.len(), test_rows, test_labels));
    }

    let mut scores = Vec::new();
    for cfg in tuning_grid() {
        let mut total = 0.0;
        for (fold, (rows, train_labels, d, test_rows, test_labels)) in fold_data.iter().enumerate() {
            let forest = RandomForest::fit(rows, train_labels, *d, &cfg, rng::derive_seed(seed, fold as u64))?;
            let mut cm = ConfusionMatrix::default();
            for (row, &truth) in test_rows.iter().zip(test_labels) {
                cm.record(truth, forest.predict(row));
            }
            total += f1_score(&cm);
        }
        scores.push((cfg, total / k as f64));
    }
    let mut best = 0;
    for (i, (_, s)) in scores.iter().enumerate() {
        if *s > scores[best].1 {
            best = i;
        }
    }
    Ok(TuningResult {
        best: scores[best].0.clone(),
        folds: k,
        scores,
    })
}
