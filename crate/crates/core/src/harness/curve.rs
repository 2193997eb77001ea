use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::same_fraction;
use crate::classify::{
    self, evaluate, ClassifierSpec, ConfusionMatrix, ForestConfig, ModelKind, PredictionRow, PredictionSet,
    TuningMode,
};
use crate::corpus::{fraction_schedule, round_half_up, split, PairCorpus, SplitPlan};
use crate::error::{Error, Result};
use crate::rng;
use crate::roi::{economic_outcome, f1_score, CostParameters, EconomicOutcome};

/// Which samples are charged at each curve point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    /// Training subset plus the fixed test set of that iteration.
    #[default]
    PerIteration,
    /// Everything processed by this and all earlier iterations.
    Cumulative,
    /// Training subset only.
    TrainOnly,
}

impl CostMode {
    /// Samples charged at each point of a curve with the given sizes.
    pub fn processed(self, sizes: &[(usize, usize)]) -> Vec<u64> {
        let mut running = 0u64;
        sizes
            .iter()
            .map(|&(n_train, n_test)| {
                let here = (n_train + n_test) as u64;
                running += here;
                match self {
                    CostMode::PerIteration => here,
                    CostMode::Cumulative => running,
                    CostMode::TrainOnly => n_train as u64,
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Share of the whole corpus used for training.
    pub fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub cm: ConfusionMatrix,
    pub f1: f64,
    pub econ: EconomicOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub technique_label: String,
    pub points: Vec<CurvePoint>,
    pub seed: u64,
    pub parameters: CostParameters,
    pub cost_mode: CostMode,
    /// Tuned or configured model hyperparameters, when a built-in model ran.
    #[serde(default)]
    pub model: Option<serde_json::Value>,
    /// Warnings raised while the curve was built.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl LearningCurve {
    pub fn fractions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.fraction).collect()
    }

    pub fn roi_series(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.econ.roi).collect()
    }

    pub fn f1_series(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.f1).collect()
    }
}

/// How each point's classifier is obtained.
#[derive(Clone, Debug)]
pub enum Trainer {
    BuiltIn(ClassifierSpec),
    /// Predictions on the fixed test set produced elsewhere, per fraction.
    External(Vec<(f64, PredictionSet)>),
}

pub struct CurveSetup<'a> {
    pub label: String,
    pub corpus: &'a PairCorpus,
    pub plan: &'a SplitPlan,
    pub fractions: &'a [f64],
    pub trainer: &'a Trainer,
    pub parameters: &'a CostParameters,
    pub cost_mode: CostMode,
}

/// Recompute economics from stored sizes and confusion matrices.
fn attach_economics(
    raw: Vec<(f64, usize, usize, ConfusionMatrix)>,
    p: &CostParameters,
    mode: CostMode,
) -> Result<Vec<CurvePoint>> {
    let sizes: Vec<(usize, usize)> = raw.iter().map(|r| (r.1, r.2)).collect();
    let processed = mode.processed(&sizes);
    raw.into_iter()
        .zip(processed)
        .map(|((fraction, n_train, n_test, cm), n)| {
            Ok(CurvePoint {
                fraction,
                n_train,
                n_test,
                cm,
                f1: f1_score(&cm),
                econ: economic_outcome(n, &cm, p)?,
            })
        })
        .collect()
}

/// Curve from stored per-point counts, with economics derived from `p`.
/// Fractions must strictly increase.
pub fn curve_from_counts(
    label: &str,
    rows: &[(f64, usize, usize, ConfusionMatrix)],
    p: &CostParameters,
    mode: CostMode,
) -> Result<LearningCurve> {
    p.validate()?;
    if rows.is_empty() {
        return Err(Error::Harness(format!("{label}: no points")));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Harness(format!("{label}: fractions must strictly increase")));
    }
    Ok(LearningCurve {
        technique_label: label.to_string(),
        points: attach_economics(rows.to_vec(), p, mode)?,
        seed: 0,
        parameters: p.clone(),
        cost_mode: mode,
        model: None,
        notes: Vec::new(),
    })
}

/// Rebuild every point's economics under `p`, leaving classification
/// results untouched.
pub fn replay(curve: &LearningCurve, p: &CostParameters) -> Result<LearningCurve> {
    let raw = curve
        .points
        .iter()
        .map(|pt| (pt.fraction, pt.n_train, pt.n_test, pt.cm))
        .collect();
    Ok(LearningCurve {
        points: attach_economics(raw, p, curve.cost_mode)?,
        parameters: p.clone(),
        ..curve.clone()
    })
}

fn check_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::Harness("empty fraction schedule".into()));
    }
    Ok(())
}

/// Train at every fraction, predict the fixed test set, and attach
/// economics. Deterministic for a given plan seed.
pub fn run_curve(setup: &CurveSetup<'_>) -> Result<LearningCurve> {
    check_fractions(setup.fractions)?;
    setup.parameters.validate()?;
    match setup.trainer {
        Trainer::BuiltIn(spec) => run_builtin(setup, spec),
        Trainer::External(entries) => run_external(setup, entries),
    }
}

fn run_builtin(setup: &CurveSetup<'_>, spec: &ClassifierSpec) -> Result<LearningCurve> {
    let corpus = setup.corpus;
    let plan = setup.plan;
    let labels = corpus.labels();
    let schedule = fraction_schedule(plan, setup.fractions)?;
    let test_texts: Vec<&str> = plan.test_set.iter().map(|&i| corpus.text(i)).collect();
    let test_labels: Vec<bool> = plan.test_set.iter().map(|&i| labels[i]).collect();
    let gather = |subset: &[usize]| -> (Vec<&str>, Vec<bool>) {
        subset.iter().map(|&i| (corpus.text(i), labels[i])).unzip()
    };

    let tune = |subset: &[usize]| -> Result<ForestConfig> {
        let (texts, ys) = gather(subset);
        let tuned = classify::tune_random_forest(&texts, &ys, &spec.vectorizer, rng::derive_seed(plan.seed, 0x7E57))?;
        log::info!("tuned forest on {} pairs: {:?}", texts.len(), tuned.best);
        Ok(tuned.best)
    };
    let is_forest = spec.kind == ModelKind::RandomForest;
    let mut fixed_forest = spec.forest.clone();
    if is_forest && spec.tuning == TuningMode::Once {
        let largest = schedule.last().expect("non-empty schedule");
        fixed_forest = tune(largest).map_err(|e| at_fraction(*setup.fractions.last().unwrap(), e))?;
    }

    let mut raw = Vec::with_capacity(schedule.len());
    let mut model_meta = None;
    for (i, (subset, &fraction)) in schedule.iter().zip(setup.fractions).enumerate() {
        let (texts, ys) = gather(subset);
        let mut point_spec = spec.clone();
        point_spec.forest = if is_forest && spec.tuning == TuningMode::EveryFraction {
            tune(subset).map_err(|e| at_fraction(fraction, e))?
        } else {
            fixed_forest.clone()
        };
        let model = classify::train(&point_spec, &texts, &ys, rng::derive_seed(plan.seed, 1_000 + i as u64))
            .map_err(|e| at_fraction(fraction, e))?;
        let mut cm = ConfusionMatrix::default();
        for (pred, &truth) in model.predict(&test_texts).iter().zip(&test_labels) {
            cm.record(truth, pred.label);
        }
        log::debug!("fraction {fraction}: n_train={} {:?}", texts.len(), cm);
        model_meta = Some(model.metadata().hyperparameters.clone());
        raw.push((fraction, texts.len(), test_texts.len(), cm));
    }

    Ok(LearningCurve {
        technique_label: setup.label.clone(),
        points: attach_economics(raw, setup.parameters, setup.cost_mode)?,
        seed: plan.seed,
        parameters: setup.parameters.clone(),
        cost_mode: setup.cost_mode,
        model: model_meta,
        notes: Vec::new(),
    })
}

fn at_fraction(fraction: f64, err: Error) -> Error {
    Error::Harness(format!("training failed at fraction {fraction}: {err}"))
}

fn run_external(setup: &CurveSetup<'_>, entries: &[(f64, PredictionSet)]) -> Result<LearningCurve> {
    let corpus = setup.corpus;
    let labels = corpus.labels();
    let index: HashMap<&str, usize> = corpus
        .pair_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let test_ids: std::collections::HashSet<&str> = setup
        .plan
        .test_set
        .iter()
        .map(|&i| corpus.pair_ids()[i].as_str())
        .collect();

    let mut notes = Vec::new();
    for (fraction, preds) in entries {
        let mut outside = 0;
        for row in preds.rows() {
            let Some(&i) = index.get(row.pair_id.as_str()) else {
                return Err(Error::Harness(format!(
                    "external predictions at fraction {fraction} reference unknown pair `{}`",
                    row.pair_id
                )));
            };
            if let Some(t) = row.true_label {
                if t != labels[i] {
                    return Err(Error::Harness(format!(
                        "external predictions at fraction {fraction}: pair `{}` labeled {} but corpus says {}",
                        row.pair_id, t as u8, labels[i] as u8
                    )));
                }
            }
            if !test_ids.contains(row.pair_id.as_str()) {
                outside += 1;
            }
        }
        if outside > 0 || preds.len() != test_ids.len() {
            notes.push(format!(
                "fraction {fraction}: external predictions cover {} pairs ({outside} outside the planned test set of {})",
                preds.len(),
                test_ids.len()
            ));
        }
    }

    // Fill missing truth from the corpus before evaluation.
    let filled: Vec<(f64, PredictionSet)> = entries
        .iter()
        .map(|(f, preds)| {
            let rows = preds
                .rows()
                .iter()
                .map(|r| PredictionRow {
                    true_label: r.true_label.or_else(|| index.get(r.pair_id.as_str()).map(|&i| labels[i])),
                    ..r.clone()
                })
                .collect();
            PredictionSet::new(rows).map(|set| (*f, set))
        })
        .collect::<Result<_>>()?;

    let mut curve = curve_from_predictions(
        &setup.label,
        corpus.len(),
        setup.fractions,
        &filled,
        setup.parameters,
        setup.cost_mode,
    )?;
    curve.seed = setup.plan.seed;
    notes.append(&mut curve.notes);
    curve.notes = notes;
    Ok(curve)
}

/// Curve over externally produced predictions, without a corpus. Points
/// exist only for grid fractions that have predictions; the rest are listed
/// in the curve notes.
pub fn curve_from_predictions(
    label: &str,
    corpus_size: usize,
    fractions: &[f64],
    entries: &[(f64, PredictionSet)],
    p: &CostParameters,
    mode: CostMode,
) -> Result<LearningCurve> {
    check_fractions(fractions)?;
    p.validate()?;
    let mut raw = Vec::new();
    let mut missing = Vec::new();
    for &fraction in fractions {
        match entries.iter().find(|(f, _)| same_fraction(*f, fraction)) {
            Some((_, preds)) => {
                let cm = evaluate(preds).map_err(|e| at_fraction(fraction, e))?;
                raw.push((fraction, round_half_up(corpus_size as f64 * fraction), preds.len(), cm));
            }
            None => missing.push(fraction),
        }
    }
    let mut notes = Vec::new();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|f| crate::format::fmt_decimal(*f)).collect();
        let msg = format!("no external predictions for fractions {}", list.join(", "));
        log::warn!("{label}: {msg}");
        notes.push(msg);
    }
    if raw.is_empty() {
        return Err(Error::Harness(format!("{label}: no fraction has predictions")));
    }
    Ok(LearningCurve {
        technique_label: label.to_string(),
        points: attach_economics(raw, p, mode)?,
        seed: 0,
        parameters: p.clone(),
        cost_mode: mode,
        model: None,
        notes,
    })
}

/// Restrict two curves to their common fractions. Notes name anything dropped.
pub fn align_grids(a: &LearningCurve, b: &LearningCurve) -> (LearningCurve, LearningCurve, Vec<String>) {
    let keep = |x: &LearningCurve, y: &LearningCurve| -> LearningCurve {
        LearningCurve {
            points: x
                .points
                .iter()
                .filter(|p| y.points.iter().any(|q| same_fraction(p.fraction, q.fraction)))
                .cloned()
                .collect(),
            ..x.clone()
        }
    };
    let a2 = keep(a, b);
    let b2 = keep(b, a);
    let mut notes = Vec::new();
    for (orig, kept) in [(a, &a2), (b, &b2)] {
        let dropped = orig.points.len() - kept.points.len();
        if dropped > 0 {
            notes.push(format!(
                "{}: {dropped} fractions absent from the other curve were ignored",
                orig.technique_label
            ));
        }
    }
    (a2, b2, notes)
}

/// Mean and sample standard deviation over repeated curves with different
/// split seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatSummary {
    pub technique_label: String,
    pub seeds: Vec<u64>,
    pub fractions: Vec<f64>,
    pub f1_mean: Vec<f64>,
    pub f1_sd: Vec<f64>,
    pub roi_mean: Vec<f64>,
    pub roi_sd: Vec<f64>,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run the same built-in curve under several split seeds.
#[allow(clippy::too_many_arguments)]
pub fn repeat_curves(
    label: &str,
    corpus: &PairCorpus,
    test_fraction: f64,
    fractions: &[f64],
    spec: &ClassifierSpec,
    p: &CostParameters,
    mode: CostMode,
    seeds: &[u64],
) -> Result<RepeatSummary> {
    if seeds.is_empty() {
        return Err(Error::Harness("repeat mode needs at least one seed".into()));
    }
    let trainer = Trainer::BuiltIn(spec.clone());
    let mut curves = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let plan = split(corpus, test_fraction, seed)?;
        curves.push(run_curve(&CurveSetup {
            label: label.to_string(),
            corpus,
            plan: &plan,
            fractions,
            trainer: &trainer,
            parameters: p,
            cost_mode: mode,
        })?);
    }
    let mut summary = RepeatSummary {
        technique_label: label.to_string(),
        seeds: seeds.to_vec(),
        fractions: fractions.to_vec(),
        f1_mean: Vec::new(),
        f1_sd: Vec::new(),
        roi_mean: Vec::new(),
        roi_sd: Vec::new(),
    };
    for i in 0..fractions.len() {
        let f1: Vec<f64> = curves.iter().map(|c| c.points[i].f1).collect();
        let roi: Vec<f64> = curves.iter().map(|c| c.points[i].econ.roi).collect();
        let (m, s) = mean_sd(&f1);
        summary.f1_mean.push(m);
        summary.f1_sd.push(s);
        let (m, s) = mean_sd(&roi);
        summary.roi_mean.push(m);
        summary.roi_sd.push(s);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionMatrix {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    #[test]
    fn cost_modes() {
        let sizes = [(100, 50), (200, 50)];
        assert_eq!(CostMode::PerIteration.processed(&sizes), vec![150, 250]);
        assert_eq!(CostMode::Cumulative.processed(&sizes), vec![150, 400]);
        assert_eq!(CostMode::TrainOnly.processed(&sizes), vec![100, 200]);
    }

    fn preds(truth_pred: &[(bool, bool)]) -> PredictionSet {
        PredictionSet::new(
            truth_pred
                .iter()
                .enumerate()
                .map(|(i, &(t, p))| PredictionRow {
                    pair_id: i.to_string(),
                    true_label: Some(t),
                    predicted_label: p,
                    score: None,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sparse_external_grid() {
        let p = CostParameters::desk_scale();
        let set = preds(&[(true, true), (false, false), (true, false), (false, true)]);
        let fractions: Vec<f64> = (1..=8).map(|i| f64::from(i) / 10.0).collect();
        let entries = vec![(0.2, set.clone()), (0.5, set.clone()), (0.8, set)];
        let curve = curve_from_predictions("BERT", 100, &fractions, &entries, &p, CostMode::PerIteration).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert_eq!(curve.notes.len(), 1);
        assert!(curve.notes[0].contains("0.1") && curve.notes[0].contains("0.7"));
        assert_eq!(curve.points[1].n_train, 50);
        assert_eq!(curve.points[1].cm, cm(1, 1, 1, 1));
    }

    #[test]
    fn replay_is_identity_under_same_parameters() {
        let p = CostParameters::table5_default();
        let set = preds(&[(true, true), (false, false), (true, false)]);
        let curve = curve_from_predictions("x", 1_000, &[0.1, 0.2], &[(0.1, set.clone()), (0.2, set)], &p, CostMode::Cumulative)
            .unwrap();
        assert_eq!(replay(&curve, &p).unwrap(), curve);
    }

    #[test]
    fn align_drops_unshared_fractions() {
        let p = CostParameters::desk_scale();
        let set = preds(&[(true, true), (false, false)]);
        let a = curve_from_predictions("a", 100, &[0.1, 0.2, 0.3], &[(0.1, set.clone()), (0.2, set.clone()), (0.3, set.clone())], &p, CostMode::PerIteration).unwrap();
        let b = curve_from_predictions("b", 100, &[0.2, 0.3], &[(0.2, set.clone()), (0.3, set)], &p, CostMode::PerIteration).unwrap();
        let (a2, b2, notes) = align_grids(&a, &b);
        assert_eq!(a2.fractions(), vec![0.2, 0.3]);
        assert_eq!(b2.fractions(), vec![0.2, 0.3]);
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn sample_sd() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }
}
