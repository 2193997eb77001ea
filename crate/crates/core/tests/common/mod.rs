#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use roiml::classify::ConfusionMatrix;
use roiml::corpus::{clean_text, fraction_schedule, split, DependencyKind, PairCorpus, RequirementPair};
use roiml::roi::{benefit, economic_outcome, f1_score, processing_cost, total_penalty, CostParameters};

pub const PROPERTY_CASES: u32 = 10_000;

/// Outcome of one property suite.
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: u32,
    pub outcome: Result<(), String>,
}

fn run<S: Strategy>(name: &'static str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> SuiteResult
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    SuiteResult {
        name,
        cases: PROPERTY_CASES,
        outcome: runner.run(&strategy, test).map_err(|e| e.to_string()),
    }
}

fn cm_strategy() -> impl Strategy<Value = ConfusionMatrix> {
    (0u64..5_000, 0u64..5_000, 0u64..5_000, 0u64..5_000).prop_map(|(tp, fp, fn_, tn)| ConfusionMatrix { tp, fp, fn_, tn })
}

fn params_strategy() -> impl Strategy<Value = CostParameters> {
    (
        (0.0f64..5.0, 0.0f64..5.0, 0.0f64..5.0, 0.01f64..5.0),
        (0.0f64..1e5, 0.0f64..1e5),
        (1u32..50, 1.0f64..500.0, 0.0f64..1e8),
    )
        .prop_map(|((dg, pp, l, tt), (fp, fn_), (n_hr, c_hr, value))| {
            let mut p = CostParameters::table5_default();
            p.c_dg = dg;
            p.c_pp = pp;
            p.c_l = l;
            p.c_train_test = tt;
            p.cost_fp = fp;
            p.cost_fn = fn_;
            p.n_hr = n_hr;
            p.c_hr = c_hr;
            p.value_prod = value;
            p
        })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// One more false positive or false negative never lowers the penalty or
/// raises the benefit.
pub fn penalty_monotonicity() -> SuiteResult {
    run(
        "penalty monotonicity",
        (cm_strategy(), params_strategy(), any::<bool>()),
        |(cm, p, bump_fp)| {
            let mut worse = cm;
            if bump_fp {
                worse.fp += 1;
            } else {
                worse.fn_ += 1;
            }
            let step = if bump_fp { p.cost_fp } else { p.cost_fn };
            prop_assert!(total_penalty(&worse, &p) >= total_penalty(&cm, &p));
            prop_assert!(benefit(&worse, &p) <= benefit(&cm, &p));
            let (before, after) = (total_penalty(&cm, &p), total_penalty(&worse, &p));
            prop_assert!(((after - before) - step).abs() <= 1e-12 * after.max(1.0));
            Ok(())
        },
    )
}

/// Cost is linear in the number of processed samples (relative 1e-9).
pub fn cost_linearity() -> SuiteResult {
    run(
        "cost linearity",
        (1u64..1_000_000, 1u64..1_000_000, 1u64..20, params_strategy()),
        |(a, b, k, p)| {
            let (ca, cb) = (processing_cost(a, &p).unwrap(), processing_cost(b, &p).unwrap());
            prop_assert!(close(processing_cost(a + b, &p).unwrap(), ca + cb, 1e-9));
            prop_assert!(close(processing_cost(k * a, &p).unwrap(), k as f64 * ca, 1e-9));
            prop_assert!(ca > 0.0);
            Ok(())
        },
    )
}

/// Multiplying every dollar figure by the same factor leaves ROI unchanged.
/// The tolerance is 1e-12 relative to the conditioning `(|B| + C) / C` of
/// the subtraction `B - C`.
pub fn roi_scale_invariance() -> SuiteResult {
    run(
        "ROI scale invariance",
        (cm_strategy(), params_strategy(), 1u64..100_000, 1e-3f64..1e3),
        |(cm, p, n, s)| {
            let mut scaled = p.clone();
            scaled.c_hr *= s;
            scaled.cost_fp *= s;
            scaled.cost_fn *= s;
            scaled.value_prod *= s;
            let base = economic_outcome(n, &cm, &p).unwrap();
            let other = economic_outcome(n, &cm, &scaled).unwrap();
            let conditioning = (base.benefit_usd.abs() + base.cost_usd) / base.cost_usd;
            let tolerance = 1e-12 * conditioning.max(1.0);
            prop_assert!(
                (base.roi - other.roi).abs() <= tolerance * base.roi.abs().max(1.0),
                "roi {} vs {} at scale {}",
                base.roi,
                other.roi,
                s
            );
            Ok(())
        },
    )
}

/// F1 lies in [0, 1] and ignores true negatives.
pub fn f1_bounds() -> SuiteResult {
    run("F1 bounds", (cm_strategy(), 0u64..1_000_000), |(cm, tn)| {
        let f = f1_score(&cm);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert_eq!(f, f1_score(&ConfusionMatrix { tn, ..cm }));
        if cm.tp == 0 {
            prop_assert_eq!(f, 0.0);
        }
        Ok(())
    })
}

/// Balanced corpus of `n` positive and `n` negative pairs.
pub fn balanced_corpus(n: usize) -> PairCorpus {
    let mut pairs = Vec::with_capacity(2 * n);
    for i in 0..n {
        pairs.push(
            RequirementPair::new((&format!("a{i}"), "alpha"), (&format!("b{i}"), "beta"), DependencyKind::Requires)
                .unwrap(),
        );
    }
    for i in 0..n {
        pairs.push(
            RequirementPair::new((&format!("c{i}"), "gamma"), (&format!("d{i}"), "delta"), DependencyKind::None)
                .unwrap(),
        );
    }
    let ids = (0..2 * n).map(|i| format!("p{i}")).collect();
    PairCorpus::from_pairs(pairs, ids).unwrap()
}

/// Splits repeat under a seed, the test set is stratified and disjoint
/// from training, and training subsets are nested with the requested sizes.
pub fn split_determinism_and_nesting() -> SuiteResult {
    run(
        "split determinism and nesting",
        (5usize..200, 0.05f64..0.5, any::<u64>(), proptest::collection::vec(0.01f64..1.0, 1..8)),
        |(n, t, seed, raw)| {
            let corpus = balanced_corpus(n);
            let plan = split(&corpus, t, seed).unwrap();
            prop_assert_eq!(&plan, &split(&corpus, t, seed).unwrap());

            let labels = corpus.labels();
            let test_pos = plan.test_set.iter().filter(|&&i| labels[i]).count();
            let test_neg = plan.test_set.len() - test_pos;
            prop_assert!(test_pos.abs_diff(test_neg) <= 1 || test_pos == n - 1 || test_neg == n - 1);
            let train = plan.train_pool();
            prop_assert!(train.iter().all(|i| plan.test_set.binary_search(i).is_err()));
            prop_assert_eq!(train.len() + plan.test_set.len(), corpus.len());

            let ceiling = 1.0 - t;
            let mut fractions: Vec<f64> = raw.iter().map(|r| r * ceiling).filter(|&f| f > 0.0).collect();
            fractions.sort_by(f64::total_cmp);
            fractions.dedup();
            let schedule = fraction_schedule(&plan, &fractions).unwrap();
            prop_assert_eq!(&schedule, &fraction_schedule(&plan, &fractions).unwrap());
            for w in schedule.windows(2) {
                prop_assert!(w[0].iter().all(|i| w[1].binary_search(i).is_ok()));
            }
            for (subset, &f) in schedule.iter().zip(&fractions) {
                let target = (corpus.len() as f64 * f + 0.5).floor() as usize;
                prop_assert!(subset.len() <= target);
                prop_assert!(subset.iter().all(|i| train.binary_search(i).is_ok()));
            }
            Ok(())
        },
    )
}

/// Cleaning is idempotent and leaves only lowercase letters separated by
/// single spaces.
pub fn clean_text_idempotence() -> SuiteResult {
    run("clean_text idempotence", any::<String>(), |raw| {
        let once = clean_text(&raw);
        prop_assert_eq!(&clean_text(&once), &once);
        prop_assert!(!once.starts_with(' ') && !once.ends_with(' ') && !once.contains("  "));
        prop_assert!(once.chars().all(|c| c == ' ' || c.is_alphabetic()));
        Ok(())
    })
}

pub fn all_suites() -> Vec<SuiteResult> {
    vec![
        penalty_monotonicity(),
        cost_linearity(),
        roi_scale_invariance(),
        f1_bounds(),
        split_determinism_and_nesting(),
        clean_text_idempotence(),
    ]
}
