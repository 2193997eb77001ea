//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roiml::classify::{evaluate, ConfusionMatrix, PredictionRow, PredictionSet};
use roiml::corpus::{
    build_corpus, extract_positive_pairs, generate_negative_pairs, DependencyKind, Link, LinkKind, RequirementRecord,
    RequirementSet,
};
use roiml::harness::{
    break_even, crossover, curve_from_counts, max_roi_point, CostMode, CurvePoint, LearningCurve, Leader, Metric,
};
use roiml::report::{curve_from_records, parse_curve_csv};
use roiml::roi::{economic_outcome, f1_score, CostParameters, EconomicOutcome};

const ORACLE_ROI_TOLERANCE: f64 = 1e-6;
const REPLAY_REL_TOLERANCE: f64 = 1e-9;
const DECISION_TOLERANCE: f64 = 1e-9;
const BRUTE_FORCE_LIMIT: Duration = Duration::from_secs(5);
const PROPERTY_LIMIT: Duration = Duration::from_secs(30);
const END_TO_END_LIMIT: Duration = Duration::from_secs(300);
const F1_AT_80_FLOOR: f64 = 0.90;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn economic_oracle() -> Verdict {
    let start = Instant::now();
    let p = CostParameters::table5_default();
    let cm = ConfusionMatrix {
        tp: 495,
        fp: 10,
        fn_: 5,
        tn: 490,
    };
    let got = economic_outcome(1000, &cm, &p).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    // 1.5 + 0.3 minutes per sample, ten people at $70/h.
    let cost = 1000.0 * 1.8 * 10.0 * 70.0 / 60.0;
    let penalty = 10.0 * 10_000.0 + 5.0 * 25_000.0;
    let benefit = 4_000_000.0 - penalty;
    let expected = (21_000.0, 225_000.0, 3_775_000.0, 178.761904);
    if (cost, penalty, benefit) != (expected.0, expected.1, expected.2) {
        return Err(format!("hand oracle inconsistent: {cost} {penalty} {benefit}"));
    }
    let checks = [
        ("cost", got.cost_usd, cost, 1e-9),
        ("penalty", got.penalty_usd, penalty, 1e-9),
        ("benefit", got.benefit_usd, benefit, 1e-9),
        ("roi", got.roi, expected.3, ORACLE_ROI_TOLERANCE),
    ];
    for (name, value, want, tol) in checks {
        if (value - want).abs() > tol {
            return Err(format!("{name} = {value}, expected {want} ± {tol}"));
        }
    }
    Ok(format!(
        "cost ${} penalty ${} benefit ${} ROI {:.6} in {:?}",
        got.cost_usd, got.penalty_usd, got.benefit_usd, got.roi, elapsed
    ))
}

fn confusion_brute_force() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1A5);
    for set_no in 0..1000 {
        let len = rng.gen_range(1..=200);
        let truth: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
        let predicted: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
        let rows = (0..len)
            .map(|i| PredictionRow {
                pair_id: format!("p{i}"),
                true_label: Some(truth[i]),
                predicted_label: predicted[i],
                score: None,
            })
            .collect();
        let set = PredictionSet::new(rows).map_err(|e| e.to_string())?;
        let cm = evaluate(&set).map_err(|e| e.to_string())?;

        let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
        for i in 0..len {
            match (truth[i], predicted[i]) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
        if (cm.tp, cm.fp, cm.fn_, cm.tn) != (tp, fp, fn_, tn) {
            return Err(format!("set {set_no}: {cm:?} vs naive ({tp}, {fp}, {fn_}, {tn})"));
        }
        let naive_f1 = if tp == 0 { 0.0 } else { (2 * tp) as f64 / (2 * tp + fp + fn_) as f64 };
        if f1_score(&cm) != naive_f1 {
            return Err(format!("set {set_no}: F1 {} vs naive {naive_f1}", f1_score(&cm)));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > BRUTE_FORCE_LIMIT {
        return Err(format!("took {elapsed:?}, limit {BRUTE_FORCE_LIMIT:?}"));
    }
    Ok(format!("1000 sets match exactly in {elapsed:?}"))
}

/// Corpus built from a requirement set whose links yield `positives`
/// dependent pairs.
fn corpus_size_for(positives: usize) -> Result<(usize, usize, usize), String> {
    let records = (0..2 * positives)
        .map(|i| RequirementRecord {
            id: format!("R{i}"),
            text: format!("requirement number {i}"),
            links: if i % 2 == 0 {
                vec![Link {
                    kind: LinkKind::DependsOn,
                    target: format!("R{}", i + 1),
                }]
            } else {
                Vec::new()
            },
        })
        .collect();
    let set = RequirementSet::new("counts", records).map_err(|e| e.to_string())?;
    let pos = extract_positive_pairs(&set, DependencyKind::Requires).pairs;
    let neg = generate_negative_pairs(&set, &pos, pos.len(), 7).map_err(|e| e.to_string())?;
    let corpus = build_corpus(&pos, &neg, 8).map_err(|e| e.to_string())?;
    Ok((corpus.len(), corpus.positives_count(), corpus.negatives_count()))
}

fn corpus_counts() -> Verdict {
    let mut lines = Vec::new();
    for (positives, want) in [(3773, 7546), (1324, 2648)] {
        let (n, pos, neg) = corpus_size_for(positives)?;
        if n != want || pos != neg {
            return Err(format!("{positives} positives gave N = {n} ({pos}/{neg}), expected {want}"));
        }
        lines.push(format!("{positives} -> {n}"));
    }
    Ok(lines.join(", "))
}

fn property_suites() -> Verdict {
    let start = Instant::now();
    let results = common::all_suites();
    let elapsed = start.elapsed();
    let failed: Vec<String> = results
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| format!("{}: {e}", r.name)))
        .collect();
    if !failed.is_empty() {
        return Err(failed.join("; "));
    }
    if elapsed > PROPERTY_LIMIT {
        return Err(format!("took {elapsed:?}, limit {PROPERTY_LIMIT:?}"));
    }
    let names: Vec<&str> = results.iter().map(|r| r.name).collect();
    Ok(format!(
        "{} suites x {} cases in {elapsed:?} ({})",
        results.len(),
        common::PROPERTY_CASES,
        names.join(", ")
    ))
}

fn roi_curve(fractions: &[f64], roi: &[f64]) -> LearningCurve {
    LearningCurve {
        technique_label: "hand".into(),
        points: fractions
            .iter()
            .zip(roi)
            .map(|(&fraction, &roi)| CurvePoint {
                fraction,
                n_train: 1,
                n_test: 1,
                cm: ConfusionMatrix::default(),
                f1: 0.0,
                econ: EconomicOutcome {
                    n_processed: 2,
                    cost_usd: 1.0,
                    penalty_usd: 0.0,
                    benefit_usd: roi + 1.0,
                    roi,
                },
            })
            .collect(),
        seed: 0,
        parameters: CostParameters::table5_default(),
        cost_mode: CostMode::PerIteration,
        model: None,
        notes: Vec::new(),
    }
}

fn decision_rules() -> Verdict {
    let curve = roi_curve(&[0.1, 0.2, 0.3, 0.4, 0.5], &[-5.0, -1.0, 2.0, 30.0, 28.0]);
    let be = break_even(&curve).ok_or("no break-even found")?;
    // Linear crossing between (0.2, -1) and (0.3, 2).
    let interpolated = 0.2 + 0.1 * (1.0 / 3.0);
    if be.grid != 0.3 || (be.interpolated - interpolated).abs() > DECISION_TOLERANCE {
        return Err(format!("break-even {be:?}, expected grid 0.3, interpolated {interpolated}"));
    }
    let max = max_roi_point(&curve).map_err(|e| e.to_string())?;
    if (max.fraction, max.roi) != (0.4, 30.0) {
        return Err(format!("max ROI {max:?}, expected (0.4, 30)"));
    }
    let a = roi_curve(&[0.1, 0.2, 0.3], &[1.0, 2.0, 3.0]);
    let b = roi_curve(&[0.1, 0.2, 0.3], &[2.0, 2.0, 2.0]);
    let cross = crossover(&a, &b, Metric::Roi).map_err(|e| e.to_string())?;
    if cross.len() != 1 || cross[0].fraction != 0.3 || cross[0].leader != Leader::A {
        return Err(format!("crossovers {cross:?}, expected {{0.3}}"));
    }
    Ok(format!(
        "break-even 0.3 (interpolated {:.4}), max ROI (0.4, 30), crossover {{0.3}}",
        be.interpolated
    ))
}

fn run_report(config: &Path, out: &Path) -> Result<Duration, String> {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_roiml"))
        .args(["report", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("ROIML_LOG", "error")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("report exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    Ok(start.elapsed())
}

fn tree(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name != "manifest.json" {
            files.insert(name, fs::read(entry.path()).map_err(|e| e.to_string())?);
        }
    }
    Ok(files)
}

fn end_to_end() -> Verdict {
    let config = repo_root().join("configs/synthetic-desk-scale.json");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run_report(&config, &a)?;
    if first > END_TO_END_LIMIT {
        return Err(format!("report took {first:?}, limit {END_TO_END_LIMIT:?}"));
    }
    let second = run_report(&config, &b)?;

    let (ta, tb) = (tree(&a)?, tree(&b)?);
    if ta.keys().ne(tb.keys()) {
        return Err("reruns produced different file sets".into());
    }
    if let Some(name) = ta.keys().find(|k| ta[*k] != tb[*k]) {
        return Err(format!("rerun differs in {name}"));
    }

    let records = parse_curve_csv(&ta["rf.curve.csv"][..]).map_err(|e| e.to_string())?;
    let last = records.last().ok_or("empty curve")?;
    if (last.fraction - 0.8).abs() > 1e-12 || records.len() != 16 {
        return Err(format!("curve has {} points ending at {}", records.len(), last.fraction));
    }
    let f1_80 = f1_score(&last.cm);
    if f1_80 < F1_AT_80_FLOOR {
        return Err(format!("F1 at 80% is {f1_80:.4} < {F1_AT_80_FLOOR}"));
    }
    let roi: Vec<f64> = records.iter().map(|r| r.derived.expect("full curve CSV")[6]).collect();
    let (imax, rmax) = roi
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &r)| if r > best.1 { (i, r) } else { best });
    if imax == 0 || imax == roi.len() - 1 || rmax <= roi[0] || rmax <= roi[roi.len() - 1] {
        return Err(format!("ROI maximum {rmax} at index {imax} is not interior"));
    }
    Ok(format!(
        "{} files identical across reruns; runs {:.1}s / {:.1}s; F1@80% {:.4}; ROI peaks at {} ({:.4}) vs {:.4} at 80%",
        ta.len(),
        first.as_secs_f64(),
        second.as_secs_f64(),
        f1_80,
        records[imax].fraction,
        rmax,
        roi[roi.len() - 1]
    ))
}

fn load_expected(name: &str) -> Result<Vec<[f64; 6]>, String> {
    let text = fs::read_to_string(fixtures().join(name)).map_err(|e| e.to_string())?;
    text.lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|c| c.parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
            v.try_into().map_err(|_| format!("bad row `{line}`"))
        })
        .collect()
}

fn replay(name: &str, label: &str) -> Result<LearningCurve, String> {
    let file = fs::File::open(fixtures().join(format!("transcribed_{name}.csv"))).map_err(|e| e.to_string())?;
    let records = parse_curve_csv(file).map_err(|e| e.to_string())?;
    let curve = curve_from_records(label, &records, &CostParameters::table5_default(), CostMode::PerIteration)
        .map_err(|e| e.to_string())?;
    let expected = load_expected(&format!("expected_{name}.csv"))?;
    if expected.len() != curve.points.len() {
        return Err(format!("{label}: {} points vs {} expected", curve.points.len(), expected.len()));
    }
    for (p, e) in curve.points.iter().zip(&expected) {
        let got = [p.fraction, p.f1, p.econ.cost_usd, p.econ.penalty_usd, p.econ.benefit_usd, p.econ.roi];
        for (g, w) in got.iter().zip(e) {
            if !rel_close(*g, *w, REPLAY_REL_TOLERANCE) {
                return Err(format!("{label} at {}: {g} vs reported {w}", p.fraction));
            }
        }
    }
    Ok(curve)
}

fn reported_results_replay() -> Verdict {
    let rf = replay("rf", "RF")?;
    let bert = replay("rdc_bert", "RDC-BERT")?;
    // Sanity: the fixtures are consistent with a direct counts-based build.
    let rows: Vec<_> = rf.points.iter().map(|p| (p.fraction, p.n_train, p.n_test, p.cm)).collect();
    let direct = curve_from_counts("RF", &rows, &CostParameters::table5_default(), CostMode::PerIteration)
        .map_err(|e| e.to_string())?;
    if direct.points != rf.points {
        return Err("CSV replay differs from counts-based curve".into());
    }
    let mut found = Vec::new();
    for metric in [Metric::F1, Metric::Roi] {
        let cross = crossover(&rf, &bert, metric).map_err(|e| e.to_string())?;
        let Some(last) = cross.last() else {
            return Err(format!("no {} crossover detected", metric.name()));
        };
        if last.leader != Leader::B || last.fraction <= 0.4 {
            return Err(format!("{} crossovers {cross:?}: RDC-BERT does not overtake beyond 0.4", metric.name()));
        }
        found.push(format!("{} at {}", metric.name(), last.fraction));
    }
    let bert_max = max_roi_point(&bert).map_err(|e| e.to_string())?;
    Ok(format!(
        "headline values (ROI 30 @ F1 0.87, 73.5 @ 0.86) not reproducible without the unpublished data; \
         replay matches reported economics to {REPLAY_REL_TOLERANCE:e} rel; RDC-BERT overtakes RF ({}); \
         replayed RDC-BERT max ROI {:.4} at {}",
        found.join(", "),
        bert_max.roi,
        bert_max.fraction
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("economic-oracle", economic_oracle),
        ("confusion-f1-brute-force", confusion_brute_force),
        ("corpus-counts", corpus_counts),
        ("property-suites", property_suites),
        ("decision-rules", decision_rules),
        ("end-to-end-synthetic", end_to_end),
        ("reported-results-replay", reported_results_replay),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
