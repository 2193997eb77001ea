use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use super::config::{fraction_from_file_name, DatasetConfig, Resolved};
use super::output::{sha256_hex, OutputDir};
use crate::classify::{load_external_predictions, PredictionSet};
use crate::corpus::{
    build_corpus, extract_positive_pairs, filter_short, fraction_schedule, generate_negative_pairs,
    parse_issue_export, read_corpus_csv, schedule_csv, split, split_csv, synthetic, write_corpus_csv, Ingested,
    PairCorpus, SplitPlan, SplitSidecar,
};
use crate::error::{Error, Result};
use crate::format::fmt_decimal;
use crate::harness::{
    align_grids, crossover, run_curve, same_fraction, scenario_analysis, summarize, CurveSetup, DecisionSummary,
    LearningCurve, Metric, ScenarioOutcome, Trainer,
};
use crate::report::{emit_curve_csv, emit_summary, f1_chart, f1_roi_chart, render_chart, roi_chart, Artifact};
use crate::rng::derive_seed;

/// Sub-seed streams derived from the run seed.
pub const STREAM_NEGATIVES: u64 = 0x4E_4547;
pub const STREAM_CORPUS_ORDER: u64 = 0x4F_5244;

/// A failure before any work started (exit 1) or during it (exit 2).
#[derive(Debug)]
pub enum Failure {
    Validation(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

pub type Outcome = std::result::Result<(), Failure>;

fn invalid(field: &str, message: impl Into<String>) -> Failure {
    Failure::Validation(Error::config(field, message))
}

fn read(path: &PathBuf) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn source_label(path: &std::path::Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn ingest(r: &Resolved) -> std::result::Result<Ingested, Failure> {
    let DatasetConfig::Issues { path, schema, .. } = &r.config.dataset else {
        return Err(invalid("dataset.source", "`ingest` needs an `issues` dataset"));
    };
    Ok(parse_issue_export(read(path)?.as_slice(), schema, &source_label(path))?)
}

/// The pair corpus the run works on, however the dataset is given.
pub fn load_corpus(r: &Resolved) -> Result<PairCorpus> {
    match &r.config.dataset {
        DatasetConfig::Issues {
            path,
            schema,
            dependency_kind,
            min_words,
        } => {
            let ingested = parse_issue_export(read(path)?.as_slice(), schema, &source_label(path))?;
            let filtered = filter_short(&ingested.set, *min_words);
            let positives = extract_positive_pairs(&filtered.set, *dependency_kind).pairs;
            let negatives = generate_negative_pairs(
                &filtered.set,
                &positives,
                positives.len(),
                derive_seed(r.seed, STREAM_NEGATIVES),
            )?;
            build_corpus(&positives, &negatives, derive_seed(r.seed, STREAM_CORPUS_ORDER))
        }
        DatasetConfig::Corpus { path } => read_corpus_csv(read(path)?.as_slice()),
        DatasetConfig::Synthetic { spec } => synthetic::generate(spec),
    }
}

/// Prediction sets keyed by fraction, plus notes about skipped files.
pub type ExternalPredictions = (Vec<(f64, PredictionSet)>, Vec<String>);

/// Prediction files matched by `pattern`, keyed by the fraction in their names.
pub fn load_external(pattern: &str) -> Result<ExternalPredictions> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| Error::config("external.predictions", e.to_string()))?
        .filter_map(std::result::Result::ok)
        .collect();
    paths.sort();
    let mut entries: Vec<(f64, PredictionSet)> = Vec::new();
    let mut notes = Vec::new();
    for path in paths {
        let Some(fraction) = fraction_from_file_name(&path) else {
            notes.push(format!("{}: no fraction in file name, skipped", path.display()));
            continue;
        };
        if entries.iter().any(|(f, _)| same_fraction(*f, fraction)) {
            return Err(Error::Harness(format!(
                "two prediction files for fraction {}",
                fmt_decimal(fraction)
            )));
        }
        let set = load_external_predictions(read(&path)?.as_slice())
            .map_err(|e| Error::Harness(format!("{}: {e}", path.display())))?;
        entries.push((fraction, set));
    }
    if entries.is_empty() {
        return Err(Error::Harness(format!("no prediction files match `{pattern}`")));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok((entries, notes))
}

struct Experiment {
    corpus: PairCorpus,
    plan: SplitPlan,
    curves: Vec<LearningCurve>,
}

fn run_experiment(r: &Resolved) -> Result<Experiment> {
    let corpus = load_corpus(r)?;
    let plan = split(&corpus, r.config.sampling.test_fraction, r.seed)?;
    let fractions = &r.config.sampling.fractions;
    let mut curves = Vec::new();
    let setup = |label: String, trainer: &Trainer| {
        run_curve(&CurveSetup {
            label,
            corpus: &corpus,
            plan: &plan,
            fractions,
            trainer,
            parameters: &r.parameters,
            cost_mode: r.config.economics.cost_mode,
        })
    };
    if let Some(spec) = &r.config.classifier {
        log::info!("running built-in {} curve over {} fractions", spec.label(), fractions.len());
        curves.push(setup(spec.label().to_string(), &Trainer::BuiltIn(spec.clone()))?);
    }
    for ext in &r.config.external {
        let (entries, mut notes) = load_external(&ext.predictions)?;
        for (f, _) in &entries {
            if !fractions.iter().any(|g| same_fraction(*f, *g)) {
                notes.push(format!("predictions for fraction {} are off the grid and were ignored", fmt_decimal(*f)));
            }
        }
        let mut curve = setup(ext.label.clone(), &Trainer::External(entries))?;
        notes.append(&mut curve.notes);
        curve.notes = notes;
        curves.push(curve);
    }
    if curves.iter().any(|c| c.technique_label.is_empty()) || has_duplicate_labels(&curves) {
        return Err(Error::Harness("technique labels must be unique and nonempty".into()));
    }
    Ok(Experiment { corpus, plan, curves })
}

fn has_duplicate_labels(curves: &[LearningCurve]) -> bool {
    curves
        .iter()
        .enumerate()
        .any(|(i, c)| curves[..i].iter().any(|d| d.technique_label == c.technique_label))
}

/// File-name form of a technique label.
pub fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    s.trim_matches('-').to_string()
}

/// Decisions for every curve, with crossovers against every other curve on
/// the shared part of the grid.
fn decide(r: &Resolved, curves: &[LearningCurve]) -> Result<(Vec<DecisionSummary>, Vec<String>)> {
    let (eps_f1, eps_roi) = (r.config.economics.epsilon_f1, r.config.economics.epsilon_roi);
    let mut out = Vec::new();
    let mut notes = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let mut d = summarize(c, &[], eps_f1, eps_roi)?;
        for (j, rival) in curves.iter().enumerate() {
            if i == j {
                continue;
            }
            let (a, b, mut n) = align_grids(c, rival);
            if i < j {
                notes.append(&mut n);
            }
            if a.points.is_empty() {
                notes.push(format!("{} and {} share no fractions", c.technique_label, rival.technique_label));
                continue;
            }
            d.crossovers.extend(summarize(&a, &[&b], eps_f1, eps_roi)?.crossovers);
        }
        out.push(d);
    }
    Ok((out, notes))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_path: String,
    config_sha256: String,
    seed: u64,
    derived_seeds: serde_json::Value,
    effective_config: &'a super::config::RunConfig,
    files: &'a [super::output::FileRecord],
}

fn finish(r: &Resolved, command: &str, out: &mut OutputDir) -> Result<()> {
    let files = out.files().to_vec();
    let manifest = Manifest {
        tool: "roiml",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config_path: r.config_path.display().to_string(),
        config_sha256: sha256_hex(&r.config_bytes),
        seed: r.seed,
        derived_seeds: serde_json::json!({
            "split": r.seed,
            "negatives": derive_seed(r.seed, STREAM_NEGATIVES),
            "corpus_order": derive_seed(r.seed, STREAM_CORPUS_ORDER),
        }),
        effective_config: &r.config,
        files: &files,
    };
    out.write_json("manifest.json", &manifest)
}

fn write_curves(out: &mut OutputDir, curves: &[LearningCurve], decisions: &[DecisionSummary]) -> Result<Vec<Artifact>> {
    let mut artifacts = Vec::new();
    for (c, d) in curves.iter().zip(decisions) {
        let s = slug(&c.technique_label);
        out.write(&format!("{s}.curve.csv"), emit_curve_csv(c).as_bytes())?;
        out.write_json(&format!("{s}.curve.json"), c)?;
        out.write_json(&format!("{s}.decisions.json"), d)?;
        artifacts.push(Artifact {
            label: format!("{} curve (CSV)", c.technique_label),
            path: format!("{s}.curve.csv"),
        });
    }
    Ok(artifacts)
}

fn write_chart(out: &mut OutputDir, name: &str, spec: &crate::report::ChartSpec, label: &str) -> Result<Artifact> {
    out.write(name, render_chart(spec)?.as_bytes())?;
    Ok(Artifact {
        label: label.into(),
        path: name.into(),
    })
}

fn scenarios_for(r: &Resolved, curves: &[LearningCurve]) -> Result<Vec<ScenarioOutcome>> {
    let mut all = Vec::new();
    for c in curves {
        all.extend(scenario_analysis(c, &r.scenarios, r.config.economics.epsilon_f1, r.config.economics.epsilon_roi)?);
    }
    Ok(all)
}

fn scenario_markdown(outcomes: &[ScenarioOutcome]) -> String {
    let mut s = String::from("| Scenario | Technique | Max ROI | Fraction at max ROI | F1 at max ROI | Break-even |\n|---|---|---:|---:|---:|---:|\n");
    for o in outcomes {
        let d = &o.summary;
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            o.name,
            d.technique_label,
            fmt_decimal(d.max_roi.roi),
            fmt_decimal(d.max_roi.fraction),
            fmt_decimal(d.max_roi.f1),
            d.break_even.map_or_else(|| crate::report::EMPTY_CELL.to_string(), |b| fmt_decimal(b.grid))
        ));
    }
    s
}

#[derive(Serialize)]
struct PairComparison {
    a: String,
    b: String,
    fractions: Vec<f64>,
    f1: Vec<crate::harness::Crossover>,
    roi: Vec<crate::harness::Crossover>,
    notes: Vec<String>,
}

pub fn validate_config(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    let p = &r.parameters;
    let mut lines = vec![
        format!("config ok: {}", r.config_path.display()),
        format!("seed={}", r.seed),
        format!("test_fraction={}", fmt_decimal(r.config.sampling.test_fraction)),
        format!(
            "fractions={}",
            r.config.sampling.fractions.iter().map(|f| fmt_decimal(*f)).collect::<Vec<_>>().join(",")
        ),
        format!("cost_fn={}", fmt_decimal(p.cost_fn)),
        format!("cost_fp={}", fmt_decimal(p.cost_fp)),
        format!("value_prod={}", fmt_decimal(p.value_prod)),
        format!("c_hr={}", fmt_decimal(p.c_hr)),
        format!("n_hr={}", p.n_hr),
        format!("minutes_per_sample={}", fmt_decimal(p.minutes_per_sample())),
        format!("cost_mode={}", serde_json::to_value(r.config.economics.cost_mode).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()),
    ];
    for s in &r.scenarios {
        lines.push(format!("scenario={}", s.name));
    }
    for a in p.advisories() {
        lines.push(format!("advisory: {a}"));
    }
    for line in lines {
        writeln!(stdout, "{line}").map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

pub fn run_ingest(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    let ingested = ingest(r)?;
    let mut out = OutputDir::new(&r.output)?;
    out.write_json("requirements.json", &ingested)?;
    finish(r, "ingest", &mut out)?;
    writeln!(
        stdout,
        "ingested {} requirements ({} without description, {} without id)",
        ingested.set.len(),
        ingested.skipped_empty_description,
        ingested.skipped_missing_id
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    Ok(())
}

pub fn run_pairs(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    let corpus = load_corpus(r)?;
    let plan = split(&corpus, r.config.sampling.test_fraction, r.seed)?;
    let fractions = &r.config.sampling.fractions;
    let schedule = fraction_schedule(&plan, fractions)?;
    let mut out = OutputDir::new(&r.output)?;
    out.write("corpus.csv", write_corpus_csv(&corpus).as_bytes())?;
    out.write("split.csv", split_csv(&plan).as_bytes())?;
    out.write("schedule.csv", schedule_csv(fractions, &schedule).as_bytes())?;
    out.write_json("split.json", &SplitSidecar::new(&plan, fractions, &schedule))?;
    finish(r, "pairs", &mut out)?;
    writeln!(
        stdout,
        "{} pairs ({} dependent), {} held out for testing",
        corpus.len(),
        corpus.positives_count(),
        plan.test_set.len()
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    Ok(())
}

pub fn run_curve_command(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    let exp = run_experiment(r)?;
    let (decisions, _) = decide(r, &exp.curves)?;
    let mut out = OutputDir::new(&r.output)?;
    write_curves(&mut out, &exp.curves, &decisions)?;
    finish(r, "curve", &mut out)?;
    for d in &decisions {
        writeln!(
            stdout,
            "{}: max ROI {} at fraction {} (F1 {}) over {} pairs",
            d.technique_label,
            fmt_decimal(d.max_roi.roi),
            fmt_decimal(d.max_roi.fraction),
            fmt_decimal(d.max_roi.f1),
            exp.corpus.len()
        )
        .map_err(|e| Error::io("<stdout>", e))?;
    }
    log::debug!("test set of {} pairs", exp.plan.test_set.len());
    Ok(())
}

pub fn run_compare(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    let techniques = usize::from(r.config.classifier.is_some()) + r.config.external.len();
    if techniques < 2 {
        return Err(invalid("external", "`compare` needs at least two techniques"));
    }
    let exp = run_experiment(r)?;
    let mut comparisons = Vec::new();
    for i in 0..exp.curves.len() {
        for j in i + 1..exp.curves.len() {
            let (a, b, notes) = align_grids(&exp.curves[i], &exp.curves[j]);
            comparisons.push(PairComparison {
                a: a.technique_label.clone(),
                b: b.technique_label.clone(),
                fractions: a.fractions(),
                f1: crossover(&a, &b, Metric::F1)?,
                roi: crossover(&a, &b, Metric::Roi)?,
                notes,
            });
        }
    }
    let mut out = OutputDir::new(&r.output)?;
    out.write_json("crossovers.json", &comparisons)?;
    let refs: Vec<&LearningCurve> = exp.curves.iter().collect();
    write_chart(&mut out, "f1_overlay.svg", &f1_chart(&refs), "F1 overlay")?;
    write_chart(&mut out, "roi_overlay.svg", &roi_chart(&refs), "ROI overlay")?;
    finish(r, "compare", &mut out)?;
    for c in &comparisons {
        let list = |x: &[crate::harness::Crossover]| {
            if x.is_empty() {
                "none".to_string()
            } else {
                x.iter().map(|c| fmt_decimal(c.fraction)).collect::<Vec<_>>().join(",")
            }
        };
        writeln!(stdout, "{} vs {}: F1 crossovers {}; ROI crossovers {}", c.a, c.b, list(&c.f1), list(&c.roi))
            .map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

pub fn run_scenario(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    if r.scenarios.is_empty() {
        return Err(invalid("economics.scenarios", "`scenario` needs at least one scenario"));
    }
    let exp = run_experiment(r)?;
    let outcomes = scenarios_for(r, &exp.curves)?;
    let table = scenario_markdown(&outcomes);
    let mut out = OutputDir::new(&r.output)?;
    let summaries: Vec<_> = outcomes
        .iter()
        .map(|o| serde_json::json!({ "scenario": o.name, "summary": o.summary }))
        .collect();
    out.write_json("scenarios.json", &summaries)?;
    out.write("scenarios.md", table.as_bytes())?;
    finish(r, "scenario", &mut out)?;
    stdout.write_all(table.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
    Ok(())
}

pub fn run_report(r: &Resolved, stdout: &mut dyn Write) -> Outcome {
    let exp = run_experiment(r)?;
    let (decisions, notes) = decide(r, &exp.curves)?;
    let outcomes = if r.scenarios.is_empty() {
        Vec::new()
    } else {
        scenarios_for(r, &exp.curves)?
    };
    let mut out = OutputDir::new(&r.output)?;
    let mut artifacts = write_curves(&mut out, &exp.curves, &decisions)?;
    let refs: Vec<&LearningCurve> = exp.curves.iter().collect();
    artifacts.push(write_chart(&mut out, "f1.svg", &f1_chart(&refs), "F1 vs training size")?);
    artifacts.push(write_chart(&mut out, "roi.svg", &roi_chart(&refs), "ROI vs training size")?);
    for c in &exp.curves {
        let name = format!("{}.f1_roi.svg", slug(&c.technique_label));
        artifacts.push(write_chart(&mut out, &name, &f1_roi_chart(c), &format!("F1 vs ROI of {}", c.technique_label))?);
    }
    if !outcomes.is_empty() {
        let summaries: Vec<_> = outcomes
            .iter()
            .map(|o| serde_json::json!({ "scenario": o.name, "summary": o.summary }))
            .collect();
        out.write_json("scenarios.json", &summaries)?;
        artifacts.push(Artifact {
            label: "Scenario decisions (JSON)".into(),
            path: "scenarios.json".into(),
        });
    }
    let pairs: Vec<(&LearningCurve, &DecisionSummary)> = exp.curves.iter().zip(&decisions).collect();
    let mut md = emit_summary(&pairs, &outcomes, &artifacts);
    for n in notes {
        md.push_str(&format!("\n> {n}\n"));
    }
    out.write("summary.md", md.as_bytes())?;
    finish(r, "report", &mut out)?;
    writeln!(stdout, "report written to {}", out.root().join("summary.md").display())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(())
}
