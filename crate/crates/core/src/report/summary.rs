use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::format::fmt_decimal;
use crate::harness::{Crossover, DecisionSummary, LearningCurve, Leader, ScenarioOutcome};

/// Placeholder for table cells with nothing to report.
pub const EMPTY_CELL: &str = "n/a";

/// A file linked from the summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub label: String,
    pub path: String,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| EMPTY_CELL.to_string(), fmt_decimal)
}

fn crossings(list: &[Crossover], own: &str, rival: &str) -> String {
    if list.is_empty() {
        return "none".into();
    }
    list.iter()
        .map(|c| {
            let leader = match c.leader {
                Leader::A => own,
                Leader::B => rival,
            };
            format!("{} ({leader} leads)", fmt_decimal(c.fraction))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn crossover_cell(d: &DecisionSummary) -> String {
    if d.crossovers.is_empty() {
        return EMPTY_CELL.into();
    }
    d.crossovers
        .iter()
        .map(|r| {
            format!(
                "vs {}: F1 {}; ROI {}",
                r.rival,
                crossings(&r.f1, &d.technique_label, &r.rival),
                crossings(&r.roi, &d.technique_label, &r.rival)
            )
        })
        .collect::<Vec<_>>()
        .join("<br>")
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Markdown report: one section per technique, a comparison table ranked
/// by maximum ROI, a scenario table when scenarios exist, and artifact links.
/// Every number is rendered exactly as in the curve CSV.
pub fn emit_summary(
    techniques: &[(&LearningCurve, &DecisionSummary)],
    scenarios: &[ScenarioOutcome],
    artifacts: &[Artifact],
) -> String {
    let mut out = String::from("# Learning-curve economics\n");
    let w = &mut out;

    for (curve, d) in techniques {
        let _ = writeln!(w, "\n## {}\n", curve.technique_label);
        let _ = writeln!(
            w,
            "- Points: {} (cost mode `{}`)",
            curve.points.len(),
            serde_json::to_value(curve.cost_mode)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default()
        );
        let _ = writeln!(
            w,
            "- Maximum ROI: {} at fraction {} (F1 {})",
            fmt_decimal(d.max_roi.roi),
            fmt_decimal(d.max_roi.fraction),
            fmt_decimal(d.max_roi.f1)
        );
        match d.break_even {
            Some(b) => {
                let _ = writeln!(
                    w,
                    "- Break-even: fraction {} (interpolated {})",
                    fmt_decimal(b.grid),
                    fmt_decimal(b.interpolated)
                );
            }
            None => {
                let _ = writeln!(w, "- Break-even: not reached");
            }
        }
        let _ = writeln!(
            w,
            "- Diminishing returns: F1 at {}, ROI at {}",
            opt(d.diminishing_returns_f1),
            opt(d.diminishing_returns_roi)
        );
        for note in &curve.notes {
            let _ = writeln!(w, "- Note: {note}");
        }
        let _ = writeln!(w, "\n| fraction | n_train | n_test | F1 | cost_usd | penalty_usd | benefit_usd | ROI |");
        let _ = writeln!(w, "|---:|---:|---:|---:|---:|---:|---:|---:|");
        for p in &curve.points {
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                fmt_decimal(p.fraction),
                p.n_train,
                p.n_test,
                fmt_decimal(p.f1),
                fmt_decimal(p.econ.cost_usd),
                fmt_decimal(p.econ.penalty_usd),
                fmt_decimal(p.econ.benefit_usd),
                fmt_decimal(p.econ.roi)
            );
        }
    }

    if !techniques.is_empty() {
        let mut ranked: Vec<&DecisionSummary> = techniques.iter().map(|(_, d)| *d).collect();
        ranked.sort_by(|a, b| {
            b.max_roi
                .roi
                .total_cmp(&a.max_roi.roi)
                .then_with(|| a.technique_label.cmp(&b.technique_label))
        });
        let _ = writeln!(w, "\n## Comparison\n");
        let _ = writeln!(
            w,
            "| Rank | Technique | Max ROI | Fraction at max ROI | F1 at max ROI | Break-even | Crossovers |"
        );
        let _ = writeln!(w, "|---:|---|---:|---:|---:|---:|---|");
        for (i, d) in ranked.iter().enumerate() {
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} | {} | {} | {} |",
                i + 1,
                cell(&d.technique_label),
                fmt_decimal(d.max_roi.roi),
                fmt_decimal(d.max_roi.fraction),
                fmt_decimal(d.max_roi.f1),
                opt(d.break_even.map(|b| b.grid)),
                cell(&crossover_cell(d))
            );
        }
    }

    if !scenarios.is_empty() {
        let _ = writeln!(w, "\n## Scenarios\n");
        let _ = writeln!(
            w,
            "| Scenario | Technique | Max ROI | Fraction at max ROI | F1 at max ROI | Break-even |"
        );
        let _ = writeln!(w, "|---|---|---:|---:|---:|---:|");
        for s in scenarios {
            let d = &s.summary;
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} | {} | {} |",
                cell(&s.name),
                cell(&d.technique_label),
                fmt_decimal(d.max_roi.roi),
                fmt_decimal(d.max_roi.fraction),
                fmt_decimal(d.max_roi.f1),
                opt(d.break_even.map(|b| b.grid))
            );
        }
    }

    if !artifacts.is_empty() {
        let _ = writeln!(w, "\n## Artifacts\n");
        for a in artifacts {
            let _ = writeln!(w, "- [{}]({})", a.label, a.path);
        }
    }
    out
}
