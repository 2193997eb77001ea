use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_decimal;
use crate::harness::LearningCurve;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT_SINGLE: f64 = 30.0;
const MARGIN_RIGHT_DUAL: f64 = 80.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    pub unit: String,
}

impl Axis {
    pub fn new(label: &str, unit: &str) -> Self {
        Axis {
            label: label.into(),
            unit: unit.into(),
        }
    }

    fn title(&self) -> String {
        if self.unit.is_empty() {
            self.label.clone()
        } else {
            format!("{} ({})", self.label, self.unit)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Right-hand axis and the series plotted against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondAxis {
    pub axis: Axis,
    pub series: Vec<Series>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub title: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub series: Vec<Series>,
    pub y2: Option<SecondAxis>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    /// Span of all values widened by 5% on each side.
    fn covering<'a>(values: impl Iterator<Item = &'a f64>) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi == lo {
            let half = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
            return Some(Range { lo: lo - half, hi: hi + half });
        }
        let pad = (hi - lo) * 0.05;
        Some(Range { lo: lo - pad, hi: hi + pad })
    }

    fn map(&self, v: f64, a: f64, b: f64) -> f64 {
        a + (v - self.lo) / (self.hi - self.lo) * (b - a)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=TICKS)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / TICKS as f64)
            .collect()
    }
}

fn tick_label(v: f64, range: Range) -> String {
    let step = (range.hi - range.lo) / TICKS as f64;
    let decimals = (2 - step.log10().floor() as i32).clamp(0, 6) as usize;
    let rounded = format!("{v:.decimals$}");
    fmt_decimal(rounded.parse().expect("formatted float"))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn validate(series: &[Series]) -> Result<()> {
    for s in series {
        if s.points.is_empty() {
            return Err(Error::Chart(format!("series `{}` has no points", s.label)));
        }
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Chart(format!("series `{}` has non-finite values", s.label)));
        }
        if s.points.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::Chart(format!("series `{}` x values are not ascending", s.label)));
        }
    }
    Ok(())
}

/// Standalone SVG 1.1 line chart on a fixed 800×500 canvas.
pub fn render_chart(spec: &ChartSpec) -> Result<String> {
    if spec.series.is_empty() {
        return Err(Error::Chart(format!("chart `{}` has no series", spec.title)));
    }
    validate(&spec.series)?;
    let right_series: &[Series] = spec.y2.as_ref().map_or(&[], |y2| &y2.series);
    validate(right_series)?;

    let all = || spec.series.iter().chain(right_series);
    let x_range = Range::covering(all().flat_map(|s| s.points.iter().map(|p| &p.0))).expect("validated non-empty");
    let y_range = Range::covering(spec.series.iter().flat_map(|s| s.points.iter().map(|p| &p.1))).expect("non-empty");
    let y2_range = Range::covering(right_series.iter().flat_map(|s| s.points.iter().map(|p| &p.1)));

    let right_margin = if spec.y2.is_some() { MARGIN_RIGHT_DUAL } else { MARGIN_RIGHT_SINGLE };
    let (left, right) = (MARGIN_LEFT, WIDTH - right_margin);
    let (top, bottom) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="500" viewBox="0 0 800 500" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r##"<rect x="0" y="0" width="800" height="500" fill="#ffffff"/>"##);
    let _ = writeln!(
        w,
        r#"<text x="400" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        escape(&spec.title)
    );
    let _ = writeln!(
        w,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333333"/>"##,
        px(left),
        px(top),
        px(right - left),
        px(bottom - top)
    );

    for t in x_range.ticks() {
        let x = x_range.map(t, left, right);
        let _ = writeln!(
            w,
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333333"/><text x="{0}" y="{3}" text-anchor="middle">{4}</text>"##,
            px(x),
            px(bottom),
            px(bottom + 5.0),
            px(bottom + 20.0),
            tick_label(t, x_range)
        );
    }
    for t in y_range.ticks() {
        let y = y_range.map(t, bottom, top);
        let _ = writeln!(
            w,
            r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#333333"/><text x="{3}" y="{4}" text-anchor="end">{5}</text>"##,
            px(left - 5.0),
            px(left),
            px(y),
            px(left - 8.0),
            px(y + 4.0),
            tick_label(t, y_range)
        );
    }
    if let Some(r2) = y2_range {
        for t in r2.ticks() {
            let y = r2.map(t, bottom, top);
            let _ = writeln!(
                w,
                r##"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#333333"/><text x="{3}" y="{4}" text-anchor="start">{5}</text>"##,
                px(right),
                px(right + 5.0),
                px(y),
                px(right + 8.0),
                px(y + 4.0),
                tick_label(t, r2)
            );
        }
    }

    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        px((left + right) / 2.0),
        px(HEIGHT - 15.0),
        escape(&spec.x_axis.title())
    );
    let mid_y = (top + bottom) / 2.0;
    let _ = writeln!(
        w,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        px(mid_y),
        escape(&spec.y_axis.title())
    );
    if let Some(y2) = &spec.y2 {
        let _ = writeln!(
            w,
            r#"<text x="{0}" y="{1}" text-anchor="middle" transform="rotate(90 {0} {1})">{2}</text>"#,
            px(WIDTH - 20.0),
            px(mid_y),
            escape(&y2.axis.title())
        );
    }

    let plotted = spec
        .series
        .iter()
        .map(|s| (s, y_range, false))
        .chain(right_series.iter().map(|s| (s, y2_range.expect("right series present"), true)));
    for (i, (s, yr, dashed)) in plotted.enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|&(x, y)| (x_range.map(x, left, right), yr.map(y, bottom, top)))
            .collect();
        if coords.len() > 1 {
            let pts: Vec<String> = coords.iter().map(|(x, y)| format!("{},{}", px(*x), px(*y))).collect();
            let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
                pts.join(" ")
            );
        }
        for (x, y) in &coords {
            let _ = writeln!(w, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, px(*x), px(*y));
        }
        let ly = top + 15.0 + 18.0 * i as f64;
        let lx = left + 12.0;
        let _ = writeln!(
            w,
            r#"<g class="legend"><rect x="{}" y="{}" width="14" height="4" fill="{color}"/><text x="{}" y="{}">{}</text></g>"#,
            px(lx),
            px(ly - 4.0),
            px(lx + 20.0),
            px(ly + 1.0),
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn percent(points: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    points.map(|(f, y)| (f * 100.0, y)).collect()
}

fn fraction_axis() -> Axis {
    Axis::new("Training set size", "% of corpus")
}

/// One series per curve of a metric against training size.
fn metric_chart(title: &str, axis: Axis, curves: &[&LearningCurve], pick: fn(&crate::harness::CurvePoint) -> f64) -> ChartSpec {
    ChartSpec {
        title: title.into(),
        x_axis: fraction_axis(),
        y_axis: axis,
        series: curves
            .iter()
            .map(|c| Series {
                label: c.technique_label.clone(),
                points: percent(c.points.iter().map(|p| (p.fraction, pick(p)))),
            })
            .collect(),
        y2: None,
    }
}

pub fn f1_chart(curves: &[&LearningCurve]) -> ChartSpec {
    let names: Vec<&str> = curves.iter().map(|c| c.technique_label.as_str()).collect();
    metric_chart(&format!("F1 of {}", names.join(" vs ")), Axis::new("F1", ""), curves, |p| p.f1)
}

pub fn roi_chart(curves: &[&LearningCurve]) -> ChartSpec {
    let names: Vec<&str> = curves.iter().map(|c| c.technique_label.as_str()).collect();
    metric_chart(&format!("ROI of {}", names.join(" vs ")), Axis::new("ROI", ""), curves, |p| p.econ.roi)
}

/// F1 on the left axis and ROI on the right, both against training size.
pub fn f1_roi_chart(curve: &LearningCurve) -> ChartSpec {
    let label = &curve.technique_label;
    ChartSpec {
        title: format!("F1 vs ROI of {label}"),
        x_axis: fraction_axis(),
        y_axis: Axis::new("F1", ""),
        series: vec![Series {
            label: format!("{label} F1"),
            points: percent(curve.points.iter().map(|p| (p.fraction, p.f1))),
        }],
        y2: Some(SecondAxis {
            axis: Axis::new("ROI", ""),
            series: vec![Series {
                label: format!("{label} ROI"),
                points: percent(curve.points.iter().map(|p| (p.fraction, p.econ.roi))),
            }],
        }),
    }
}
