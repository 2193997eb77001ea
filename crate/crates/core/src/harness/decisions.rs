use serde::{Deserialize, Serialize};

use super::{same_fraction, LearningCurve};
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON_F1: f64 = 0.01;
pub const DEFAULT_EPSILON_ROI: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    F1,
    Roi,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::F1 => "f1",
            Metric::Roi => "roi",
        }
    }

    fn series(self, curve: &LearningCurve) -> Vec<f64> {
        match self {
            Metric::F1 => curve.f1_series(),
            Metric::Roi => curve.roi_series(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxRoi {
    pub fraction: f64,
    pub roi: f64,
    pub f1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakEven {
    /// First grid fraction with ROI ≥ 0.
    pub grid: f64,
    /// Linear zero crossing between the bracketing grid points; equals
    /// `grid` when the first point already breaks even.
    pub interpolated: f64,
}

/// Which curve leads after a crossover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leader {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub fraction: f64,
    pub leader: Leader,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RivalCrossovers {
    pub rival: String,
    pub f1: Vec<Crossover>,
    pub roi: Vec<Crossover>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionSummary {
    pub technique_label: String,
    pub max_roi: MaxRoi,
    pub break_even: Option<BreakEven>,
    pub diminishing_returns_f1: Option<f64>,
    pub diminishing_returns_roi: Option<f64>,
    pub crossovers: Vec<RivalCrossovers>,
}

fn non_empty(curve: &LearningCurve) -> Result<()> {
    if curve.points.is_empty() {
        return Err(Error::Harness(format!("curve `{}` has no points", curve.technique_label)));
    }
    Ok(())
}

/// Point of highest ROI; the smallest fraction wins ties.
pub fn max_roi_point(curve: &LearningCurve) -> Result<MaxRoi> {
    non_empty(curve)?;
    let mut best = &curve.points[0];
    for p in &curve.points[1..] {
        if p.econ.roi > best.econ.roi {
            best = p;
        }
    }
    Ok(MaxRoi {
        fraction: best.fraction,
        roi: best.econ.roi,
        f1: best.f1,
    })
}

pub fn break_even(curve: &LearningCurve) -> Option<BreakEven> {
    let pts = &curve.points;
    let i = pts.iter().position(|p| p.econ.roi >= 0.0)?;
    if i == 0 {
        return Some(BreakEven {
            grid: pts[0].fraction,
            interpolated: pts[0].fraction,
        });
    }
    let (f0, r0) = (pts[i - 1].fraction, pts[i - 1].econ.roi);
    let (f1, r1) = (pts[i].fraction, pts[i].econ.roi);
    Some(BreakEven {
        grid: f1,
        interpolated: f0 + (f1 - f0) * (0.0 - r0) / (r1 - r0),
    })
}

/// Grid fractions where the lead between `a` and `b` changes. Ties carry
/// no sign, so a lead change is reported where the new leader first shows.
pub fn crossover(a: &LearningCurve, b: &LearningCurve, metric: Metric) -> Result<Vec<Crossover>> {
    let same_grid = a.points.len() == b.points.len()
        && a.points
            .iter()
            .zip(&b.points)
            .all(|(p, q)| same_fraction(p.fraction, q.fraction));
    if !same_grid {
        return Err(Error::Comparability(format!(
            "`{}` and `{}` use different fraction grids",
            a.technique_label, b.technique_label
        )));
    }
    let (xa, xb) = (metric.series(a), metric.series(b));
    let mut last = None;
    let mut out = Vec::new();
    for (i, (va, vb)) in xa.iter().zip(&xb).enumerate() {
        let sign = match va.partial_cmp(vb) {
            Some(std::cmp::Ordering::Greater) => Leader::A,
            Some(std::cmp::Ordering::Less) => Leader::B,
            _ => continue,
        };
        if last.is_some_and(|l| l != sign) {
            out.push(Crossover {
                fraction: a.points[i].fraction,
                leader: sign,
            });
        }
        last = Some(sign);
    }
    Ok(out)
}

/// Smallest fraction after which no later point gains `epsilon` or more.
pub fn diminishing_returns(curve: &LearningCurve, metric: Metric, epsilon: f64) -> Result<Option<f64>> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Harness(format!("epsilon must be positive, got {epsilon}")));
    }
    let values = metric.series(curve);
    let n = values.len();
    if n < 2 {
        return Ok(None);
    }
    let mut suffix_max = vec![f64::NEG_INFINITY; n];
    for i in (0..n - 1).rev() {
        suffix_max[i] = suffix_max[i + 1].max(values[i + 1]);
    }
    Ok((0..n - 1)
        .find(|&i| suffix_max[i] - values[i] < epsilon)
        .map(|i| curve.points[i].fraction))
}

/// All decision quantities for `curve`, with crossovers against each rival.
pub fn summarize(
    curve: &LearningCurve,
    rivals: &[&LearningCurve],
    epsilon_f1: f64,
    epsilon_roi: f64,
) -> Result<DecisionSummary> {
    let crossovers = rivals
        .iter()
        .map(|r| {
            Ok(RivalCrossovers {
                rival: r.technique_label.clone(),
                f1: crossover(curve, r, Metric::F1)?,
                roi: crossover(curve, r, Metric::Roi)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DecisionSummary {
        technique_label: curve.technique_label.clone(),
        max_roi: max_roi_point(curve)?,
        break_even: break_even(curve),
        diminishing_returns_f1: diminishing_returns(curve, Metric::F1, epsilon_f1)?,
        diminishing_returns_roi: diminishing_returns(curve, Metric::Roi, epsilon_roi)?,
        crossovers,
    })
}
