//! Learning-curve experiments with economics attached to every point, and
//! the decisions read off those curves.

mod curve;
mod decisions;
mod scenario;

pub use curve::{
    align_grids, curve_from_counts, curve_from_predictions, repeat_curves, replay, run_curve, CostMode, CurvePoint, CurveSetup,
    LearningCurve, RepeatSummary, Trainer,
};
pub use decisions::{
    break_even, crossover, diminishing_returns, max_roi_point, summarize, BreakEven, Crossover, DecisionSummary,
    Leader, MaxRoi, Metric, RivalCrossovers, DEFAULT_EPSILON_F1, DEFAULT_EPSILON_ROI,
};
pub use scenario::{scenario_analysis, Scenario, ScenarioOutcome};

/// Grid fractions are compared with this absolute tolerance.
pub const FRACTION_TOLERANCE: f64 = 1e-9;

pub(crate) fn same_fraction(a: f64, b: f64) -> bool {
    (a - b).abs() <= FRACTION_TOLERANCE
}
