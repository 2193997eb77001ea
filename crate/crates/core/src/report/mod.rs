//! Curve tables, SVG charts and the markdown summary. All emitters are pure
//! and byte-deterministic.

mod chart;
mod summary;
mod table;

pub use chart::{f1_chart, f1_roi_chart, render_chart, roi_chart, Axis, ChartSpec, SecondAxis, Series, HEIGHT, WIDTH};
pub use summary::{emit_summary, Artifact, EMPTY_CELL};
pub use table::{curve_from_records, emit_curve_csv, parse_curve_csv, CurveRecord, CURVE_HEADER};
