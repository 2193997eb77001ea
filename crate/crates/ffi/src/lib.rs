//! C ABI over the economics engine: cost parameters, ROI arithmetic,
//! prediction evaluation and learning-curve decisions.
//!
//! Every fallible function returns a [`RoimlStatus`]; on failure the message
//! is available from [`roiml_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use roiml::classify::{evaluate, load_external_predictions, ConfusionMatrix};
use roiml::harness::{break_even, max_roi_point, CostMode, LearningCurve};
use roiml::report::{curve_from_records, parse_curve_csv};
use roiml::roi::{economic_outcome, f1_score, CostParameters, EconomicOutcome};
use roiml::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoimlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parameter = 3,
    Parse = 4,
    UndefinedRoi = 5,
    NotFound = 6,
    OutOfRange = 7,
    Evaluation = 8,
    Panic = 9,
    Internal = 10,
}

/// Which samples are charged at each curve point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoimlCostMode {
    PerIteration = 0,
    Cumulative = 1,
    TrainOnly = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoimlConfusion {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoimlOutcome {
    pub n_processed: u64,
    pub cost_usd: f64,
    pub penalty_usd: f64,
    pub benefit_usd: f64,
    pub roi: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoimlPoint {
    pub fraction: f64,
    pub n_train: u64,
    pub n_test: u64,
    pub confusion: RoimlConfusion,
    pub f1: f64,
    pub outcome: RoimlOutcome,
}

/// Opaque cost parameters.
pub struct RoimlParams {
    inner: CostParameters,
}

/// Opaque learning curve.
pub struct RoimlCurve {
    inner: LearningCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (RoimlStatus, String);

fn fail(status: RoimlStatus, message: impl Into<String>) -> Failure {
    (status, message.into())
}

fn from_error(err: Error) -> Failure {
    let status = match &err {
        Error::Parameter(_) | Error::Config { .. } => RoimlStatus::Parameter,
        Error::UndefinedRoi { .. } => RoimlStatus::UndefinedRoi,
        Error::Parse { .. } | Error::Schema { .. } | Error::Json(_) => RoimlStatus::Parse,
        Error::Evaluation(_) => RoimlStatus::Evaluation,
        _ => RoimlStatus::Internal,
    };
    (status, err.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RoimlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RoimlStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside roiml");
            RoimlStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(RoimlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(RoimlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(RoimlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RoimlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

impl From<RoimlConfusion> for ConfusionMatrix {
    fn from(c: RoimlConfusion) -> Self {
        ConfusionMatrix {
            tp: c.true_positives,
            fp: c.false_positives,
            fn_: c.false_negatives,
            tn: c.true_negatives,
        }
    }
}

impl From<ConfusionMatrix> for RoimlConfusion {
    fn from(c: ConfusionMatrix) -> Self {
        RoimlConfusion {
            true_positives: c.tp,
            false_positives: c.fp,
            false_negatives: c.fn_,
            true_negatives: c.tn,
        }
    }
}

impl From<EconomicOutcome> for RoimlOutcome {
    fn from(e: EconomicOutcome) -> Self {
        RoimlOutcome {
            n_processed: e.n_processed,
            cost_usd: e.cost_usd,
            penalty_usd: e.penalty_usd,
            benefit_usd: e.benefit_usd,
            roi: e.roi,
        }
    }
}

impl From<RoimlCostMode> for CostMode {
    fn from(m: RoimlCostMode) -> Self {
        match m {
            RoimlCostMode::PerIteration => CostMode::PerIteration,
            RoimlCostMode::Cumulative => CostMode::Cumulative,
            RoimlCostMode::TrainOnly => CostMode::TrainOnly,
        }
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn roiml_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn roiml_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn boxed_params(out: *mut *mut RoimlParams, p: CostParameters) -> Result<(), Failure> {
    let slot = unsafe { out_ref(out, "out")? };
    *slot = Box::into_raw(Box::new(RoimlParams { inner: p }));
    Ok(())
}

/// Industry-estimate parameters ($70/h, ten people, $10k/$25k penalties,
/// $4M product value).
#[no_mangle]
pub extern "C" fn roiml_params_table5(out: *mut *mut RoimlParams) -> RoimlStatus {
    guard(|| boxed_params(out, CostParameters::table5_default()))
}

/// Parameters scaled for corpora of a few thousand pairs.
#[no_mangle]
pub extern "C" fn roiml_params_desk_scale(out: *mut *mut RoimlParams) -> RoimlStatus {
    guard(|| boxed_params(out, CostParameters::desk_scale()))
}

/// Parameters from a JSON object with every cost field.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roiml_params_from_json(json: *const c_char, out: *mut *mut RoimlParams) -> RoimlStatus {
    guard(|| {
        let json = text(json, "json")?;
        let p: CostParameters = serde_json::from_str(json).map_err(|e| from_error(e.into()))?;
        p.validate().map_err(from_error)?;
        boxed_params(out, p)
    })
}

/// # Safety
/// `params` must come from a `roiml_params_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn roiml_params_free(params: *mut RoimlParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// F1 of a confusion matrix; 0 when there are no positives at all.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn roiml_f1(cm: *const RoimlConfusion, out: *mut f64) -> RoimlStatus {
    guard(|| {
        let cm = *borrow(cm, "cm")?;
        *out_ref(out, "out")? = f1_score(&cm.into());
        Ok(())
    })
}

/// Cost, penalty, benefit and ROI for `n` processed samples.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn roiml_economic_outcome(
    params: *const RoimlParams,
    n: i64,
    cm: *const RoimlConfusion,
    out: *mut RoimlOutcome,
) -> RoimlStatus {
    guard(|| {
        let p = &borrow(params, "params")?.inner;
        let cm = *borrow(cm, "cm")?;
        let out = out_ref(out, "out")?;
        let n = u64::try_from(n).map_err(|_| fail(RoimlStatus::Parameter, format!("sample count {n} is negative")))?;
        *out = economic_outcome(n, &cm.into(), p).map_err(from_error)?.into();
        Ok(())
    })
}

/// Confusion matrix of an interchange CSV
/// (`pair_id,true_label,predicted_label[,score]`).
///
/// # Safety
/// `csv_text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roiml_evaluate_predictions_csv(csv_text: *const c_char, out: *mut RoimlConfusion) -> RoimlStatus {
    guard(|| {
        let csv_text = text(csv_text, "csv_text")?;
        let out = out_ref(out, "out")?;
        let set = load_external_predictions(csv_text.as_bytes()).map_err(from_error)?;
        *out = evaluate(&set).map_err(from_error)?.into();
        Ok(())
    })
}

/// Curve from a curve CSV, full or count columns only, with economics
/// derived from `params`.
///
/// # Safety
/// Strings must be NUL-terminated; `params` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn roiml_curve_from_csv(
    csv_text: *const c_char,
    label: *const c_char,
    params: *const RoimlParams,
    mode: RoimlCostMode,
    out: *mut *mut RoimlCurve,
) -> RoimlStatus {
    guard(|| {
        let csv_text = text(csv_text, "csv_text")?;
        let label = text(label, "label")?;
        let p = &borrow(params, "params")?.inner;
        let slot = out_ref(out, "out")?;
        let records = parse_curve_csv(csv_text.as_bytes()).map_err(from_error)?;
        let curve = curve_from_records(label, &records, p, mode.into()).map_err(from_error)?;
        *slot = Box::into_raw(Box::new(RoimlCurve { inner: curve }));
        Ok(())
    })
}

/// # Safety
/// `curve` must come from `roiml_curve_from_csv` or be null.
#[no_mangle]
pub unsafe extern "C" fn roiml_curve_free(curve: *mut RoimlCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn roiml_curve_len(curve: *const RoimlCurve, out: *mut usize) -> RoimlStatus {
    guard(|| {
        *out_ref(out, "out")? = borrow(curve, "curve")?.inner.points.len();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn roiml_curve_point(curve: *const RoimlCurve, index: usize, out: *mut RoimlPoint) -> RoimlStatus {
    guard(|| {
        let c = &borrow(curve, "curve")?.inner;
        let out = out_ref(out, "out")?;
        let p = c.points.get(index).ok_or_else(|| {
            fail(RoimlStatus::OutOfRange, format!("point {index} of a {}-point curve", c.points.len()))
        })?;
        *out = RoimlPoint {
            fraction: p.fraction,
            n_train: p.n_train as u64,
            n_test: p.n_test as u64,
            confusion: p.cm.into(),
            f1: p.f1,
            outcome: p.econ.into(),
        };
        Ok(())
    })
}

/// Fraction and value of the highest ROI; ties go to the smaller fraction.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn roiml_curve_max_roi(curve: *const RoimlCurve, fraction: *mut f64, roi: *mut f64) -> RoimlStatus {
    guard(|| {
        let c = &borrow(curve, "curve")?.inner;
        let (fraction, roi) = (out_ref(fraction, "fraction")?, out_ref(roi, "roi")?);
        let m = max_roi_point(c).map_err(from_error)?;
        *fraction = m.fraction;
        *roi = m.roi;
        Ok(())
    })
}

/// First grid fraction with ROI ≥ 0 and the interpolated crossing.
/// Returns `NotFound` when ROI stays negative.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn roiml_curve_break_even(
    curve: *const RoimlCurve,
    grid: *mut f64,
    interpolated: *mut f64,
) -> RoimlStatus {
    guard(|| {
        let c = &borrow(curve, "curve")?.inner;
        let (grid, interpolated) = (out_ref(grid, "grid")?, out_ref(interpolated, "interpolated")?);
        let b = break_even(c).ok_or_else(|| fail(RoimlStatus::NotFound, "ROI never reaches zero"))?;
        *grid = b.grid;
        *interpolated = b.interpolated;
        Ok(())
    })
}
