#ifndef ROIML_H
#define ROIML_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which samples are charged at each curve point.
typedef enum RoimlCostMode {
  ROIML_COST_MODE_PER_ITERATION = 0,
  ROIML_COST_MODE_CUMULATIVE = 1,
  ROIML_COST_MODE_TRAIN_ONLY = 2,
} RoimlCostMode;

typedef enum RoimlStatus {
  ROIML_STATUS_OK = 0,
  ROIML_STATUS_NULL_POINTER = 1,
  ROIML_STATUS_INVALID_UTF8 = 2,
  ROIML_STATUS_PARAMETER = 3,
  ROIML_STATUS_PARSE = 4,
  ROIML_STATUS_UNDEFINED_ROI = 5,
  ROIML_STATUS_NOT_FOUND = 6,
  ROIML_STATUS_OUT_OF_RANGE = 7,
  ROIML_STATUS_EVALUATION = 8,
  ROIML_STATUS_PANIC = 9,
  ROIML_STATUS_INTERNAL = 10,
} RoimlStatus;

// Opaque learning curve.
typedef struct RoimlCurve RoimlCurve;

// Opaque cost parameters.
typedef struct RoimlParams RoimlParams;

typedef struct RoimlConfusion {
  uint64_t true_positives;
  uint64_t false_positives;
  uint64_t false_negatives;
  uint64_t true_negatives;
} RoimlConfusion;

typedef struct RoimlOutcome {
  uint64_t n_processed;
  double cost_usd;
  double penalty_usd;
  double benefit_usd;
  double roi;
} RoimlOutcome;

typedef struct RoimlPoint {
  double fraction;
  uint64_t n_train;
  uint64_t n_test;
  struct RoimlConfusion confusion;
  double f1;
  struct RoimlOutcome outcome;
} RoimlPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *roiml_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *roiml_version(void);

// Industry-estimate parameters ($70/h, ten people, $10k/$25k penalties,
// $4M product value).
enum RoimlStatus roiml_params_table5(struct RoimlParams **out);

// Parameters scaled for corpora of a few thousand pairs.
enum RoimlStatus roiml_params_desk_scale(struct RoimlParams **out);

// Parameters from a JSON object with every cost field.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum RoimlStatus roiml_params_from_json(const char *json, struct RoimlParams **out);

// # Safety
// `params` must come from a `roiml_params_*` constructor or be null.
void roiml_params_free(struct RoimlParams *params);

// F1 of a confusion matrix; 0 when there are no positives at all.
//
// # Safety
// Pointers must be valid or null.
enum RoimlStatus roiml_f1(const struct RoimlConfusion *cm, double *out);

// Cost, penalty, benefit and ROI for `n` processed samples.
//
// # Safety
// Pointers must be valid or null.
enum RoimlStatus roiml_economic_outcome(const struct RoimlParams *params,
                                        int64_t n,
                                        const struct RoimlConfusion *cm,
                                        struct RoimlOutcome *out);

// Confusion matrix of an interchange CSV
// (`pair_id,true_label,predicted_label[,score]`).
//
// # Safety
// `csv_text` must be NUL-terminated; `out` must be writable.
enum RoimlStatus roiml_evaluate_predictions_csv(const char *csv_text, struct RoimlConfusion *out);

// Curve from a curve CSV, full or count columns only, with economics
// derived from `params`.
//
// # Safety
// Strings must be NUL-terminated; `params` valid; `out` writable.
enum RoimlStatus roiml_curve_from_csv(const char *csv_text,
                                      const char *label,
                                      const struct RoimlParams *params,
                                      enum RoimlCostMode mode,
                                      struct RoimlCurve **out);

// # Safety
// `curve` must come from `roiml_curve_from_csv` or be null.
void roiml_curve_free(struct RoimlCurve *curve);

// # Safety
// Pointers must be valid or null.
enum RoimlStatus roiml_curve_len(const struct RoimlCurve *curve, size_t *out);

// # Safety
// Pointers must be valid or null.
enum RoimlStatus roiml_curve_point(const struct RoimlCurve *curve,
                                   size_t index,
                                   struct RoimlPoint *out);

// Fraction and value of the highest ROI; ties go to the smaller fraction.
//
// # Safety
// Pointers must be valid or null.
enum RoimlStatus roiml_curve_max_roi(const struct RoimlCurve *curve, double *fraction, double *roi);

// First grid fraction with ROI ≥ 0 and the interpolated crossing.
// Returns `NotFound` when ROI stays negative.
//
// # Safety
// Pointers must be valid or null.
enum RoimlStatus roiml_curve_break_even(const struct RoimlCurve *curve,
                                        double *grid,
                                        double *interpolated);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROIML_H */
