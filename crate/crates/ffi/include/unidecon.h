#ifndef UNIDECON_H
#define UNIDECON_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Which curve [`ud_estimate`] evaluates.
typedef enum UdEstimator {
  // Direct kernel estimate of the observation density `g`.
  UD_ESTIMATOR_G_HAT = 0,
  UD_ESTIMATOR_DENSITY_MINUS = 1,
  UD_ESTIMATOR_DENSITY_PLUS = 2,
  UD_ESTIMATOR_DENSITY_WEIGHTED = 3,
  UD_ESTIMATOR_DENSITY_COMBINED = 4,
  UD_ESTIMATOR_CDF_MINUS = 5,
  UD_ESTIMATOR_CDF_PLUS = 6,
  UD_ESTIMATOR_CDF_WEIGHTED = 7,
  UD_ESTIMATOR_CDF_COMBINED = 8,
  UD_ESTIMATOR_PIVOT_HALF = 9,
  UD_ESTIMATOR_PIVOT_H = 10,
} UdEstimator;

// Which asymptotic quantity [`ud_theory_pointwise`] returns.
typedef enum UdQuantity {
  // `½h²f''(x)m2`
  UD_QUANTITY_BIAS_DENSITY = 0,
  // `(t²F + (1-t)²(1-F)) dl2 / (nh³)`
  UD_QUANTITY_VAR_DENSITY_T = 1,
  // `F(1-F) dl2 / (nh³)`
  UD_QUANTITY_VAR_DENSITY_COMBINED = 2,
  // `½h²f'(x)m2`
  UD_QUANTITY_BIAS_CDF = 3,
  // `(t²F + (1-t)²(1-F)) l2 / (nh)`
  UD_QUANTITY_VAR_CDF_T = 4,
  // `F(1-F) l2 / (nh)`
  UD_QUANTITY_VAR_CDF_COMBINED = 5,
} UdQuantity;

// Result code of every fallible call.
typedef enum UdStatus {
  UD_STATUS_OK = 0,
  UD_STATUS_NULL_POINTER = 1,
  UD_STATUS_INVALID_PARAMETER = 2,
  UD_STATUS_INVALID_GRID = 3,
  UD_STATUS_DEGENERATE_MODEL = 4,
  UD_STATUS_MODEL_SUPPORT = 5,
  UD_STATUS_QUADRATURE_DIVERGENCE = 6,
  UD_STATUS_PARSE = 7,
  UD_STATUS_IO = 8,
  UD_STATUS_BUFFER_TOO_SMALL = 9,
  UD_STATUS_INVALID_UTF8 = 10,
  UD_STATUS_PANIC = 11,
} UdStatus;

// How the two one-sided estimators are weighted.
typedef enum UdWeight {
  // Fixed weight `t` on the left-shift estimator.
  UD_WEIGHT_FIXED_T = 0,
  UD_WEIGHT_PIVOT_HALF = 1,
  // Logistic `H` with scale `pivot_scale`, centered at the sample median.
  UD_WEIGHT_PIVOT_H = 2,
} UdWeight;

// Opaque smoothing kernel.
typedef struct UdKernel UdKernel;

// Opaque ground-truth model for the theory functions.
typedef struct UdModel UdModel;

// Opaque sorted sample of observations.
typedef struct UdSample UdSample;

// Estimator configuration passed by pointer.
typedef struct UdEstimatorConfig {
  // One of `UD_ESTIMATOR_*`.
  int32_t estimator;
  // Main bandwidth, > 0.
  double h;
  // Pivot bandwidth, > 0 (used by the combined estimators).
  double h_pivot;
  // One of `UD_WEIGHT_*`.
  int32_t weight;
  // Used when `weight` is `FixedT`; must lie in [0, 1].
  double t;
  // Used when `weight` is `PivotH`; must be > 0.
  double pivot_scale;
} UdEstimatorConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL if there is none.
// The pointer stays valid until the next failing call on the same thread.
const char *ud_last_error(void);

// Library version as a static NUL-terminated string.
const char *ud_version(void);

// Create a kernel by name ("biweight", "triweight", "epanechnikov").
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum UdStatus ud_kernel_new(const char *name, struct UdKernel **out);

// Release a kernel. NULL is ignored.
//
// # Safety
// `k` must come from [`ud_kernel_new`] and not be used afterwards.
void ud_kernel_free(struct UdKernel *k);

// Moment functionals `∫v²w`, `∫w²` and `∫w'²` of a kernel.
//
// # Safety
// `k` must be a live kernel handle; output pointers must be writable.
enum UdStatus ud_kernel_functionals(const struct UdKernel *k, double *m2, double *l2, double *dl2);

// Create a sample from `len` finite values (copied and sorted).
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
enum UdStatus ud_sample_new(const double *values, size_t len, struct UdSample **out);

// Draw `n` observations `X = Y + Z` from a named model with a seed.
// Same draws as `unidecon simulate --model <model> --n <n> --seed <seed>`.
//
// # Safety
// `model` must be a NUL-terminated string; `out` must be writable.
enum UdStatus ud_sample_simulate(const char *model, size_t n, uint64_t seed, struct UdSample **out);

// Number of observations, or 0 for NULL.
//
// # Safety
// `s` must be NULL or a live sample handle.
size_t ud_sample_len(const struct UdSample *s);

// Copy the sorted observations into `buf`. Fails with `BUFFER_TOO_SMALL`
// if `buf_len` is below [`ud_sample_len`].
//
// # Safety
// `s` must be a live sample handle; `buf` must hold `buf_len` doubles.
enum UdStatus ud_sample_values(const struct UdSample *s, double *buf, size_t buf_len);

// Release a sample. NULL is ignored.
//
// # Safety
// `s` must come from a `ud_sample_*` constructor and not be used afterwards.
void ud_sample_free(struct UdSample *s);

// Evaluate an estimator at a single point.
//
// # Safety
// Handles must be live; `cfg` readable; `out` writable.
enum UdStatus ud_estimate(const struct UdSample *s,
                          const struct UdKernel *k,
                          const struct UdEstimatorConfig *cfg,
                          double x,
                          double *out);

// Evaluate an estimator at `x0 + i*dx`, `i < count`, into `buf`.
// Fails with `BUFFER_TOO_SMALL` if `buf_len < count`.
//
// # Safety
// Handles must be live; `cfg` readable; `buf` must hold `buf_len` doubles.
enum UdStatus ud_estimate_grid(const struct UdSample *s,
                               const struct UdKernel *k,
                               const struct UdEstimatorConfig *cfg,
                               double x0,
                               double dx,
                               size_t count,
                               double *buf,
                               size_t buf_len);

// Create a model by name ("stdnormal", "uniform", "beta22", "pointmass:<a>").
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum UdStatus ud_model_new(const char *name, struct UdModel **out);

// Release a model. NULL is ignored.
//
// # Safety
// `m` must come from [`ud_model_new`] and not be used afterwards.
void ud_model_free(struct UdModel *m);

// Closed-form pointwise bias or variance; `quantity` is one of
// `UD_QUANTITY_*`. `t` is only read by the `*_T` quantities, `n` only by
// the variances.
//
// # Safety
// Handles must be live; `out` writable.
enum UdStatus ud_theory_pointwise(const struct UdModel *m,
                                  const struct UdKernel *k,
                                  int32_t quantity,
                                  double x,
                                  double t,
                                  size_t n,
                                  double h,
                                  double *out);

// Two-term MISE expansion of the combined density estimator.
//
// # Safety
// Handles must be live; output pointers writable.
enum UdStatus ud_theory_mise(const struct UdModel *m,
                             const struct UdKernel *k,
                             size_t n,
                             double h,
                             double *bias_term,
                             double *var_term,
                             double *total);

// MISE-optimal bandwidth for the combined density (`cdf == 0`) or
// distribution function (`cdf != 0`) estimator.
//
// # Safety
// Handles must be live; `out` writable.
enum UdStatus ud_theory_optimal_bandwidth(const struct UdModel *m,
                                          const struct UdKernel *k,
                                          size_t n,
                                          int32_t cdf,
                                          double *out);

// `∫ θ² dG` for the smoothed NPMLE at `t` (compactly supported models).
//
// # Safety
// Handles must be live; `out` writable.
enum UdStatus ud_theory_npmle_variance(const struct UdModel *m,
                                       const struct UdKernel *k,
                                       double h,
                                       double t,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIDECON_H */
