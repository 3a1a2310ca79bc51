#ifndef SINAI_FFI_H
#define SINAI_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SinaiStatus {
  SINAI_STATUS_OK = 0,
  SINAI_STATUS_NULL_POINTER = 1,
  SINAI_STATUS_BUFFER_TOO_SMALL = 2,
  SINAI_STATUS_INVALID_ARGUMENT = 3,
  SINAI_STATUS_NON_FINITE_INPUT = 4,
  SINAI_STATUS_DOMAIN_ERROR = 5,
  SINAI_STATUS_INSUFFICIENT_DOMAIN = 6,
  SINAI_STATUS_INVALID_CHAIN = 7,
  SINAI_STATUS_WINDOW_EXHAUSTED = 8,
  SINAI_STATUS_UNSUPPORTED = 9,
  SINAI_STATUS_NOT_CONVERGED = 10,
  SINAI_STATUS_INSUFFICIENT_HITS = 11,
  SINAI_STATUS_BEYOND_LOG = 12,
  SINAI_STATUS_INTERNAL = 13,
} SinaiStatus;

typedef enum SinaiDirection {
  SINAI_DIRECTION_UP = 0,
  SINAI_DIRECTION_DOWN = 1,
} SinaiDirection;

/**
 * Opaque coarsening engine.
 */
typedef struct SinaiEngine SinaiEngine;

/**
 * Opaque sampled environment.
 */
typedef struct SinaiPath SinaiPath;

/**
 * Central slope of a level-`x` chain.
 */
typedef struct SinaiCentralStats {
  double excess;
  double length;
  enum SinaiDirection direction;
  double rel_origin;
  /**
   * Localization point at this level.
   */
  double b;
} SinaiCentralStats;

/**
 * Exponents and coefficients of the generating function at one `z`.
 */
typedef struct SinaiExponents {
  double lambda1_re;
  double lambda1_im;
  double lambda2_re;
  double lambda2_im;
  double c1_re;
  double c1_im;
  double c2_re;
  double c2_im;
} SinaiExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sinai_last_error(void);

/**
 * Samples a two-sided Brownian environment on `[-half_length, half_length]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SinaiStatus sinai_path_sample(double half_length,
                                   double step,
                                   uint64_t seed,
                                   struct SinaiPath **out);

/**
 * Wraps caller values sampled with spacing `step`; `origin_index` marks
 * `t = 0`.
 *
 * # Safety
 * `values` must be valid for `len` reads and `out` for writes.
 */
enum SinaiStatus sinai_path_from_values(double step,
                                        size_t origin_index,
                                        const double *values,
                                        size_t len,
                                        struct SinaiPath **out);

/**
 * Number of grid points, or 0 for a null handle.
 *
 * # Safety
 * `path` must be null or a live handle.
 */
size_t sinai_path_len(const struct SinaiPath *path);

/**
 * # Safety
 * `path` must be a live handle, `buf` valid for `cap` writes, `written`
 * null or writable.
 */
enum SinaiStatus sinai_path_values(const struct SinaiPath *path,
                                   double *buf,
                                   size_t cap,
                                   size_t *written);

/**
 * Central slope of the level-`level` chain of `path`.
 *
 * # Safety
 * `path` must be a live handle and `out` valid for writes.
 */
enum SinaiStatus sinai_path_central_stats(const struct SinaiPath *path,
                                          double level,
                                          struct SinaiCentralStats *out);

/**
 * # Safety
 * `path` must be null or a handle not yet freed.
 */
void sinai_path_free(struct SinaiPath *path);

/**
 * Grid-mode engine over the level-`level` chain of `path`.
 *
 * # Safety
 * `path` must be a live handle and `out` valid for writes.
 */
enum SinaiStatus sinai_engine_from_path(const struct SinaiPath *path,
                                        double level,
                                        struct SinaiEngine **out);

/**
 * Synthetic level-1 engine with `n_slopes` (odd, at least 3) slopes.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SinaiStatus sinai_engine_synthetic(size_t n_slopes, uint64_t seed, struct SinaiEngine **out);

/**
 * Raises the level to `x_max`.
 *
 * # Safety
 * `engine` must be a live handle.
 */
enum SinaiStatus sinai_engine_advance(struct SinaiEngine *engine, double x_max);

/**
 * # Safety
 * `engine` must be a live handle and `out` valid for writes.
 */
enum SinaiStatus sinai_engine_level(const struct SinaiEngine *engine, double *out);

/**
 * Live slopes, or 0 for a null handle.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
size_t sinai_engine_live_slopes(const struct SinaiEngine *engine);

/**
 * Sign-change levels recorded so far and the initial sign (+1 or -1).
 *
 * # Safety
 * `engine` must be a live handle, `buf` valid for `cap` writes, `written`
 * and `initial_sign` null or writable.
 */
enum SinaiStatus sinai_engine_flips(const struct SinaiEngine *engine,
                                    double *buf,
                                    size_t cap,
                                    size_t *written,
                                    int32_t *initial_sign);

/**
 * # Safety
 * `engine` must be null or a handle not yet freed.
 */
void sinai_engine_free(struct SinaiEngine *engine);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum SinaiStatus sinai_exponents(double z_re, double z_im, struct SinaiExponents *out);

/**
 * `E z^{k(x)}` for `x >= 1` and complex `z` off `(-inf, -5/4]`.
 *
 * # Safety
 * `out_re` and `out_im` must be valid for writes.
 */
enum SinaiStatus sinai_genfun(double x, double z_re, double z_im, double *out_re, double *out_im);

/**
 * `P(k(x) = 0)`, the probability of no sign change on `[1, x]`.
 */
double sinai_survival(double x);

double sinai_ratio_cdf(double r);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum SinaiStatus sinai_ratio_density(double r, double *out);

double sinai_central_excess_density(double y);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum SinaiStatus sinai_slope_length_density(double t, double tol, double *out);

/**
 * Large-deviation rate of `k(e^t) / t`; infinite for `a < 0`.
 */
double sinai_rate_function(double a);

double sinai_first_flip_cdf(double x);

/**
 * One renewal run up to `x_max`: sign-change levels and initial sign.
 *
 * # Safety
 * `buf` must be valid for `cap` writes, `written` and `initial_sign` null
 * or writable.
 */
enum SinaiStatus sinai_renewal_simulate(double x_max,
                                        uint64_t seed,
                                        double *buf,
                                        size_t cap,
                                        size_t *written,
                                        int32_t *initial_sign);

/**
 * Frequency estimate of `-(1/t) log P(k(e^t) >= a t)` over `n` runs.
 *
 * # Safety
 * `rate` and `hits` must be valid for writes.
 */
enum SinaiStatus sinai_ldp_tail_estimate(double a,
                                         double t,
                                         uint64_t n,
                                         uint64_t seed,
                                         double *rate,
                                         uint64_t *hits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SINAI_FFI_H */
