#ifndef VOROS_H
#define VOROS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum VorosStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  VOROS_STATUS_OK = 0,
  VOROS_STATUS_NULL_POINTER = 1,
  /**
   * Parameters outside the supported range, or inconsistent input data.
   */
  VOROS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * An iteration or root solve did not converge. Quantization still
   * returns its last iterate in this case.
   */
  VOROS_STATUS_NOT_CONVERGED = 3,
  /**
   * Overflow, loss of conditioning, or evaluation on a pole guard.
   */
  VOROS_STATUS_NUMERIC = 4,
  /**
   * The output buffer holds fewer entries than were produced.
   */
  VOROS_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  VOROS_STATUS_PANIC = 6,
};
#ifndef __cplusplus
typedef int32_t VorosStatus;
#endif // __cplusplus

/**
 * ODE shooting oracle for one exponent `m` and boundary pair `ell`.
 */
typedef struct VorosOracle VorosOracle;

/**
 * A converged (or last-iterate) product together with its rotation data.
 */
typedef struct VorosProduct VorosProduct;

typedef struct VorosComplex {
  double re;
  double im;
} VorosComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *voros_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len` bytes) and returns the length it needs including the
 * NUL. Returns 0 when there is no error. Pass `buf = NULL` to query the size.
 */
size_t voros_last_error_message(char *buf, size_t len);

/**
 * Runs the quantization scheme for rotation angle `alpha` and phase offset
 * `phase_offset`. On `Ok` or `NotConverged`, `*out` receives a handle
 * that must be released with `voros_product_free`.
 */
VorosStatus voros_quantize(double alpha,
                           double phase_offset,
                           size_t levels,
                           double tolerance,
                           size_t max_iterations,
                           struct VorosProduct **out);

/**
 * Same as `voros_quantize` with `alpha = 2 pi / (m + 2)` and
 * `phase_offset = alpha / 2`, whose levels are the half-line Dirichlet
 * levels of `-y'' + x^m y`.
 */
VorosStatus voros_quantize_exponent(double m,
                                    size_t levels,
                                    double tolerance,
                                    size_t max_iterations,
                                    struct VorosProduct **out);

/**
 * Wraps `count` strictly increasing positive zeros as a finite product
 * without a tail.
 */
VorosStatus voros_product_from_levels(const double *levels,
                                      size_t count,
                                      double alpha,
                                      double phase_offset,
                                      struct VorosProduct **out);

/**
 * Releases a product handle. NULL is ignored.
 */
void voros_product_free(struct VorosProduct *handle);

VorosStatus voros_product_level_count(const struct VorosProduct *handle, size_t *count);

/**
 * Copies the stored levels into `buf`. `*written` receives the number of
 * levels, also when `BufferTooSmall` is returned.
 */
VorosStatus voros_product_levels(const struct VorosProduct *handle,
                                 double *buf,
                                 size_t capacity,
                                 size_t *written);

/**
 * Quantization residual of the final iterate and whether it met the tolerance.
 */
VorosStatus voros_product_convergence(const struct VorosProduct *handle,
                                      bool *converged,
                                      double *residual);

/**
 * The product itself at `x`.
 */
VorosStatus voros_product_eval(const struct VorosProduct *handle,
                               struct VorosComplex x,
                               struct VorosComplex *out);

/**
 * Stokes multiplier `C(x)` built from the product.
 */
VorosStatus voros_stokes_c(const struct VorosProduct *handle,
                           struct VorosComplex x,
                           struct VorosComplex *out);

/**
 * Stokes multiplier `D(x)`, evaluated directly from values of the product.
 */
VorosStatus voros_stokes_d(const struct VorosProduct *handle,
                           struct VorosComplex x,
                           struct VorosComplex *out);

/**
 * Creates an oracle for `y'' = (z^m + lambda) y`, `m >= 2`, with decay
 * imposed in the sectors `-ell` and `ell` (1 or 2).
 */
VorosStatus voros_oracle_new(double m, uint8_t ell, struct VorosOracle **out);

/**
 * Releases an oracle handle. NULL is ignored.
 */
void voros_oracle_free(struct VorosOracle *handle);

/**
 * The lowest `count` real eigenvalues, ascending. `*written` receives how
 * many were found, which can be fewer than `count`.
 */
VorosStatus voros_oracle_eigenvalues(const struct VorosOracle *handle,
                                     size_t count,
                                     double *buf,
                                     size_t *written);

/**
 * The lowest `count` Dirichlet levels of `-y'' + x^m y` on the half line.
 * These are the values the ODE-mode quantization reproduces.
 */
VorosStatus voros_oracle_halfline_levels(const struct VorosOracle *handle,
                                         size_t count,
                                         double *buf,
                                         size_t *written);

/**
 * Spectral determinant, normalized to 1 at `lambda = 0`.
 */
VorosStatus voros_oracle_determinant(const struct VorosOracle *handle,
                                     struct VorosComplex lambda,
                                     struct VorosComplex *out);

/**
 * `C0(lambda)` from Wronskians of decaying solutions.
 */
VorosStatus voros_oracle_c0(const struct VorosOracle *handle,
                            struct VorosComplex lambda,
                            struct VorosComplex *out);

/**
 * `D0(lambda)`, through determinants when `m > 2`.
 */
VorosStatus voros_oracle_d0(const struct VorosOracle *handle,
                            struct VorosComplex lambda,
                            struct VorosComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VOROS_H */
