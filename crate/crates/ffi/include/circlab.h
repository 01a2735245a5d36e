#ifndef CIRCLAB_H
#define CIRCLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CirclabStatus {
  CIRCLAB_STATUS_OK = 0,
  CIRCLAB_STATUS_NULL_POINTER = 1,
  CIRCLAB_STATUS_INVALID_DIMENSION = 2,
  CIRCLAB_STATUS_INDEX_OUT_OF_RANGE = 3,
  CIRCLAB_STATUS_INVALID_INPUT = 4,
  CIRCLAB_STATUS_RESOURCE_LIMIT = 5,
  CIRCLAB_STATUS_IO = 6,
  CIRCLAB_STATUS_BUFFER_TOO_SMALL = 7,
  CIRCLAB_STATUS_PANIC = 8,
} CirclabStatus;

/**
 * Values accepted by `kind` parameters.
 */
typedef enum CirclabKind {
  CIRCLAB_KIND_REVERSE = 0,
  CIRCLAB_KIND_SYMMETRIC = 1,
} CirclabKind;

/**
 * Values accepted by `dist` parameters.
 */
typedef enum CirclabDistribution {
  CIRCLAB_DISTRIBUTION_GAUSSIAN = 0,
  CIRCLAB_DISTRIBUTION_RADEMACHER = 1,
  CIRCLAB_DISTRIBUTION_UNIFORM = 2,
  /**
   * Uniform on {-2, ..., 2}.
   */
  CIRCLAB_DISTRIBUTION_INTEGER = 3,
} CirclabDistribution;

/**
 * Values accepted by `law` parameters.
 */
typedef enum CirclabLaw {
  CIRCLAB_LAW_SYMMETRIZED_RAYLEIGH = 0,
  CIRCLAB_LAW_STANDARD_GAUSSIAN = 1,
} CirclabLaw;

/**
 * Opaque matrix handle.
 */
typedef struct CirclabMatrix CirclabMatrix;

/**
 * Opaque sorted-eigenvalue handle.
 */
typedef struct CirclabSpectrum CirclabSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *circlab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *circlab_version(void);

/**
 * Matrix of the given kind with `n` entries drawn from `dist` under `seed`.
 */
enum CirclabStatus circlab_matrix_sample(uint32_t kind,
                                         uint32_t dist,
                                         size_t n,
                                         uint64_t seed,
                                         struct CirclabMatrix **out);

/**
 * Matrix built from explicit entries `values[0..n]` (`X_0..X_{n-1}`).
 */
enum CirclabStatus circlab_matrix_from_values(uint32_t kind,
                                              const double *values,
                                              size_t n,
                                              struct CirclabMatrix **out);

void circlab_matrix_free(struct CirclabMatrix *m);

enum CirclabStatus circlab_matrix_dim(const struct CirclabMatrix *m, size_t *out);

/**
 * Scaled entry at 1-based `(i, j)`.
 */
enum CirclabStatus circlab_matrix_entry(const struct CirclabMatrix *m,
                                        size_t i,
                                        size_t j,
                                        double *out);

/**
 * Eigenvalues in ascending order; `dense != 0` selects the dense solver.
 */
enum CirclabStatus circlab_matrix_eigenvalues(const struct CirclabMatrix *m,
                                              int32_t dense,
                                              struct CirclabSpectrum **out);

void circlab_spectrum_free(struct CirclabSpectrum *s);

/**
 * Number of eigenvalues; 0 for a null handle.
 */
size_t circlab_spectrum_len(const struct CirclabSpectrum *s);

/**
 * Copies the eigenvalues into `buf`, which must hold `circlab_spectrum_len` values.
 */
enum CirclabStatus circlab_spectrum_copy(const struct CirclabSpectrum *s, double *buf, size_t cap);

enum CirclabStatus circlab_spectrum_moment(const struct CirclabSpectrum *s,
                                           uint32_t h,
                                           double *out);

enum CirclabStatus circlab_spectrum_ks(const struct CirclabSpectrum *s, uint32_t law, double *out);

enum CirclabStatus circlab_limit_moment(uint32_t law, uint32_t h, double *out);

/**
 * Limit of a word (labels from 1) in independent reverse circulant matrices.
 */
enum CirclabStatus circlab_rc_limit_phi(const size_t *word, size_t len, double *out);

/**
 * Limit of a word (labels from 1) in independent symmetric circulant matrices.
 */
enum CirclabStatus circlab_sc_limit_phi(const size_t *word, size_t len, double *out);

/**
 * Monte Carlo estimate of `(1/n) E Tr` of a word, with its standard error.
 */
enum CirclabStatus circlab_phi_n_estimate(uint32_t kind,
                                          uint32_t dist,
                                          const size_t *word,
                                          size_t len,
                                          size_t n,
                                          size_t trials,
                                          uint64_t seed,
                                          double *estimate,
                                          double *std_error);

/**
 * Compares the closed trace formula with the direct product trace in exact
 * arithmetic for integer entries drawn from `seed`.
 */
enum CirclabStatus circlab_verify_trace(uint32_t kind,
                                        size_t n,
                                        size_t h,
                                        uint64_t seed,
                                        int32_t *exact_equal,
                                        double *abs_diff);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLAB_H */
