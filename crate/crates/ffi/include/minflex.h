#ifndef MINFLEX_H
#define MINFLEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_UTF8 = 2,
  MF_STATUS_PARSE = 3,
  MF_STATUS_DIM_MISMATCH = 4,
  MF_STATUS_INVALID_PARAMS = 5,
  /**
   * Any other library error; see the last error message.
   */
  MF_STATUS_FAILED = 6,
  MF_STATUS_BUFFER_TOO_SMALL = 7,
  MF_STATUS_PANIC = 8,
} MfStatus;

typedef enum MfVerdict {
  MF_VERDICT_FLEXIBLE = 0,
  MF_VERDICT_NOT_FLEXIBLE = 1,
  MF_VERDICT_UNKNOWN = 2,
} MfVerdict;

/**
 * Convex body in halfspace or analytic form.
 */
typedef struct MfBody MfBody;

/**
 * Open domain in R^n.
 */
typedef struct MfDomain MfDomain;

/**
 * Sampled conformal minimal surface.
 */
typedef struct MfSurface MfSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message including the terminating NUL,
 * or 0 if the last call on this thread succeeded.
 */
size_t mf_last_error_length(void);

/**
 * Copies the last error message into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum MfStatus mf_last_error_message(char *buf, size_t len);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mf_string_free(char *s);

/**
 * Parses a convex body descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MfStatus mf_body_from_json(const char *json, struct MfBody **out);

/**
 * # Safety
 * `body` must come from [`mf_body_from_json`] and not have been freed.
 */
void mf_body_free(struct MfBody *body);

/**
 * Euclidean distance from `x` (length `n`) to the body.
 *
 * # Safety
 * `body` must be a live handle, `x` must hold `n` doubles and `out` be valid.
 */
enum MfStatus mf_body_distance(const struct MfBody *body, const double *x, size_t n, double *out);

/**
 * Classifies `R^n ∖ body`, or `C^n ∖ body` when `complex` is set.
 *
 * # Safety
 * `body` must be a live handle; `verdict` must be valid; `delta` may be null.
 */
enum MfStatus mf_classify_body(const struct MfBody *body,
                               bool complex,
                               enum MfVerdict *verdict,
                               double *delta);

/**
 * Parses a domain descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MfStatus mf_domain_from_json(const char *json, struct MfDomain **out);

/**
 * # Safety
 * `domain` must come from [`mf_domain_from_json`] and not have been freed.
 */
void mf_domain_free(struct MfDomain *domain);

/**
 * # Safety
 * `domain` must be a live handle.
 */
size_t mf_domain_dim(const struct MfDomain *domain);

/**
 * # Safety
 * `domain` must be a live handle, `x` must hold `n` doubles and `out` be valid.
 */
enum MfStatus mf_domain_contains(const struct MfDomain *domain,
                                 const double *x,
                                 size_t n,
                                 bool *out);

/**
 * Distance from `x` to the complement of the domain (infinite for R^n).
 *
 * # Safety
 * `domain` must be a live handle, `x` must hold `n` doubles and `out` be valid.
 */
enum MfStatus mf_domain_clearance(const struct MfDomain *domain,
                                  const double *x,
                                  size_t n,
                                  double *out);

/**
 * Classifies the domain. `delta` receives the witness tube radius, or NaN
 * when there is no witness.
 *
 * # Safety
 * `domain` must be a live handle; `verdict` must be valid; `delta` may be null.
 */
enum MfStatus mf_classify_domain(const struct MfDomain *domain,
                                 enum MfVerdict *verdict,
                                 double *delta);

/**
 * Full classification result as JSON; free it with [`mf_string_free`].
 *
 * # Safety
 * `domain` must be a live handle and `out` a valid pointer.
 */
enum MfStatus mf_classify_domain_json(const struct MfDomain *domain, char **out);

/**
 * Samples a catalogue surface (`plane`, `enneper`, `catenoid`, `helicoid`)
 * on a `resolution × resolution` grid.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MfStatus mf_surface_catalogue(const char *name, size_t resolution, struct MfSurface **out);

/**
 * # Safety
 * `surface` must come from [`mf_surface_catalogue`] and not have been freed.
 */
void mf_surface_free(struct MfSurface *surface);

/**
 * Number of grid nodes.
 *
 * # Safety
 * `surface` must be a live handle.
 */
size_t mf_surface_node_count(const struct MfSurface *surface);

/**
 * # Safety
 * `surface` must be a live handle.
 */
size_t mf_surface_dim(const struct MfSurface *surface);

/**
 * Copies node positions, row-major with `dim` coordinates per node, into
 * `buf` of length `len` (at least `node_count · dim`).
 *
 * # Safety
 * `surface` must be a live handle and `buf` must hold `len` doubles.
 */
enum MfStatus mf_surface_vertices(const struct MfSurface *surface, double *buf, size_t len);

/**
 * Maximum null and harmonic residuals of the sampled surface.
 *
 * # Safety
 * `surface` must be a live handle; both outputs must be valid.
 */
enum MfStatus mf_surface_residuals(const struct MfSurface *surface,
                                   double *max_null,
                                   double *max_harmonic);

/**
 * Fraction of grid nodes inside the domain.
 *
 * # Safety
 * Both handles must be live and `out` valid.
 */
enum MfStatus mf_surface_contained_fraction(const struct MfSurface *surface,
                                            const struct MfDomain *domain,
                                            double *out);

/**
 * `|Σ zᵢ²|` for `z = re + i·im`, or NaN if a pointer is null.
 *
 * # Safety
 * `re` and `im` must each hold `n` doubles.
 */
double mf_null_residual(const double *re, const double *im, size_t n);

/**
 * Sum of the `p` smallest Hessian eigenvalues of the scalar field
 * described by `tau_json` at `x`.
 *
 * # Safety
 * `tau_json` must be a NUL-terminated string, `x` must hold `n` doubles and
 * `out` be valid.
 */
enum MfStatus mf_psh_partial_sum(const char *tau_json,
                                 const double *x,
                                 size_t n,
                                 size_t p,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINFLEX_H */
