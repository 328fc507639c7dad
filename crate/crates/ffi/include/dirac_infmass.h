#ifndef DIRAC_INFMASS_H
#define DIRAC_INFMASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DiStatus {
  DI_STATUS_OK = 0,
  DI_STATUS_NULL_POINTER = 1,
  DI_STATUS_INVALID_ARGUMENT = 2,
  DI_STATUS_INVALID_DOMAIN = 3,
  DI_STATUS_SOLVER_FAILURE = 4,
  DI_STATUS_PANIC = 5,
} DiStatus;

/**
 * Opaque domain handle.
 */
typedef struct DiDomain DiDomain;

typedef struct DiBounds {
  double lower_area;
  double upper_simple;
  double upper_inradius;
  double upper_ecrit;
  double fk_reference;
} DiBounds;

typedef struct DiSolveResult {
  double e1_dirac;
  double e1_var;
  double sigma_min;
  double bc_residual;
} DiSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *di_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void di_string_free(char *s);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum DiStatus di_domain_disk(double radius, struct DiDomain **out);

/**
 * r(t) = r0 + sum_k a_k cos kt + b_k sin kt with `coeffs` = [a_1, b_1, a_2, b_2, ...]
 * holding `n_modes` pairs.
 *
 * # Safety
 * `coeffs` must point to 2 * n_modes doubles (or be null when n_modes is 0);
 * `out` must be valid for writes.
 */
enum DiStatus di_domain_radial(double r0,
                               const double *coeffs,
                               size_t n_modes,
                               struct DiDomain **out);

/**
 * Seeded random area-pi domain, as used by sweeps.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DiStatus di_domain_random(uint64_t seed,
                               size_t modes,
                               double amplitude,
                               struct DiDomain **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum DiStatus di_domain_from_json(const char *json, struct DiDomain **out);

/**
 * # Safety
 * `d` must be a live handle; `out` receives a string to release with `di_string_free`.
 */
enum DiStatus di_domain_to_json(const struct DiDomain *d, char **out);

/**
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void di_domain_free(struct DiDomain *d);

/**
 * Principal eigenvalue of the unit disk, the root of J0 = J1.
 */
double di_disk_e1(void);

double di_bessel_j0(double x);

double di_bessel_j1(double x);

/**
 * # Safety
 * `d` must be a live handle and `out` valid for writes.
 */
enum DiStatus di_bounds(const struct DiDomain *d, struct DiBounds *out);

/**
 * Both solvers on one domain. `config_json` may be null for defaults.
 *
 * # Safety
 * `d` must be a live handle, `config_json` null or NUL-terminated, `out` valid for writes.
 */
enum DiStatus di_solve(const struct DiDomain *d,
                       const char *config_json,
                       struct DiSolveResult *out);

/**
 * Principal eigenvalue as the root of mu.
 *
 * # Safety
 * As for `di_solve`.
 */
enum DiStatus di_e1_variational(const struct DiDomain *d, const char *config_json, double *out);

/**
 * mu(E) for one E.
 *
 * # Safety
 * As for `di_solve`.
 */
enum DiStatus di_mu(const struct DiDomain *d, const char *config_json, double e, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRAC_INFMASS_H */
