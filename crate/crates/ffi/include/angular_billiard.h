#ifndef ANGULAR_BILLIARD_H
#define ANGULAR_BILLIARD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum AbStatus {
  AbStatus_Ok = 0,
  AbStatus_NullArgument = 1,
  AbStatus_InvalidUtf8 = 2,
  AbStatus_BadInput = 3,
  AbStatus_NumericalFailure = 4,
} AbStatus;

/**
 * Opaque convex-curve handle.
 */
typedef struct AbCurve AbCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a curve from its JSON description (the same schema the CLI
 * accepts); on success stores a heap handle in `out`. The handle must be
 * released with `ab_curve_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum AbStatus ab_curve_from_json(const char *json, struct AbCurve **out);

/**
 * Releases a curve handle; a null pointer is a no-op.
 *
 * # Safety
 * `curve` must come from `ab_curve_from_json` and not be freed twice.
 */
void ab_curve_free(struct AbCurve *curve);

/**
 * Iterates the angular map from the exterior polar state (phi, r) and
 * writes the plane points of the orbit, including the start, as
 * `2 * (steps + 1)` interleaved x,y values into `out_xy`.
 *
 * # Safety
 * `out_xy` must point to at least `2 * (steps + 1)` writable doubles.
 */
enum AbStatus ab_angular_orbit(const struct AbCurve *curve,
                               double phi,
                               double r,
                               uintptr_t steps,
                               double *out_xy);

/**
 * Iterates the Birkhoff billiard in the dual table of the curve from the
 * oriented line (phi, p) and writes `2 * (steps + 1)` interleaved phi,p
 * values into `out_phip`.
 *
 * # Safety
 * `out_phip` must point to at least `2 * (steps + 1)` writable doubles.
 */
enum AbStatus ab_birkhoff_orbit(const struct AbCurve *curve,
                                double phi,
                                double p,
                                uintptr_t steps,
                                double *out_phip);

/**
 * Minimum of the generating-function twist over a 256 x 128 grid; positive
 * for strictly convex curves.
 *
 * # Safety
 * `out` must be a valid pointer to a double.
 */
enum AbStatus ab_twist_min(const struct AbCurve *curve, double *out);

/**
 * Emits the non-integrability certificate of the curve {f = 0} as a JSON
 * string, where `f_json` is a list of [i, j, coefficient] triples. The
 * string must be released with `ab_string_free`.
 *
 * # Safety
 * `f_json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum AbStatus ab_certify_json(const char *f_json, char **out);

/**
 * Releases a string returned by this library; a null pointer is a no-op.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANGULAR_BILLIARD_H */
