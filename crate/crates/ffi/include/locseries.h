#ifndef LOCSERIES_H
#define LOCSERIES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_ARGUMENT = 1,
  LS_STATUS_INVALID_INPUT = 2,
  LS_STATUS_UNSUPPORTED = 3,
  LS_STATUS_CAP_EXCEEDED = 4,
  LS_STATUS_INVALID_SEIFERT = 5,
  LS_STATUS_INTERNAL = 6,
} LsStatus;

/**
 * A finitely presented group.
 */
typedef struct LsGroup LsGroup;

/**
 * A validated Seifert matrix.
 */
typedef struct LsSeifert LsSeifert;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ls_last_error(void);

/**
 * Library version as a static string.
 */
const char *ls_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ls_string_free(char *s);

/**
 * Parses `gens: ...; rels: ...` or a `catalog:name(params)` reference.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LsStatus ls_group_parse(const char *text, struct LsGroup **out);

/**
 * Releases a group. Null is ignored.
 *
 * # Safety
 * `g` must come from [`ls_group_parse`] and not have been freed.
 */
void ls_group_free(struct LsGroup *g);

/**
 * Number of generators of the presentation.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_group_num_generators(const struct LsGroup *g, size_t *out);

/**
 * Series report as JSON for coefficients `Q`, `Z`, `Zloc:p` or `Zp:p`.
 *
 * # Safety
 * `g` must be a live handle, `coeff` a NUL-terminated string and `out` a
 * valid pointer; the string stored in `*out` must be released with
 * [`ls_string_free`].
 */
enum LsStatus ls_series_json(const struct LsGroup *g,
                             const char *coeff,
                             uint32_t depth,
                             size_t max_cosets,
                             char **out);

/**
 * Builds a Seifert matrix from `size * size` entries in row-major order and
 * checks `det(A − Aᵀ) = 1`. A size of 0 gives the unknot.
 *
 * # Safety
 * `entries` must point to `size * size` integers (or may be null when
 * `size` is 0) and `out` must be a valid pointer.
 */
enum LsStatus ls_seifert_new(const int64_t *entries, size_t size, struct LsSeifert **out);

/**
 * Releases a Seifert matrix. Null is ignored.
 *
 * # Safety
 * `s` must come from [`ls_seifert_new`] and not have been freed.
 */
void ls_seifert_free(struct LsSeifert *s);

/**
 * Levine–Tristram signature at `e^{iθ}`; `singular` is set when the form
 * degenerates there and the two-sided average was used.
 *
 * # Safety
 * `s` must be a live handle; `value` and `singular` valid pointers.
 */
enum LsStatus ls_signature(const struct LsSeifert *s, double theta, int64_t *value, bool *singular);

/**
 * ρ for the map onto `Z_d` as the reduced fraction `num / den`.
 *
 * # Safety
 * `s` must be a live handle; `num` and `den` valid pointers.
 */
enum LsStatus ls_rho_cyclic(const struct LsSeifert *s, uint64_t d, int64_t *num, int64_t *den);

/**
 * ρ for the abelianization onto `Z` with jump angles located to `tol`.
 * `exact` is set when the value is known exactly (every jump at a root of
 * unity), in which case `error_bound` is 0.
 *
 * # Safety
 * `s` must be a live handle; the out-pointers must be valid.
 */
enum LsStatus ls_rho_integral(const struct LsSeifert *s,
                              double tol,
                              double *value,
                              double *error_bound,
                              bool *exact);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCSERIES_H */
