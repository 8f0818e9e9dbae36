#ifndef LPACLASS_H
#define LPACLASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all functions.
 */
typedef enum LpaStatus {
  LPA_STATUS_OK = 0,
  LPA_STATUS_NULL_POINTER = 1,
  LPA_STATUS_INVALID_UTF8 = 2,
  LPA_STATUS_PARSE_ERROR = 3,
  LPA_STATUS_INVALID_ARGUMENT = 4,
  LPA_STATUS_PRECONDITION_FAILED = 5,
  LPA_STATUS_CAP_EXCEEDED = 6,
  LPA_STATUS_OVERFLOW = 7,
  LPA_STATUS_CONSTRUCTION_FAILED = 8,
  LPA_STATUS_PANIC = 9,
} LpaStatus;

/**
 * Opaque graph handle.
 */
typedef struct LpaGraph LpaGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses graph JSON into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LpaStatus lpa_graph_from_json(const char *json, struct LpaGraph **out);

/**
 * Builds a named family member (`R_n`, `R_n_k`, `A_n_k`, `B_n_k`,
 * `R2_hat`, `S2`) from `len` integer parameters.
 *
 * # Safety
 * `name` must be NUL-terminated, `params` must point to `len` integers
 * (or be null when `len` is 0) and `out` must be valid.
 */
enum LpaStatus lpa_graph_builtin(const char *name,
                                 const int64_t *params,
                                 size_t len,
                                 struct LpaGraph **out);

/**
 * Releases a graph handle. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void lpa_graph_free(struct LpaGraph *g);

/**
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum LpaStatus lpa_graph_vertex_count(const struct LpaGraph *g, size_t *out);

/**
 * Graph JSON, to be released with [`lpa_string_free`].
 *
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum LpaStatus lpa_graph_to_json(const struct LpaGraph *g, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void lpa_string_free(char *s);

/**
 * Property report as JSON.
 *
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum LpaStatus lpa_graph_analyze_json(const struct LpaGraph *g, char **out);

/**
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum LpaStatus lpa_graph_is_purely_infinite_simple(const struct LpaGraph *g, bool *out);

/**
 * Pointed K0 data as `{"rank", "factors", "unit"}` JSON.
 *
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum LpaStatus lpa_graph_k0_json(const struct LpaGraph *g, char **out);

/**
 * Decides whether two pointed K0 values (JSON as produced by
 * [`lpa_graph_k0_json`]) are isomorphic.
 *
 * # Safety
 * Both strings must be NUL-terminated and `out` valid.
 */
enum LpaStatus lpa_k0_pointed_iso(const char *a, const char *b, bool *out);

/**
 * Certificate JSON for the rose with a `d`-tail reducing to the rose with
 * `n` petals, when gcd(d, n - 1) = 1.
 *
 * # Safety
 * `out` must be valid.
 */
enum LpaStatus lpa_certify_fish(int64_t n, int64_t d, char **out);

/**
 * Replays a certificate. Writes the verification report JSON to
 * `out_report` (may be null) and its verdict to `out_valid`. An invalid
 * certificate is not an error.
 *
 * # Safety
 * `cert` must be NUL-terminated; `out_valid` valid; `out_report` null or valid.
 */
enum LpaStatus lpa_verify_certificate_json(const char *cert,
                                           bool allow_infinite_field,
                                           bool *out_valid,
                                           char **out_report);

/**
 * Message for the most recent failure on this thread, or null when the
 * last call succeeded. Owned by the library; valid until the next call.
 */
const char *lpa_last_error_message(void);

/**
 * Static description of a status code; unknown codes get a generic text.
 */
const char *lpa_status_name(int status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPACLASS_H */
