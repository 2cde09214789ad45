#ifndef HYPERFACTOR_H
#define HYPERFACTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HfMode {
  HF_MODE_REDUCED = 0,
  HF_MODE_FULL = 1,
  HF_MODE_SAMPLED = 2,
} HfMode;

typedef enum HfProperty {
  HF_PROPERTY_C1F = 0,
  HF_PROPERTY_U1F = 1,
  HF_PROPERTY_UC1F = 2,
  HF_PROPERTY_HB1F = 3,
} HfProperty;

typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  /**
   * Bad order, label, mode or config.
   */
  HF_STATUS_INVALID_ARGUMENT = 2,
  HF_STATUS_BUFFER_TOO_SMALL = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  HF_STATUS_INTERNAL = 4,
} HfStatus;

/**
 * Opaque handle to a built factorisation.
 */
typedef struct HfFactorisation HfFactorisation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on this thread.
 */
const char *hf_last_error(void);

/**
 * Library version as a static string.
 */
const char *hf_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hf_string_free(char *s);

/**
 * Builds the factorisation for `q`, a prime power with `q = 2 mod 3`.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum HfStatus hf_factorisation_new(uint32_t q, struct HfFactorisation **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from [`hf_factorisation_new`] and not have been freed.
 */
void hf_factorisation_free(struct HfFactorisation *h);

/**
 * Field order `q`, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
uint32_t hf_factorisation_q(const struct HfFactorisation *h);

/**
 * Number of factors, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t hf_factorisation_len(const struct HfFactorisation *h);

/**
 * Copies the edges of factor `index` as vertex triples into `buf`
 * (`3 * edges` entries). `written` receives the number of entries needed;
 * when `buf_len` is too small nothing is copied.
 *
 * # Safety
 * `h` must be a live handle, `buf` valid for `buf_len` entries (or null
 * with `buf_len` 0), `written` a valid pointer.
 */
enum HfStatus hf_factorisation_factor_edges(const struct HfFactorisation *h,
                                            size_t index,
                                            uint32_t *buf,
                                            size_t buf_len,
                                            size_t *written);

/**
 * Writes whether the factors partition the edges of the complete 3-graph.
 *
 * # Safety
 * `h` must be a live handle and `ok` a valid pointer.
 */
enum HfStatus hf_factorisation_verify_partition(const struct HfFactorisation *h, bool *ok);

/**
 * Overlap of the base factor with the factor labelled `(alpha, beta)`,
 * both given as packed field indices.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum HfStatus hf_overlap(const struct HfFactorisation *h,
                         uint32_t alpha,
                         uint32_t beta,
                         size_t *out);

/**
 * Decides `property` and writes the JSON report to `json`. `samples` and
 * `seed` are used in sampled mode only; `budget_ms` bounds each Hamilton
 * cycle search (0 means unlimited).
 *
 * # Safety
 * `h` must be a live handle and `json` a valid pointer; free the string
 * with [`hf_string_free`].
 */
enum HfStatus hf_check(const struct HfFactorisation *h,
                       enum HfProperty property,
                       enum HfMode mode,
                       size_t samples,
                       uint64_t seed,
                       uint64_t budget_ms,
                       char **json);

/**
 * Runs the verification suite from a TOML config (null selects the
 * default profile) and writes the JSON report to `json`. `exit_code`, if
 * not null, receives 0 clean, 1 discrepancy or 2 indeterminate.
 *
 * # Safety
 * `config_toml` must be null or a nul-terminated string, `json` a valid
 * pointer and `exit_code` null or valid.
 */
enum HfStatus hf_suite_run(const char *config_toml, char **json, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERFACTOR_H */
