#ifndef ORBIDISK_H
#define ORBIDISK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrbidiskStatus {
  ORBIDISK_STATUS_OK = 0,
  /**
   * `verify` ran and the two sides differ.
   */
  ORBIDISK_STATUS_MISMATCH = 1,
  ORBIDISK_STATUS_INVALID_INPUT = 2,
  ORBIDISK_STATUS_NULL_POINTER = 3,
  ORBIDISK_STATUS_INTERNAL = 4,
} OrbidiskStatus;

/**
 * A validated geometry with its brane and run settings.
 */
typedef struct OrbidiskModel OrbidiskModel;

/**
 * The result of a computation.
 */
typedef struct OrbidiskReport OrbidiskReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a built-in example (`c3`, `x111`, `x120`, `x012`, `x000`, `conifold`, `kp2`).
 *
 * `framing` may be NULL to keep the example's framing; otherwise it points to
 * `framing_len` integers (`f` for an outer brane, `f+, f-` for an inner one).
 *
 * # Safety
 * `name` must be a NUL-terminated string, `framing` must be NULL or point to
 * `framing_len` readable values, and `out` must be writable.
 */
enum OrbidiskStatus orbidisk_model_from_example(const char *name,
                                                const int64_t *framing,
                                                size_t framing_len,
                                                struct OrbidiskModel **out);

/**
 * Parses a model from the TOML input format.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` must be writable.
 */
enum OrbidiskStatus orbidisk_model_from_toml(const char *toml, struct OrbidiskModel **out);

/**
 * Sets the truncation order from a rational string such as `"4"` or `"7/2"`.
 *
 * # Safety
 * `model` must be a live handle and `max_degree` a NUL-terminated string.
 */
enum OrbidiskStatus orbidisk_model_set_max_degree(struct OrbidiskModel *model,
                                                  const char *max_degree);

/**
 * # Safety
 * `model` must be NULL or a handle from this library that was not yet freed.
 */
void orbidisk_model_free(struct OrbidiskModel *model);

/**
 * Compares the A-side and B-side potentials. Returns `Mismatch` (with the
 * report still written to `out`) when they differ.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OrbidiskStatus orbidisk_verify(const struct OrbidiskModel *model, struct OrbidiskReport **out);

/**
 * Computes the A-side potential, by sector and assembled.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OrbidiskStatus orbidisk_amodel(const struct OrbidiskModel *model, struct OrbidiskReport **out);

/**
 * Computes the B-side potential from the mirror curve.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OrbidiskStatus orbidisk_bmodel(const struct OrbidiskModel *model, struct OrbidiskReport **out);

/**
 * 1 if a verify report found both sides equal, 0 if not, -1 for other reports or NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
int32_t orbidisk_report_equal(const struct OrbidiskReport *report);

/**
 * The report as JSON; free with [`orbidisk_string_free`]. NULL on failure.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
char *orbidisk_report_to_json(const struct OrbidiskReport *report);

/**
 * # Safety
 * `report` must be NULL or a handle from this library that was not yet freed.
 */
void orbidisk_report_free(struct OrbidiskReport *report);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library that was not yet freed.
 */
void orbidisk_string_free(char *s);

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *orbidisk_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBIDISK_H */
