#ifndef QPCONE_H
#define QPCONE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  QP_STATUS_OK = 0,
  QP_STATUS_NULL_POINTER = 1,
  QP_STATUS_INVALID_UTF8 = 2,
  /**
   * The input was rejected: bad JSON, atoms out of range, invalid order.
   */
  QP_STATUS_INVALID_INPUT = 3,
  /**
   * The input is too large for the requested computation.
   */
  QP_STATUS_TOO_LARGE = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  QP_STATUS_INTERNAL = 5,
} QpStatus;

/**
 * Result of a bounded cancellation search.
 */
typedef enum {
  QP_SEARCH_VERDICT_VIOLATION = 0,
  QP_SEARCH_VERDICT_NONE = 1,
  QP_SEARCH_VERDICT_INCONCLUSIVE = 2,
} QpSearchVerdict;

/**
 * Opaque simplicial complex.
 */
typedef struct QpComplex QpComplex;

/**
 * Opaque qualitative probability order.
 */
typedef struct QpOrder QpOrder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qp_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qp_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qp_version(void);

/**
 * Builds the complex generated by `count` faces given as bitmasks.
 *
 * # Safety
 * `generators` must point to `count` readable values (or be null when
 * `count` is 0); `out` must be writable.
 */
QpStatus qp_complex_new(size_t n, const uint64_t *generators, size_t count, QpComplex **out);

/**
 * Parses `{"n": .., "generators": [[..], ..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
QpStatus qp_complex_from_json(const char *json, QpComplex **out);

/**
 * # Safety
 * `complex` must come from this library and not have been freed; null is
 * ignored.
 */
void qp_complex_free(QpComplex *complex);

/**
 * # Safety
 * `complex` must be a live handle and `out` writable.
 */
QpStatus qp_complex_contains(const QpComplex *complex, uint64_t mask, bool *out);

/**
 * # Safety
 * `complex` must be a live handle and `out` writable.
 */
QpStatus qp_complex_face_count(const QpComplex *complex, size_t *out);

/**
 * Decides thresholdness. `certificate`, when not null, receives the
 * certificate as JSON.
 *
 * # Safety
 * `complex` must be a live handle, `out` writable, and `certificate` null
 * or writable.
 */
QpStatus qp_complex_is_threshold(const QpComplex *complex, bool *out, char **certificate);

/**
 * Decides shiftedness. `vertex_order`, when not null, receives the
 * witnessing vertex order as a JSON array (or `null`).
 *
 * # Safety
 * As for [`qp_complex_is_threshold`].
 */
QpStatus qp_complex_is_shifted(const QpComplex *complex, bool *out, char **vertex_order);

/**
 * # Safety
 * `complex` must be a live handle and `out` writable.
 */
QpStatus qp_complex_is_strongly_acyclic(const QpComplex *complex, bool *out);

/**
 * Searches for a CC_k* violation. A `node_budget` of 0 selects the
 * default. `outcome`, when not null, receives the full outcome as JSON.
 *
 * # Safety
 * `complex` must be a live handle, `verdict` writable, `outcome` null or
 * writable.
 */
QpStatus qp_complex_find_cck_star_violation(const QpComplex *complex,
                                            size_t k,
                                            uint64_t node_budget,
                                            QpSearchVerdict *verdict,
                                            char **outcome);

/**
 * Builds the order induced by `n` positive weights given as rational
 * strings such as `"3/16"`.
 *
 * # Safety
 * `weights` must point to `n` NUL-terminated strings; `out` must be
 * writable.
 */
QpStatus qp_order_from_weights(const char *const *weights, size_t n, QpOrder **out);

/**
 * Parses an order file: `{"n": .., "weights": [..]}` or
 * `{"n": .., "classes": [..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
QpStatus qp_order_from_json(const char *json, QpOrder **out);

/**
 * # Safety
 * `order` must come from this library and not have been freed; null is
 * ignored.
 */
void qp_order_free(QpOrder *order);

/**
 * Whether a probability measure represents the order. `certificate`, when
 * not null, receives the LP certificate as JSON.
 *
 * # Safety
 * `order` must be a live handle, `out` writable, `certificate` null or
 * writable.
 */
QpStatus qp_order_is_representable(const QpOrder *order, bool *out, char **certificate);

/**
 * As [`qp_order_is_representable`], for almost representability.
 *
 * # Safety
 * As for [`qp_order_is_representable`].
 */
QpStatus qp_order_is_almost_representable(const QpOrder *order, bool *out, char **certificate);

/**
 * Searches for a CC_k violation of the order.
 *
 * # Safety
 * As for [`qp_complex_find_cck_star_violation`].
 */
QpStatus qp_order_find_cck_violation(const QpOrder *order,
                                     size_t k,
                                     uint64_t node_budget,
                                     QpSearchVerdict *verdict,
                                     char **outcome);

/**
 * The complex of sets strictly below the set `threshold_mask`.
 *
 * # Safety
 * `order` must be a live handle and `out` writable.
 */
QpStatus qp_order_initial_segment(const QpOrder *order, uint64_t threshold_mask, QpComplex **out);

/**
 * Builds and verifies the 26-atom construction for `selector`. `passed`
 * receives whether every check passed; `report`, when not null, receives
 * the verification report as JSON.
 *
 * # Safety
 * `passed` must be writable and `report` null or writable.
 */
QpStatus qp_example26_verify(uint32_t selector, bool *passed, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPCONE_H */
