#ifndef TFRACTAL_H
#define TFRACTAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_UTF8 = 2,
  TF_STATUS_PARSE = 3,
  TF_STATUS_EQUAL_ADDRESSES = 4,
  TF_STATUS_SCAN_BUDGET_EXCEEDED = 5,
  TF_STATUS_VERTEX_HIT = 6,
  TF_STATUS_NOT_ON_EDGE = 7,
  TF_STATUS_START_ON_VERTEX = 8,
  TF_STATUS_OUTSIDE_PIECE = 9,
  TF_STATUS_INVALID_DIRECTION = 10,
  TF_STATUS_DEGENERATE_REGRESSION = 11,
  TF_STATUS_RAYS_DIVERGE = 12,
  TF_STATUS_PRECONDITION = 13,
  TF_STATUS_MISSING_RULE = 14,
  TF_STATUS_PANIC = 15,
} TfStatus;

/**
 * How a trace stopped.
 */
typedef enum TfTermination {
  TF_TERMINATION_LENGTH_BUDGET = 0,
  TF_TERMINATION_CROSSING_BUDGET = 1,
  TF_TERMINATION_DEPTH_LIMIT = 2,
  TF_TERMINATION_HIT_SINGULARITY = 3,
  TF_TERMINATION_CLOSED_UP = 4,
} TfTermination;

/**
 * Opaque atlas handle.
 */
typedef struct TfAtlas TfAtlas;

/**
 * Opaque trace handle.
 */
typedef struct TfTrace TfTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *tf_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *tf_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void tf_string_free(char *s);

/**
 * Creates the canonical atlas.
 */
struct TfAtlas *tf_atlas_new(void);

/**
 * # Safety
 * `atlas` must be null or a handle from `tf_atlas_new`, not yet freed.
 */
void tf_atlas_free(struct TfAtlas *atlas);

/**
 * Runs the structural checks to `depth`; writes whether all passed.
 *
 * # Safety
 * `atlas` must be a live handle and `out_passed` writable.
 */
enum TfStatus tf_atlas_validate(const struct TfAtlas *atlas, size_t depth, bool *out_passed);

/**
 * Traces from `start` (`ADDRESS:PIECE:x,y`) along `(dx, dy)` with the
 * flow-time budget `max_length` (a rational such as `"7/2"`).
 *
 * # Safety
 * `atlas` must be a live handle, the strings NUL-terminated, and `out`
 * writable. On success `*out` holds a handle to release with
 * `tf_trace_free`.
 */
enum TfStatus tf_trace_new(const struct TfAtlas *atlas,
                           const char *start,
                           int64_t dx,
                           int64_t dy,
                           const char *max_length,
                           size_t max_crossings,
                           size_t max_depth,
                           struct TfTrace **out);

/**
 * Trace of the reversed flow from the end of `tr`.
 *
 * # Safety
 * `atlas` and `tr` must be live handles and `out` writable.
 */
enum TfStatus tf_trace_reverse(const struct TfAtlas *atlas,
                               const struct TfTrace *tr,
                               struct TfTrace **out);

/**
 * # Safety
 * `tr` must be null or a handle from this library, not yet freed.
 */
void tf_trace_free(struct TfTrace *tr);

/**
 * Number of straight segments, or 0 for a null handle.
 *
 * # Safety
 * `tr` must be null or a live handle.
 */
size_t tf_trace_segment_count(const struct TfTrace *tr);

/**
 * # Safety
 * `tr` must be a live handle and `out` writable.
 */
enum TfStatus tf_trace_termination(const struct TfTrace *tr, enum TfTermination *out);

/**
 * Exact flow time as a `p/q` string.
 *
 * # Safety
 * `tr` must be a live handle and `out` writable; free the result with
 * `tf_string_free`.
 */
enum TfStatus tf_trace_flow_time(const struct TfTrace *tr, char **out);

/**
 * The whole trace record as JSON.
 *
 * # Safety
 * `tr` must be a live handle and `out` writable; free the result with
 * `tf_string_free`.
 */
enum TfStatus tf_trace_to_json(const struct TfTrace *tr, char **out);

/**
 * Area of the depth-`n` truncation as a `p/q` string.
 *
 * # Safety
 * `out` must be writable; free the result with `tf_string_free`.
 */
enum TfStatus tf_partial_area(uint32_t n, char **out);

/**
 * 2-adic distance between two eventually periodic addresses written as
 * `head(period)`, as a `p/q` string.
 *
 * # Safety
 * The strings must be NUL-terminated and `out` writable; free the result
 * with `tf_string_free`.
 */
enum TfStatus tf_d2(const char *a, const char *b, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFRACTAL_H */
