#ifndef QFRAC_H
#define QFRAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of the C interface.
 */
typedef enum QfracStatus {
  QFRAC_STATUS_OK = 0,
  QFRAC_STATUS_NULL_POINTER = 1,
  QFRAC_STATUS_INVALID_UTF8 = 2,
  QFRAC_STATUS_PARSE = 3,
  QFRAC_STATUS_INVALID_ARGUMENT = 4,
  QFRAC_STATUS_VERIFICATION = 5,
  QFRAC_STATUS_IO = 6,
  QFRAC_STATUS_OUT_OF_RANGE = 7,
  QFRAC_STATUS_PANIC = 8,
} QfracStatus;

/**
 * A conductor `q = a/b`.
 */
typedef struct QfracConductor QfracConductor;

/**
 * The exact evaluation of `c(q, m)`.
 */
typedef struct QfracEval QfracEval;

/**
 * A path `(m_0, ..., m_k)`.
 */
typedef struct QfracPath QfracPath;

/**
 * Loops returned by a search.
 */
typedef struct QfracSearch QfracSearch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Release with
 * [`qfrac_string_free`].
 */
char *qfrac_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been released before.
 */
void qfrac_string_free(char *s);

/**
 * Parses a path such as `"1,-1,-3"` or `"(1, -1, -3)"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QfracStatus qfrac_path_parse(const char *text, struct QfracPath **out);

/**
 * Builds a path from `len` entries.
 *
 * # Safety
 * `entries` must point to `len` integers and `out` be a valid pointer.
 */
enum QfracStatus qfrac_path_new(const int64_t *entries, size_t len, struct QfracPath **out);

/**
 * # Safety
 * `p` must come from this library and not have been released before.
 */
void qfrac_path_free(struct QfracPath *p);

/**
 * The length `k` of `(m_0, ..., m_k)`, or 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live path handle.
 */
size_t qfrac_path_length(const struct QfracPath *p);

/**
 * The path as text, or NULL for NULL.
 *
 * # Safety
 * `p` must be NULL or a live path handle.
 */
char *qfrac_path_to_string(const struct QfracPath *p);

/**
 * Parses a positive rational such as `"2/3"` or `"5"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QfracStatus qfrac_conductor_parse(const char *text, struct QfracConductor **out);

/**
 * `q = a/b` in lowest terms; `a` and `b` must be positive.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QfracStatus qfrac_conductor_new(uint64_t a, uint64_t b, struct QfracConductor **out);

/**
 * # Safety
 * `q` must come from this library and not have been released before.
 */
void qfrac_conductor_free(struct QfracConductor *q);

/**
 * Evaluates `c(q, m)` and the weight exactly.
 *
 * # Safety
 * `q` and `m` must be live handles and `out` a valid pointer.
 */
enum QfracStatus qfrac_eval(const struct QfracConductor *q,
                            const struct QfracPath *m,
                            struct QfracEval **out);

/**
 * # Safety
 * `e` must come from this library and not have been released before.
 */
void qfrac_eval_free(struct QfracEval *e);

/**
 * Whether every prefix value before the last is non-zero.
 *
 * # Safety
 * `e` must be NULL or a live evaluation handle.
 */
bool qfrac_eval_is_path(const struct QfracEval *e);

/**
 * Whether the path closes, `c(q, m) = 0`.
 *
 * # Safety
 * `e` must be NULL or a live evaluation handle.
 */
bool qfrac_eval_is_loop(const struct QfracEval *e);

/**
 * `c(q, m)` as `"p/q"`, or NULL when `m` is not a path.
 *
 * # Safety
 * `e` must be NULL or a live evaluation handle.
 */
char *qfrac_eval_value(const struct QfracEval *e);

/**
 * The squared weight as `"p/q"`, or NULL when `m` is not a path.
 *
 * # Safety
 * `e` must be NULL or a live evaluation handle.
 */
char *qfrac_eval_weight_sq(const struct QfracEval *e);

/**
 * The weight itself, a rational or `"sqrt(x)"`, or NULL when `m` is not a
 * path.
 *
 * # Safety
 * `e` must be NULL or a live evaluation handle.
 */
char *qfrac_eval_weight(const struct QfracEval *e);

/**
 * Re-verifies one certificate line on its own. Closure records need their
 * parent and fail here; use [`qfrac_verify_certificates`] for those.
 *
 * # Safety
 * `line` must be a NUL-terminated string.
 */
enum QfracStatus qfrac_verify_certificate_line(const char *line);

/**
 * Re-verifies every line of a certificate file's text. On
 * [`QfracStatus::Verification`], `failed` (if not NULL) receives the number
 * of failing records.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `failed` may be NULL.
 */
enum QfracStatus qfrac_verify_certificates(const char *text, size_t *failed);

/**
 * Loops of length `1..=max_length` with all `|m_j| <= entry_bound` by direct
 * enumeration.
 *
 * # Safety
 * `q` must be a live handle and `out` a valid pointer.
 */
enum QfracStatus qfrac_brute_force(const struct QfracConductor *q,
                                   size_t max_length,
                                   uint64_t entry_bound,
                                   struct QfracSearch **out);

/**
 * Loops of length `1..=max_length` from the Diophantine solver; an
 * `entry_bound` of 0 means unbounded entries.
 *
 * # Safety
 * `q` must be a live handle and `out` a valid pointer.
 */
enum QfracStatus qfrac_diophantine_search(const struct QfracConductor *q,
                                          size_t max_length,
                                          uint64_t entry_bound,
                                          struct QfracSearch **out);

/**
 * # Safety
 * `s` must come from this library and not have been released before.
 */
void qfrac_search_free(struct QfracSearch *s);

/**
 * Number of loops found, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live search handle.
 */
size_t qfrac_search_len(const struct QfracSearch *s);

/**
 * Whether the search covered its whole range.
 *
 * # Safety
 * `s` must be NULL or a live search handle.
 */
bool qfrac_search_exhaustive(const struct QfracSearch *s);

/**
 * A new path handle for loop `i`.
 *
 * # Safety
 * `s` must be a live search handle and `out` a valid pointer.
 */
enum QfracStatus qfrac_search_get(const struct QfracSearch *s, size_t i, struct QfracPath **out);

/**
 * The squared weight of loop `i` as `"p/q"`, or NULL when out of range.
 *
 * # Safety
 * `s` must be NULL or a live search handle.
 */
char *qfrac_search_weight_sq(const struct QfracSearch *s, size_t i);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFRAC_H */
