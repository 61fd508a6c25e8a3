#ifndef HAMRES_H
#define HAMRES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  HR_ERROR_OK = 0,
  HR_ERROR_NULL_POINTER = 1,
  HR_ERROR_INVALID_UTF8 = 2,
  HR_ERROR_PARSE = 3,
  HR_ERROR_INVALID_INPUT = 4,
  HR_ERROR_TOO_LARGE = 5,
  HR_ERROR_IO = 6,
  HR_ERROR_BUFFER_TOO_SMALL = 7,
  HR_ERROR_PANIC = 8,
} HrError;

typedef enum {
  HR_METHOD_BRUTE = 0,
  HR_METHOD_GROEBNER = 1,
  HR_METHOD_ILP_EXACT = 2,
  HR_METHOD_ILP_FEASIBILITY = 3,
  HR_METHOD_ILP_RANDOM_OBJECTIVE = 4,
} HrMethod;

typedef enum {
  HR_STATUS_RESOLVING = 0,
  HR_STATUS_NOT_RESOLVING = 1,
  HR_STATUS_INCONCLUSIVE = 2,
} HrStatus;

/**
 * A vertex set together with its Hamming graph.
 */
typedef struct HrSet HrSet;

/**
 * Outcome of a verification.
 */
typedef struct HrVerdict HrVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hr_last_error(void);

/**
 * Parses a set in `hrs-set v1` text form.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
HrError hr_set_parse(const char *text, HrSet **out);

/**
 * Reads a set from an `hrs-set v1` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
HrError hr_set_read(const char *path, HrSet **out);

/**
 * The shipped 77-element octapeptide set.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
HrError hr_set_shipped(HrSet **out);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
uintptr_t hr_set_len(const HrSet *set);

/**
 * `k` of the set's graph, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
uintptr_t hr_set_k(const HrSet *set);

/**
 * `a` of the set's graph, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
uintptr_t hr_set_a(const HrSet *set);

/**
 * # Safety
 * `set` must be NULL or a handle not freed before.
 */
void hr_set_free(HrSet *set);

/**
 * Decides whether `set` resolves its graph.
 *
 * `seed` is used by the randomized ILP modes; `budget_nodes` of 0 means
 * no node budget; `workers` applies to the Groebner method.
 *
 * # Safety
 * `set` must be a live handle and `out` a writable pointer.
 */
HrError hr_verify(const HrSet *set,
                  HrMethod method,
                  uint64_t seed,
                  uint64_t budget_nodes,
                  uintptr_t workers,
                  HrVerdict **out);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
HrStatus hr_verdict_status(const HrVerdict *verdict);

/**
 * Writes the two witness vertices, rendered in the instance alphabet, as
 * new strings to release with [`hr_string_free`]. Both are set to NULL
 * when the verdict carries no witness.
 *
 * # Safety
 * `verdict` must be a live handle; `x` and `y` writable pointers.
 */
HrError hr_verdict_witness(const HrVerdict *verdict, char **x, char **y);

/**
 * # Safety
 * `verdict` must be NULL or a handle not freed before.
 */
void hr_verdict_free(HrVerdict *verdict);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not freed before.
 */
void hr_string_free(char *s);

/**
 * Distances from `sequence` to each element of `basis`, written to `out`.
 *
 * `*out_len` always receives the dimension; `BufferTooSmall` is returned
 * when `capacity` is below it.
 *
 * # Safety
 * `basis` must be a live handle, `sequence` a NUL-terminated string, `out`
 * valid for `capacity` writes and `out_len` writable.
 */
HrError hr_embed(const HrSet *basis,
                 const char *sequence,
                 uint32_t *out,
                 uintptr_t capacity,
                 uintptr_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMRES_H */
