#ifndef CUBICLAB_H
#define CUBICLAB_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CubiclabStatus {
  CUBICLAB_STATUS_OK = 0,
  CUBICLAB_STATUS_NULL_POINTER = 1,
  CUBICLAB_STATUS_INVALID_ARGUMENT = 2,
  CUBICLAB_STATUS_OVERFLOW = 3,
  CUBICLAB_STATUS_INSUFFICIENT_RELATIONS = 4,
  CUBICLAB_STATUS_CERTIFICATION_FAILED = 5,
  CUBICLAB_STATUS_UNRESOLVED = 6,
  CUBICLAB_STATUS_INTERNAL = 7,
  CUBICLAB_STATUS_PANIC = 8,
} CubiclabStatus;

typedef enum CubiclabCertification {
  CUBICLAB_CERTIFICATION_CERTIFIED = 0,
  CUBICLAB_CERTIFICATION_HEURISTIC = 1,
  CUBICLAB_CERTIFICATION_ORACLE = 2,
} CubiclabCertification;

/**
 * A computed class group.
 */
typedef struct CubiclabClassGroup CubiclabClassGroup;

/**
 * A cubic field `Q[x]/(f)` with `Z[x]/(f)` maximal.
 */
typedef struct CubiclabField CubiclabField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *cubiclab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cubiclab_version(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void cubiclab_string_free(char *s);

/**
 * Discriminant of `x^3 + a x^2 + b x + 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CubiclabStatus cubiclab_family_discriminant(int64_t a, int64_t b, int64_t *out);

/**
 * Builds the field of `x^3 + a x^2 + b x + c`, which must be irreducible
 * with maximal equation order. `precision` 0 selects the default.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CubiclabStatus cubiclab_field_new(int64_t a,
                                       int64_t b,
                                       int64_t c,
                                       uint32_t precision,
                                       struct CubiclabField **out);

/**
 * # Safety
 * `field` must come from [`cubiclab_field_new`] or be NULL.
 */
void cubiclab_field_free(struct CubiclabField *field);

/**
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum CubiclabStatus cubiclab_field_discriminant(const struct CubiclabField *field, int64_t *out);

/**
 * Number of real places (1 or 3).
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum CubiclabStatus cubiclab_field_real_places(const struct CubiclabField *field, uint32_t *out);

/**
 * Class group of `field`, by relation search with the given seed or by
 * the exhaustive oracle.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum CubiclabStatus cubiclab_class_group(const struct CubiclabField *field,
                                         uint64_t seed,
                                         bool use_oracle,
                                         struct CubiclabClassGroup **out);

/**
 * # Safety
 * `cg` must come from [`cubiclab_class_group`] or be NULL.
 */
void cubiclab_class_group_free(struct CubiclabClassGroup *cg);

/**
 * Class number; 0 for a NULL handle.
 *
 * # Safety
 * `cg` must be a live handle or NULL.
 */
uint64_t cubiclab_class_group_order(const struct CubiclabClassGroup *cg);

/**
 * 2-rank; 0 for a NULL handle.
 *
 * # Safety
 * `cg` must be a live handle or NULL.
 */
uint32_t cubiclab_class_group_two_rank(const struct CubiclabClassGroup *cg);

/**
 * Copies up to `cap` invariant factors into `buf` and stores their total
 * number in `len`.
 *
 * # Safety
 * `cg` must be a live handle, `buf` valid for `cap` writes (or NULL with
 * `cap` 0) and `len` valid for writes.
 */
enum CubiclabStatus cubiclab_class_group_divisors(const struct CubiclabClassGroup *cg,
                                                  uint64_t *buf,
                                                  size_t cap,
                                                  size_t *len);

/**
 * Regulator enclosure `[lo, hi]`.
 *
 * # Safety
 * `cg` must be a live handle and `lo`, `hi` valid for writes.
 */
enum CubiclabStatus cubiclab_class_group_regulator(const struct CubiclabClassGroup *cg,
                                                   double *lo,
                                                   double *hi);

/**
 * # Safety
 * `cg` must be a live handle and `out` valid for writes.
 */
enum CubiclabStatus cubiclab_class_group_certification(const struct CubiclabClassGroup *cg,
                                                       enum CubiclabCertification *out);

/**
 * The class group as JSON; free with [`cubiclab_string_free`].
 *
 * # Safety
 * `cg` must be a live handle and `out` valid for writes.
 */
enum CubiclabStatus cubiclab_class_group_json(const struct CubiclabClassGroup *cg, char **out);

/**
 * Decides whether first moment `m1_num/m1_den` and second moment at most
 * `m2_num/m2_den` are attainable on the exponents `n >= min_exponent`
 * outside `excluded`. Writes the verdict and, if `json` is not NULL, the
 * certificate as JSON.
 *
 * # Safety
 * `excluded` must be valid for `n_excluded` reads (or NULL with 0),
 * `feasible` valid for writes, `json` NULL or valid for writes.
 */
enum CubiclabStatus cubiclab_moments_feasible(uint32_t min_exponent,
                                              const uint32_t *excluded,
                                              size_t n_excluded,
                                              int64_t m1_num,
                                              int64_t m1_den,
                                              int64_t m2_num,
                                              int64_t m2_den,
                                              bool *feasible,
                                              char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBICLAB_H */
