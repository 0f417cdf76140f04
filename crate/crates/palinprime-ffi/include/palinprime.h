#ifndef PALINPRIME_H
#define PALINPRIME_H

/* Generated by cbindgen from palinprime-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes mirrored into the C header.
 */
typedef enum PpStatus {
  /**
   * Success.
   */
  PP_STATUS_OK = 0,
  /**
   * Invalid input: bad base, residue, divisor, rank, or zero value.
   */
  PP_STATUS_DOMAIN = 1,
  /**
   * Resource limit: enumeration budget, pair budget, or the
   * factorization bound.
   */
  PP_STATUS_LIMIT = 2,
  /**
   * A required pointer argument was null.
   */
  PP_STATUS_NULL_POINTER = 3,
  /**
   * The result does not fit the C output type.
   */
  PP_STATUS_RANGE = 4,
} PpStatus;

/**
 * Opaque handle: divisor profile of one palindrome length (the sieve
 * input #Pi(length; 0, d) for every realized squarefree d).
 */
typedef struct PpProfile PpProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Short static name for a status code.
 */
const char *pp_status_name(enum PpStatus status);

/**
 * True iff g is a usable base (g >= 2 with g^3 - g representable).
 */
bool pp_base_valid(uint64_t g);

/**
 * Whether n reads the same backwards as forwards in base g.
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_is_palindrome(uint64_t n, uint64_t g, bool *out);

/**
 * Number of palindromes of the given length.
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_count(uint32_t length, uint64_t g, uint64_t *out);

/**
 * The rank-th palindrome of the given length, rank counted from zero in
 * increasing order.
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_palindrome_at(uint64_t rank, uint32_t length, uint64_t g, uint64_t *out);

/**
 * Rank of a palindrome within its length class; inverse of
 * [`pp_palindrome_at`].
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_rank_of(uint64_t n, uint32_t length, uint64_t g, uint64_t *out);

/**
 * Count palindromes of one length with n = a (mod q); when `has_class`
 * is set, restrict further to n = k (mod g^3 - g). `budget` caps the
 * enumeration (0 means the library default).
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_count_ap(uint32_t length,
                          uint64_t g,
                          int64_t a,
                          uint64_t q,
                          bool has_class,
                          int64_t k,
                          uint64_t budget,
                          uint64_t *out);

/**
 * Number of palindromes up to x coprime to g^3 - g.
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_pstar_count(uint64_t x, uint64_t g, uint64_t budget, uint64_t *out);

/**
 * Leading constant of the fixed-length coprime pair density.
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_thm1_constant(uint64_t g, double *out);

/**
 * Leading constant of the coprime-to-g^3-g pair density.
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_thm2_constant(uint64_t g, double *out);

/**
 * The exact rational rho(g) as numerator/denominator.
 *
 * # Safety
 *
 * `out_num` and `out_den` must be null (reported as an error) or valid
 * for writes.
 */
enum PpStatus pp_rho(uint64_t g, uint64_t *out_num, uint64_t *out_den);

/**
 * Build the divisor profile of one length. On success writes a heap
 * handle that must be released with [`pp_profile_free`].
 *
 * # Safety
 *
 * `out` must be null (reported as an error) or valid for a write.
 */
enum PpStatus pp_profile_build(uint32_t length,
                               uint64_t g,
                               uint64_t budget,
                               struct PpProfile **out);

/**
 * #Pi(length; 0, d) for squarefree d; zero when d is not realized or the
 * handle is null.
 *
 * # Safety
 *
 * `profile` must be null or a live handle from [`pp_profile_build`].
 */
uint64_t pp_profile_count(const struct PpProfile *profile, uint64_t d);

/**
 * Total palindrome count of the profiled length.
 *
 * # Safety
 *
 * `profile` must be null or a live handle from [`pp_profile_build`].
 */
uint64_t pp_profile_total(const struct PpProfile *profile);

/**
 * Möbius-sieve count of ordered coprime palindrome pairs from a profile,
 * split at `threshold` into head and tail contributions.
 *
 * # Safety
 *
 * `profile` must be null (reported as an error) or a live handle from
 * [`pp_profile_build`]; the out-pointers must be null or valid for
 * writes.
 */
enum PpStatus pp_coprime_pairs(const struct PpProfile *profile,
                               uint64_t threshold,
                               int64_t *out_total,
                               int64_t *out_n1,
                               int64_t *out_n2);

/**
 * Release a profile handle. Null is a no-op.
 *
 * # Safety
 *
 * `profile` must be null or a live handle from [`pp_profile_build`];
 * the handle must not be used afterwards.
 */
void pp_profile_free(struct PpProfile *profile);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PALINPRIME_H */
