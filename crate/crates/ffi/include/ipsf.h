#ifndef IPSF_H
#define IPSF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum IpsfStatus {
  IPSF_STATUS_OK = 0,
  /**
   * Bad parameter value (order, level, domain, state index, ...).
   */
  IPSF_STATUS_INVALID_ARGUMENT = 1,
  IPSF_STATUS_NULL_POINTER = 2,
  /**
   * Factorization, eigensolver or certification failure.
   */
  IPSF_STATUS_NUMERICAL = 3,
  IPSF_STATUS_IO = 4,
  /**
   * Table file failed its checksum or has an unknown version.
   */
  IPSF_STATUS_INTEGRITY = 5,
  /**
   * Output buffer too short; the required length was reported.
   */
  IPSF_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  IPSF_STATUS_PANIC = 7,
} IpsfStatus;

/**
 * Eigenpairs of one assembled problem.
 */
typedef struct IpsfSpectrum IpsfSpectrum;

/**
 * Coefficient tables for one scaling-function order.
 */
typedef struct IpsfTables IpsfTables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread; empty if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *ipsf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ipsf_version(void);

/**
 * Compute the mask, connection and moment tables for order `order`
 * (even, >= 2) and monomial degrees up to `m_max`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum IpsfStatus ipsf_tables_new(int64_t order, uint32_t m_max, struct IpsfTables **out);

/**
 * Load tables written by [`ipsf_tables_store`].
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` a valid handle slot.
 */
enum IpsfStatus ipsf_tables_load(const char *path, struct IpsfTables **out);

/**
 * Write tables atomically to `path`.
 *
 * # Safety
 * `tables` must come from this library; `path` must be NUL-terminated.
 */
enum IpsfStatus ipsf_tables_store(const struct IpsfTables *tables, const char *path);

/**
 * # Safety
 * `tables` must come from this library and not be used afterwards. Null is ignored.
 */
void ipsf_tables_free(struct IpsfTables *tables);

/**
 * Refinement coefficient `a_k` (zero outside the support).
 *
 * # Safety
 * `tables` must come from this library; `out` must be writable.
 */
enum IpsfStatus ipsf_tables_mask(const struct IpsfTables *tables, int64_t k, double *out);

/**
 * Connection coefficient `L_k = <phi'', phi(. - k)>`.
 *
 * # Safety
 * `tables` must come from this library; `out` must be writable.
 */
enum IpsfStatus ipsf_tables_connection(const struct IpsfTables *tables, int64_t k, double *out);

/**
 * Moment `H_{m,k} = <x^m phi(x - k), phi(x)>`.
 *
 * # Safety
 * `tables` must come from this library; `out` must be writable.
 */
enum IpsfStatus ipsf_tables_moment(const struct IpsfTables *tables,
                                   uint32_t m,
                                   int64_t k,
                                   double *out);

/**
 * Lowest `n_states` eigenpairs of `-psi'' + V psi = E psi` on
 * `[-radius, radius]` at resolution `level`, with
 * `V(x) = sum_i coeffs[i] x^i`.
 *
 * # Safety
 * `tables` must come from this library, `coeffs` must point to `n_coeffs`
 * readable doubles, and `out` must be a valid handle slot.
 */
enum IpsfStatus ipsf_solve(const struct IpsfTables *tables,
                           const double *coeffs,
                           size_t n_coeffs,
                           uint32_t level,
                           double radius,
                           size_t n_states,
                           struct IpsfSpectrum **out);

/**
 * # Safety
 * `spectrum` must come from this library and not be used afterwards. Null is ignored.
 */
void ipsf_spectrum_free(struct IpsfSpectrum *spectrum);

/**
 * Number of computed eigenpairs and the basis dimension.
 *
 * # Safety
 * `spectrum` must come from this library; outputs may be null if unwanted.
 */
enum IpsfStatus ipsf_spectrum_size(const struct IpsfSpectrum *spectrum,
                                   size_t *n_states,
                                   size_t *dimension);

/**
 * Copy the ascending eigenvalues into `out[0..len]`; `len` must be at least
 * the number of states.
 *
 * # Safety
 * `spectrum` must come from this library; `out` must hold `len` doubles.
 */
enum IpsfStatus ipsf_spectrum_eigenvalues(const struct IpsfSpectrum *spectrum,
                                          double *out,
                                          size_t len);

/**
 * Copy the residuals `||A c - E B c||` into `out[0..len]`.
 *
 * # Safety
 * `spectrum` must come from this library; `out` must hold `len` doubles.
 */
enum IpsfStatus ipsf_spectrum_residuals(const struct IpsfSpectrum *spectrum,
                                        double *out,
                                        size_t len);

/**
 * Copy the B-normalized coefficient vector of `state` into `out[0..len]`;
 * `len` must be at least the basis dimension.
 *
 * # Safety
 * `spectrum` must come from this library; `out` must hold `len` doubles.
 */
enum IpsfStatus ipsf_spectrum_eigenvector(const struct IpsfSpectrum *spectrum,
                                          size_t state,
                                          double *out,
                                          size_t len);

/**
 * Sample eigenfunction `state` on the grid `i / 2^depth` over the domain
 * (`depth >= level`). Writes `*written` points to `x` and `psi`; if `len`
 * is too small, returns `BUFFER_TOO_SMALL` with the required count in
 * `*written`.
 *
 * # Safety
 * Handles must come from this library and describe the same order;
 * `x` and `psi` must hold `len` doubles; `written` must be writable.
 */
enum IpsfStatus ipsf_spectrum_sample(const struct IpsfSpectrum *spectrum,
                                     const struct IpsfTables *tables,
                                     size_t state,
                                     uint32_t depth,
                                     double *x,
                                     double *psi,
                                     size_t len,
                                     size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IPSF_H */
