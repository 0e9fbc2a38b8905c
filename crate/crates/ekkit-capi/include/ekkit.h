#ifndef EKKIT_H
#define EKKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `EK_STATUS_OK` is zero; everything else is an error.
 */
typedef enum EkStatus {
  EK_STATUS_OK = 0,
  EK_STATUS_NULL_POINTER = 1,
  EK_STATUS_INVALID_UTF8 = 2,
  EK_STATUS_DEGENERATE = 3,
  EK_STATUS_DOMAIN = 4,
  EK_STATUS_POLE = 5,
  EK_STATUS_TRUNCATION = 6,
  EK_STATUS_NOT_COMPOSABLE = 7,
  EK_STATUS_SHAPE = 8,
  EK_STATUS_INVALID_CONFIG = 9,
  EK_STATUS_MISSING_GENERATOR = 10,
  EK_STATUS_UNKNOWN_CHECK = 11,
  EK_STATUS_IO = 12,
  EK_STATUS_PANIC = 13,
} EkStatus;

/**
 * A normalized lattice `Z + Zτ`.
 */
typedef struct EkLattice EkLattice;

/**
 * Memoized reduction polynomials.
 */
typedef struct EkReducer EkReducer;

typedef struct EkComplex {
  double re;
  double im;
} EkComplex;

/**
 * A series value with its truncation diagnostics.
 */
typedef struct EkValue {
  struct EkComplex value;
  double radius_used;
  double tail_bound;
} EkValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last error on this thread (empty after a success). The
 * pointer stays valid until the next call into the library on this thread.
 */
const char *ek_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void ek_string_free(char *s);

/**
 * Create the lattice `Z + Zτ`; `Im τ` must be positive.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EkStatus ek_lattice_new(struct EkComplex tau, struct EkLattice **out);

/**
 * # Safety
 * `l` must be null or a handle from `ek_lattice_new`, not yet freed.
 */
void ek_lattice_free(struct EkLattice *l);

/**
 * Covolume constant `A` of the lattice.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_lattice_a(const struct EkLattice *l, double *out);

/**
 * The pairing `⟨z, w⟩`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_pairing(const struct EkLattice *l,
                         struct EkComplex z,
                         struct EkComplex w,
                         struct EkComplex *out);

/**
 * `f*_{m,n}(z, w)`; `tilde` selects the tilde variant.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_f_star(const struct EkLattice *l,
                        uint32_t m,
                        uint32_t n,
                        struct EkComplex z,
                        struct EkComplex w,
                        bool tilde,
                        struct EkValue *out);

/**
 * `g*_{a,b}(z, w)`; `tilde` selects the tilde variant.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_g_star(const struct EkLattice *l,
                        uint32_t a,
                        uint32_t b,
                        struct EkComplex z,
                        struct EkComplex w,
                        bool tilde,
                        struct EkValue *out);

/**
 * Eisenstein–Kronecker number `e*_{a,b}(z, w)`, `b ≥ 1`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_ek(const struct EkLattice *l,
                    uint32_t a,
                    uint32_t b,
                    struct EkComplex z,
                    struct EkComplex w,
                    struct EkValue *out);

/**
 * Direct partial sum over `|λ + z| ≤ radius`; needs `b ≥ a + 3`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_ek_direct(const struct EkLattice *l,
                           uint32_t a,
                           uint32_t b,
                           struct EkComplex z,
                           struct EkComplex w,
                           double radius,
                           struct EkValue *out);

/**
 * `e_{2k}` for even weight `≥ 4`; weight 2 gives `e*_2`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum EkStatus ek_eisenstein(const struct EkLattice *l, uint32_t weight, struct EkComplex *out);

/**
 * Run one named check on this lattice's τ. `*out_json` receives the JSON
 * report (free with `ek_string_free`), `*out_pass` the verdict.
 *
 * # Safety
 * `check` must be a NUL-terminated string; other pointers must be valid.
 */
enum EkStatus ek_run_check(const struct EkLattice *l,
                           const char *check,
                           uint64_t seed,
                           char **out_json,
                           bool *out_pass);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum EkStatus ek_reducer_new(struct EkReducer **out);

/**
 * # Safety
 * `r` must be null or a handle from `ek_reducer_new`, not yet freed.
 */
void ek_reducer_free(struct EkReducer *r);

/**
 * Canonical text of the polynomial expressing `g*_{a,b}(z, w)`, or
 * `g*_{a,b}(z, 0)` when `one_var` is set. Free with `ek_string_free`.
 *
 * # Safety
 * Pointers must be valid; the handle must not be used concurrently.
 */
enum EkStatus ek_reduce(struct EkReducer *r, uint32_t a, uint32_t b, bool one_var, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EKKIT_H */
