#ifndef WILSON_LOOPS_H
#define WILSON_LOOPS_H

#include <stddef.h>
#include <stdint.h>

typedef enum WlStatus {
  WL_STATUS_OK = 0,
  WL_STATUS_NULL_POINTER = 1,
  WL_STATUS_INVALID_UTF8 = 2,
  WL_STATUS_PARSE = 3,
  WL_STATUS_INVALID = 4,
  WL_STATUS_BUDGET = 5,
  WL_STATUS_UNSUPPORTED = 6,
  WL_STATUS_BUFFER_TOO_SMALL = 7,
  WL_STATUS_PANIC = 8,
} WlStatus;

// A parsed sequence of loops (possibly a single loop, possibly empty).
typedef struct WlLoops WlLoops;

typedef struct WlPoly WlPoly;

typedef struct WlSolver WlSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, empty after a success.
// The pointer stays valid until the next call into this library.
const char *wl_last_error(void);

const char *wl_version(void);

// `policy` is "lex", "top" or "random:SEED"; null means "lex".
//
// # Safety
// `policy` is null or a NUL-terminated string; `out` is writable.
enum WlStatus wl_solver_new(const char *policy, struct WlSolver **out);

// Limits for later calls. `max_millis` of 0 means no time limit.
//
// # Safety
// `solver` comes from [`wl_solver_new`].
enum WlStatus wl_solver_set_budget(struct WlSolver *solver,
                                   uintptr_t max_memo,
                                   uintptr_t max_depth,
                                   uint64_t max_millis);

// Number of cached coefficients.
//
// # Safety
// `solver` is null or comes from [`wl_solver_new`].
uintptr_t wl_solver_memo_len(const struct WlSolver *solver);

// # Safety
// `solver` is null or an unfreed handle from [`wl_solver_new`].
void wl_solver_free(struct WlSolver *solver);

// Parse loops written as in the command line tool, for example
// "x+ y+ x- y-", "rect 2 3", "commutator 1" or several loops
// separated by ";".
//
// # Safety
// `words` is a NUL-terminated string; `out` is writable.
enum WlStatus wl_loops_parse(const char *words, uintptr_t dim, struct WlLoops **out);

// Number of non-null loops.
//
// # Safety
// `loops` is null or comes from [`wl_loops_parse`].
uintptr_t wl_loops_count(const struct WlLoops *loops);

// Canonical printed form, re-parseable by [`wl_loops_parse`].
//
// # Safety
// `loops` comes from [`wl_loops_parse`]; `buf` has `cap` writable bytes or
// is null; `needed` is null or writable.
enum WlStatus wl_loops_to_string(const struct WlLoops *loops,
                                 char *buf,
                                 uintptr_t cap,
                                 uintptr_t *needed);

// Enclosed area of a single planar loop.
//
// # Safety
// `loops` comes from [`wl_loops_parse`]; `out` is writable.
enum WlStatus wl_loops_area(const struct WlLoops *loops, uint64_t *out);

// # Safety
// `loops` is null or an unfreed handle from [`wl_loops_parse`].
void wl_loops_free(struct WlLoops *loops);

// Coefficients 0..=k_max of the loop expectation from the recursion.
//
// # Safety
// Handles come from this library; `out` is writable.
enum WlStatus wl_solver_polynomial(struct WlSolver *solver,
                                   const struct WlLoops *loops,
                                   uintptr_t k_max,
                                   struct WlPoly **out);

// The exact planar polynomial of one loop through the gauge word.
//
// # Safety
// `loops` comes from [`wl_loops_parse`]; `out` is writable.
enum WlStatus wl_gauge_polynomial(const struct WlLoops *loops, struct WlPoly **out);

// Degree above which the planar polynomial of one loop vanishes.
//
// # Safety
// `loops` comes from [`wl_loops_parse`]; `out` is writable.
enum WlStatus wl_degree_bound(const struct WlLoops *loops, uintptr_t *out);

// Degree of the polynomial, or -1 for zero.
//
// # Safety
// `poly` is null or comes from this library.
int64_t wl_poly_degree(const struct WlPoly *poly);

// # Safety
// `poly` comes from this library.
double wl_poly_eval(const struct WlPoly *poly, double beta);

// Coefficient of β^k as "p/q", or "p" when the denominator is one.
//
// # Safety
// `poly` comes from this library; `buf` has `cap` writable bytes or is
// null; `needed` is null or writable.
enum WlStatus wl_poly_coeff(const struct WlPoly *poly,
                            uintptr_t k,
                            char *buf,
                            uintptr_t cap,
                            uintptr_t *needed);

// # Safety
// `poly` comes from this library; `buf` has `cap` writable bytes or is
// null; `needed` is null or writable.
enum WlStatus wl_poly_to_string(const struct WlPoly *poly,
                                char *buf,
                                uintptr_t cap,
                                uintptr_t *needed);

// # Safety
// `poly` is null or an unfreed handle from this library.
void wl_poly_free(struct WlPoly *poly);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WILSON_LOOPS_H */
