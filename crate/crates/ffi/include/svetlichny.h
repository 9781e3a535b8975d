#ifndef SVETLICHNY_H
#define SVETLICHNY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum SvStatus {
  SV_STATUS_OK = 0,
  // A required pointer argument was null.
  SV_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  SV_STATUS_INVALID_UTF8 = 2,
  // Parameters outside the supported domain (party count, sizes, caps).
  SV_STATUS_INVALID_ARGUMENT = 3,
  // A totally paired graph was required.
  SV_STATUS_PARTIALLY_PAIRED = 4,
  // An enumeration cap was exceeded.
  SV_STATUS_CAP_EXCEEDED = 5,
  // Malformed JSON or file content.
  SV_STATUS_PARSE = 6,
  SV_STATUS_UNSUPPORTED = 7,
  // A Rust panic was caught at the boundary.
  SV_STATUS_INTERNAL = 8,
} SvStatus;

typedef struct SvCoeffs SvCoeffs;

typedef struct SvGraph SvGraph;

typedef struct SvStrategy SvStrategy;

typedef struct SvTable SvTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread; empty if none. The
// pointer stays valid until the next failing call on this thread.
const char *sv_last_error(void);

// Crate version as a static NUL-terminated string.
const char *sv_version(void);

// Releases a string returned by this library. Null is accepted.
//
// # Safety
// `s` must come from this library and not have been freed.
void sv_string_free(char *s);

// Parses the graph file format `{"m": M, "edges": [[i, j], ...]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out_graph` must be writable.
enum SvStatus sv_graph_from_json(const char *json, struct SvGraph **out_graph);

// Builds a graph from `n_edges` pairs `(from, to)` stored flat in `edges`,
// 1-based.
//
// # Safety
// `edges` must point to `2 * n_edges` values (may be null when zero).
enum SvStatus sv_graph_from_edges(uintptr_t m,
                                  const uint32_t *edges,
                                  uintptr_t n_edges,
                                  struct SvGraph **out_graph);

// Named catalog graph. `m` and `k` are read only by parameterized entries;
// pass 0 to leave them unset.
//
// # Safety
// `name` must be a NUL-terminated string.
enum SvStatus sv_graph_catalog(const char *name,
                               uintptr_t m,
                               uintptr_t k,
                               struct SvGraph **out_graph);

// # Safety
// `g` must come from this library or be null.
void sv_graph_free(struct SvGraph *g);

// Party count, or 0 for a null handle.
//
// # Safety
// `g` must be a live handle or null.
uintptr_t sv_graph_m(const struct SvGraph *g);

// Sets `*is_tp`; for partially paired graphs also writes the smallest
// unpaired pair to `*pair_i < *pair_j`, otherwise both become 0.
//
// # Safety
// All pointers must be valid.
enum SvStatus sv_graph_classify(const struct SvGraph *g,
                                bool *is_tp,
                                uint32_t *pair_i,
                                uint32_t *pair_j);

// # Safety
// All pointers must be valid.
enum SvStatus sv_graph_is_separable(const struct SvGraph *g, bool *separable);

// Graph file JSON, caller-owned.
//
// # Safety
// All pointers must be valid.
enum SvStatus sv_graph_to_json(const struct SvGraph *g, char **json);

// Svetlichny coefficients; `recursive` selects the recursion over the
// closed form.
//
// # Safety
// `out_coeffs` must be writable.
enum SvStatus sv_coeffs_svetlichny(uintptr_t m, bool recursive, struct SvCoeffs **out_coeffs);

// # Safety
// `out_coeffs` must be writable.
enum SvStatus sv_coeffs_mermin(uintptr_t m, struct SvCoeffs **out_coeffs);

// Coefficient at input word `x` (party 1 in bit 0).
//
// # Safety
// All pointers must be valid.
enum SvStatus sv_coeffs_get(const struct SvCoeffs *c, uint32_t x, int64_t *num, uint32_t *exp);

// # Safety
// `c` must come from this library or be null.
void sv_coeffs_free(struct SvCoeffs *c);

// `(2^{m-q-1}, 2^{m-q-1/2}, 2^{m-q})`.
//
// # Safety
// All pointers must be valid.
enum SvStatus sv_theory_bounds(uintptr_t m, double *lhv, double *quantum, double *algebraic);

// Exact maximum over the graph. `dim_cap` 0 means the default cap.
// `witness` may be null; otherwise it receives a strategy attaining the
// maximum.
//
// # Safety
// Handles must be live; `num` and `exp` writable.
enum SvStatus sv_max_over_graph(const struct SvGraph *g,
                                const struct SvCoeffs *c,
                                uintptr_t dim_cap,
                                int64_t *num,
                                uint32_t *exp,
                                struct SvStrategy **witness);

// Exhaustive maximum over every strategy; fails when the strategy count
// exceeds `2^cap_log2`.
//
// # Safety
// Handles must be live; `num` and `exp` writable.
enum SvStatus sv_brute_force_max(const struct SvGraph *g,
                                 const struct SvCoeffs *c,
                                 uint32_t cap_log2,
                                 int64_t *num,
                                 uint32_t *exp);

// Strategy reaching the algebraic maximum on a totally paired graph;
// [`SvStatus::PartiallyPaired`] otherwise.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_tp_strategy(const struct SvGraph *g, struct SvStrategy **out_strategy);

// Parses `{"m": M, "tables": {"i": {"dep": [...], "bits": hex}}}`.
//
// # Safety
// `json` must be NUL-terminated; `out_strategy` writable.
enum SvStatus sv_strategy_from_json(const char *json, struct SvStrategy **out_strategy);

// # Safety
// Pointers must be valid.
enum SvStatus sv_strategy_to_json(const struct SvStrategy *s, char **json);

// Output bits of every party on input `x`, party 1 in bit 0.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_strategy_outputs(const struct SvStrategy *s, uint32_t x, uint32_t *outputs);

// `Σ_x c(x) (-1)^{Σ a_i(x)}`, exactly.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_strategy_eval(const struct SvStrategy *s,
                               const struct SvCoeffs *c,
                               int64_t *num,
                               uint32_t *exp);

// Deterministic delta table of a strategy.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_strategy_to_table(const struct SvStrategy *s, struct SvTable **out_table);

// Uniform mixture over the even-parity output shifts of `s`.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_parity_mixture(const struct SvStrategy *s, struct SvTable **out_table);

// # Safety
// `s` must come from this library or be null.
void sv_strategy_free(struct SvStrategy *s);

// # Safety
// `json` must be NUL-terminated; `out_table` writable.
enum SvStatus sv_table_from_json(const char *json, struct SvTable **out_table);

// # Safety
// Pointers must be valid.
enum SvStatus sv_table_to_json(const struct SvTable *t, char **json);

// `P(a|x)` as a double.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_table_get(const struct SvTable *t, uint32_t x, uint32_t a, double *p);

// Functional value of a table. `is_exact` reports whether `num`/`exp`
// hold the exact value; `value` is always written.
//
// # Safety
// Pointers must be valid.
enum SvStatus sv_table_evaluate(const struct SvTable *t,
                                const struct SvCoeffs *c,
                                double *value,
                                bool *is_exact,
                                int64_t *num,
                                uint32_t *exp);

// Sets `*ok`; when the table signals and `report` is non-null, writes the
// first violation as caller-owned JSON (null otherwise).
//
// # Safety
// `t` and `ok` must be valid; `report` may be null.
enum SvStatus sv_table_check_nosignalling(const struct SvTable *t,
                                          double tol,
                                          bool *ok,
                                          char **report);

// # Safety
// `t` must come from this library or be null.
void sv_table_free(struct SvTable *t);

// Optimizes GHZ measurement angles for the Svetlichny functional.
// `phi` may be null; otherwise it receives `2m` azimuths ordered
// `φ_1^0, φ_1^1, φ_2^0, ...`.
//
// # Safety
// `value`, `target`, `converged` writable; `phi` null or `2m` long.
enum SvStatus sv_quantum_optimize(uintptr_t m,
                                  uintptr_t restarts,
                                  uint64_t seed,
                                  double *value,
                                  double *target,
                                  bool *converged,
                                  double *phi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SVETLICHNY_H */
