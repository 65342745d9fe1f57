/* C interface to the enumis sampling-based enumeration library. */

#ifndef ENUMIS_H
#define ENUMIS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum EnumisStatus {
  EnumisStatus_Ok = 0,
  /**
   * A pointer was null or a numeric argument violated its domain.
   */
  EnumisStatus_InvalidArgument = 1,
  /**
   * Input text failed to parse.
   */
  EnumisStatus_ParseError = 2,
  /**
   * The sampler gave up before the enumeration finished.
   */
  EnumisStatus_SamplerFailed = 3,
  /**
   * An internal invariant failed; the error message has details.
   */
  EnumisStatus_Internal = 4,
} EnumisStatus;

/**
 * Opaque result handle: the enumerated maximum cliques plus run statistics.
 */
typedef struct EnumisCliqueResult EnumisCliqueResult;

/**
 * Opaque undirected graph handle.
 */
typedef struct EnumisGraph EnumisGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *enumis_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *enumis_version(void);

/**
 * Correction factor kappa1(epsilon); requires epsilon in (0, 1/e).
 *
 * # Safety
 * `out` must point to writable memory for one double.
 */
enum EnumisStatus enumis_kappa1(double epsilon, double *out);

/**
 * Correction factor kappa2(epsilon); requires epsilon in (0, e^-1.5).
 *
 * # Safety
 * `out` must point to writable memory for one double.
 */
enum EnumisStatus enumis_kappa2(double epsilon, double *out);

/**
 * Accepted-sample deadline ceil(m ln(m kappa / epsilon)).
 *
 * # Safety
 * `out` must point to writable memory for one uint64.
 */
enum EnumisStatus enumis_deadline(uint64_t m, double kappa, double epsilon, uint64_t *out);

/**
 * Accepted samples at which a successful enumeration of n solutions halts.
 *
 * # Safety
 * `out` must point to writable memory for one uint64.
 */
enum EnumisStatus enumis_sample_budget(uint64_t n, double epsilon, double kappa, uint64_t *out);

/**
 * Generates a seeded random graph with round(C(n,2) * density) edges.
 *
 * # Safety
 * `out` must point to writable memory for one pointer. The returned handle
 * must be released with `enumis_graph_free`.
 */
enum EnumisStatus enumis_graph_generate(uintptr_t n,
                                        double density,
                                        uint64_t seed,
                                        struct EnumisGraph **out);

/**
 * Parses a DIMACS graph (`p edge <n> <m>` header, `e <u> <v>` lines).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` as in
 * `enumis_graph_generate`.
 */
enum EnumisStatus enumis_graph_parse_dimacs(const char *text, struct EnumisGraph **out);

/**
 * Vertex count of a graph handle; zero for null.
 *
 * # Safety
 * `graph` must be a live handle from this library or null.
 */
uintptr_t enumis_graph_vertices(const struct EnumisGraph *graph);

/**
 * Edge count of a graph handle; zero for null.
 *
 * # Safety
 * `graph` must be a live handle from this library or null.
 */
uintptr_t enumis_graph_edges(const struct EnumisGraph *graph);

/**
 * Releases a graph handle. Null is ignored.
 *
 * # Safety
 * `graph` must be a handle from this library, not yet freed.
 */
void enumis_graph_free(struct EnumisGraph *graph);

/**
 * Enumerates all maximum cliques with the annealing sampler and the
 * epsilon-guaranteed stopping rule. `sweeps`, `beta_initial` and
 * `beta_final` configure the annealer; pass 0 / 0.0 / 0.0 for defaults.
 * `budget_cap` caps raw draws (0 means unlimited; hitting it clears the
 * guarantee flag on the result).
 *
 * # Safety
 * `graph` must be a live handle; `out` must point to writable memory for
 * one pointer. The returned handle must be released with
 * `enumis_result_free`.
 */
enum EnumisStatus enumis_enumerate_max_cliques(const struct EnumisGraph *graph,
                                               double epsilon,
                                               double penalty,
                                               uint32_t sweeps,
                                               double beta_initial,
                                               double beta_final,
                                               uint64_t seed,
                                               uint64_t budget_cap,
                                               struct EnumisCliqueResult **out);

/**
 * Exact reference enumeration of all maximum cliques (no sampling).
 *
 * # Safety
 * `graph` must be a live handle; `out` as in
 * `enumis_enumerate_max_cliques`.
 */
enum EnumisStatus enumis_exact_max_cliques(const struct EnumisGraph *graph,
                                           struct EnumisCliqueResult **out);

/**
 * Number of cliques in a result; zero for null.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
uintptr_t enumis_result_count(const struct EnumisCliqueResult *result);

/**
 * Copies the vertices of clique `index` into `buffer` (up to `buffer_len`
 * entries) and reports the clique's full size through `written`.
 *
 * # Safety
 * `result` must be a live handle; `buffer` must have room for `buffer_len`
 * entries; `written` must point to writable memory for one size_t.
 */
enum EnumisStatus enumis_result_clique(const struct EnumisCliqueResult *result,
                                       uintptr_t index,
                                       uint32_t *buffer,
                                       uintptr_t buffer_len,
                                       uintptr_t *written);

/**
 * Final threshold (minus the clique size) of a result.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
double enumis_result_theta(const struct EnumisCliqueResult *result);

/**
 * Accepted-sample count at which the run stopped.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
uint64_t enumis_result_accepted_samples(const struct EnumisCliqueResult *result);

/**
 * Total raw draws, including rejected ones.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
uint64_t enumis_result_raw_draws(const struct EnumisCliqueResult *result);

/**
 * 1 when the run ended at a deadline (the epsilon guarantee applies),
 * 0 when a budget cap cut it short.
 *
 * # Safety
 * `result` must be a live handle from this library or null.
 */
int32_t enumis_result_guarantee_holds(const struct EnumisCliqueResult *result);

/**
 * Releases a result handle. Null is ignored.
 *
 * # Safety
 * `result` must be a handle from this library, not yet freed.
 */
void enumis_result_free(struct EnumisCliqueResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENUMIS_H */
