#ifndef EVENCYCLE_H
#define EVENCYCLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ec_status {
  EC_STATUS_OK = 0,
  /**
   * The search finished without finding a cycle.
   */
  EC_STATUS_NOT_FOUND = 1,
  EC_STATUS_INVALID_ARGUMENT = 2,
  EC_STATUS_PARSE_ERROR = 3,
  /**
   * Density extraction was asked about a node below the bound.
   */
  EC_STATUS_PRECONDITION = 4,
  /**
   * A simulated node broke the model's rules.
   */
  EC_STATUS_FAULT = 5,
  /**
   * The run needed more rounds than the caller allowed.
   */
  EC_STATUS_TIMEOUT = 6,
  EC_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * A bug: an internal check failed or the library panicked.
   */
  EC_STATUS_INTERNAL = 8,
  /**
   * The input is larger than the exhaustive oracle accepts.
   */
  EC_STATUS_LIMIT = 9,
} ec_status;

/**
 * An immutable simple graph.
 */
typedef struct ec_graph ec_graph;

/**
 * Result of one simulated detection run.
 */
typedef struct ec_report ec_report;

/**
 * Fixed-size view of an [`EcReport`]. Fields that do not apply are zero.
 */
typedef struct ec_outcome {
  /**
   * 1 when some node rejected, 0 when all accepted.
   */
  uint8_t reject;
  /**
   * 1 when a heavy-phase threshold fired.
   */
  uint8_t threshold_fired;
  uint32_t threshold_node;
  uint32_t threshold_level;
  uint64_t rounds_used;
  uint64_t light_rounds;
  uint64_t heavy_rounds;
  uint64_t words_sent;
  /**
   * Node count of the reported cycle, 0 when none.
   */
  size_t witness_len;
} ec_outcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on the
 * same thread.
 */
const char *ec_last_error(void);

/**
 * Builds a graph on nodes `0..n` from `num_edges` pairs stored flat in
 * `edges` (`u0 v0 u1 v1 ...`). Self-loops and duplicates are rejected.
 *
 * # Safety
 * `edges` must point to `2 * num_edges` readable values; `out` must be
 * writable.
 */
enum ec_status ec_graph_from_edges(size_t n,
                                   const uint32_t *edges,
                                   size_t num_edges,
                                   struct ec_graph **out);

/**
 * Parses the edge-list text format: a header line `n m` followed by one
 * `u v` line per edge.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum ec_status ec_graph_parse(const char *text, struct ec_graph **out);

/**
 * # Safety
 * `g` must come from this library and not be freed already. Null is ignored.
 */
void ec_graph_free(struct ec_graph *g);

/**
 * # Safety
 * `g` must be a live graph; `n` and `m` may be null.
 */
enum ec_status ec_graph_counts(const struct ec_graph *g, size_t *n, size_t *m);

/**
 * Exhaustive search for a cycle of length `twok`. Returns `NOT_FOUND` when
 * there is none and `LIMIT` when the graph is too large to search.
 *
 * # Safety
 * `g` must be a live graph, `buf` must hold `cap` values, `len` must be
 * writable.
 */
enum ec_status ec_find_cycle(const struct ec_graph *g,
                             size_t twok,
                             uint32_t *buf,
                             size_t cap,
                             size_t *len);

/**
 * Sets `*valid` to 1 when `nodes` is a simple cycle of `len` edges in `g`
 * and `len == twok`.
 *
 * # Safety
 * `g` must be a live graph, `nodes` must hold `len` values, `valid` must be
 * writable.
 */
enum ec_status ec_verify_cycle(const struct ec_graph *g,
                               const uint32_t *nodes,
                               size_t len,
                               size_t twok,
                               uint8_t *valid);

/**
 * Runs the general detector for cycles of length `2k`, `k >= 2`.
 * `max_rounds == 0` means no limit.
 *
 * # Safety
 * `g` must be a live graph; `out` must be writable.
 */
enum ec_status ec_run_c2k(const struct ec_graph *g,
                          uint32_t k,
                          uint64_t max_rounds,
                          struct ec_report **out);

/**
 * Runs the 4-cycle detector. `max_rounds == 0` means no limit.
 *
 * # Safety
 * `g` must be a live graph; `out` must be writable.
 */
enum ec_status ec_run_c4(const struct ec_graph *g, uint64_t max_rounds, struct ec_report **out);

/**
 * # Safety
 * `r` must be a live report; `out` must be writable.
 */
enum ec_status ec_report_outcome(const struct ec_report *r, struct ec_outcome *out);

/**
 * Copies the reported cycle into `buf`. `NOT_FOUND` when the run rejected
 * by threshold only, or accepted.
 *
 * # Safety
 * `r` must be a live report, `buf` must hold `cap` values, `len` must be
 * writable.
 */
enum ec_status ec_report_witness(const struct ec_report *r, uint32_t *buf, size_t cap, size_t *len);

/**
 * Serializes the report as JSON into a new string released with
 * [`ec_string_free`].
 *
 * # Safety
 * `r` must be a live report; `out` must be writable.
 */
enum ec_status ec_report_to_json(const struct ec_report *r, char **out);

/**
 * # Safety
 * `s` must come from [`ec_report_to_json`] and not be freed already.
 */
void ec_string_free(char *s);

/**
 * # Safety
 * `r` must come from this library and not be freed already. Null is ignored.
 */
void ec_report_free(struct ec_report *r);

/**
 * Extracts a `2k`-cycle from a node whose `ell`-hop neighbourhood is dense
 * enough. `PRECONDITION` means the density at `v` is below the bound.
 *
 * # Safety
 * `g` must be a live graph, `buf` must hold `cap` values, `len` must be
 * writable.
 */
enum ec_status ec_density_extract(const struct ec_graph *g,
                                  size_t k,
                                  size_t ell,
                                  uint32_t v,
                                  uint32_t *buf,
                                  size_t cap,
                                  size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVENCYCLE_H */
