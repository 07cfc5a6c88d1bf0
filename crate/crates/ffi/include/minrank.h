#ifndef MINRANK_H
#define MINRANK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MrStatus {
  MR_STATUS_OK = 0,
  MR_STATUS_NULL_POINTER = 1,
  MR_STATUS_INVALID_ARGUMENT = 2,
  MR_STATUS_PARSE_ERROR = 3,
  MR_STATUS_BUDGET_EXCEEDED = 4,
  MR_STATUS_BUFFER_TOO_SMALL = 5,
  MR_STATUS_PANIC = 6,
} MrStatus;

/**
 * A finite field together with its cached pattern graphs.
 */
typedef struct MrField MrField;

/**
 * A simple graph.
 */
typedef struct MrGraph MrGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *mr_status_str(enum MrStatus status);

/**
 * Copies the calling thread's last error message.
 *
 * # Safety
 * See the module notes on caller buffers.
 */
enum MrStatus mr_last_error(char *buf, size_t len, size_t *needed);

/**
 * Creates a field of order `q` (a prime power up to 65536). Pattern
 * graphs larger than `vertex_budget` vertices are never built; pass 0 for
 * the default of 10000.
 *
 * # Safety
 * `out` must be writable.
 */
enum MrStatus mr_field_new(uint64_t q, uint64_t vertex_budget, struct MrField **out);

/**
 * # Safety
 * `field` must be NULL or a handle from [`mr_field_new`] not yet freed.
 */
void mr_field_free(struct MrField *field);

/**
 * Field order, or 0 for a NULL handle.
 *
 * # Safety
 * `field` must be NULL or a live handle.
 */
uint32_t mr_field_order(const struct MrField *field);

/**
 * Number of pattern graphs of order `k` (1 or 2).
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum MrStatus mr_pattern_count(const struct MrField *field, size_t k, size_t *out);

/**
 * Pattern `index` of order `k` as JSON `{n, loops, edges}`.
 *
 * # Safety
 * `field` must be a live handle; see the module notes on caller buffers.
 */
enum MrStatus mr_pattern_json(const struct MrField *field,
                              size_t k,
                              size_t index,
                              char *buf,
                              size_t len,
                              size_t *needed);

/**
 * Edgeless graph on `n` vertices.
 *
 * # Safety
 * `out` must be writable.
 */
enum MrStatus mr_graph_new(size_t n, struct MrGraph **out);

/**
 * Parses one graph6 record.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum MrStatus mr_graph_from_graph6(const char *text, struct MrGraph **out);

/**
 * # Safety
 * `graph` must be NULL or a live handle.
 */
void mr_graph_free(struct MrGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
enum MrStatus mr_graph_add_edge(struct MrGraph *graph, size_t u, size_t v);

/**
 * Vertex count, or 0 for a NULL handle.
 *
 * # Safety
 * `graph` must be NULL or a live handle.
 */
size_t mr_graph_order(const struct MrGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle; see the module notes on caller buffers.
 */
enum MrStatus mr_graph_to_graph6(const struct MrGraph *graph,
                                 char *buf,
                                 size_t len,
                                 size_t *needed);

/**
 * Minimum rank of `graph` over the field, trying orders up to `max_k`
 * (negative: no limit beyond the vertex budget). On
 * [`MrStatus::BudgetExceeded`] `*lower_bound` holds a value `b` with
 * `mr > b`.
 *
 * # Safety
 * Handles must be live; `rank` and `lower_bound` writable or NULL.
 */
enum MrStatus mr_min_rank(const struct MrField *field,
                          const struct MrGraph *graph,
                          int64_t max_k,
                          size_t *rank,
                          size_t *lower_bound);

/**
 * Whether `graph` has minimum rank at most `k`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MrStatus mr_is_member(const struct MrField *field,
                           const struct MrGraph *graph,
                           size_t k,
                           bool *out);

/**
 * Minimum rank by exhaustive enumeration of at most `budget` matrices
 * (0: the default of 10^8).
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MrStatus mr_oracle_min_rank(const struct MrField *field,
                                 const struct MrGraph *graph,
                                 uint64_t budget,
                                 size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINRANK_H */
