#ifndef GRAFHUB_H
#define GRAFHUB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GrafhubStatus {
  GRAFHUB_STATUS_OK = 0,
  GRAFHUB_STATUS_NULL_POINTER = 1,
  // Bad shapes, parameters or graph data.
  GRAFHUB_STATUS_INVALID_INPUT = 2,
  // Solver or eigensolver failure.
  GRAFHUB_STATUS_NUMERICAL = 3,
  GRAFHUB_STATUS_BUFFER_TOO_SMALL = 4,
  GRAFHUB_STATUS_PANIC = 5,
} GrafhubStatus;

typedef enum GrafhubMetric {
  GRAFHUB_METRIC_RECONSTRUCTION_ERROR = 0,
  GRAFHUB_METRIC_SMOOTHNESS = 1,
} GrafhubMetric;

// Opaque handle holding a fitted filter and both hub score vectors.
typedef struct GrafhubFit GrafhubFit;

// Opaque graph handle.
typedef struct GrafhubGraph GrafhubGraph;

typedef struct GrafhubSolverConfig {
  double alpha;
  double rho;
  size_t filter_order;
  size_t max_iter;
  double tol;
  uint64_t seed;
  // Nonzero selects the `V += ρ r` dual step.
  uint8_t rho_dual;
} GrafhubSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after a
// success. Valid until the next call on the same thread.
const char *grafhub_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *grafhub_version(void);

struct GrafhubSolverConfig grafhub_solver_config_default(void);

// Builds a graph from a row-major `n × n` symmetric adjacency matrix.
//
// # Safety
// `adjacency` must point to `n * n` doubles; `out` must be writable.
enum GrafhubStatus grafhub_graph_from_adjacency(size_t n,
                                                const double *adjacency,
                                                struct GrafhubGraph **out);

// Builds a graph on `n` nodes from `m` undirected edges. `weight` may be
// null for unit weights.
//
// # Safety
// `src` and `dst` must point to `m` values, `weight` to `m` doubles or be
// null; `out` must be writable.
enum GrafhubStatus grafhub_graph_from_edges(size_t n,
                                            size_t m,
                                            const size_t *src,
                                            const size_t *dst,
                                            const double *weight,
                                            struct GrafhubGraph **out);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t grafhub_graph_n_nodes(const struct GrafhubGraph *graph);

// # Safety
// `graph` must be null or a handle not yet freed.
void grafhub_graph_free(struct GrafhubGraph *graph);

// Learns the filter for row-major signals (`n_rows` must equal the node
// count) and scores every node both ways.
//
// # Safety
// `graph` must be a live handle, `signals` must point to
// `n_rows * n_cols` doubles, `config` may be null for defaults, and `out`
// must be writable.
enum GrafhubStatus grafhub_fit(const struct GrafhubGraph *graph,
                               const double *signals,
                               size_t n_rows,
                               size_t n_cols,
                               const struct GrafhubSolverConfig *config,
                               struct GrafhubFit **out);

// # Safety
// `fit` must be null or a handle not yet freed.
void grafhub_fit_free(struct GrafhubFit *fit);

// Filter order T, or 0 for a null handle.
//
// # Safety
// `fit` must be null or a live handle.
size_t grafhub_fit_order(const struct GrafhubFit *fit);

// ADMM sweeps run, or 0 for a null handle.
//
// # Safety
// `fit` must be null or a live handle.
size_t grafhub_fit_iterations(const struct GrafhubFit *fit);

// 1 if the stopping rule was met before the iteration cap.
//
// # Safety
// `fit` must be null or a live handle.
uint8_t grafhub_fit_converged(const struct GrafhubFit *fit);

// Copies the unit-norm filter taps into `out` (capacity `len`).
//
// # Safety
// `fit` must be a live handle and `out` must have room for `len` doubles.
enum GrafhubStatus grafhub_fit_coefficients(const struct GrafhubFit *fit, double *out, size_t len);

// Copies one hub score per node into `out` (capacity `len`).
//
// # Safety
// `fit` must be a live handle and `out` must have room for `len` doubles.
enum GrafhubStatus grafhub_fit_scores(const struct GrafhubFit *fit,
                                      enum GrafhubMetric metric,
                                      double *out,
                                      size_t len);

// Copies the filtered (normal-activity) signals, row-major, into `out`.
//
// # Safety
// `fit` must be a live handle and `out` must have room for `len` doubles.
enum GrafhubStatus grafhub_fit_filtered(const struct GrafhubFit *fit, double *out, size_t len);

// Rank-based AUC of `scores` against 0/1 `labels`.
//
// # Safety
// `scores` and `labels` must point to `n` values; `out` must be writable.
enum GrafhubStatus grafhub_auc(const double *scores, const uint8_t *labels, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAFHUB_H */
