#ifndef PROBE_MACHINE_H
#define PROBE_MACHINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmMode {
  PM_MODE_EXHAUSTIVE = 0,
  PM_MODE_STOCHASTIC = 1,
} PmMode;

/**
 * Result of every fallible call. Values match the `pm` exit codes where
 * those apply.
 */
typedef enum PmStatus {
  PM_STATUS_OK = 0,
  PM_STATUS_PARSE = 2,
  PM_STATUS_INFEASIBLE = 3,
  PM_STATUS_NULL = 10,
  PM_STATUS_UTF8 = 11,
  PM_STATUS_INVALID_ARGUMENT = 12,
  PM_STATUS_INTERNAL = 99,
} PmStatus;

/**
 * An input graph.
 */
typedef struct PmGraph PmGraph;

/**
 * A finished run: its JSON report and solution count.
 */
typedef struct PmRun PmRun;

typedef struct PmSolveOptions {
  enum PmMode mode;
  uint64_t seed;
  /**
   * Copies of each data and probe type in stochastic mode.
   */
  uint64_t copies;
  /**
   * 0 means no limit.
   */
  uint64_t max_steps;
} PmSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default options: exhaustive mode, seed 0, 20 copies, no step limit.
 */
struct PmSolveOptions pm_solve_options_default(void);

/**
 * Parses an edge list, DIMACS `.col` text or a JSON graph. The format is
 * detected from the content.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PmStatus pm_graph_parse(const char *text, struct PmGraph **out);

/**
 * # Safety
 * `graph` must come from [`pm_graph_parse`] and not be used afterwards.
 */
void pm_graph_free(struct PmGraph *graph);

/**
 * Number of vertices, or 0 for a null graph.
 *
 * # Safety
 * `graph` must be null or a live graph handle.
 */
size_t pm_graph_vertex_count(const struct PmGraph *graph);

/**
 * Finds every Hamilton cycle. `opts` may be null for defaults.
 *
 * # Safety
 * `graph` must be a live graph handle, `opts` null or valid, `out` valid.
 */
enum PmStatus pm_solve_hamilton(const struct PmGraph *graph,
                                const struct PmSolveOptions *opts,
                                struct PmRun **out);

/**
 * Finds the k-colorings. With `fix_classes`, colour classes shared by every
 * coloring are fixed first, which removes colour renamings.
 *
 * # Safety
 * As for [`pm_solve_hamilton`].
 */
enum PmStatus pm_solve_coloring(const struct PmGraph *graph,
                                uint32_t k,
                                bool fix_classes,
                                const struct PmSolveOptions *opts,
                                struct PmRun **out);

/**
 * Number of distinct decoded solutions, or 0 for a null run.
 *
 * # Safety
 * `run` must be null or a live run handle.
 */
size_t pm_run_solution_count(const struct PmRun *run);

/**
 * Copies the JSON report into a new string owned by the caller, released
 * with [`pm_string_free`].
 *
 * # Safety
 * `run` must be a live run handle and `out` valid.
 */
enum PmStatus pm_run_to_json(const struct PmRun *run, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pm_string_free(char *s);

/**
 * # Safety
 * `run` must come from a solve call and not be used afterwards.
 */
void pm_run_free(struct PmRun *run);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library on this thread.
 */
const char *pm_last_error(void);

/**
 * Library version as a static string.
 */
const char *pm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROBE_MACHINE_H */
