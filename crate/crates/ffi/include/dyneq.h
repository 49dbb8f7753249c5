#ifndef DYNEQ_H
#define DYNEQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DyneqStatus {
  DYNEQ_STATUS_OK = 0,
  DYNEQ_STATUS_NULL_POINTER = 1,
  DYNEQ_STATUS_INVALID_UTF8 = 2,
  DYNEQ_STATUS_PARSE_ERROR = 3,
  DYNEQ_STATUS_VALIDATION_ERROR = 4,
  DYNEQ_STATUS_NOT_REGRESSIVE = 5,
  DYNEQ_STATUS_ZERO_DENOMINATOR = 6,
  DYNEQ_STATUS_SINGULAR_WRONSKIAN = 7,
  DYNEQ_STATUS_NUMERIC_ERROR = 8,
  DYNEQ_STATUS_BUFFER_TOO_SMALL = 9,
  DYNEQ_STATUS_PANIC = 10,
} DyneqStatus;

typedef enum DyneqColumn {
  DYNEQ_COLUMN_T = 0,
  DYNEQ_COLUMN_Y = 1,
  DYNEQ_COLUMN_YDELTA = 2,
  DYNEQ_COLUMN_YD = 3,
  DYNEQ_COLUMN_RESIDUAL = 4,
  DYNEQ_COLUMN_NORM = 5,
  DYNEQ_COLUMN_ENVELOPE = 6,
} DyneqColumn;

typedef enum DyneqFormat {
  DYNEQ_FORMAT_CSV = 0,
  DYNEQ_FORMAT_JSON = 1,
} DyneqFormat;

/**
 * Parsed problem configuration.
 */
typedef struct DyneqProblem DyneqProblem;

/**
 * Result table of a solve.
 */
typedef struct DyneqSolution DyneqSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *dyneq_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dyneq_version(void);

/**
 * Parses a problem file held in `text`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DyneqStatus dyneq_problem_parse(const char *text, struct DyneqProblem **out);

/**
 * # Safety
 * `problem` must come from [`dyneq_problem_parse`] or be NULL.
 */
void dyneq_problem_free(struct DyneqProblem *problem);

/**
 * Number of grid points of the problem's time scale, 0 on error.
 *
 * # Safety
 * `problem` must be a live handle or NULL.
 */
size_t dyneq_problem_len(const struct DyneqProblem *problem);

/**
 * Solves the initial value problem.
 *
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
enum DyneqStatus dyneq_solve(const struct DyneqProblem *problem, struct DyneqSolution **out);

/**
 * # Safety
 * `solution` must come from [`dyneq_solve`] or be NULL.
 */
void dyneq_solution_free(struct DyneqSolution *solution);

/**
 * Number of rows, one per grid point.
 *
 * # Safety
 * `solution` must be a live handle or NULL.
 */
size_t dyneq_solution_len(const struct DyneqSolution *solution);

/**
 * Copies one column into `buf`. Entries that do not exist at a grid point
 * (the residual at the last two points, for example) are NaN.
 *
 * # Safety
 * `buf` must hold `cap` doubles.
 */
enum DyneqStatus dyneq_solution_column(const struct DyneqSolution *solution,
                                       enum DyneqColumn column,
                                       double *buf,
                                       size_t cap);

/**
 * Constants `c1`, `c2` of the homogeneous part.
 *
 * # Safety
 * All pointers must be valid.
 */
enum DyneqStatus dyneq_solution_constants(const struct DyneqSolution *solution,
                                          double *c1,
                                          double *c2);

/**
 * Renders the table; free the result with [`dyneq_string_free`].
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum DyneqStatus dyneq_solution_emit(const struct DyneqSolution *solution,
                                     enum DyneqFormat format,
                                     char **out);

/**
 * Runs the verification checks. `passed` receives 1 when all pass, else 0;
 * `report`, if not NULL, receives the rendered report.
 *
 * # Safety
 * `problem` must be a live handle; `passed` must be valid; `report` may be NULL.
 */
enum DyneqStatus dyneq_verify(const struct DyneqProblem *problem, int *passed, char **report);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void dyneq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNEQ_H */
