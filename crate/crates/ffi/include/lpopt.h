#ifndef LPOPT_H
#define LPOPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LPOPT_HEURISTIC_MCS = 0,
  LPOPT_HEURISTIC_MF = 1,
  LPOPT_HEURISTIC_MIW = 2,
} LpoptHeuristic;

typedef enum {
  LPOPT_STATUS_OK = 0,
  LPOPT_STATUS_NULL_POINTER = 1,
  LPOPT_STATUS_INVALID_UTF8 = 2,
  LPOPT_STATUS_PARSE_ERROR = 3,
  LPOPT_STATUS_DECOMPOSE_ERROR = 4,
  LPOPT_STATUS_ORACLE_ERROR = 5,
  LPOPT_STATUS_INVALID_ARGUMENT = 6,
  LPOPT_STATUS_PANIC = 7,
} LpoptStatus;

/**
 * Parsed program.
 */
typedef struct LpoptProgram LpoptProgram;

/**
 * Per-rule statistics of a decomposition.
 */
typedef struct LpoptReport LpoptReport;

typedef struct {
  /**
   * One of the `LpoptHeuristic` values.
   */
  uint32_t heuristic;
  int64_t seed;
  bool include_head_clique;
  /**
   * When false the program is copied unchanged.
   */
  bool enabled;
} LpoptOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The
 * pointer stays valid until the next call into the library.
 */
const char *lpopt_last_error_message(void);

/**
 * Line and column (1-based) of the last parse error; false if the last
 * failure had no source location.
 *
 * # Safety
 * `line` and `column` must be null or valid for writes.
 */
bool lpopt_last_error_location(uint32_t *line, uint32_t *column);

LpoptOptions lpopt_default_options(void);

/**
 * Parses a NUL-terminated UTF-8 program.
 *
 * # Safety
 * `source` must be null or a valid C string; `out` must be null or
 * valid for writes.
 */
LpoptStatus lpopt_parse(const char *source, LpoptProgram **out);

/**
 * # Safety
 * `program` must be null or a handle from this library not yet freed.
 */
void lpopt_program_free(LpoptProgram *program);

/**
 * # Safety
 * `program` must be a live handle or null.
 */
size_t lpopt_program_rule_count(const LpoptProgram *program);

/**
 * Renders the program as text, one rule per line.
 *
 * # Safety
 * `program` must be a live handle or null; `out` must be null or valid
 * for writes.
 */
LpoptStatus lpopt_program_render(const LpoptProgram *program, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void lpopt_string_free(char *s);

/**
 * Decomposes `program` into a new program. `options` may be null for
 * the defaults and `report` may be null when not wanted.
 *
 * # Safety
 * Pointers must be null or valid; `program` must be a live handle.
 */
LpoptStatus lpopt_decompose(const LpoptProgram *program,
                            const LpoptOptions *options,
                            LpoptProgram **out,
                            LpoptReport **report);

/**
 * # Safety
 * `report` must be null or a handle from this library not yet freed.
 */
void lpopt_report_free(LpoptReport *report);

/**
 * Maximum width over all rules; -1 for programs without variables or
 * a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
int64_t lpopt_report_max_width(const LpoptReport *report);

/**
 * # Safety
 * `report` must be a live handle or null.
 */
size_t lpopt_report_rule_count(const LpoptReport *report);

/**
 * Width of the decomposition of input rule `index`.
 *
 * # Safety
 * `report` must be a live handle or null; `width` must be null or valid
 * for writes.
 */
LpoptStatus lpopt_report_rule_width(const LpoptReport *report, size_t index, int64_t *width);

/**
 * Tab-separated statistics table.
 *
 * # Safety
 * `report` must be a live handle or null; `out` must be null or valid
 * for writes.
 */
LpoptStatus lpopt_report_render(const LpoptReport *report, char **out);

/**
 * Checks with the reference solver whether `rewritten` has the answer
 * sets and costs of `original` once fresh predicates are dropped.
 * Only feasible for small programs.
 *
 * # Safety
 * Handles must be live or null; `out` must be null or valid for writes.
 */
LpoptStatus lpopt_equivalent(const LpoptProgram *original,
                             const LpoptProgram *rewritten,
                             bool *out);

/**
 * Number of ground instances of the non-fact rules.
 *
 * # Safety
 * `program` must be live or null; `out` must be null or valid for writes.
 */
LpoptStatus lpopt_grounding_size(const LpoptProgram *program, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPOPT_H */
