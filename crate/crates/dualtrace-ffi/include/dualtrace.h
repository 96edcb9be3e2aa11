#ifndef DUALTRACE_H
#define DUALTRACE_H

/* Generated by cbindgen from dualtrace-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum DtStatus {
  DT_OK = 0,
  DT_NULL_ARGUMENT = 1,
  DT_INVALID_UTF8 = 2,
  DT_PARSE_ERROR = 3,
  DT_INTEGRITY_ERROR = 4,
  DT_HYBRIDIZE_ERROR = 5,
  DT_ANALYSIS_ERROR = 6,
  DT_SCRIPT_ERROR = 7,
  DT_IO_ERROR = 8,
} DtStatus;

/**
 * Aligned dual trace (opaque).
 */
typedef struct DtDualTrace DtDualTrace;

/**
 * Metrics report plus diagnostics (opaque).
 */
typedef struct DtReport DtReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or null. Free with `dt_string_free`.
 */
char *dt_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a dualtrace function and not freed yet.
 */
void dt_string_free(char *s);

/**
 * Align a keystroke log file with a text log file into a dual trace.
 *
 * # Safety
 * `keys_path` and `text_path` must be valid NUL-terminated strings;
 * `out` must be a valid location to store the handle.
 */
enum DtStatus dt_hybridize_files(const char *keys_path,
                                 const char *text_path,
                                 struct DtDualTrace **out);

/**
 * Load a dual trace from a file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be valid.
 */
enum DtStatus dt_dual_trace_load(const char *path, struct DtDualTrace **out);

/**
 * Number of events in a dual trace.
 *
 * # Safety
 * `trace` must be a live handle from this library (or null, yielding 0).
 */
uint64_t dt_dual_trace_len(const struct DtDualTrace *trace);

/**
 * Write a dual trace to a file in the line-delimited trace schema.
 *
 * # Safety
 * `trace` must be a live handle; `path` a valid NUL-terminated string.
 */
enum DtStatus dt_dual_trace_write(const struct DtDualTrace *trace, const char *path);

/**
 * Release a dual trace handle.
 *
 * # Safety
 * `trace` must be a handle from this library, not freed before.
 */
void dt_dual_trace_free(struct DtDualTrace *trace);

/**
 * Analyze a dual trace. `lexicon_path` may be null for an empty lexicon.
 *
 * # Safety
 * `trace` must be a live handle; paths valid or null as documented; `out`
 * must be valid.
 */
enum DtStatus dt_analyze(const struct DtDualTrace *trace,
                         const char *lexicon_path,
                         double outlier_sd,
                         struct DtReport **out);

/**
 * The metrics report as CSV. Free with `dt_string_free`.
 *
 * # Safety
 * `report` must be a live handle.
 */
char *dt_report_csv(const struct DtReport *report);

/**
 * The metrics report as an aligned text table. Free with `dt_string_free`.
 *
 * # Safety
 * `report` must be a live handle.
 */
char *dt_report_table(const struct DtReport *report);

/**
 * Alignment diagnostics as JSON. Free with `dt_string_free`.
 *
 * # Safety
 * `report` must be a live handle.
 */
char *dt_report_diagnostics_json(const struct DtReport *report);

/**
 * Release a report handle.
 *
 * # Safety
 * `report` must be a handle from this library, not freed before.
 */
void dt_report_free(struct DtReport *report);

/**
 * Replay a session script into paired log files.
 *
 * # Safety
 * All path arguments must be valid NUL-terminated strings;
 * `lexicon_path` and `initial_text` may be null.
 */
enum DtStatus dt_simulate_files(const char *script_path,
                                const char *lexicon_path,
                                bool pinyin_layout,
                                const char *initial_text,
                                uint64_t start_ms,
                                const char *out_keys_path,
                                const char *out_text_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUALTRACE_H */
