#ifndef HASSE_EMBED_H
#define HASSE_EMBED_H

/* Generated by cbindgen from hasse-embed-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum he_status {
  /**
   * Success.
   */
  HE_STATUS_OK = 0,
  /**
   * A required pointer argument was null or not valid UTF-8.
   */
  HE_STATUS_ARGUMENT_ERROR = 1,
  /**
   * The configuration document failed to parse against the schema.
   */
  HE_STATUS_PARSE_ERROR = 2,
  /**
   * The configuration parsed but failed mathematical validation, or
   * the requested report needs inputs the document does not carry.
   */
  HE_STATUS_VALIDATION_ERROR = 3,
  /**
   * An internal invariant failed; report this as a bug.
   */
  HE_STATUS_INTERNAL_ERROR = 4,
} he_status;

/**
 * Opaque handle holding a parsed and validated configuration.
 */
typedef struct he_session he_session;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *he_version(void);

/**
 * Parse and validate a configuration document into a session.
 *
 * On success writes a handle to `session_out` and returns Ok; on failure
 * writes an error message to `error_out` (when non-null) and leaves
 * `session_out` null.
 *
 * # Safety
 * `config_json` must be a valid NUL-terminated string. `session_out`
 * must be a valid pointer. The session must be released with
 * [`he_session_free`].
 */
enum he_status he_session_new(const char *config_json,
                              struct he_session **session_out,
                              char **error_out);

/**
 * Release a session created by [`he_session_new`]. Null is a no-op.
 *
 * # Safety
 * `session` must be a pointer previously returned by [`he_session_new`]
 * and not yet freed.
 */
void he_session_free(struct he_session *session);

/**
 * Run a report command against a session and return the JSON report.
 *
 * `command` is one of "analyze", "obstruction", "rho", "sha-check",
 * "descent", or "witness I J" with 1-based factor indices.
 *
 * # Safety
 * `session` must be a live handle from [`he_session_new`]; `command`
 * must be a valid NUL-terminated string; `report_out` must be a valid
 * pointer. The returned string must be freed with [`he_string_free`].
 */
enum he_status he_session_report(const struct he_session *session,
                                 const char *command,
                                 char **report_out,
                                 char **error_out);

/**
 * One-shot convenience: parse a configuration and run `analyze`.
 *
 * # Safety
 * Same contracts as [`he_session_new`] and [`he_session_report`].
 */
enum he_status he_analyze(const char *config_json, char **report_out, char **error_out);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be a pointer previously returned through a `report_out` or
 * `error_out` parameter of this library, and not yet freed.
 */
void he_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HASSE_EMBED_H */
