#ifndef SCULPT_H
#define SCULPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SculptFragment {
  SCULPT_FRAGMENT_FULL = 0,
  SCULPT_FRAGMENT_FORWARD = 1,
  SCULPT_FRAGMENT_GUARDED_FORWARD = 2,
} SculptFragment;

typedef enum SculptMode {
  SCULPT_MODE_MEMORY = 0,
  SCULPT_MODE_STREAM_WEAK = 1,
  SCULPT_MODE_STREAM_STRONG = 2,
} SculptMode;

typedef enum SculptPad {
  SCULPT_PAD_TRIM = 0,
  SCULPT_PAD_LITERAL = 1,
} SculptPad;

typedef enum SculptStatus {
  SCULPT_STATUS_OK = 0,
  SCULPT_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Text that must be UTF-8 is not.
   */
  SCULPT_STATUS_UTF8 = 2,
  /**
   * The schema does not parse or names undefined tokens.
   */
  SCULPT_STATUS_SCHEMA = 3,
  /**
   * The schema is outside the fragment the stream mode needs.
   */
  SCULPT_STATUS_FRAGMENT = 4,
  /**
   * A stream run exceeded its column-set bound.
   */
  SCULPT_STATUS_STREAM = 5,
  SCULPT_STATUS_INTERNAL = 6,
} SculptStatus;

typedef struct SculptRegion SculptRegion;

typedef struct SculptReport SculptReport;

typedef struct SculptSchema SculptSchema;

/**
 * One failed rule. `row` is 0 when the rule checks its region as a whole.
 */
typedef struct SculptViolation {
  size_t rule;
  size_t row;
  size_t failing_rows;
} SculptViolation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Why the latest status-returning call on this thread failed; empty after
 * one that succeeded. The pointer stays valid until the next call into the
 * library on this thread.
 */
const char *sculpt_last_error(void);

/**
 * Parses a NUL-terminated schema document.
 *
 * # Safety
 * `source` must be a valid C string and `out` a valid pointer.
 */
enum SculptStatus sculpt_schema_parse(const char *source, struct SculptSchema **out);

/**
 * # Safety
 * `schema` must come from `sculpt_schema_parse` and not be freed already.
 */
void sculpt_schema_free(struct SculptSchema *schema);

/**
 * Number of rules in the schema, or 0 for a null handle.
 *
 * # Safety
 * `schema` must be null or a live handle.
 */
size_t sculpt_schema_rule_count(const struct SculptSchema *schema);

/**
 * Classifies the schema. `strict_guard_text` reads the right-star case as
 * yielding row-guarded only.
 *
 * # Safety
 * `schema` must be a live handle and `out` a valid pointer.
 */
enum SculptStatus sculpt_analyze(const struct SculptSchema *schema,
                                 bool strict_guard_text,
                                 enum SculptFragment *out);

/**
 * Per-rule analysis as text, one line per rule plus a summary line.
 *
 * # Safety
 * `schema` must be a live handle.
 */
char *sculpt_analyze_render(const struct SculptSchema *schema, bool strict_guard_text);

/**
 * Validates `len` bytes of document text. `mode` is a `SculptMode` and
 * `pad` a `SculptPad` value.
 *
 * # Safety
 * `schema` must be a live handle, `doc` must point to `len` readable bytes
 * and `out` must be a valid pointer.
 */
enum SculptStatus sculpt_validate(const struct SculptSchema *schema,
                                  const uint8_t *doc,
                                  size_t len,
                                  uint32_t mode,
                                  uint32_t pad,
                                  struct SculptReport **out);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool sculpt_report_is_valid(const struct SculptReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t sculpt_report_violation_count(const struct SculptReport *report);

/**
 * Number of uniqueness violations, including any a stream run only counted.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t sculpt_report_unique_violation_count(const struct SculptReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum SculptStatus sculpt_report_violation(const struct SculptReport *report,
                                          size_t index,
                                          struct SculptViolation *out);

/**
 * The report as text: the line-oriented machine format when `machine` is
 * set, the human-readable one otherwise.
 *
 * # Safety
 * `report` must be a live handle.
 */
char *sculpt_report_render(const struct SculptReport *report, bool machine);

/**
 * # Safety
 * `report` must come from `sculpt_validate` and not be freed already.
 */
void sculpt_report_free(struct SculptReport *report);

/**
 * Evaluates a coordinate expression over a document, using the schema's
 * delimiters, token definitions and token types. `schema` may be null.
 *
 * # Safety
 * `expr` must be a valid C string, `doc` must point to `len` readable bytes
 * and `out` must be a valid pointer.
 */
enum SculptStatus sculpt_select(const struct SculptSchema *schema,
                                const char *expr,
                                const uint8_t *doc,
                                size_t len,
                                struct SculptRegion **out);

/**
 * # Safety
 * `region` must be null or a live handle.
 */
size_t sculpt_region_len(const struct SculptRegion *region);

/**
 * Coordinate `index` of the region in table order, 1-based.
 *
 * # Safety
 * `region` must be a live handle; `row` and `col` must be valid pointers.
 */
enum SculptStatus sculpt_region_get(const struct SculptRegion *region,
                                    size_t index,
                                    size_t *row,
                                    size_t *col);

/**
 * # Safety
 * `region` must come from `sculpt_select` and not be freed already.
 */
void sculpt_region_free(struct SculptRegion *region);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not freed already.
 */
void sculpt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCULPT_H */
