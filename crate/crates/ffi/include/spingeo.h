/* C interface of the spingeo verification engine. */

#ifndef SPINGEO_H
#define SPINGEO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by the entry points.
typedef enum SpingeoStatus {
  // Suite ran and every check passed.
  SPINGEO_STATUS_OK = 0,
  // Suite ran but at least one check failed.
  SPINGEO_STATUS_CHECKS_FAILED = 1,
  // Invalid configuration (unknown suite, model, or check id).
  SPINGEO_STATUS_USAGE = 2,
  // A shipped construction failed its own defining equation.
  SPINGEO_STATUS_BUILD = 3,
  // A required pointer argument was null.
  SPINGEO_STATUS_NULL_ARGUMENT = 4,
  // A string argument was not valid UTF-8.
  SPINGEO_STATUS_BAD_UTF8 = 5,
} SpingeoStatus;

// Opaque suite configuration handle.
typedef struct SpingeoConfig SpingeoConfig;

// Opaque report handle; owns its serialized forms.
typedef struct SpingeoReport SpingeoReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a configuration for the named suite (clifford, models, s3,
// hypersurface, dim2, dim4, dim5, identities, all). Defaults: 100 samples,
// seed 42, no model, no tolerance overrides. Returns null on invalid input.
//
// # Safety
// `suite` must be a valid NUL-terminated string.
struct SpingeoConfig *spingeo_config_new(const char *suite);

// Select the candidate or model the suite runs on.
//
// # Safety
// `cfg` must come from `spingeo_config_new`; `model` must be a valid
// NUL-terminated string.
enum SpingeoStatus spingeo_config_set_model(struct SpingeoConfig *cfg, const char *model);

// # Safety
// `cfg` must come from `spingeo_config_new`.
enum SpingeoStatus spingeo_config_set_samples(struct SpingeoConfig *cfg, size_t samples);

// # Safety
// `cfg` must come from `spingeo_config_new`.
enum SpingeoStatus spingeo_config_set_seed(struct SpingeoConfig *cfg, uint64_t seed);

// Override the tolerance of one check id.
//
// # Safety
// `cfg` must come from `spingeo_config_new`; `check_id` must be a valid
// NUL-terminated string.
enum SpingeoStatus spingeo_config_set_tolerance(struct SpingeoConfig *cfg,
                                                const char *check_id,
                                                double tolerance);

// Run the configured suite. On success (`Ok` or `ChecksFailed`) `*out`
// holds a report handle the caller must free with `spingeo_report_free`.
//
// # Safety
// `cfg` must come from `spingeo_config_new`; `out` must point to writable
// memory for one pointer.
enum SpingeoStatus spingeo_run(const struct SpingeoConfig *cfg, struct SpingeoReport **out);

// JSON document of the report; owned by the report handle.
//
// # Safety
// `report` must come from `spingeo_run` and not yet be freed.
const char *spingeo_report_json(const struct SpingeoReport *report);

// Human-readable summary; owned by the report handle.
//
// # Safety
// `report` must come from `spingeo_run` and not yet be freed.
const char *spingeo_report_summary(const struct SpingeoReport *report);

// # Safety
// `report` must come from `spingeo_run` and not yet be freed.
size_t spingeo_report_passed(const struct SpingeoReport *report);

// # Safety
// `report` must come from `spingeo_run` and not yet be freed.
size_t spingeo_report_failed(const struct SpingeoReport *report);

// # Safety
// `report` must come from `spingeo_run` and not yet be freed.
size_t spingeo_report_inapplicable(const struct SpingeoReport *report);

// # Safety
// `report` must come from `spingeo_run`; must not be freed twice.
void spingeo_report_free(struct SpingeoReport *report);

// # Safety
// `cfg` must come from `spingeo_config_new`; must not be freed twice.
void spingeo_config_free(struct SpingeoConfig *cfg);

// Newly allocated listing of every check id with module and anchor; free
// with `spingeo_string_free`.
char *spingeo_list_checks(void);

// Newly allocated copy of the last error message on this thread, or null;
// free with `spingeo_string_free`.
char *spingeo_last_error(void);

// # Safety
// `s` must have been returned by `spingeo_list_checks` or
// `spingeo_last_error`, and not yet freed.
void spingeo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINGEO_H */
