#ifndef LOCALBN_H
#define LOCALBN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LbnStatus {
  LBN_STATUS_OK = 0,
  LBN_STATUS_NULL_POINTER = 1,
  LBN_STATUS_INVALID_UTF8 = 2,
  LBN_STATUS_INVALID_INPUT = 3,
  LBN_STATUS_INVALID_CONFIG = 4,
  LBN_STATUS_MODEL = 5,
  LBN_STATUS_BRIDGE = 6,
  LBN_STATUS_INFERENCE = 7,
  LBN_STATUS_IO = 8,
  LBN_STATUS_PARSE = 9,
  LBN_STATUS_PANIC = 10,
} LbnStatus;

typedef enum LbnFormat {
  LBN_FORMAT_JSON = 0,
  LBN_FORMAT_DOT = 1,
  LBN_FORMAT_TEXT = 2,
} LbnFormat;

typedef enum LbnRule {
  LBN_RULE_HIGH_CONFIDENCE = 1,
  LBN_RULE_UNRELIABLE = 2,
  LBN_RULE_CONTRAST = 3,
  LBN_RULE_UNCERTAIN = 4,
} LbnRule;

/**
 * Opaque classifier handle.
 */
typedef struct LbnModel LbnModel;

/**
 * Opaque explanation handle.
 */
typedef struct LbnReport LbnReport;

/**
 * Explanation knobs. The class variable is always named `class`.
 * `max_parents == 0` means no in-degree limit.
 */
typedef struct LbnConfig {
  double epsilon;
  size_t n_samples;
  uint64_t seed;
  bool include_original;
  size_t quartiles;
  double tau;
  size_t max_parents;
  size_t max_iterations;
  double alpha;
  size_t node_threshold;
  size_t blanket_depth;
} LbnConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *lbn_last_error(void);

struct LbnConfig lbn_config_default(void);

/**
 * Loads a classifier. `spec` is a weights JSON path, `synthetic:<spec>` or
 * `cmd:<shell command>`; `input_names` lists the `n_inputs` feature names.
 *
 * # Safety
 * `spec` and every entry of `input_names` must be NUL-terminated strings;
 * `out` must be writable.
 */
enum LbnStatus lbn_model_load(const char *spec,
                              const char *const *input_names,
                              size_t n_inputs,
                              struct LbnModel **out);

/**
 * # Safety
 * `model` must come from [`lbn_model_load`] and not be used afterwards.
 */
void lbn_model_free(struct LbnModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
size_t lbn_model_n_inputs(const struct LbnModel *model);

/**
 * Explains the prediction at `values` (length `n_values`, in the model's
 * input order). A null `config` means the defaults.
 *
 * # Safety
 * `model` must be live, `values` must hold `n_values` doubles, and `out`
 * must be writable.
 */
enum LbnStatus lbn_explain(const struct LbnModel *model,
                           const double *values,
                           size_t n_values,
                           const struct LbnConfig *config,
                           struct LbnReport **out);

/**
 * Parses a JSON report produced by [`lbn_report_render`] or the CLI.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum LbnStatus lbn_report_from_json(const char *json, struct LbnReport **out);

/**
 * # Safety
 * `report` must be live and `out` writable. Free the result with
 * [`lbn_string_free`].
 */
enum LbnStatus lbn_report_render(const struct LbnReport *report, enum LbnFormat format, char **out);

/**
 * # Safety
 * `report` must be live and `out` writable.
 */
enum LbnStatus lbn_report_rule(const struct LbnReport *report, enum LbnRule *out);

/**
 * Surrogate posterior of the black box's predicted label.
 *
 * # Safety
 * `report` must be live and `out` writable.
 */
enum LbnStatus lbn_report_posterior(const struct LbnReport *report, double *out);

/**
 * Black-box predicted label. Free the result with [`lbn_string_free`].
 *
 * # Safety
 * `report` must be live and `out` writable.
 */
enum LbnStatus lbn_report_predicted_label(const struct LbnReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void lbn_report_free(struct LbnReport *report);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void lbn_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCALBN_H */
