#ifndef EDUDESIRE_H
#define EDUDESIRE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdStatus {
  ED_STATUS_OK = 0,
  ED_STATUS_NULL_ARGUMENT = 1,
  ED_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad input: unknown attribute or level, malformed JSON, wrong length.
   */
  ED_STATUS_VALIDATION = 3,
  ED_STATUS_IO = 4,
  ED_STATUS_NUMERICAL = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  ED_STATUS_PANIC = 6,
} EdStatus;

typedef struct EdDataset EdDataset;

typedef struct EdModel EdModel;

typedef struct EdSchema EdSchema;

typedef struct EdTree EdTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *ed_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ed_string_free(char *s);

/**
 * Upper tail of the chi-square distribution.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EdStatus ed_chi_square_sf(double x, size_t df, double *out);

/**
 * Two-sided Fisher exact test of `[[a, b], [c, d]]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EdStatus ed_fisher_exact(uint64_t a, uint64_t b, uint64_t c, uint64_t d, double *out);

/**
 * The built-in nine-attribute survey schema.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EdStatus ed_schema_default(struct EdSchema **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for writes.
 */
enum EdStatus ed_schema_from_json(const char *json, struct EdSchema **out);

/**
 * # Safety
 * Handles must be valid; `out` valid for writes.
 */
enum EdStatus ed_schema_len(const struct EdSchema *schema, size_t *out);

/**
 * # Safety
 * `schema` must come from this library or be null.
 */
void ed_schema_free(struct EdSchema *schema);

/**
 * Loads a CSV with a header row; missing cells are an error.
 *
 * # Safety
 * Handles and strings must be valid; `out` valid for writes.
 */
enum EdStatus ed_dataset_load_csv(const struct EdSchema *schema,
                                  const char *path,
                                  struct EdDataset **out);

/**
 * `n` records from the built-in generator.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EdStatus ed_dataset_generate_default(uint64_t seed, size_t n, struct EdDataset **out);

/**
 * # Safety
 * Handles must be valid; `out` valid for writes.
 */
enum EdStatus ed_dataset_len(const struct EdDataset *data, size_t *out);

/**
 * # Safety
 * `data` must come from this library or be null.
 */
void ed_dataset_free(struct EdDataset *data);

/**
 * Fits a model; `terms` is a comma-separated list such as `"A,B,A*B"`.
 *
 * # Safety
 * Handles and strings must be valid; `out` valid for writes.
 */
enum EdStatus ed_model_fit(const struct EdDataset *data, const char *terms, struct EdModel **out);

/**
 * # Safety
 * Handles must be valid; `out` valid for writes.
 */
enum EdStatus ed_model_deviance(const struct EdModel *model, double *out);

/**
 * Writes one probability per class into `probs`, which holds `n_probs` slots.
 *
 * # Safety
 * `record` must point to `len` values and `probs` to `n_probs` writable slots.
 */
enum EdStatus ed_model_predict_proba(const struct EdModel *model,
                                     const size_t *record,
                                     size_t len,
                                     double *probs,
                                     size_t n_probs);

/**
 * # Safety
 * `model` must come from this library or be null.
 */
void ed_model_free(struct EdModel *model);

/**
 * Builds a tree splitting on the comma-separated `order`. A `max_depth` of 0
 * means no cap.
 *
 * # Safety
 * Handles and strings must be valid; `out` valid for writes.
 */
enum EdStatus ed_tree_build(const struct EdDataset *data,
                            const char *order,
                            uint64_t min_support,
                            size_t max_depth,
                            struct EdTree **out);

/**
 * Routes a record; writes the class index, rule number and backoff flag.
 *
 * # Safety
 * `record` must point to `len` values; out pointers valid for writes.
 */
enum EdStatus ed_tree_classify(const struct EdTree *tree,
                               const size_t *record,
                               size_t len,
                               size_t *class_out,
                               size_t *rule_out,
                               bool *backoff_out);

/**
 * The rule set as text; free the result with [`ed_string_free`].
 *
 * # Safety
 * Handles must be valid; `out` valid for writes.
 */
enum EdStatus ed_tree_rules_text(const struct EdTree *tree, bool include_backoff, char **out);

/**
 * # Safety
 * `tree` must come from this library or be null.
 */
void ed_tree_free(struct EdTree *tree);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDUDESIRE_H */
