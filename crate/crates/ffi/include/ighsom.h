#ifndef IGHSOM_H
#define IGHSOM_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum IghsomStatus {
  IGHSOM_STATUS_OK = 0,
  IGHSOM_STATUS_NULL_ARGUMENT = 1,
  IGHSOM_STATUS_INVALID_UTF8 = 2,
  IGHSOM_STATUS_PARSE = 3,
  IGHSOM_STATUS_VALIDATION = 4,
  IGHSOM_STATUS_NOT_FOUND = 5,
  IGHSOM_STATUS_MALFORMED_PATH = 6,
  IGHSOM_STATUS_CONFLICT = 7,
  IGHSOM_STATUS_PRECONDITION = 8,
  IGHSOM_STATUS_CONFIG = 9,
  IGHSOM_STATUS_FINGERPRINT = 10,
  IGHSOM_STATUS_SNAPSHOT = 11,
  IGHSOM_STATUS_IO = 12,
  IGHSOM_STATUS_CONTRACT = 13,
  IGHSOM_STATUS_JSON = 14,
  IGHSOM_STATUS_DELIVERY = 15,
  IGHSOM_STATUS_PANIC = 16,
} IghsomStatus;

/**
 * Opaque analysis session.
 */
typedef struct IghsomSession IghsomSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty session. Release it with [`ighsom_session_free`].
 */
struct IghsomSession *ighsom_session_new(void);

/**
 * # Safety
 * `s` must come from [`ighsom_session_new`] and not be used afterwards. Null is ignored.
 */
void ighsom_session_free(struct IghsomSession *s);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on this thread; do not free.
 */
const char *ighsom_last_error(void);

/**
 * # Safety
 * `p` must be a string returned by this library, or null.
 */
void ighsom_string_free(char *p);

/**
 * Loads record CSV text (header `no,lat,lon,alt,name,evaluation,comment`).
 *
 * # Safety
 * `s` must be a live session and `csv` a NUL-terminated string.
 */
enum IghsomStatus ighsom_load_csv(const struct IghsomSession *s, const char *csv);

/**
 * Loads a corpus given as `{"documents": [{"id", "text"}...]}`.
 *
 * # Safety
 * `s` must be a live session and `json` a NUL-terminated string.
 */
enum IghsomStatus ighsom_load_corpus_json(const struct IghsomSession *s, const char *json);

/**
 * Grows a hierarchy. `params_json` may be null for defaults.
 *
 * # Safety
 * `s` must be a live session; `params_json` null or NUL-terminated.
 */
enum IghsomStatus ighsom_train(const struct IghsomSession *s,
                               const char *params_json,
                               uint64_t seed);

/**
 * Regrows the map holding `path`. Writes the report and new hierarchy as JSON
 * to `out_json`. `overrides_json` may be null.
 *
 * # Safety
 * `s` must be a live session, `path` NUL-terminated, `overrides_json` null or
 * NUL-terminated, and `out_json` writable.
 */
enum IghsomStatus ighsom_refine(const struct IghsomSession *s,
                                const char *path,
                                const char *overrides_json,
                                uint64_t seed,
                                char **out_json);

/**
 * # Safety
 * `s` must be a live session and `out_json` writable.
 */
enum IghsomStatus ighsom_hierarchy_json(const struct IghsomSession *s, char **out_json);

/**
 * # Safety
 * `s` must be a live session, `path` NUL-terminated and `out_json` writable.
 */
enum IghsomStatus ighsom_samples_json(const struct IghsomSession *s,
                                      const char *path,
                                      char **out_json);

/**
 * # Safety
 * `s` must be a live session and `out_json` writable.
 */
enum IghsomStatus ighsom_rules_json(const struct IghsomSession *s, char **out_json);

/**
 * Applies rules to `{"records": [...], "rules"?: [...], "tfidf_alias"?: ...}`.
 *
 * # Safety
 * `s` must be a live session, `request_json` NUL-terminated and `out_json` writable.
 */
enum IghsomStatus ighsom_filter_json(const struct IghsomSession *s,
                                     const char *request_json,
                                     char **out_json);

/**
 * # Safety
 * `s` must be a live session and `out_json` writable.
 */
enum IghsomStatus ighsom_snapshot_export(const struct IghsomSession *s, char **out_json);

/**
 * # Safety
 * `s` must be a live session and `json` NUL-terminated.
 */
enum IghsomStatus ighsom_snapshot_import(const struct IghsomSession *s, const char *json);

/**
 * Hue angle in degrees in `[0, 360)`; 0 for grays.
 */
double ighsom_hue(uint8_t r, uint8_t g, uint8_t b);

/**
 * # Safety
 * `out` must be writable.
 */
enum IghsomStatus ighsom_case1_stop(size_t n_k, size_t n_input, double alpha, bool *out);

/**
 * # Safety
 * `winner_qes` must point to `len` readable doubles and `out` must be writable.
 */
enum IghsomStatus ighsom_case2_insert(double qe_k,
                                      const double *winner_qes,
                                      size_t len,
                                      double beta,
                                      double tau1,
                                      bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IGHSOM_H */
