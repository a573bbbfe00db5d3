#ifndef LOWRANK_SCHWARZ_H
#define LOWRANK_SCHWARZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LrsBackend {
  LRS_BACKEND_FULL = 0,
  LRS_BACKEND_LOW_RANK = 1,
} LrsBackend;

typedef enum LrsMap {
  /**
   * Inflow data to the solution on the whole subdomain.
   */
  LRS_MAP_S = 0,
  /**
   * Inflow data to the solution on the buffered interior.
   */
  LRS_MAP_SS = 1,
  /**
   * Inflow data to the traces sent to the neighbors.
   */
  LRS_MAP_P = 2,
} LrsMap;

typedef enum LrsStatus {
  LRS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LRS_STATUS_NULL_ARGUMENT = 1,
  LRS_STATUS_CONFIG = 2,
  LRS_STATUS_NON_CONVERGENCE = 3,
  LRS_STATUS_CACHE = 4,
  LRS_STATUS_IO = 5,
  LRS_STATUS_INVALID_ARGUMENT = 6,
  /**
   * The output buffer is too small; the required length was written.
   */
  LRS_STATUS_BUFFER_TOO_SMALL = 7,
  LRS_STATUS_PANIC = 8,
} LrsStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct LrsConfig LrsConfig;

/**
 * Opaque phase-space field, node-major with `n_v` ordinates per node.
 */
typedef struct LrsField LrsField;

/**
 * Opaque set of compressed subdomain maps.
 */
typedef struct LrsMapCache LrsMapCache;

/**
 * Summary of one online run.
 */
typedef struct LrsRunSummary {
  size_t iterations;
  bool converged;
  double final_trace_error;
  double final_rel_error;
  double mean_step_seconds;
} LrsRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *lrs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lrs_version(void);

/**
 * Default configuration.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LrsStatus lrs_config_default(struct LrsConfig **out);

/**
 * Parse a TOML configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum LrsStatus lrs_config_from_toml(const char *toml, struct LrsConfig **out);

/**
 * Load a TOML configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum LrsStatus lrs_config_load(const char *path, struct LrsConfig **out);

/**
 * # Safety
 * `cfg` must be a live handle.
 */
enum LrsStatus lrs_config_set_seed(struct LrsConfig *cfg, uint64_t seed);

/**
 * # Safety
 * `cfg` must be a live handle and `dir` a NUL-terminated string.
 */
enum LrsStatus lrs_config_set_out_dir(struct LrsConfig *cfg, const char *dir);

/**
 * # Safety
 * `cfg` must be a live handle, `rank` at least 1.
 */
enum LrsStatus lrs_config_set_rank(struct LrsConfig *cfg, size_t rank);

/**
 * Release a configuration. Null is ignored.
 *
 * # Safety
 * `cfg` must be null or a handle not yet freed.
 */
void lrs_config_free(struct LrsConfig *cfg);

/**
 * Monolithic direct solve of the configured problem.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum LrsStatus lrs_solve_global(const struct LrsConfig *cfg, struct LrsField **out);

/**
 * Converged Schwarz reference, written to the output directory.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be null or writable.
 */
enum LrsStatus lrs_reference(const struct LrsConfig *cfg, struct LrsField **out);

/**
 * Build and store the compressed maps.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum LrsStatus lrs_offline(const struct LrsConfig *cfg);

/**
 * Online run with the chosen backend.
 *
 * # Safety
 * `cfg` must be a live handle; `summary` must be writable; `out` must be
 * null or writable.
 */
enum LrsStatus lrs_run(const struct LrsConfig *cfg,
                       enum LrsBackend backend,
                       struct LrsRunSummary *summary,
                       struct LrsField **out);

/**
 * Dense singular values of one subdomain map, non-increasing. Writes the
 * count to `len`; if `cap` is smaller, returns `BufferTooSmall`.
 *
 * # Safety
 * `cfg` must be a live handle; `buf` must hold `cap` doubles (may be null
 * when `cap` is 0); `len` must be writable.
 */
enum LrsStatus lrs_spectrum(const struct LrsConfig *cfg,
                            enum LrsMap map,
                            size_t subdomain,
                            double *buf,
                            size_t cap,
                            size_t *len);

/**
 * Velocity-averaged discrepancy to the homogenized medium, one value per
 * configured delta.
 *
 * # Safety
 * As for `lrs_spectrum`.
 */
enum LrsStatus lrs_homog_check(const struct LrsConfig *cfg, double *buf, size_t cap, size_t *len);

/**
 * # Safety
 * `field` must be a live handle; the out pointers must be writable.
 */
enum LrsStatus lrs_field_shape(const struct LrsField *field, size_t *n_nodes, size_t *n_v);

/**
 * Copy the node-major values into `buf`.
 *
 * # Safety
 * `field` must be a live handle; `buf` must hold `cap` doubles; `len` must
 * be writable.
 */
enum LrsStatus lrs_field_copy(const struct LrsField *field, double *buf, size_t cap, size_t *len);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void lrs_field_free(struct LrsField *field);

/**
 * Load the map cache of the configured output directory, checking that it
 * was built for the configured problem.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum LrsStatus lrs_cache_load(const struct LrsConfig *cfg, struct LrsMapCache **out);

/**
 * Number of maps and their stored rank.
 *
 * # Safety
 * `cache` must be a live handle; the out pointers must be writable.
 */
enum LrsStatus lrs_cache_info(const struct LrsMapCache *cache, size_t *count, size_t *rank);

/**
 * Singular values stored for `subdomain`.
 *
 * # Safety
 * As for `lrs_spectrum`, with `cache` a live handle.
 */
enum LrsStatus lrs_cache_sigma(const struct LrsMapCache *cache,
                               size_t subdomain,
                               double *buf,
                               size_t cap,
                               size_t *len);

/**
 * # Safety
 * `cache` must be null or a handle not yet freed.
 */
void lrs_cache_free(struct LrsMapCache *cache);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOWRANK_SCHWARZ_H */
