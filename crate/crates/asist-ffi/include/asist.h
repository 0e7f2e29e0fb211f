#ifndef ASIST_H
#define ASIST_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; mirrors the CLI exit-code contract.
 */
typedef enum AsistStatus {
  ASIST_STATUS_OK = 0,
  ASIST_STATUS_INVALID_INPUT = 2,
  ASIST_STATUS_FORMAT_ERROR = 3,
  ASIST_STATUS_INCOMPATIBLE_INPUTS = 4,
  ASIST_STATUS_NULL_POINTER = 5,
} AsistStatus;

/**
 * Opaque clustering result handle.
 */
typedef struct AsistClustering AsistClustering;

/**
 * Opaque label-video handle.
 */
typedef struct AsistLabelVideo AsistLabelVideo;

/**
 * Simulation parameters (see asist_sim_params_default for the defaults).
 */
typedef struct AsistSimParams {
  uint32_t n_objects;
  uint32_t canvas_size;
  uint32_t out_size;
  uint32_t n_frames;
  double min_length;
  double max_length;
  double min_width;
  double max_width;
  double move_prob;
  double rotate_prob;
  double resize_prob;
  uint64_t seed;
} AsistSimParams;

typedef struct AsistOracleParams {
  uint32_t dim;
  double noise_sigma;
  uint64_t seed;
} AsistOracleParams;

typedef struct AsistMeanShiftParams {
  double bandwidth;
  double seed_fraction;
  uint32_t max_iters;
  double convergence_tol;
  double merge_tol;
  double fg_norm_threshold;
  uintptr_t min_cluster_pixels;
  double assoc_threshold;
  uint64_t seed;
} AsistMeanShiftParams;

typedef struct AsistAogmWeights {
  double w_ns;
  double w_fn;
  double w_fp;
  double w_ed;
  double w_ea;
  double w_ec;
} AsistAogmWeights;

/**
 * DET/SEG/TRA triple filled by asist_evaluate.
 */
typedef struct AsistScores {
  double det;
  double seg;
  double tra;
} AsistScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. The pointer is
 * valid until the next asist call on the same thread.
 */
const char *asist_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *asist_version(void);

/**
 * Cap the worker pool from the ASIST_THREADS environment variable. Optional;
 * the pool is otherwise sized to the hardware. Results do not depend on it.
 */
void asist_init_threads(void);

struct AsistSimParams asist_sim_params_default(void);

struct AsistOracleParams asist_oracle_params_default(void);

struct AsistMeanShiftParams asist_mean_shift_params_default(void);

struct AsistAogmWeights asist_aogm_weights_default(void);

/**
 * Simulate one cropped annotation video and write it as a mask directory.
 *
 * # Safety
 * `params` and `out_dir` must be valid pointers; `out_dir` a NUL-terminated
 * UTF-8 path.
 */
enum AsistStatus asist_simulate(const struct AsistSimParams *params, const char *out_dir);

/**
 * Embed a label-video directory into an ASEMB file.
 *
 * # Safety
 * `label_dir`, `params`, and `out_file` must be valid pointers.
 */
enum AsistStatus asist_embed(const char *label_dir,
                             const struct AsistOracleParams *params,
                             const char *out_file);

/**
 * Segment and track an ASEMB file into a mask directory.
 *
 * # Safety
 * `embedding_file`, `params`, and `out_dir` must be valid pointers.
 */
enum AsistStatus asist_track(const char *embedding_file,
                             const struct AsistMeanShiftParams *params,
                             const char *out_dir);

/**
 * Evaluate a computed mask directory against a reference. Writes a JSON
 * report when `report_file` is non-NULL and fills `scores` when non-NULL.
 *
 * # Safety
 * `ref_dir`, `res_dir`, and `weights` must be valid pointers; `report_file`
 * and `scores` may be NULL.
 */
enum AsistStatus asist_evaluate(const char *ref_dir,
                                const char *res_dir,
                                const struct AsistAogmWeights *weights,
                                const char *report_file,
                                struct AsistScores *scores);

/**
 * Render a mask directory as RGB PNGs.
 *
 * # Safety
 * `label_dir` and `out_dir` must be valid NUL-terminated UTF-8 paths.
 */
enum AsistStatus asist_colorize(const char *label_dir, const char *out_dir);

/**
 * Read a mask directory into an opaque handle.
 *
 * # Safety
 * `dir` must be a valid path pointer; `out` a valid handle out-pointer.
 */
enum AsistStatus asist_label_video_read(const char *dir, struct AsistLabelVideo **out);

/**
 * # Safety
 * `handle` must come from asist_label_video_read and not be freed twice.
 */
void asist_label_video_free(struct AsistLabelVideo *handle);

/**
 * # Safety
 * `handle` must be a live handle.
 */
uint32_t asist_label_video_frames(const struct AsistLabelVideo *handle);

/**
 * # Safety
 * `handle` must be a live handle.
 */
uint32_t asist_label_video_width(const struct AsistLabelVideo *handle);

/**
 * # Safety
 * `handle` must be a live handle.
 */
uint32_t asist_label_video_height(const struct AsistLabelVideo *handle);

/**
 * # Safety
 * `handle` must be a live handle.
 */
uint32_t asist_label_video_tracks(const struct AsistLabelVideo *handle);

/**
 * Copy frame `t` (row-major u32 ids) into `buf` of `len` entries.
 *
 * # Safety
 * `handle` must be live; `buf` must point to at least `len` u32 slots.
 */
enum AsistStatus asist_label_video_frame_labels(const struct AsistLabelVideo *handle,
                                                uint32_t t,
                                                uint32_t *buf,
                                                uintptr_t len);

/**
 * Run seeded mean-shift over `n` points of `dim` doubles each (row-major).
 *
 * # Safety
 * `points` must hold `n * dim` doubles; `params` and `out` must be valid.
 */
enum AsistStatus asist_mean_shift(const double *points,
                                  uintptr_t n,
                                  uintptr_t dim,
                                  const struct AsistMeanShiftParams *params,
                                  struct AsistClustering **out);

/**
 * # Safety
 * `handle` must come from asist_mean_shift and not be freed twice.
 */
void asist_clustering_free(struct AsistClustering *handle);

/**
 * # Safety
 * `handle` must be a live handle.
 */
uintptr_t asist_clustering_modes(const struct AsistClustering *handle);

/**
 * Copy mode `k` into `buf` of `dim` doubles.
 *
 * # Safety
 * `handle` must be live; `buf` must hold the clustering dimensionality.
 */
enum AsistStatus asist_clustering_mode(const struct AsistClustering *handle,
                                       uintptr_t k,
                                       double *buf,
                                       uintptr_t len);

/**
 * Copy the point assignment into `buf`: mode index per point, -1 for
 * outliers.
 *
 * # Safety
 * `handle` must be live; `buf` must hold one i64 per clustered point.
 */
enum AsistStatus asist_clustering_assignment(const struct AsistClustering *handle,
                                             int64_t *buf,
                                             uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASIST_H */
