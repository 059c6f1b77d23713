/*
 * regfilt: recursive and robust rigid 3D registration from point
 * correspondences, with an RGBD depth-noise model and a synthetic benchmark
 * harness.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed by the library; every fallible call returns a regfilt_status and
 * leaves a human-readable message in regfilt_last_error() on failure.
 *
 * Units: correspondence CSV files and report fields are millimeters; depth
 * files and the in-memory array interfaces are meters.
 */

#ifndef REGFILT_H
#define REGFILT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define REGFILT_API __declspec(dllexport)
#else
#define REGFILT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum regfilt_status {
  REGFILT_OK = 0,
  REGFILT_ERROR_INVALID_ARGUMENT = 1,
  REGFILT_ERROR_EMPTY_INPUT = 2,
  REGFILT_ERROR_PARSE = 3,
  REGFILT_ERROR_IO = 4,
  REGFILT_ERROR_UNDER_DETERMINED = 5,
  REGFILT_ERROR_DEGENERATE = 6,
  REGFILT_ERROR_INVALID_SCALE = 7,
  REGFILT_ERROR_NUMERICAL = 8,
  REGFILT_ERROR_INFEASIBLE = 9,
  REGFILT_ERROR_INTERNAL = 10
} regfilt_status;

typedef enum regfilt_method {
  REGFILT_METHOD_HORN = 0,
  REGFILT_METHOD_KF = 1,
  REGFILT_METHOD_RF = 2
} regfilt_method;

REGFILT_API const char* regfilt_version(void);
REGFILT_API const char* regfilt_status_name(regfilt_status status);

/* Message of the most recent failure on the calling thread; valid until the
 * next library call on the same thread. */
REGFILT_API const char* regfilt_last_error(void);

/* ---- configuration ------------------------------------------------------ */

/* String-keyed run configuration mirroring the `key = value` config-file
 * format; unknown keys are rejected. */
typedef struct regfilt_config regfilt_config;

REGFILT_API regfilt_config* regfilt_config_create(void);
REGFILT_API regfilt_status regfilt_config_load(regfilt_config* config, const char* path);
REGFILT_API regfilt_status regfilt_config_set(regfilt_config* config, const char* key,
                                              const char* value);
/* Renders the current value of a key back into its config-file form (an
 * empty string for unset optional keys). buffer must hold at least 128
 * bytes. */
REGFILT_API regfilt_status regfilt_config_get(const regfilt_config* config, const char* key,
                                              char* buffer, size_t buffer_size);
REGFILT_API void regfilt_config_destroy(regfilt_config* config);

/* ---- correspondences ----------------------------------------------------- */

typedef struct regfilt_corrs regfilt_corrs;

/* CSV with header sx,sy,sz,tx,ty,tz[,ssx,ssy,ssz]; values in millimeters. */
REGFILT_API regfilt_status regfilt_corrs_load_csv(const char* path, regfilt_corrs** out);

/* ASCII PLY clouds plus a "source_index target_index" pair file; meters. */
REGFILT_API regfilt_status regfilt_corrs_load_ply(const char* source_ply, const char* target_ply,
                                                  const char* pairs_path, regfilt_corrs** out);

/* Arrays of xyz triples in meters; sigmas_xyz may be NULL. */
REGFILT_API regfilt_status regfilt_corrs_create(const double* sources_xyz,
                                                const double* targets_xyz,
                                                const double* sigmas_xyz, size_t count,
                                                regfilt_corrs** out);

REGFILT_API size_t regfilt_corrs_size(const regfilt_corrs* corrs);
REGFILT_API void regfilt_corrs_destroy(regfilt_corrs* corrs);

/* ---- registration -------------------------------------------------------- */

typedef struct regfilt_result regfilt_result;

/* config may be NULL for defaults. */
REGFILT_API regfilt_status regfilt_register_run(const regfilt_corrs* corrs, regfilt_method method,
                                                const regfilt_config* config,
                                                regfilt_result** out);

REGFILT_API double regfilt_result_rmse_mm(const regfilt_result* result);
REGFILT_API void regfilt_result_rotation(const regfilt_result* result, double out_row_major[9]);
REGFILT_API void regfilt_result_translation_mm(const regfilt_result* result, double out[3]);
REGFILT_API double regfilt_result_scale(const regfilt_result* result);
REGFILT_API int64_t regfilt_result_steps(const regfilt_result* result);
REGFILT_API int regfilt_result_under_determined(const regfilt_result* result);

REGFILT_API size_t regfilt_result_trace_size(const regfilt_result* result);
/* effective_theta is NaN for non-robust runs. Out pointers may be NULL. */
REGFILT_API regfilt_status regfilt_result_trace_entry(const regfilt_result* result, size_t index,
                                                      double* innovation_norm, double* trace_p,
                                                      double* effective_theta);

/* format is "json" or "table"; path "-" writes to stdout. */
REGFILT_API regfilt_status regfilt_result_write(const regfilt_result* result, const char* path,
                                                const char* format);
REGFILT_API regfilt_status regfilt_result_write_json(const regfilt_result* result,
                                                     const char* path);
REGFILT_API void regfilt_result_destroy(regfilt_result* result);

/* ---- synthetic data and benchmark ---------------------------------------- */

/* Writes sample_NNN.csv / truth_NNN.json files into out_dir (created if
 * missing) using the config's noise/points/samples/seed fields. */
REGFILT_API regfilt_status regfilt_synth_write(const regfilt_config* config, const char* out_dir);

typedef struct regfilt_report regfilt_report;

/* Runs the benchmark described by the config (methods, noise list, points,
 * samples, seed, filter settings). */
REGFILT_API regfilt_status regfilt_bench_run(const regfilt_config* config, regfilt_report** out);

REGFILT_API size_t regfilt_report_row_count(const regfilt_report* report);
/* method/scenario buffers must hold at least 16 bytes. Out pointers may be
 * NULL. */
REGFILT_API regfilt_status regfilt_report_row(const regfilt_report* report, size_t index,
                                              char method[16], char scenario[16],
                                              double* rmse_mean_mm, double* rmse_stddev_mm,
                                              double* time_mean_ms, int64_t* samples,
                                              int64_t* failures);

/* format is "json" or "table"; path "-" writes to stdout. */
REGFILT_API regfilt_status regfilt_report_write(const regfilt_report* report, const char* path,
                                                const char* format);
REGFILT_API void regfilt_report_destroy(regfilt_report* report);

/* ---- depth sensor model --------------------------------------------------- */

/* Flat list (one value per line) or CSV grid of depths, meters. Free the
 * returned buffer with regfilt_buffer_free. */
REGFILT_API regfilt_status regfilt_depths_load(const char* path, double** out_values,
                                               size_t* out_count);
REGFILT_API void regfilt_buffer_free(double* buffer);

/* Depth sigma at a quantization level: half-width of the
 * [index-offset, index+offset] window over the distinct depth levels
 * extracted from `depths` (relative merge tolerance merge_epsilon). */
REGFILT_API regfilt_status regfilt_zlevel_sigma(const double* depths, size_t count,
                                                double merge_epsilon, int64_t level_index,
                                                int64_t level_offset, double* out_sigma);

/* Pinhole propagation of a depth sigma: out_sigmas = {sx, sy, sz}, meters.
 * intrinsics = {fx, fy, cx, cy}. */
REGFILT_API regfilt_status regfilt_point_sigmas(const double intrinsics[4], double u, double v,
                                                double sigma_z, double out_sigmas[3]);

/* Rank-1 outer-product covariance of a sigma triple (row-major 3x3), or the
 * diagonal form when `diagonal` is nonzero. */
REGFILT_API regfilt_status regfilt_point_covariance(const double sigmas[3], int diagonal,
                                                    double out_row_major[9]);

REGFILT_API regfilt_status regfilt_backproject(const double intrinsics[4], double u, double v,
                                               double depth, double out_point[3]);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* REGFILT_H */
