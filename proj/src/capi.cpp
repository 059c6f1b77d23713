#include "regfilt/regfilt.h"

#include "benchmark.hpp"
#include "closed_form.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "kalman.hpp"
#include "robust.hpp"
#include "sensor_model.hpp"
#include "synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

using namespace regfilt;

namespace {

thread_local std::string g_last_error;

regfilt_status status_from_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return REGFILT_ERROR_INVALID_ARGUMENT;
    case ErrorCode::empty_input: return REGFILT_ERROR_EMPTY_INPUT;
    case ErrorCode::parse: return REGFILT_ERROR_PARSE;
    case ErrorCode::io: return REGFILT_ERROR_IO;
    case ErrorCode::under_determined: return REGFILT_ERROR_UNDER_DETERMINED;
    case ErrorCode::degenerate: return REGFILT_ERROR_DEGENERATE;
    case ErrorCode::invalid_scale: return REGFILT_ERROR_INVALID_SCALE;
    case ErrorCode::numerical: return REGFILT_ERROR_NUMERICAL;
    case ErrorCode::infeasible: return REGFILT_ERROR_INFEASIBLE;
  }
  return REGFILT_ERROR_INTERNAL;
}

/// Runs `fn`, translating exceptions into statuses.
template <typename Fn>
regfilt_status guarded(Fn&& fn) {
  try {
    fn();
    return REGFILT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return REGFILT_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return REGFILT_ERROR_INTERNAL;
  }
}

regfilt_status invalid(const char* message) {
  g_last_error = message;
  return REGFILT_ERROR_INVALID_ARGUMENT;
}

}  // namespace

struct regfilt_config {
  RunConfig cfg;
};

struct regfilt_corrs {
  Correspondences corrs;
};

struct regfilt_result {
  RegistrationResult result;
  std::string method;
  std::uint64_t seed = 42;
};

struct regfilt_report {
  BenchReport report;
};

extern "C" {

const char* regfilt_version(void) { return kVersion; }

const char* regfilt_status_name(regfilt_status status) {
  switch (status) {
    case REGFILT_OK: return "ok";
    case REGFILT_ERROR_INVALID_ARGUMENT: return "invalid-argument";
    case REGFILT_ERROR_EMPTY_INPUT: return "empty-input";
    case REGFILT_ERROR_PARSE: return "parse";
    case REGFILT_ERROR_IO: return "io";
    case REGFILT_ERROR_UNDER_DETERMINED: return "under-determined";
    case REGFILT_ERROR_DEGENERATE: return "degenerate";
    case REGFILT_ERROR_INVALID_SCALE: return "invalid-scale";
    case REGFILT_ERROR_NUMERICAL: return "numerical";
    case REGFILT_ERROR_INFEASIBLE: return "infeasible";
    case REGFILT_ERROR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* regfilt_last_error(void) { return g_last_error.c_str(); }

regfilt_config* regfilt_config_create(void) {
  return new (std::nothrow) regfilt_config{};
}

regfilt_status regfilt_config_load(regfilt_config* config, const char* path) {
  if (!config || !path) return invalid("regfilt_config_load: null argument");
  // Replaces the whole document; callers apply overrides with set() after.
  return guarded([&] { config->cfg = RunConfig::from_file(path); });
}

regfilt_status regfilt_config_set(regfilt_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("regfilt_config_set: null argument");
  return guarded([&] { config->cfg.set(key, value); });
}

regfilt_status regfilt_config_get(const regfilt_config* config, const char* key, char* buffer,
                                  size_t buffer_size) {
  if (!config || !key || !buffer || buffer_size == 0) {
    return invalid("regfilt_config_get: null argument");
  }
  return guarded([&] {
    const std::string value = config->cfg.get(key);
    if (value.size() + 1 > buffer_size) {
      fail(ErrorCode::invalid_argument, "regfilt_config_get: buffer too small");
    }
    std::snprintf(buffer, buffer_size, "%s", value.c_str());
  });
}

void regfilt_config_destroy(regfilt_config* config) { delete config; }

regfilt_status regfilt_corrs_load_csv(const char* path, regfilt_corrs** out) {
  if (!path || !out) return invalid("regfilt_corrs_load_csv: null argument");
  return guarded([&] { *out = new regfilt_corrs{load_correspondences(path)}; });
}

regfilt_status regfilt_corrs_load_ply(const char* source_ply, const char* target_ply,
                                      const char* pairs_path, regfilt_corrs** out) {
  if (!source_ply || !target_ply || !pairs_path || !out) {
    return invalid("regfilt_corrs_load_ply: null argument");
  }
  return guarded([&] {
    *out = new regfilt_corrs{correspondences_from_ply(source_ply, target_ply, pairs_path)};
  });
}

regfilt_status regfilt_corrs_create(const double* sources_xyz, const double* targets_xyz,
                                    const double* sigmas_xyz, size_t count, regfilt_corrs** out) {
  if (!sources_xyz || !targets_xyz || !out) return invalid("regfilt_corrs_create: null argument");
  if (count == 0) {
    g_last_error = "regfilt_corrs_create: empty input";
    return REGFILT_ERROR_EMPTY_INPUT;
  }
  return guarded([&] {
    Correspondences corrs;
    corrs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      Correspondence c;
      c.source = Vec3(sources_xyz[3 * i], sources_xyz[3 * i + 1], sources_xyz[3 * i + 2]);
      c.target = Vec3(targets_xyz[3 * i], targets_xyz[3 * i + 1], targets_xyz[3 * i + 2]);
      if (!c.source.allFinite() || !c.target.allFinite()) {
        fail(ErrorCode::invalid_argument, "regfilt_corrs_create: non-finite coordinates");
      }
      if (sigmas_xyz) {
        const Vec3 sigma(sigmas_xyz[3 * i], sigmas_xyz[3 * i + 1], sigmas_xyz[3 * i + 2]);
        if (!sigma.allFinite() || (sigma.array() < 0.0).any()) {
          fail(ErrorCode::invalid_argument, "regfilt_corrs_create: invalid sigma triple");
        }
        c.sigma = sigma;
      }
      corrs.push_back(c);
    }
    *out = new regfilt_corrs{std::move(corrs)};
  });
}

size_t regfilt_corrs_size(const regfilt_corrs* corrs) {
  return corrs ? corrs->corrs.size() : 0;
}

void regfilt_corrs_destroy(regfilt_corrs* corrs) { delete corrs; }

regfilt_status regfilt_register_run(const regfilt_corrs* corrs, regfilt_method method,
                                    const regfilt_config* config, regfilt_result** out) {
  if (!corrs || !out) return invalid("regfilt_register_run: null argument");
  return guarded([&] {
    const RunConfig cfg = config ? config->cfg : RunConfig{};
    auto handle = std::make_unique<regfilt_result>();
    handle->seed = cfg.seed;
    switch (method) {
      case REGFILT_METHOD_HORN: {
        handle->method = "horn";
        RegistrationResult r;
        r.transform = horn_quaternion(corrs->corrs, cfg.kf.estimate_scale, cfg.kf.scale_per_term);
        r.rmse = rmse(r.transform, corrs->corrs);
        r.steps = 0;
        handle->result = std::move(r);
        break;
      }
      case REGFILT_METHOD_KF:
        handle->method = "kf";
        handle->result = kf_register(corrs->corrs, cfg.kf);
        break;
      case REGFILT_METHOD_RF:
        handle->method = "rf";
        handle->result = rf_register(corrs->corrs, cfg.uncertainty(), cfg.rf_config());
        break;
      default:
        fail(ErrorCode::invalid_argument, "regfilt_register_run: unknown method");
    }
    *out = handle.release();
  });
}

double regfilt_result_rmse_mm(const regfilt_result* result) {
  return result ? result->result.rmse * 1000.0 : std::numeric_limits<double>::quiet_NaN();
}

void regfilt_result_rotation(const regfilt_result* result, double out_row_major[9]) {
  if (!result || !out_row_major) return;
  const Mat3& r = result->result.transform.rotation;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out_row_major[3 * i + j] = r(i, j);
  }
}

void regfilt_result_translation_mm(const regfilt_result* result, double out[3]) {
  if (!result || !out) return;
  const Vec3 t = result->result.transform.translation * 1000.0;
  out[0] = t.x();
  out[1] = t.y();
  out[2] = t.z();
}

double regfilt_result_scale(const regfilt_result* result) {
  return result ? result->result.transform.scale : std::numeric_limits<double>::quiet_NaN();
}

int64_t regfilt_result_steps(const regfilt_result* result) {
  return result ? static_cast<int64_t>(result->result.steps) : 0;
}

int regfilt_result_under_determined(const regfilt_result* result) {
  return result && result->result.under_determined ? 1 : 0;
}

size_t regfilt_result_trace_size(const regfilt_result* result) {
  return result ? result->result.trace.size() : 0;
}

regfilt_status regfilt_result_trace_entry(const regfilt_result* result, size_t index,
                                          double* innovation_norm, double* trace_p,
                                          double* effective_theta) {
  if (!result) return invalid("regfilt_result_trace_entry: null result");
  if (index >= result->result.trace.size()) {
    g_last_error = "regfilt_result_trace_entry: index out of range";
    return REGFILT_ERROR_INVALID_ARGUMENT;
  }
  const TraceEntry& e = result->result.trace[index];
  if (innovation_norm) *innovation_norm = e.innovation_norm;
  if (trace_p) *trace_p = e.trace_p;
  if (effective_theta) {
    *effective_theta =
        e.effective_theta ? *e.effective_theta : std::numeric_limits<double>::quiet_NaN();
  }
  return REGFILT_OK;
}

regfilt_status regfilt_result_write(const regfilt_result* result, const char* path,
                                    const char* format) {
  if (!result || !path || !format) return invalid("regfilt_result_write: null argument");
  return guarded([&] {
    std::string content;
    const std::string fmt = format;
    if (fmt == "json") {
      content =
          result_to_json(result->result, result->method, "input", result->seed).dump(2) + "\n";
    } else if (fmt == "table") {
      content = result_to_table(result->result, result->method);
    } else {
      fail(ErrorCode::invalid_argument, "regfilt_result_write: format must be json or table");
    }
    if (std::string(path) == "-") {
      std::fputs(content.c_str(), stdout);
    } else {
      write_text_file(path, content);
    }
  });
}

regfilt_status regfilt_result_write_json(const regfilt_result* result, const char* path) {
  return regfilt_result_write(result, path, "json");
}

void regfilt_result_destroy(regfilt_result* result) { delete result; }

regfilt_status regfilt_synth_write(const regfilt_config* config, const char* out_dir) {
  if (!config || !out_dir) return invalid("regfilt_synth_write: null argument");
  return guarded([&] {
    const RunConfig& cfg = config->cfg;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create directory: " + std::string(out_dir));

    const auto samples =
        make_synthetic_set(cfg.noise_profile(), cfg.points, cfg.samples, cfg.seed);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      std::ostringstream stem;
      stem << std::setw(3) << std::setfill('0') << i;
      const auto base = std::filesystem::path(out_dir);
      save_correspondences((base / ("sample_" + stem.str() + ".csv")).string(),
                           samples[i].corrs);
      nlohmann::ordered_json truth = transform_to_json(samples[i].truth);
      truth["seed"] = samples[i].seed;
      write_text_file((base / ("truth_" + stem.str() + ".json")).string(),
                      truth.dump(2) + "\n");
    }
    nlohmann::ordered_json meta;
    meta["seed"] = cfg.seed;
    meta["version"] = kVersion;
    meta["noise"] = cfg.noise_profile().name();
    meta["points"] = cfg.points;
    meta["samples"] = cfg.samples;
    write_text_file((std::filesystem::path(out_dir) / "meta.json").string(),
                    meta.dump(2) + "\n");
  });
}

regfilt_status regfilt_bench_run(const regfilt_config* config, regfilt_report** out) {
  if (!config || !out) return invalid("regfilt_bench_run: null argument");
  return guarded([&] {
    const RunConfig& cfg = config->cfg;
    BenchOptions options;
    for (const std::string& m : cfg.methods) options.methods.push_back(method_from_name(m));
    std::istringstream scenarios(cfg.noise);
    std::string name;
    while (std::getline(scenarios, name, ',')) {
      if (name == "custom") {
        options.scenarios.push_back(NoiseProfile::custom(
            cfg.sigma_min_mm / 1000.0, cfg.sigma_max_mm / 1000.0, cfg.anisotropic));
      } else {
        options.scenarios.push_back(NoiseProfile::named(name));
      }
    }
    options.points = cfg.points;
    options.samples = cfg.samples;
    options.seed = cfg.seed;
    options.kf = cfg.kf;
    options.rf = cfg.rf;
    options.rf_point_uncertainty = cfg.rf_uncertainty != "none";
    *out = new regfilt_report{run_benchmark(options)};
  });
}

size_t regfilt_report_row_count(const regfilt_report* report) {
  return report ? report->report.rows.size() : 0;
}

regfilt_status regfilt_report_row(const regfilt_report* report, size_t index, char method[16],
                                  char scenario[16], double* rmse_mean_mm, double* rmse_stddev_mm,
                                  double* time_mean_ms, int64_t* samples, int64_t* failures) {
  if (!report) return invalid("regfilt_report_row: null report");
  if (index >= report->report.rows.size()) {
    g_last_error = "regfilt_report_row: index out of range";
    return REGFILT_ERROR_INVALID_ARGUMENT;
  }
  const BenchRow& row = report->report.rows[index];
  if (method) {
    std::snprintf(method, 16, "%s", row.method.c_str());
  }
  if (scenario) {
    std::snprintf(scenario, 16, "%s", row.scenario.c_str());
  }
  if (rmse_mean_mm) *rmse_mean_mm = row.rmse_mean_mm;
  if (rmse_stddev_mm) *rmse_stddev_mm = row.rmse_stddev_mm;
  if (time_mean_ms) *time_mean_ms = row.time_mean_ms;
  if (samples) *samples = row.samples;
  if (failures) *failures = row.failures;
  return REGFILT_OK;
}

regfilt_status regfilt_report_write(const regfilt_report* report, const char* path,
                                    const char* format) {
  if (!report || !path || !format) return invalid("regfilt_report_write: null argument");
  return guarded([&] {
    std::string content;
    const std::string fmt = format;
    if (fmt == "json") {
      content = report_to_json(report->report).dump(2) + "\n";
    } else if (fmt == "table") {
      content = report_to_table(report->report);
    } else {
      fail(ErrorCode::invalid_argument, "regfilt_report_write: format must be json or table");
    }
    if (std::string(path) == "-") {
      std::fputs(content.c_str(), stdout);
    } else {
      write_text_file(path, content);
    }
  });
}

void regfilt_report_destroy(regfilt_report* report) { delete report; }

regfilt_status regfilt_depths_load(const char* path, double** out_values, size_t* out_count) {
  if (!path || !out_values || !out_count) return invalid("regfilt_depths_load: null argument");
  return guarded([&] {
    const std::vector<double> depths = load_depths(path);
    double* buffer = new double[depths.size()];
    std::memcpy(buffer, depths.data(), depths.size() * sizeof(double));
    *out_values = buffer;
    *out_count = depths.size();
  });
}

void regfilt_buffer_free(double* buffer) { delete[] buffer; }

regfilt_status regfilt_zlevel_sigma(const double* depths, size_t count, double merge_epsilon,
                                    int64_t level_index, int64_t level_offset, double* out_sigma) {
  if (!depths || !out_sigma) return invalid("regfilt_zlevel_sigma: null argument");
  return guarded([&] {
    if (level_index < 0) fail(ErrorCode::invalid_argument, "level index must be nonnegative");
    const std::vector<double> values(depths, depths + count);
    const ZLevels levels = extract_z_levels(values, merge_epsilon);
    *out_sigma = sigma_z(levels, static_cast<std::size_t>(level_index),
                         static_cast<int>(level_offset));
  });
}

regfilt_status regfilt_point_sigmas(const double intrinsics[4], double u, double v, double sigma_z,
                                    double out_sigmas[3]) {
  if (!intrinsics || !out_sigmas) return invalid("regfilt_point_sigmas: null argument");
  return guarded([&] {
    if (intrinsics[0] <= 0.0 || intrinsics[1] <= 0.0) {
      fail(ErrorCode::invalid_argument, "focal lengths must be positive");
    }
    if (sigma_z < 0.0) fail(ErrorCode::invalid_argument, "sigma_z must be nonnegative");
    const CameraIntrinsics intr{intrinsics[0], intrinsics[1], intrinsics[2], intrinsics[3]};
    const PointSigma s = point_sigmas(u, v, sigma_z, intr);
    out_sigmas[0] = s.sx;
    out_sigmas[1] = s.sy;
    out_sigmas[2] = s.sz;
  });
}

regfilt_status regfilt_point_covariance(const double sigmas[3], int diagonal,
                                        double out_row_major[9]) {
  if (!sigmas || !out_row_major) return invalid("regfilt_point_covariance: null argument");
  return guarded([&] {
    if (sigmas[0] < 0.0 || sigmas[1] < 0.0 || sigmas[2] < 0.0) {
      fail(ErrorCode::invalid_argument, "sigmas must be nonnegative");
    }
    const PointSigma s{sigmas[0], sigmas[1], sigmas[2]};
    const Mat3 c = diagonal ? diagonal_covariance(s) : covariance_of_point(s);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out_row_major[3 * i + j] = c(i, j);
    }
  });
}

regfilt_status regfilt_backproject(const double intrinsics[4], double u, double v, double depth,
                                   double out_point[3]) {
  if (!intrinsics || !out_point) return invalid("regfilt_backproject: null argument");
  return guarded([&] {
    if (intrinsics[0] <= 0.0 || intrinsics[1] <= 0.0) {
      fail(ErrorCode::invalid_argument, "focal lengths must be positive");
    }
    const CameraIntrinsics intr{intrinsics[0], intrinsics[1], intrinsics[2], intrinsics[3]};
    const Vec3 p = backproject_pinhole(u, v, depth, intr);
    out_point[0] = p.x();
    out_point[1] = p.y();
    out_point[2] = p.z();
  });
}

}  // extern "C"
