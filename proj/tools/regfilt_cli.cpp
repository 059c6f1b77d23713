// regfilt command-line driver. Talks to the shared library exclusively
// through the C API in regfilt/regfilt.h.

#include <regfilt/regfilt.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

namespace {

// Exit code contract: 0 success, 2 usage/parse error, 3 numerical failure,
// 4 robustness bound infeasible.
int exit_code_for(regfilt_status status) {
  switch (status) {
    case REGFILT_OK:
      return 0;
    case REGFILT_ERROR_INVALID_ARGUMENT:
    case REGFILT_ERROR_EMPTY_INPUT:
    case REGFILT_ERROR_PARSE:
    case REGFILT_ERROR_IO:
      return 2;
    case REGFILT_ERROR_UNDER_DETERMINED:
    case REGFILT_ERROR_DEGENERATE:
    case REGFILT_ERROR_INVALID_SCALE:
    case REGFILT_ERROR_NUMERICAL:
    case REGFILT_ERROR_INTERNAL:
      return 3;
    case REGFILT_ERROR_INFEASIBLE:
      return 4;
  }
  return 3;
}

int report_failure(regfilt_status status) {
  std::fprintf(stderr, "error (%s): %s\n", regfilt_status_name(status), regfilt_last_error());
  return exit_code_for(status);
}

struct ConfigHandle {
  regfilt_config* ptr = regfilt_config_create();
  ~ConfigHandle() { regfilt_config_destroy(ptr); }
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

/// Loads --config (or $REGFILT_CONFIG when no flag is given), then applies
/// key=value overrides from --set. Returns 0 or an exit code.
int prepare_config(regfilt_config* cfg, const std::string& config_path,
                   const std::vector<std::string>& overrides) {
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("REGFILT_CONFIG")) path = env;
  }
  if (!path.empty()) {
    const regfilt_status st = regfilt_config_load(cfg, path.c_str());
    if (st != REGFILT_OK) return report_failure(st);
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return 2;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const regfilt_status st = regfilt_config_set(cfg, key.c_str(), value.c_str());
    if (st != REGFILT_OK) return report_failure(st);
  }
  return 0;
}

int set_or_fail(regfilt_config* cfg, const char* key, const std::string& value) {
  const regfilt_status st = regfilt_config_set(cfg, key, value.c_str());
  return st == REGFILT_OK ? 0 : report_failure(st);
}

int run_register(const std::string& input, const std::string& method,
                 const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::string& out_path, const std::string& ply_source,
                 const std::string& ply_target, const std::string& ply_pairs) {
  ConfigHandle cfg;
  if (int rc = prepare_config(cfg.ptr, config_path, overrides); rc != 0) return rc;

  regfilt_method m;
  if (method == "horn") {
    m = REGFILT_METHOD_HORN;
  } else if (method == "kf") {
    m = REGFILT_METHOD_KF;
  } else if (method == "rf") {
    m = REGFILT_METHOD_RF;
  } else {
    std::fprintf(stderr, "error: unknown method '%s'\n", method.c_str());
    return 2;
  }

  regfilt_corrs* corrs = nullptr;
  regfilt_status st;
  if (!ply_source.empty()) {
    st = regfilt_corrs_load_ply(ply_source.c_str(), ply_target.c_str(), ply_pairs.c_str(),
                                &corrs);
  } else {
    st = regfilt_corrs_load_csv(input.c_str(), &corrs);
  }
  if (st != REGFILT_OK) return report_failure(st);

  regfilt_result* result = nullptr;
  st = regfilt_register_run(corrs, m, cfg.ptr, &result);
  regfilt_corrs_destroy(corrs);
  if (st != REGFILT_OK) return report_failure(st);

  double rotation[9];
  double translation[3];
  regfilt_result_rotation(result, rotation);
  regfilt_result_translation_mm(result, translation);
  std::printf("method: %s\n", method.c_str());
  std::printf("rmse_mm: %.9g\n", regfilt_result_rmse_mm(result));
  std::printf("steps: %lld\n", static_cast<long long>(regfilt_result_steps(result)));
  std::printf("under_determined: %s\n",
              regfilt_result_under_determined(result) ? "true" : "false");
  std::printf("rotation: [%.9g %.9g %.9g; %.9g %.9g %.9g; %.9g %.9g %.9g]\n", rotation[0],
              rotation[1], rotation[2], rotation[3], rotation[4], rotation[5], rotation[6],
              rotation[7], rotation[8]);
  std::printf("translation_mm: [%.9g %.9g %.9g]\n", translation[0], translation[1],
              translation[2]);
  std::printf("scale: %.9g\n", regfilt_result_scale(result));

  int rc = 0;
  if (!out_path.empty()) {
    st = regfilt_result_write_json(result, out_path.c_str());
    if (st != REGFILT_OK) rc = report_failure(st);
  }
  regfilt_result_destroy(result);
  return rc;
}

int run_synth(const std::string& noise, double sigma_min_mm, double sigma_max_mm, int points,
              int samples, long long seed, bool isotropic, const std::string& out_dir,
              const std::string& config_path, const std::vector<std::string>& overrides) {
  ConfigHandle cfg;
  if (int rc = prepare_config(cfg.ptr, config_path, overrides); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "noise", noise); rc != 0) return rc;
  if (noise == "custom") {
    if (int rc = set_or_fail(cfg.ptr, "sigma_min_mm", std::to_string(sigma_min_mm)); rc != 0)
      return rc;
    if (int rc = set_or_fail(cfg.ptr, "sigma_max_mm", std::to_string(sigma_max_mm)); rc != 0)
      return rc;
  }
  if (int rc = set_or_fail(cfg.ptr, "points", std::to_string(points)); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "samples", std::to_string(samples)); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "seed", std::to_string(seed)); rc != 0) return rc;
  if (isotropic) {
    if (int rc = set_or_fail(cfg.ptr, "anisotropic", "false"); rc != 0) return rc;
  }

  const regfilt_status st = regfilt_synth_write(cfg.ptr, out_dir.c_str());
  if (st != REGFILT_OK) return report_failure(st);
  std::printf("wrote %d samples to %s (seed %lld)\n", samples, out_dir.c_str(), seed);
  return 0;
}

int run_bench(const std::string& methods, const std::string& noise, int points, int samples,
              long long seed, const std::string& out_path, const std::string& config_path,
              const std::vector<std::string>& overrides) {
  ConfigHandle cfg;
  if (int rc = prepare_config(cfg.ptr, config_path, overrides); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "methods", methods); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "noise", noise); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "points", std::to_string(points)); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "samples", std::to_string(samples)); rc != 0) return rc;
  if (int rc = set_or_fail(cfg.ptr, "seed", std::to_string(seed)); rc != 0) return rc;

  regfilt_report* report = nullptr;
  regfilt_status st = regfilt_bench_run(cfg.ptr, &report);
  if (st != REGFILT_OK) return report_failure(st);

  int rc = 0;
  st = regfilt_report_write(report, "-", "table");
  if (st != REGFILT_OK) rc = report_failure(st);
  if (rc == 0 && !out_path.empty()) {
    st = regfilt_report_write(report, out_path.c_str(), "json");
    if (st != REGFILT_OK) rc = report_failure(st);
  }
  regfilt_report_destroy(report);
  return rc;
}

/// Config value as a string; empty when unavailable.
std::string config_value(const regfilt_config* cfg, const char* key) {
  char buffer[128];
  if (regfilt_config_get(cfg, key, buffer, sizeof(buffer)) != REGFILT_OK) return "";
  return buffer;
}

int run_zlevels(const std::string& depths_path, long long index, long long offset,
                bool offset_given, double merge_epsilon, bool merge_given,
                const std::string& config_path, const std::vector<std::string>& overrides) {
  ConfigHandle cfg;
  if (int rc = prepare_config(cfg.ptr, config_path, overrides); rc != 0) return rc;
  if (!offset_given) offset = std::atoll(config_value(cfg.ptr, "zlevel_offset").c_str());
  if (!merge_given) merge_epsilon = std::atof(config_value(cfg.ptr, "merge_epsilon").c_str());

  double* depths = nullptr;
  size_t count = 0;
  regfilt_status st = regfilt_depths_load(depths_path.c_str(), &depths, &count);
  if (st != REGFILT_OK) return report_failure(st);

  double sigma = 0.0;
  st = regfilt_zlevel_sigma(depths, count, merge_epsilon, index, offset, &sigma);
  regfilt_buffer_free(depths);
  if (st != REGFILT_OK) return report_failure(st);

  std::printf("sigma_z_m: %.12g\n", sigma);
  std::printf("sigma_z_mm: %.12g\n", sigma * 1000.0);
  return 0;
}

int run_sigmas(const std::string& intrinsics_flag, const std::string& pixel_csv, double depth,
               double sigma_z, bool diagonal, const std::string& config_path,
               const std::vector<std::string>& overrides) {
  ConfigHandle cfg;
  if (int rc = prepare_config(cfg.ptr, config_path, overrides); rc != 0) return rc;

  std::string intrinsics_csv = intrinsics_flag;
  if (intrinsics_csv.empty()) intrinsics_csv = config_value(cfg.ptr, "intrinsics");
  if (intrinsics_csv.empty()) {
    std::fprintf(stderr, "error: no intrinsics given (flag or config)\n");
    return 2;
  }
  if (!diagonal) diagonal = config_value(cfg.ptr, "covariance_form") == "diagonal";

  double intr[4];
  if (std::sscanf(intrinsics_csv.c_str(), "%lf,%lf,%lf,%lf", &intr[0], &intr[1], &intr[2],
                  &intr[3]) != 4) {
    std::fprintf(stderr, "error: --intrinsics expects fx,fy,cx,cy\n");
    return 2;
  }
  double u = 0.0;
  double v = 0.0;
  if (std::sscanf(pixel_csv.c_str(), "%lf,%lf", &u, &v) != 2) {
    std::fprintf(stderr, "error: --pixel expects u,v\n");
    return 2;
  }

  double point[3];
  regfilt_status st = regfilt_backproject(intr, u, v, depth, point);
  if (st != REGFILT_OK) return report_failure(st);

  double sigmas[3];
  st = regfilt_point_sigmas(intr, u, v, sigma_z, sigmas);
  if (st != REGFILT_OK) return report_failure(st);

  double cov[9];
  st = regfilt_point_covariance(sigmas, diagonal ? 1 : 0, cov);
  if (st != REGFILT_OK) return report_failure(st);

  std::printf("point_m: [%.12g %.12g %.12g]\n", point[0], point[1], point[2]);
  std::printf("sigma_m: [%.12g %.12g %.12g]\n", sigmas[0], sigmas[1], sigmas[2]);
  std::printf("covariance_m2 (%s):\n", diagonal ? "diagonal" : "outer");
  for (int i = 0; i < 3; ++i) {
    std::printf("  [%.12g %.12g %.12g]\n", cov[3 * i], cov[3 * i + 1], cov[3 * i + 2]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recursive and robust rigid 3D registration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(regfilt_version()));

  // register
  auto* reg = app.add_subcommand("register", "register a correspondence file");
  std::string reg_input;
  std::string reg_method;
  std::string reg_config;
  std::string reg_out;
  std::string reg_ply_source;
  std::string reg_ply_target;
  std::string reg_ply_pairs;
  std::vector<std::string> reg_set;
  reg->add_option("--input", reg_input, "correspondence CSV (mm)");
  reg->add_option("--method", reg_method, "horn|kf|rf")->required();
  reg->add_option("--config", reg_config, "config file (key = value lines)");
  reg->add_option("--out", reg_out, "write a JSON report here");
  reg->add_option("--ply-source", reg_ply_source, "source cloud (ascii PLY, meters)");
  reg->add_option("--ply-target", reg_ply_target, "target cloud (ascii PLY, meters)");
  reg->add_option("--pairs", reg_ply_pairs, "index-pair file for the PLY clouds");
  reg->add_option("--set", reg_set, "config override key=value (repeatable)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic correspondence files");
  std::string synth_noise = "small";
  double synth_sigma_min = 0.0;
  double synth_sigma_max = 0.0;
  int synth_points = 400;
  int synth_samples = 30;
  long long synth_seed = 42;
  bool synth_isotropic = false;
  std::string synth_out;
  std::string synth_config;
  std::vector<std::string> synth_set;
  synth->add_option("--noise", synth_noise, "small|average|large|custom");
  synth->add_option("--sigma-min", synth_sigma_min, "custom band lower sigma (mm)");
  synth->add_option("--sigma-max", synth_sigma_max, "custom band upper sigma (mm)");
  synth->add_option("--points", synth_points, "pairs per sample");
  synth->add_option("--samples", synth_samples, "number of samples");
  synth->add_option("--seed", synth_seed, "master seed");
  synth->add_flag("--isotropic", synth_isotropic, "share one sigma across axes");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--config", synth_config, "config file");
  synth->add_option("--set", synth_set, "config override key=value (repeatable)");

  // bench
  auto* bench = app.add_subcommand("bench", "run the registration benchmark");
  std::string bench_methods = "horn,kf,rf";
  std::string bench_noise = "small,average,large";
  int bench_points = 400;
  int bench_samples = 30;
  long long bench_seed = 42;
  std::string bench_out;
  std::string bench_config;
  std::vector<std::string> bench_set;
  bench->add_option("--methods", bench_methods, "comma list of horn,kf,rf");
  bench->add_option("--noise", bench_noise, "comma list of small,average,large,custom");
  bench->add_option("--points", bench_points, "pairs per sample");
  bench->add_option("--samples", bench_samples, "samples per scenario");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--out", bench_out, "write the JSON report here");
  bench->add_option("--config", bench_config, "config file");
  bench->add_option("--set", bench_set, "config override key=value (repeatable)");

  // zlevels
  auto* zlevels = app.add_subcommand("zlevels", "depth sigma from quantization levels");
  std::string z_depths;
  long long z_index = 0;
  long long z_offset = 3;
  double z_merge = 1e-6;
  std::string z_config;
  std::vector<std::string> z_set;
  zlevels->add_option("--depths", z_depths, "depth file, meters (list or CSV grid)")->required();
  zlevels->add_option("--index", z_index, "level index k")->required();
  auto* z_offset_opt = zlevels->add_option("--i", z_offset, "level window half-width");
  auto* z_merge_opt = zlevels->add_option("--merge-epsilon", z_merge,
                                          "relative level merge tolerance");
  zlevels->add_option("--config", z_config, "config file");
  zlevels->add_option("--set", z_set, "config override key=value (repeatable)");

  // sigmas
  auto* sigmas = app.add_subcommand("sigmas", "propagate a depth sigma through the pinhole model");
  std::string s_intrinsics;
  std::string s_pixel;
  double s_depth = 1.0;
  double s_sigma_z = 0.0;
  bool s_diagonal = false;
  std::string s_config;
  std::vector<std::string> s_set;
  sigmas->add_option("--intrinsics", s_intrinsics, "fx,fy,cx,cy (pixels); config fallback");
  sigmas->add_option("--pixel", s_pixel, "u,v (pixels)")->required();
  sigmas->add_option("--depth", s_depth, "depth z (meters)")->required();
  sigmas->add_option("--sigma-z", s_sigma_z, "depth sigma (meters)")->required();
  sigmas->add_flag("--diagonal", s_diagonal, "emit the diagonal covariance form");
  sigmas->add_option("--config", s_config, "config file");
  sigmas->add_option("--set", s_set, "config override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (reg->parsed()) {
    const bool ply_mode = !reg_ply_source.empty() || !reg_ply_target.empty() || !reg_ply_pairs.empty();
    if (ply_mode && (reg_ply_source.empty() || reg_ply_target.empty() || reg_ply_pairs.empty())) {
      std::fprintf(stderr, "error: PLY input needs --ply-source, --ply-target and --pairs\n");
      return 2;
    }
    if (!ply_mode && reg_input.empty()) {
      std::fprintf(stderr, "error: register needs --input or the PLY options\n");
      return 2;
    }
    return run_register(reg_input, reg_method, reg_config, reg_set, reg_out, reg_ply_source,
                        reg_ply_target, reg_ply_pairs);
  }
  if (synth->parsed()) {
    return run_synth(synth_noise, synth_sigma_min, synth_sigma_max, synth_points, synth_samples,
                     synth_seed, synth_isotropic, synth_out, synth_config, synth_set);
  }
  if (bench->parsed()) {
    return run_bench(bench_methods, bench_noise, bench_points, bench_samples, bench_seed,
                     bench_out, bench_config, bench_set);
  }
  if (zlevels->parsed()) {
    return run_zlevels(z_depths, z_index, z_offset, z_offset_opt->count() > 0, z_merge,
                       z_merge_opt->count() > 0, z_config, z_set);
  }
  if (sigmas->parsed()) {
    return run_sigmas(s_intrinsics, s_pixel, s_depth, s_sigma_z, s_diagonal, s_config, s_set);
  }
  return 2;
}
