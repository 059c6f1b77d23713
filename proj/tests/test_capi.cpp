// Exercises the shared-library C API surface end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <regfilt/regfilt.h>

#include "test_util.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

using testutil::TempDir;

namespace {

struct Cloud {
  std::vector<double> sources;
  std::vector<double> targets;
  std::vector<double> sigmas;
  size_t count = 0;
};

/// Deterministic little test problem: a non-coplanar cloud mapped by a
/// 90 degree turn about z plus a translation. The bilinear z keeps the
/// centered sources spanning all of 3D, which the 9-entry state needs.
Cloud lattice_cloud() {
  Cloud cloud;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double x = 0.2 * i;
      const double y = 0.3 * j;
      const double z = 0.1 * i * j;
      cloud.sources.insert(cloud.sources.end(), {x, y, z});
      // rotate (x, y) -> (-y, x), then shift
      cloud.targets.insert(cloud.targets.end(), {-y + 0.5, x - 0.25, z + 1.0});
      cloud.sigmas.insert(cloud.sigmas.end(), {0.001, 0.001, 0.001});
      ++cloud.count;
    }
  }
  return cloud;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(regfilt_version()) == "0.1.0");
  CHECK(std::string(regfilt_status_name(REGFILT_OK)) == "ok");
  CHECK(std::string(regfilt_status_name(REGFILT_ERROR_INFEASIBLE)) == "infeasible");
}

TEST_CASE("corrs creation and validation") {
  const Cloud cloud = lattice_cloud();
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_create(cloud.sources.data(), cloud.targets.data(), cloud.sigmas.data(),
                               cloud.count, &corrs) == REGFILT_OK);
  CHECK(regfilt_corrs_size(corrs) == cloud.count);
  regfilt_corrs_destroy(corrs);

  CHECK(regfilt_corrs_create(nullptr, cloud.targets.data(), nullptr, cloud.count, &corrs) ==
        REGFILT_ERROR_INVALID_ARGUMENT);
  CHECK(regfilt_corrs_create(cloud.sources.data(), cloud.targets.data(), nullptr, 0, &corrs) ==
        REGFILT_ERROR_EMPTY_INPUT);

  std::vector<double> bad = cloud.sources;
  bad[0] = std::nan("");
  CHECK(regfilt_corrs_create(bad.data(), cloud.targets.data(), nullptr, cloud.count, &corrs) ==
        REGFILT_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(regfilt_last_error()) > 0);
}

TEST_CASE("registration through the C API") {
  const Cloud cloud = lattice_cloud();
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_create(cloud.sources.data(), cloud.targets.data(), cloud.sigmas.data(),
                               cloud.count, &corrs) == REGFILT_OK);

  for (regfilt_method method : {REGFILT_METHOD_HORN, REGFILT_METHOD_KF, REGFILT_METHOD_RF}) {
    regfilt_result* result = nullptr;
    REQUIRE(regfilt_register_run(corrs, method, nullptr, &result) == REGFILT_OK);
    CHECK(regfilt_result_rmse_mm(result) <= 1e-4);

    double rotation[9];
    regfilt_result_rotation(result, rotation);
    CHECK(rotation[1] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rotation[3] == doctest::Approx(1.0).epsilon(1e-6));

    double translation[3];
    regfilt_result_translation_mm(result, translation);
    CHECK(translation[0] == doctest::Approx(500.0).epsilon(1e-6));
    CHECK(translation[2] == doctest::Approx(1000.0).epsilon(1e-6));

    CHECK(regfilt_result_scale(result) == doctest::Approx(1.0));
    CHECK(regfilt_result_under_determined(result) == 0);

    if (method != REGFILT_METHOD_HORN) {
      CHECK(regfilt_result_steps(result) == 12);
      REQUIRE(regfilt_result_trace_size(result) == 12);
      double innovation = 0.0;
      double trace_p = 0.0;
      double theta = 0.0;
      REQUIRE(regfilt_result_trace_entry(result, 0, &innovation, &trace_p, &theta) == REGFILT_OK);
      CHECK(trace_p > 0.0);
      if (method == REGFILT_METHOD_KF) {
        CHECK(std::isnan(theta));
      } else {
        CHECK(theta >= 0.0);
      }
      CHECK(regfilt_result_trace_entry(result, 999, nullptr, nullptr, nullptr) ==
            REGFILT_ERROR_INVALID_ARGUMENT);
    }
    regfilt_result_destroy(result);
  }
  regfilt_corrs_destroy(corrs);
}

TEST_CASE("result JSON emission") {
  TempDir dir("capi_json");
  const Cloud cloud = lattice_cloud();
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_create(cloud.sources.data(), cloud.targets.data(), nullptr, cloud.count,
                               &corrs) == REGFILT_OK);
  regfilt_result* result = nullptr;
  REQUIRE(regfilt_register_run(corrs, REGFILT_METHOD_HORN, nullptr, &result) == REGFILT_OK);

  const std::string path = dir.file("result.json");
  REQUIRE(regfilt_result_write_json(result, path.c_str()) == REGFILT_OK);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content.find("\"transform\"") != std::string::npos);
  CHECK(content.find("\"rows\"") != std::string::npos);
  CHECK(content.find("\"unit\": \"mm\"") != std::string::npos);

  const std::string table_path = dir.file("result.txt");
  REQUIRE(regfilt_result_write(result, table_path.c_str(), "table") == REGFILT_OK);
  std::ifstream table_in(table_path);
  std::string table((std::istreambuf_iterator<char>(table_in)),
                    std::istreambuf_iterator<char>());
  CHECK(table.find("method: horn") != std::string::npos);
  CHECK(table.find("rmse_mm:") != std::string::npos);
  CHECK(regfilt_result_write(result, table_path.c_str(), "yaml") ==
        REGFILT_ERROR_INVALID_ARGUMENT);

  CHECK(regfilt_result_write_json(result, "/nonexistent_dir/x.json") == REGFILT_ERROR_IO);

  regfilt_result_destroy(result);
  regfilt_corrs_destroy(corrs);
}

TEST_CASE("config handling") {
  regfilt_config* cfg = regfilt_config_create();
  REQUIRE(cfg != nullptr);
  CHECK(regfilt_config_set(cfg, "theta", "0.002") == REGFILT_OK);
  CHECK(regfilt_config_set(cfg, "bogus", "1") == REGFILT_ERROR_PARSE);
  CHECK(regfilt_config_set(cfg, "theta", "zzz") == REGFILT_ERROR_PARSE);
  CHECK(regfilt_config_load(cfg, "/nonexistent.cfg") == REGFILT_ERROR_IO);

  char buffer[128];
  CHECK(regfilt_config_get(cfg, "theta", buffer, sizeof(buffer)) == REGFILT_OK);
  CHECK(std::string(buffer) == "0.002");
  CHECK(regfilt_config_get(cfg, "intrinsics", buffer, sizeof(buffer)) == REGFILT_OK);
  CHECK(std::string(buffer).empty());  // unset optional
  CHECK(regfilt_config_set(cfg, "intrinsics", "525,525,319.5,239.5") == REGFILT_OK);
  CHECK(regfilt_config_get(cfg, "intrinsics", buffer, sizeof(buffer)) == REGFILT_OK);
  CHECK(std::string(buffer) == "525,525,319.5,239.5");
  CHECK(regfilt_config_get(cfg, "bogus", buffer, sizeof(buffer)) == REGFILT_ERROR_PARSE);
  char tiny[2];
  CHECK(regfilt_config_get(cfg, "intrinsics", tiny, sizeof(tiny)) ==
        REGFILT_ERROR_INVALID_ARGUMENT);

  TempDir dir("capi_cfg");
  const std::string path = dir.file("run.cfg");
  std::ofstream(path) << "seed = 7\nmethod = kf\n";
  CHECK(regfilt_config_load(cfg, path.c_str()) == REGFILT_OK);
  CHECK(regfilt_config_get(cfg, "seed", buffer, sizeof(buffer)) == REGFILT_OK);
  CHECK(std::string(buffer) == "7");
  regfilt_config_destroy(cfg);
}

TEST_CASE("infeasible robust bound surfaces as a status") {
  const Cloud cloud = lattice_cloud();
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_create(cloud.sources.data(), cloud.targets.data(), cloud.sigmas.data(),
                               cloud.count, &corrs) == REGFILT_OK);

  regfilt_config* cfg = regfilt_config_create();
  REQUIRE(regfilt_config_set(cfg, "theta", "1.0") == REGFILT_OK);
  REQUIRE(regfilt_config_set(cfg, "max_backoffs", "0") == REGFILT_OK);

  regfilt_result* result = nullptr;
  CHECK(regfilt_register_run(corrs, REGFILT_METHOD_RF, cfg, &result) ==
        REGFILT_ERROR_INFEASIBLE);

  regfilt_config_destroy(cfg);
  regfilt_corrs_destroy(corrs);
}

TEST_CASE("under-determined input surfaces as a status for horn") {
  const double sources[6] = {1, 0, 0, 0, 1, 0};
  const double targets[6] = {1, 0, 0, 0, 1, 0};
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_create(sources, targets, nullptr, 2, &corrs) == REGFILT_OK);
  regfilt_result* result = nullptr;
  CHECK(regfilt_register_run(corrs, REGFILT_METHOD_HORN, nullptr, &result) ==
        REGFILT_ERROR_UNDER_DETERMINED);
  regfilt_corrs_destroy(corrs);
}

TEST_CASE("CSV loading through the C API") {
  TempDir dir("capi_csv");
  const std::string path = dir.file("pairs.csv");
  std::ofstream(path) << "sx,sy,sz,tx,ty,tz\n1000,0,0,0,1000,0\n0,1000,0,-1000,0,0\n0,0,1000,0,0,1000\n";
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_load_csv(path.c_str(), &corrs) == REGFILT_OK);
  CHECK(regfilt_corrs_size(corrs) == 3);
  regfilt_corrs_destroy(corrs);

  const std::string bad = dir.file("bad.csv");
  std::ofstream(bad) << "sx,sy,sz,tx,ty,tz\n1,2\n";
  CHECK(regfilt_corrs_load_csv(bad.c_str(), &corrs) == REGFILT_ERROR_PARSE);
  CHECK(std::string(regfilt_last_error()).find(":2") != std::string::npos);
}

TEST_CASE("synthetic generation and benchmark through the C API") {
  TempDir dir("capi_synth");
  regfilt_config* cfg = regfilt_config_create();
  REQUIRE(regfilt_config_set(cfg, "noise", "small") == REGFILT_OK);
  REQUIRE(regfilt_config_set(cfg, "points", "20") == REGFILT_OK);
  REQUIRE(regfilt_config_set(cfg, "samples", "2") == REGFILT_OK);
  REQUIRE(regfilt_config_set(cfg, "seed", "5") == REGFILT_OK);

  const std::string out_dir = dir.file("set");
  REQUIRE(regfilt_synth_write(cfg, out_dir.c_str()) == REGFILT_OK);
  regfilt_corrs* corrs = nullptr;
  REQUIRE(regfilt_corrs_load_csv((out_dir + "/sample_001.csv").c_str(), &corrs) == REGFILT_OK);
  CHECK(regfilt_corrs_size(corrs) == 20);
  regfilt_corrs_destroy(corrs);
  CHECK(std::ifstream(out_dir + "/truth_001.json").good());
  CHECK(std::ifstream(out_dir + "/meta.json").good());

  REQUIRE(regfilt_config_set(cfg, "methods", "horn,kf") == REGFILT_OK);
  regfilt_report* report = nullptr;
  REQUIRE(regfilt_bench_run(cfg, &report) == REGFILT_OK);
  REQUIRE(regfilt_report_row_count(report) == 2);

  char method[16];
  char scenario[16];
  double rmse_mean = -1.0;
  double rmse_stddev = -1.0;
  double time_mean = -1.0;
  int64_t samples = 0;
  int64_t failures = -1;
  REQUIRE(regfilt_report_row(report, 0, method, scenario, &rmse_mean, &rmse_stddev, &time_mean,
                             &samples, &failures) == REGFILT_OK);
  CHECK(std::string(method) == "horn");
  CHECK(std::string(scenario) == "small");
  CHECK(rmse_mean >= 0.0);
  CHECK(samples == 2);
  CHECK(failures == 0);

  const std::string json_path = dir.file("report.json");
  REQUIRE(regfilt_report_write(report, json_path.c_str(), "json") == REGFILT_OK);
  const std::string table_path = dir.file("report.txt");
  REQUIRE(regfilt_report_write(report, table_path.c_str(), "table") == REGFILT_OK);
  CHECK(regfilt_report_write(report, json_path.c_str(), "yaml") ==
        REGFILT_ERROR_INVALID_ARGUMENT);
  regfilt_report_destroy(report);
  regfilt_config_destroy(cfg);
}

TEST_CASE("depth model through the C API") {
  TempDir dir("capi_depth");
  const std::string path = dir.file("depths.txt");
  std::ofstream(path) << "1.000\n1.002\n1.004\n1.006\n1.008\n1.010\n1.012\n";

  double* depths = nullptr;
  size_t count = 0;
  REQUIRE(regfilt_depths_load(path.c_str(), &depths, &count) == REGFILT_OK);
  REQUIRE(count == 7);

  double sigma = 0.0;
  REQUIRE(regfilt_zlevel_sigma(depths, count, 1e-6, 3, 3, &sigma) == REGFILT_OK);
  CHECK(sigma == doctest::Approx(0.006).epsilon(1e-12));
  regfilt_buffer_free(depths);

  const double intr[4] = {500.0, 500.0, 320.0, 240.0};
  double sigmas[3];
  REQUIRE(regfilt_point_sigmas(intr, 370.0, 215.0, 0.006, sigmas) == REGFILT_OK);
  CHECK(sigmas[0] == doctest::Approx(0.0006));
  CHECK(sigmas[1] == doctest::Approx(0.0003));

  double cov[9];
  REQUIRE(regfilt_point_covariance(sigmas, 0, cov) == REGFILT_OK);
  CHECK(cov[0] == doctest::Approx(3.6e-7));
  CHECK(cov[2] == doctest::Approx(3.6e-6));
  CHECK(cov[8] == doctest::Approx(3.6e-5));
  REQUIRE(regfilt_point_covariance(sigmas, 1, cov) == REGFILT_OK);
  CHECK(cov[1] == 0.0);

  double point[3];
  REQUIRE(regfilt_backproject(intr, 370.0, 215.0, 1.0, point) == REGFILT_OK);
  CHECK(point[0] == doctest::Approx(0.1));
  CHECK(point[1] == doctest::Approx(-0.05));
  CHECK(regfilt_backproject(intr, 370.0, 215.0, -1.0, point) == REGFILT_ERROR_INVALID_ARGUMENT);
}
