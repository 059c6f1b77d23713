#include "benchmark.hpp"

#include "errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace regfilt;

namespace {

BenchOptions tiny_options() {
  BenchOptions options;
  options.methods = {Method::horn, Method::kf, Method::rf};
  options.scenarios = {NoiseProfile::named("small")};
  options.points = 50;
  options.samples = 2;
  options.seed = 42;
  return options;
}

const BenchRow* find_row(const BenchReport& report, const std::string& method,
                         const std::string& scenario) {
  for (const BenchRow& row : report.rows) {
    if (row.method == method && row.scenario == scenario) return &row;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("method names round trip") {
  CHECK(method_from_name("horn") == Method::horn);
  CHECK(method_from_name("kf") == Method::kf);
  CHECK(method_from_name("rf") == Method::rf);
  CHECK(method_name(Method::rf) == "rf");
  CHECK_THROWS_AS(method_from_name("icp"), Error);
}

TEST_CASE("benchmark report shape") {
  const BenchReport report = run_benchmark(tiny_options());
  REQUIRE(report.rows.size() == 3);
  for (const BenchRow& row : report.rows) {
    CHECK(row.scenario == "small");
    CHECK(row.samples == 2);
    CHECK(row.failures == 0);
    CHECK(row.rmse_mean_mm >= 0.0);
    CHECK(row.rmse_stddev_mm >= 0.0);
    CHECK(row.time_mean_ms >= 0.0);
  }
  // reference rows attached for the named scenario
  REQUIRE(report.reference_rows.size() == 2);
  CHECK(report.reference_rows[0].method == "emicp");
  CHECK(report.reference_rows[0].rmse_mm == doctest::Approx(298.0));
  CHECK(report.reference_rows[1].method == "wicp");
  CHECK(report.reference_rows[1].rmse_mm == doctest::Approx(193.0));
}

TEST_CASE("custom scenarios carry no reference rows") {
  BenchOptions options = tiny_options();
  options.scenarios = {NoiseProfile::custom(0.0, 0.0)};
  const BenchReport report = run_benchmark(options);
  CHECK(report.reference_rows.empty());
  for (const BenchRow& row : report.rows) {
    CHECK(row.rmse_mean_mm <= 1e-6);  // noise-free exact recovery, in mm
  }
}

TEST_CASE("rmse fields are deterministic in the seed") {
  const BenchReport a = run_benchmark(tiny_options());
  const BenchReport b = run_benchmark(tiny_options());
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].rmse_mean_mm == b.rows[i].rmse_mean_mm);
    CHECK(a.rows[i].rmse_stddev_mm == b.rows[i].rmse_stddev_mm);
  }
}

TEST_CASE("rmse grows with the noise band") {
  BenchOptions options;
  options.methods = {Method::horn, Method::kf, Method::rf};
  options.scenarios = {NoiseProfile::named("small"), NoiseProfile::named("average"),
                       NoiseProfile::named("large")};
  options.points = 200;
  options.samples = 8;
  options.seed = 11;
  const BenchReport report = run_benchmark(options);
  for (const char* method : {"horn", "kf", "rf"}) {
    const double small = find_row(report, method, "small")->rmse_mean_mm;
    const double average = find_row(report, method, "average")->rmse_mean_mm;
    const double large = find_row(report, method, "large")->rmse_mean_mm;
    CHECK(small <= average);
    CHECK(average <= large);
  }
}

TEST_CASE("per-sample failures are counted and excluded") {
  BenchOptions options = tiny_options();
  options.methods = {Method::kf, Method::rf};
  options.rf.theta = 1.0;  // infeasible against the default prior
  options.rf.max_backoffs = 0;
  const BenchReport report = run_benchmark(options);
  const BenchRow* kf_row = find_row(report, "kf", "small");
  const BenchRow* rf_row = find_row(report, "rf", "small");
  REQUIRE(kf_row != nullptr);
  REQUIRE(rf_row != nullptr);
  CHECK(kf_row->failures == 0);
  CHECK(rf_row->failures == 2);
  CHECK(rf_row->samples == 0);
  CHECK(std::isnan(rf_row->rmse_mean_mm));
}

TEST_CASE("benchmark argument validation") {
  BenchOptions no_methods = tiny_options();
  no_methods.methods.clear();
  CHECK_THROWS_AS(run_benchmark(no_methods), Error);

  BenchOptions no_scenarios = tiny_options();
  no_scenarios.scenarios.clear();
  CHECK_THROWS_AS(run_benchmark(no_scenarios), Error);
}
