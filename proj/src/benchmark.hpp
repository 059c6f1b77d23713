#pragma once

#include "kalman.hpp"
#include "robust.hpp"
#include "synthetic.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace regfilt {

enum class Method { horn, kf, rf };

Method method_from_name(std::string_view name);
std::string_view method_name(Method m);

/// Aggregated outcome of one (method, scenario) cell. RMSE statistics are in
/// millimeters, timings in milliseconds; `samples` counts the runs that
/// succeeded and entered the aggregates, `failures` the ones that errored.
struct BenchRow {
  std::string method;
  std::string scenario;
  double rmse_mean_mm = 0.0;
  double rmse_stddev_mm = 0.0;
  double time_mean_ms = 0.0;
  int samples = 0;
  int failures = 0;
};

/// Static comparison values from published benchmarks, emitted alongside the
/// computed rows so reports keep the familiar table shape.
struct ReferenceRow {
  std::string method;
  std::string scenario;
  double rmse_mm = 0.0;
};

struct BenchReport {
  std::uint64_t seed = 0;
  int points = 0;
  int samples = 0;
  std::string note;
  std::vector<BenchRow> rows;
  std::vector<ReferenceRow> reference_rows;
};

struct BenchOptions {
  std::vector<Method> methods;
  std::vector<NoiseProfile> scenarios;
  int points = 400;
  int samples = 30;
  std::uint64_t seed = 42;
  KfConfig kf;
  RfConfig rf;
  /// Drive the robust filter's observation uncertainty from per-point sigmas
  /// (the zero model when false).
  bool rf_point_uncertainty = true;
};

/// Runs every method on the same generated samples per scenario (paired
/// comparison), timing only the registration call. RMSE fields are
/// deterministic in the seed; time fields are not.
BenchReport run_benchmark(const BenchOptions& options);

}  // namespace regfilt
