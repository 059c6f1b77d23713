#pragma once

#include "benchmark.hpp"
#include "sensor_model.hpp"
#include "types.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace regfilt {

inline constexpr const char* kVersion = "0.1.0";

/// Correspondence CSV: a header naming the columns
/// (sx,sy,sz,tx,ty,tz[,ssx,ssy,ssz]) followed by one row per pair. Values are
/// millimeters in the file and meters in memory; the conversion happens only
/// here. Parse failures report the offending line number.
Correspondences load_correspondences(const std::string& path);
void save_correspondences(const std::string& path, const Correspondences& corrs);

/// ASCII PLY vertex loader (x, y, z properties, meters) plus a whitespace
/// separated "source_index target_index" pair file, for interop with point
/// cloud tooling.
std::vector<Vec3> load_ply_points(const std::string& path);
std::vector<std::pair<std::size_t, std::size_t>> load_pair_indices(const std::string& path);
Correspondences correspondences_from_ply(const std::string& source_ply,
                                         const std::string& target_ply,
                                         const std::string& pairs_path);

/// Depth values in meters: one value per line, or a rectangular CSV grid
/// (row-major) which is flattened.
std::vector<double> load_depths(const std::string& path);

/// Flat key = value run configuration. Unknown keys are rejected; the CLI
/// applies flag overrides on top via set().
struct RunConfig {
  std::string method = "horn";
  std::vector<std::string> methods{"horn", "kf", "rf"};
  std::string noise = "small";
  double sigma_min_mm = 0.0;
  double sigma_max_mm = 0.0;
  bool anisotropic = true;
  int points = 400;
  int samples = 30;
  std::uint64_t seed = 42;

  KfConfig kf;
  RfConfig rf;
  std::string rf_uncertainty = "points";  // points | none
  /// Process-model uncertainty for the robust filter; defaults to
  /// process_sigma when unset.
  double sigma_a = 0.0;
  bool has_sigma_a = false;
  std::string covariance_form = "outer";  // outer | diagonal

  CameraIntrinsics intrinsics{};
  bool has_intrinsics = false;
  double merge_epsilon = 1e-6;
  int zlevel_offset = 3;

  static RunConfig from_file(const std::string& path);
  /// Parses and applies one key/value; throws ErrorCode::parse for unknown
  /// keys or malformed values.
  void set(const std::string& key, const std::string& value);
  /// Renders a key back into its config-file form (empty for unset optional
  /// keys); throws ErrorCode::parse for unknown keys.
  std::string get(const std::string& key) const;

  /// Noise profile built from `noise` (+ the custom band fields).
  NoiseProfile noise_profile() const;
  UncertaintyModel uncertainty() const;
  RfConfig rf_config() const;
};

/// Report JSON: {meta: {seed, version, unit}, rows: [...], transform?: {...}}.
/// RMSE fields are millimeters, timings milliseconds.
nlohmann::ordered_json report_to_json(const BenchReport& report);
nlohmann::ordered_json result_to_json(const RegistrationResult& result, const std::string& method,
                                      const std::string& scenario, std::uint64_t seed);
nlohmann::ordered_json transform_to_json(const RigidTransform& t);
RigidTransform transform_from_json(const nlohmann::json& j);

/// Aligned plain-text tables: scenarios as rows, methods as columns, with the
/// published reference columns marked as such.
std::string report_to_table(const BenchReport& report);
std::string result_to_table(const RegistrationResult& result, const std::string& method);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace regfilt
