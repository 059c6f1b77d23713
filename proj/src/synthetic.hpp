#pragma once

#include "types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace regfilt {

/// Per-axis noise band for synthetic targets. The three named bands are
/// small (0.1-10 mm), average (10-20 mm) and large (20-80 mm); sigmas are
/// stored in meters.
struct NoiseProfile {
  enum class Band { Small, Average, Large, Custom };

  Band band = Band::Custom;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  /// Independent per-axis sigma draws; a shared draw when false.
  bool anisotropic = true;

  static NoiseProfile named(std::string_view name);
  static NoiseProfile custom(double sigma_min_m, double sigma_max_m, bool anisotropic = true);

  std::string name() const;
};

/// One generated registration problem: pairs (with their drawn sigmas
/// attached), the transform that produced them and its seed.
struct SyntheticSample {
  Correspondences corrs;
  RigidTransform truth;
  std::uint64_t seed = 0;
};

/// Uniformly distributed rotation (quaternion from four standard normals,
/// hemisphere-fixed) with translation components uniform in [-1, 1] m.
/// Deterministic in the seed.
RigidTransform random_rigid_transform(std::uint64_t seed);

/// Generates `n_samples` problems of `n_points` pairs each: sources uniform
/// in a 2 m cube, targets = truth(source) + zero-mean Gaussian noise with a
/// per-point sigma drawn uniformly from the profile band. Sample streams are
/// derived from (seed, sample index), so results do not depend on evaluation
/// order.
std::vector<SyntheticSample> make_synthetic_set(const NoiseProfile& profile, int n_points,
                                                int n_samples, std::uint64_t seed);

}  // namespace regfilt
