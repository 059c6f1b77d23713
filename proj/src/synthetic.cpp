#include "synthetic.hpp"

#include "errors.hpp"
#include "quaternion.hpp"
#include "rng.hpp"

#include <cmath>

namespace regfilt {

NoiseProfile NoiseProfile::named(std::string_view name) {
  NoiseProfile p;
  if (name == "small") {
    p.band = Band::Small;
    p.sigma_min = 0.1e-3;
    p.sigma_max = 10e-3;
  } else if (name == "average") {
    p.band = Band::Average;
    p.sigma_min = 10e-3;
    p.sigma_max = 20e-3;
  } else if (name == "large") {
    p.band = Band::Large;
    p.sigma_min = 20e-3;
    p.sigma_max = 80e-3;
  } else {
    fail(ErrorCode::invalid_argument, "unknown noise profile: " + std::string(name));
  }
  return p;
}

NoiseProfile NoiseProfile::custom(double sigma_min_m, double sigma_max_m, bool anisotropic) {
  if (sigma_min_m < 0.0 || sigma_max_m < sigma_min_m) {
    fail(ErrorCode::invalid_argument, "noise band requires 0 <= sigma_min <= sigma_max");
  }
  NoiseProfile p;
  p.band = Band::Custom;
  p.sigma_min = sigma_min_m;
  p.sigma_max = sigma_max_m;
  p.anisotropic = anisotropic;
  return p;
}

std::string NoiseProfile::name() const {
  switch (band) {
    case Band::Small: return "small";
    case Band::Average: return "average";
    case Band::Large: return "large";
    case Band::Custom: return "custom";
  }
  return "custom";
}

RigidTransform random_rigid_transform(std::uint64_t seed) {
  Rng rng(seed);
  double w = rng.gaussian();
  double x = rng.gaussian();
  double y = rng.gaussian();
  double z = rng.gaussian();
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  w /= norm;
  x /= norm;
  y /= norm;
  z /= norm;
  if (w < 0.0) {  // hemisphere fix; q and -q are the same rotation
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  RigidTransform t;
  t.rotation = quaternion_to_rotation(w, x, y, z);
  t.translation = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return t;
}

std::vector<SyntheticSample> make_synthetic_set(const NoiseProfile& profile, int n_points,
                                                int n_samples, std::uint64_t seed) {
  if (n_points < 3) fail(ErrorCode::invalid_argument, "make_synthetic_set: need at least 3 points");
  if (n_samples < 1) fail(ErrorCode::invalid_argument, "make_synthetic_set: need at least 1 sample");
  if (profile.sigma_min < 0.0 || profile.sigma_max < profile.sigma_min) {
    fail(ErrorCode::invalid_argument, "make_synthetic_set: invalid noise band");
  }

  std::vector<SyntheticSample> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    const std::uint64_t sample_seed = Rng::derive(seed, static_cast<std::uint64_t>(s));
    SyntheticSample sample;
    sample.seed = sample_seed;
    sample.truth = random_rigid_transform(Rng::derive(sample_seed, 0));

    Rng rng(Rng::derive(sample_seed, 1));
    sample.corrs.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
      Correspondence c;
      c.source = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      Vec3 sigma;
      if (profile.anisotropic) {
        sigma = Vec3(rng.uniform(profile.sigma_min, profile.sigma_max),
                     rng.uniform(profile.sigma_min, profile.sigma_max),
                     rng.uniform(profile.sigma_min, profile.sigma_max));
      } else {
        sigma = Vec3::Constant(rng.uniform(profile.sigma_min, profile.sigma_max));
      }
      const Vec3 noise(rng.gaussian(0.0, sigma.x()), rng.gaussian(0.0, sigma.y()),
                       rng.gaussian(0.0, sigma.z()));
      c.target = sample.truth.apply(c.source) + noise;
      c.sigma = sigma;
      sample.corrs.push_back(c);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace regfilt
