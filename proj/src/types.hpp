#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace regfilt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using ObsMatrix = Eigen::Matrix<double, 3, 9>;  // one measurement row-block per axis
using GainMatrix = Eigen::Matrix<double, 9, 3>;

/// Rigid (optionally scaled) transform p -> s * R * p + t.
/// Rotation is row-major-flattened into filter states, so it is kept as a
/// plain 3x3 matrix here. All lengths are meters.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// A pre-matched source/target point pair. `sigma` carries the per-axis
/// standard deviations of the target measurement when known (meters).
struct Correspondence {
  Vec3 source = Vec3::Zero();
  Vec3 target = Vec3::Zero();
  std::optional<Vec3> sigma;
};

using Correspondences = std::vector<Correspondence>;

}  // namespace regfilt
