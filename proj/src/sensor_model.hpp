#pragma once

#include "types.hpp"

#include <utility>
#include <vector>

namespace regfilt {

/// Pinhole intrinsics, pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Discrete depth values produced by RGBD quantization, strictly increasing,
/// meters. The spacing between neighboring levels sets the depth uncertainty.
struct ZLevels {
  std::vector<double> levels;
};

/// Per-axis standard deviations of a 3D point, meters.
struct PointSigma {
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.0;
};

/// Sorted distinct depth values; neighbors whose relative gap is below
/// `merge_epsilon` collapse into their mean. The default only merges
/// floating-point duplicates (real quantization steps are far larger).
ZLevels extract_z_levels(const std::vector<double>& depths, double merge_epsilon = 1e-6);

/// Depth standard deviation at level k from the half-width of the
/// [k-offset, k+offset] level window. When the window is clamped at either
/// end of the range the divisor is rescaled by the actual index span so a
/// uniformly spaced ladder yields the same sigma at the boundaries as in the
/// interior. Requires at least two levels.
double sigma_z(const ZLevels& levels, std::size_t level_index, int level_offset = 3);

/// u = (fx / z) x + cx, v = (fy / z) y + cy. Throws for z <= 0.
std::pair<double, double> project_pinhole(const Vec3& p, const CameraIntrinsics& intr);

/// x = (z / fx)(u - cx), y = (z / fy)(v - cy). Throws for z <= 0.
Vec3 backproject_pinhole(double u, double v, double z, const CameraIntrinsics& intr);

/// Propagates a depth sigma through the pinhole model:
/// sx = |sz / fx * (u - cx)|, sy = |sz / fy * (v - cy)|. Magnitudes only; a
/// standard deviation carries no sign.
PointSigma point_sigmas(double u, double v, double sigma_depth, const CameraIntrinsics& intr);

/// Rank-1 outer-product covariance s s^T (entries sigma_a * sigma_b).
Mat3 covariance_of_point(const PointSigma& s);

/// diag(sx^2, sy^2, sz^2) with a per-entry floor. The outer-product form is
/// singular, so this is the form fed to measurement-noise inversions.
Mat3 diagonal_covariance(const PointSigma& s, double floor = 0.0);

}  // namespace regfilt
