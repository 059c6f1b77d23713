#include "sensor_model.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace regfilt {

ZLevels extract_z_levels(const std::vector<double>& depths, double merge_epsilon) {
  if (depths.empty()) fail(ErrorCode::empty_input, "extract_z_levels: no depth values");
  if (merge_epsilon <= 0.0) {
    fail(ErrorCode::invalid_argument, "extract_z_levels: merge_epsilon must be positive");
  }
  for (double d : depths) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      fail(ErrorCode::invalid_argument, "extract_z_levels: depths must be positive and finite");
    }
  }
  std::vector<double> sorted = depths;
  std::sort(sorted.begin(), sorted.end());

  ZLevels out;
  double cluster_sum = sorted.front();
  std::size_t cluster_count = 1;
  double cluster_last = sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double gap = (sorted[i] - cluster_last) / cluster_last;
    if (gap < merge_epsilon) {
      cluster_sum += sorted[i];
      ++cluster_count;
    } else {
      out.levels.push_back(cluster_sum / static_cast<double>(cluster_count));
      cluster_sum = sorted[i];
      cluster_count = 1;
    }
    cluster_last = sorted[i];
  }
  out.levels.push_back(cluster_sum / static_cast<double>(cluster_count));
  return out;
}

double sigma_z(const ZLevels& levels, std::size_t level_index, int level_offset) {
  const std::size_t n = levels.levels.size();
  if (n < 2) fail(ErrorCode::degenerate, "sigma_z: need at least two depth levels");
  if (level_index >= n) {
    fail(ErrorCode::invalid_argument, "sigma_z: level index out of range");
  }
  if (level_offset < 1) {
    fail(ErrorCode::invalid_argument, "sigma_z: level offset must be positive");
  }
  const std::size_t offset = static_cast<std::size_t>(level_offset);
  const std::size_t hi = std::min(level_index + offset, n - 1);
  const std::size_t lo = level_index >= offset ? level_index - offset : 0;
  // Half-width (Z_hi - Z_lo) / 2 in the interior; at the boundaries the
  // divisor shrinks with the clamped span: offset * span_width / span.
  const double span = static_cast<double>(hi - lo);
  return static_cast<double>(level_offset) * (levels.levels[hi] - levels.levels[lo]) / span;
}

std::pair<double, double> project_pinhole(const Vec3& p, const CameraIntrinsics& intr) {
  if (!(p.z() > 0.0)) fail(ErrorCode::invalid_argument, "project_pinhole: point behind camera");
  const double u = intr.fx / p.z() * p.x() + intr.cx;
  const double v = intr.fy / p.z() * p.y() + intr.cy;
  return {u, v};
}

Vec3 backproject_pinhole(double u, double v, double z, const CameraIntrinsics& intr) {
  if (!(z > 0.0)) fail(ErrorCode::invalid_argument, "backproject_pinhole: invalid depth");
  return {z / intr.fx * (u - intr.cx), z / intr.fy * (v - intr.cy), z};
}

PointSigma point_sigmas(double u, double v, double sigma_depth, const CameraIntrinsics& intr) {
  PointSigma s;
  s.sx = std::abs(sigma_depth / intr.fx * (u - intr.cx));
  s.sy = std::abs(sigma_depth / intr.fy * (v - intr.cy));
  s.sz = sigma_depth;
  return s;
}

Mat3 covariance_of_point(const PointSigma& s) {
  const Vec3 v(s.sx, s.sy, s.sz);
  return v * v.transpose();
}

Mat3 diagonal_covariance(const PointSigma& s, double floor) {
  Mat3 c = Mat3::Zero();
  c(0, 0) = std::max(s.sx * s.sx, floor);
  c(1, 1) = std::max(s.sy * s.sy, floor);
  c(2, 2) = std::max(s.sz * s.sz, floor);
  return c;
}

}  // namespace regfilt
