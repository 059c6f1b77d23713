#include "geometry.hpp"

#include "errors.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace regfilt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
    case ErrorCode::under_determined: return "under-determined";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::invalid_scale: return "invalid-scale";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::infeasible: return "infeasible";
  }
  return "unknown";
}

Vec3 apply_transform(const RigidTransform& t, const Vec3& p) {
  return t.apply(p);
}

bool is_rotation(const Mat3& m, double tol) {
  const Mat3 gram = m.transpose() * m;
  if (((gram - Mat3::Identity()).array().abs() > tol).any()) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

Mat3 project_to_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (sv(2) < 1e-12 * sv(0)) {
    fail(ErrorCode::degenerate, "project_to_rotation: matrix is rank deficient");
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  const double det_sign = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Mat3 result = u * Vec3(1.0, 1.0, det_sign).asDiagonal() * v.transpose();
  return result;
}

Vec3 centroid(std::span<const Vec3> points) {
  if (points.empty()) fail(ErrorCode::empty_input, "centroid: empty point sequence");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

double rmse(const RigidTransform& t, const Correspondences& corrs) {
  if (corrs.empty()) fail(ErrorCode::empty_input, "rmse: empty correspondence sequence");
  double sum_sq = 0.0;
  for (const Correspondence& c : corrs) {
    sum_sq += (t.apply(c.source) - c.target).squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(corrs.size()));
}

Mat3 state_to_matrix(const Vec9& x) {
  Mat3 m;
  m << x(0), x(1), x(2),
       x(3), x(4), x(5),
       x(6), x(7), x(8);
  return m;
}

Vec9 matrix_to_state(const Mat3& m) {
  Vec9 x;
  x << m(0, 0), m(0, 1), m(0, 2),
       m(1, 0), m(1, 1), m(1, 2),
       m(2, 0), m(2, 1), m(2, 2);
  return x;
}

}  // namespace regfilt
