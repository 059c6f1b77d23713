#include "closed_form.hpp"

#include "errors.hpp"
#include "geometry.hpp"
#include "quaternion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace regfilt {

CenteredPairs center_pairs(const Correspondences& corrs) {
  if (corrs.empty()) fail(ErrorCode::empty_input, "center_pairs: empty correspondence sequence");
  CenteredPairs cp;
  cp.source_centered.reserve(corrs.size());
  cp.target_centered.reserve(corrs.size());
  Vec3 src_sum = Vec3::Zero();
  Vec3 tgt_sum = Vec3::Zero();
  for (const Correspondence& c : corrs) {
    src_sum += c.source;
    tgt_sum += c.target;
  }
  const double n = static_cast<double>(corrs.size());
  cp.source_centroid = src_sum / n;
  cp.target_centroid = tgt_sum / n;
  for (const Correspondence& c : corrs) {
    cp.source_centered.push_back(c.source - cp.source_centroid);
    cp.target_centered.push_back(c.target - cp.target_centroid);
  }
  return cp;
}

InitialGuess initial_guess(const CenteredPairs& cp) {
  InitialGuess g;
  g.translation = cp.target_centroid - cp.source_centroid;
  g.scale = estimate_scale(Mat3::Identity(), cp);
  return g;
}

RigidTransform horn_quaternion(const Correspondences& corrs, bool with_scale,
                               bool scale_per_term) {
  if (corrs.empty()) fail(ErrorCode::empty_input, "horn_quaternion: empty correspondence sequence");
  if (corrs.size() < 3) {
    fail(ErrorCode::under_determined,
         "horn_quaternion: need at least 3 correspondences, got " + std::to_string(corrs.size()));
  }
  const CenteredPairs cp = center_pairs(corrs);

  // Cross-covariance of centered source against centered target.
  Mat3 s = Mat3::Zero();
  for (std::size_t i = 0; i < cp.source_centered.size(); ++i) {
    s += cp.source_centered[i] * cp.target_centered[i].transpose();
  }

  const double sxx = s(0, 0), sxy = s(0, 1), sxz = s(0, 2);
  const double syx = s(1, 0), syy = s(1, 1), syz = s(1, 2);
  const double szx = s(2, 0), szy = s(2, 1), szz = s(2, 2);

  Eigen::Matrix4d n;
  n << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(n);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::numerical, "horn_quaternion: quaternion eigenproblem failed");
  }
  const Eigen::Vector4d evals = eig.eigenvalues();  // ascending
  const double gap = evals(3) - evals(2);
  if (gap < 1e-12 * std::max(1.0, std::abs(evals(3)))) {
    fail(ErrorCode::degenerate,
         "horn_quaternion: degenerate configuration (tied maximal eigenvalues)");
  }
  const Eigen::Vector4d q = eig.eigenvectors().col(3);

  RigidTransform t;
  t.rotation = quaternion_to_rotation(q(0), q(1), q(2), q(3));
  t.scale = with_scale ? estimate_scale(t.rotation, cp, scale_per_term) : 1.0;
  t.translation = recover_translation(t.rotation, cp, t.scale);
  return t;
}

Vec3 recover_translation(const Mat3& rotation, const CenteredPairs& cp, double scale) {
  return cp.target_centroid - scale * (rotation * cp.source_centroid);
}

double estimate_scale(const Mat3& rotation, const CenteredPairs& cp, bool per_term) {
  constexpr double kDenominatorFloor = 1e-18;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio_sum = 0.0;
  std::size_t ratio_terms = 0;
  for (std::size_t i = 0; i < cp.source_centered.size(); ++i) {
    const double dot = cp.target_centered[i].dot(rotation * cp.source_centered[i]);
    const double norm_sq = cp.source_centered[i].squaredNorm();
    numerator += dot;
    denominator += norm_sq;
    if (norm_sq >= kDenominatorFloor) {
      ratio_sum += dot / norm_sq;
      ++ratio_terms;
    }
  }
  if (denominator < kDenominatorFloor) {
    fail(ErrorCode::degenerate, "estimate_scale: centered sources are all zero");
  }
  double scale;
  if (per_term) {
    if (ratio_terms == 0) fail(ErrorCode::degenerate, "estimate_scale: no usable per-term ratios");
    scale = ratio_sum / static_cast<double>(ratio_terms);
  } else {
    scale = numerator / denominator;
  }
  if (scale <= 0.0) {
    fail(ErrorCode::invalid_scale, "estimate_scale: nonpositive scale estimate");
  }
  return scale;
}

}  // namespace regfilt
