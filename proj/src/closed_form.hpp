#pragma once

#include "types.hpp"

namespace regfilt {

/// Correspondences with the respective centroids subtracted. Decoupling the
/// translation this way reduces the pose problem to a rotation-only fit;
/// every solver in this library starts from this form.
struct CenteredPairs {
  std::vector<Vec3> source_centered;
  std::vector<Vec3> target_centered;
  Vec3 source_centroid = Vec3::Zero();
  Vec3 target_centroid = Vec3::Zero();
};

/// Translation/scale guesses for an assumed identity rotation. Only the
/// translation feeds filter initialization (12-state mode); the scale guess
/// is exposed for diagnostics.
struct InitialGuess {
  Vec3 translation;
  double scale;
};

CenteredPairs center_pairs(const Correspondences& corrs);

InitialGuess initial_guess(const CenteredPairs& cp);

/// Closed-form absolute orientation: the rotation maximizing
/// sum(target_i . (R source_i)) over centered pairs, found as the maximal
/// eigenvector of the 4x4 quaternion cross-covariance matrix; translation is
/// recovered afterwards. Scale stays 1 unless `with_scale` is set.
/// Throws under_determined for fewer than 3 pairs and degenerate when the
/// top two eigenvalues tie (collinear or symmetric configurations).
RigidTransform horn_quaternion(const Correspondences& corrs, bool with_scale = false,
                               bool scale_per_term = false);

/// target_centroid - scale * R * source_centroid.
Vec3 recover_translation(const Mat3& rotation, const CenteredPairs& cp, double scale = 1.0);

/// Least-squares scale: sum(target_i . (R source_i)) / sum(|source_i|^2) over
/// centered pairs. `per_term` switches to the mean of per-pair ratios, kept
/// for comparison; the ratio-of-sums form is the default.
/// Throws degenerate when the centered sources are all (numerically) zero,
/// invalid_scale when the numerator is nonpositive.
double estimate_scale(const Mat3& rotation, const CenteredPairs& cp, bool per_term = false);

}  // namespace regfilt
