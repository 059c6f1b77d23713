#pragma once

#include "types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace regfilt {

/// Recursive estimator state: the nine row-major rotation entries and their
/// error covariance. Nothing constrains x to SO(3) during filtering; the
/// projection to a proper rotation happens when a run is finalized.
struct FilterState {
  Vec9 x = Vec9::Zero();
  Mat9 P = Mat9::Identity();
};

/// Returns vec(I3), the canonical initial state.
Vec9 identity_state();

struct KfConfig {
  /// Diagonal entry of the process noise Q = process_sigma * I. Small by
  /// design: the constant-state model is accurately determined.
  double process_sigma = 1e-6;
  /// Fallback per-axis measurement sigmas (meters) for correspondences that
  /// carry none of their own.
  Vec3 measurement_sigma{0.01, 0.01, 0.01};
  /// P0 = prior_covariance_scale * I.
  double prior_covariance_scale = 1e3;
  /// Passes over the correspondence list. One pass is the canonical scheme;
  /// more are an extension for experiments.
  int sweeps = 1;
  /// Re-project the state onto SO(3) every this many steps (0 = only at the
  /// end). Each mid-run projection inflates diag(P) by process_sigma^2.
  int reproject_every = 0;
  /// When set, correspondences are processed in a seeded shuffled order.
  std::optional<std::uint64_t> shuffle_seed;

  bool estimate_scale = false;
  bool scale_per_term = false;
  /// Extended 12-state mode: translation joins the state and the filter runs
  /// on raw (uncentered) pairs. Off by default; the canonical scheme decouples
  /// translation by centering.
  bool translation_in_state = false;
  /// Record the full state after every step (diagnostics; costs memory).
  bool record_states = false;
};

struct TraceEntry {
  int step = 0;
  double innovation_norm = 0.0;
  double trace_p = 0.0;
  /// Robust runs record the per-step performance bound actually used.
  std::optional<double> effective_theta;
  /// Cumulative closed-loop contraction flag, when diagnostics are on.
  std::optional<bool> stable;
};

struct RegistrationResult {
  RigidTransform transform;
  double rmse = 0.0;  // meters
  long steps = 0;
  std::vector<TraceEntry> trace;
  bool under_determined = false;
  /// Filter state before the final SO(3) projection (9 entries, or 12 in
  /// translation-in-state mode).
  Eigen::VectorXd pre_projection_state;
  Eigen::MatrixXd final_covariance;
  /// Per-step states when KfConfig::record_states is set.
  std::vector<Eigen::VectorXd> states;
};

/// Block-diagonal 3x9 observation matrix: each measurement axis sees the
/// source point against its row of rotation entries, p = H * vec(R) + e.
ObsMatrix build_observation_matrix(const Vec3& q);

/// Measurement noise diag(max(sigma_i^2, 1e-12)). The floor keeps the matrix
/// invertible when a correspondence carries zero sigma.
Mat3 measurement_noise(const Vec3& sigma);

/// One predict+correct cycle with identity dynamics:
///   x_pred = x, P_pred = P + Q,
///   K = P_pred H^T (H P_pred H^T + R)^-1,
///   x+ = x_pred + K (z - H x_pred), P+ = (I - K H) P_pred (symmetrized).
/// Throws ErrorCode::numerical when the innovation covariance conditions
/// worse than 1e12.
FilterState kf_step(const FilterState& state, const Vec3& q, const Vec3& z,
                    const KfConfig& cfg, const Mat3& noise);

/// Full recursive registration: center pairs, start from the identity state,
/// run kf_step over every pair for cfg.sweeps passes, project the final state
/// to SO(3) and recover translation from the centroids.
RegistrationResult kf_register(const Correspondences& corrs, const KfConfig& cfg = {});

namespace detail {

/// Shared update used by both the standard and the robust step (the robust
/// recursion reduces to it when the bound and the uncertainty vanish).
struct KfUpdate {
  FilterState state;
  GainMatrix gain;
  Vec3 innovation;
};
KfUpdate kf_update(const FilterState& state, const Vec3& q, const Vec3& z, const Mat9& process,
                   const Mat3& noise);

}  // namespace detail

}  // namespace regfilt
