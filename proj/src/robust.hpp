#pragma once

#include "kalman.hpp"
#include "sensor_model.hpp"
#include "types.hpp"

#include <functional>

namespace regfilt {

/// Norm-bounded parameter uncertainty: a diagonal process-model perturbation
/// dA and an observation-model perturbation dH built per point from the
/// source and its sigmas. Both admit the structured factorization
/// [dA; dH] = [M1; M2] * Gamma * N with Gamma^T Gamma <= I.
struct UncertaintyModel {
  Vec9 delta_a_diag = Vec9::Zero();
  /// Rule producing dH from a (centered) source point and its per-axis
  /// sigmas; empty means zero observation uncertainty.
  std::function<ObsMatrix(const Vec3& q, const Vec3& sigma)> delta_h;

  /// No uncertainty at all; the robust recursion degenerates to the
  /// standard filter under this model when the bound is zero.
  static UncertaintyModel none();
  /// dA = sigma_a * I and dH block-built from the point plus its sigmas.
  static UncertaintyModel from_point_sigmas(double sigma_a);
  static UncertaintyModel from_point_sigmas(const Vec9& sigma_a_diag);

  ObsMatrix delta_h_at(const Vec3& q, const Vec3& sigma) const;
  bool is_zero() const;
};

/// Constructive factorization choice M1 = dA, M2 = dH, N = I (p = 9); the
/// unknown contraction Gamma = I reproduces the stacked perturbation exactly.
struct StackedFactorization {
  Mat9 m1;
  ObsMatrix m2;
  Mat9 n;
};
StackedFactorization factorization(const UncertaintyModel& unc, const Vec3& q, const Vec3& sigma);

/// True iff every eigenvalue of Gamma^T Gamma is <= 1 + 1e-12.
bool validate_gamma_bound(const Eigen::MatrixXd& gamma);

/// Observation perturbation with each block row V = q + sigma; zero sigma
/// reproduces the plain observation matrix.
ObsMatrix build_delta_H(const Vec3& q, const PointSigma& s);

struct RfConfig {
  /// H-infinity performance bound; larger is more conservative but risks the
  /// per-step existence condition.
  double theta = 0.01;
  KfConfig kf;
  /// Multiplier applied to theta whenever the existence condition fails.
  double theta_backoff = 0.5;
  int max_backoffs = 8;
  /// Track closed-loop contraction per step (costs one eigensolve per step).
  bool diagnostics = false;
};

struct RfStepResult {
  FilterState state;
  /// Bound actually used after any backoffs.
  double effective_theta = 0.0;
  int backoffs = 0;
  /// I - K H of the accepted step.
  Mat9 closed_loop = Mat9::Identity();
};

/// One robust update. The recursion predicts with inflated process noise
/// (Qt = Q + dA P dA^T), inflates the measurement noise with the observation
/// uncertainty acting on the current estimate (Rt = R + (dH x)(dH x)^T,
/// spectrum floored at 1e-12), checks the existence condition
/// P_pred^-1 - theta I + H^T Rt^-1 H > 0 (backing the bound off on failure),
/// then updates through the information form
///   P+ = (P_pred^-1 - theta I + H^T Rt^-1 H)^-1,  K = P+ H^T Rt^-1.
/// With theta = 0 and a zero uncertainty model this is algebraically the
/// standard update and is computed through exactly that code path.
/// Throws ErrorCode::infeasible when the bound stays infeasible after
/// max_backoffs reductions.
RfStepResult rf_step(const FilterState& state, const Vec3& q, const Vec3& z,
                     const Vec3& point_sigma, const UncertaintyModel& unc, const RfConfig& cfg,
                     const Mat3& noise);

/// Robust registration: the kf_register pipeline with rf_step in the loop.
/// Per-point sigmas (or the config fallback) drive the observation
/// uncertainty; the trace records the effective bound per step. The bound
/// carries across steps (recovering by one backoff factor per accepted step,
/// capped at cfg.theta), so feasibility against a diffuse prior degrades the
/// bound gracefully instead of aborting once max_backoffs halvings from the
/// full theta no longer reach a feasible value.
RegistrationResult rf_register(const Correspondences& corrs, const UncertaintyModel& unc,
                               const RfConfig& cfg = {});

/// True iff the spectral radius of the estimator transition matrix is
/// strictly below 1 - 1e-12.
bool estimator_stability(const Mat9& a_tilde);

}  // namespace regfilt
