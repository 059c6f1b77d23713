#include "robust.hpp"

#include "closed_form.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace regfilt {

namespace {

constexpr double kNoiseFloor = 1e-12;
constexpr double kExistenceMargin = 1e-12;
// A step is accepted only when the posterior cannot grow by more than this
// factor along any direction. Accepting with a bare positive-definiteness
// margin would admit near-singular information matrices whose inverses no
// backoff schedule can chase.
constexpr double kGrowthCap = 1.5;

void validate_config(const RfConfig& cfg) {
  if (cfg.theta < 0.0) fail(ErrorCode::invalid_argument, "theta must be nonnegative");
  if (!(cfg.theta_backoff > 0.0 && cfg.theta_backoff < 1.0)) {
    fail(ErrorCode::invalid_argument, "theta_backoff must lie in (0, 1)");
  }
  if (cfg.max_backoffs < 0) fail(ErrorCode::invalid_argument, "max_backoffs must be nonnegative");
}

}  // namespace

UncertaintyModel UncertaintyModel::none() {
  return {};
}

UncertaintyModel UncertaintyModel::from_point_sigmas(double sigma_a) {
  return from_point_sigmas(Vec9::Constant(sigma_a));
}

UncertaintyModel UncertaintyModel::from_point_sigmas(const Vec9& sigma_a_diag) {
  if ((sigma_a_diag.array() < 0.0).any()) {
    fail(ErrorCode::invalid_argument, "UncertaintyModel: sigma_a entries must be nonnegative");
  }
  UncertaintyModel unc;
  unc.delta_a_diag = sigma_a_diag;
  unc.delta_h = [](const Vec3& q, const Vec3& sigma) {
    return build_delta_H(q, PointSigma{sigma.x(), sigma.y(), sigma.z()});
  };
  return unc;
}

ObsMatrix UncertaintyModel::delta_h_at(const Vec3& q, const Vec3& sigma) const {
  return delta_h ? delta_h(q, sigma) : ObsMatrix::Zero();
}

bool UncertaintyModel::is_zero() const {
  return !delta_h && (delta_a_diag.array() == 0.0).all();
}

StackedFactorization factorization(const UncertaintyModel& unc, const Vec3& q,
                                   const Vec3& sigma) {
  StackedFactorization f;
  f.m1 = unc.delta_a_diag.asDiagonal();
  f.m2 = unc.delta_h_at(q, sigma);
  f.n = Mat9::Identity();
  return f;
}

bool validate_gamma_bound(const Eigen::MatrixXd& gamma) {
  const Eigen::MatrixXd gtg = gamma.transpose() * gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gtg);
  return es.eigenvalues().maxCoeff() <= 1.0 + 1e-12;
}

ObsMatrix build_delta_H(const Vec3& q, const PointSigma& s) {
  return build_observation_matrix(q + Vec3(s.sx, s.sy, s.sz));
}

RfStepResult rf_step(const FilterState& state, const Vec3& q, const Vec3& z,
                     const Vec3& point_sigma, const UncertaintyModel& unc, const RfConfig& cfg,
                     const Mat3& noise) {
  validate_config(cfg);
  const ObsMatrix h = build_observation_matrix(q);
  const Mat9 process = cfg.kf.process_sigma * Mat9::Identity();

  if (cfg.theta == 0.0 && unc.is_zero()) {
    // Exact degenerate limit: zero bound, zero uncertainty. The information
    // form below equals the standard update algebraically; running the
    // standard path keeps the two filters bit-compatible.
    const auto up = detail::kf_update(state, q, z, process, noise);
    RfStepResult out;
    out.state = up.state;
    out.effective_theta = 0.0;
    out.closed_loop = Mat9::Identity() - up.gain * h;
    return out;
  }

  // Inflate process noise with the model perturbation, then predict.
  const Mat9 delta_a = unc.delta_a_diag.asDiagonal();
  const Mat9 process_infl = process + delta_a * state.P * delta_a.transpose();
  Mat9 p_pred = state.P + process_infl;
  p_pred = ((p_pred + p_pred.transpose()) / 2.0).eval();

  // Inflate measurement noise with the deviation of the perturbed
  // observation map from the nominal one, evaluated at the current estimate
  // (for the block-built perturbation this is the rotated sigma triple).
  // Scaling the inflation by the state keeps it bounded: an inflation scaled
  // by P feeds back into the recursion (the information term shrinks with
  // 1/P) and diverges from any diffuse prior.
  Mat3 r_infl = noise;
  if (unc.delta_h) {
    const Vec3 deviation = (unc.delta_h(q, point_sigma) - h) * state.x;
    // Worst-case direction bound: the rank-1 outer product is replaced by its
    // spectral bound so no axis is favored.
    r_infl.diagonal().array() += deviation.squaredNorm();
  }
  r_infl = ((r_infl + r_infl.transpose()) / 2.0).eval();
  {
    Eigen::SelfAdjointEigenSolver<Mat3> es(r_infl);
    const double lo = es.eigenvalues()(0);
    if (lo < kNoiseFloor) r_infl.diagonal().array() += kNoiseFloor - lo;
  }

  const Eigen::LDLT<Mat9> p_ldlt(p_pred);
  if (p_ldlt.info() != Eigen::Success || !p_ldlt.isPositive()) {
    fail(ErrorCode::numerical, "rf_step: predicted covariance is not positive definite");
  }
  Mat9 p_pred_inv = p_ldlt.solve(Mat9::Identity());
  p_pred_inv = ((p_pred_inv + p_pred_inv.transpose()) / 2.0).eval();
  const double p_inv_floor = [&] {
    Eigen::SelfAdjointEigenSolver<Mat9> es(p_pred_inv);
    return es.eigenvalues()(0);
  }();

  const Eigen::LLT<Mat3> r_llt(r_infl);
  if (r_llt.info() != Eigen::Success) {
    fail(ErrorCode::numerical, "rf_step: inflated measurement covariance is singular");
  }
  const Mat3 r_inv = r_llt.solve(Mat3::Identity());
  const Mat9 information_gain = h.transpose() * r_inv * h;

  double theta = cfg.theta;
  int backoffs = 0;
  while (true) {
    Mat9 existence = p_pred_inv - theta * Mat9::Identity() + information_gain;
    existence = ((existence + existence.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Mat9> es(existence);
    if (es.info() != Eigen::Success) {
      fail(ErrorCode::numerical, "rf_step: existence-condition eigensolve failed");
    }
    if (es.eigenvalues()(0) > kExistenceMargin &&
        es.eigenvalues()(0) >= p_inv_floor / kGrowthCap) {
      // Accepted: invert through the eigendecomposition so P+ is symmetric
      // positive definite by construction.
      const Mat9 p_post =
          es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
          es.eigenvectors().transpose();
      const GainMatrix gain = p_post * h.transpose() * r_inv;

      RfStepResult out;
      out.state.x = state.x + gain * (z - h * state.x);
      out.state.P = (p_post + p_post.transpose()) / 2.0;
      out.effective_theta = theta;
      out.backoffs = backoffs;
      out.closed_loop = Mat9::Identity() - gain * h;
      return out;
    }
    if (backoffs >= cfg.max_backoffs) {
      fail(ErrorCode::infeasible,
           "rf_step: existence condition failed at theta = " + std::to_string(theta) + " after " +
               std::to_string(backoffs) + " backoffs");
    }
    theta *= cfg.theta_backoff;
    ++backoffs;
  }
}

RegistrationResult rf_register(const Correspondences& corrs, const UncertaintyModel& unc,
                               const RfConfig& cfg) {
  if (corrs.empty()) fail(ErrorCode::empty_input, "rf_register: empty correspondence sequence");
  validate_config(cfg);
  if (cfg.kf.translation_in_state) {
    fail(ErrorCode::invalid_argument,
         "rf_register: translation-in-state mode is only available for the standard filter");
  }

  const CenteredPairs cp = center_pairs(corrs);
  FilterState st{identity_state(), cfg.kf.prior_covariance_scale * Mat9::Identity()};

  std::vector<std::size_t> order(corrs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg.kf.shuffle_seed) {
    Rng rng(*cfg.kf.shuffle_seed);
    rng.shuffle(order);
  }

  RegistrationResult result;
  int step = 0;
  const long total = static_cast<long>(cfg.kf.sweeps) * static_cast<long>(corrs.size());
  Mat9 sweep_loop = Mat9::Identity();
  // The effective bound carries across steps: each step starts from the last
  // accepted bound (recovering by one backoff factor, capped at the
  // configured theta) so a diffuse prior cannot exhaust the per-step backoff
  // budget before the observations span the state space.
  double carried_theta = cfg.theta;
  for (int sweep = 0; sweep < cfg.kf.sweeps; ++sweep) {
    for (std::size_t idx : order) {
      const Vec3 sigma = corrs[idx].sigma ? *corrs[idx].sigma : cfg.kf.measurement_sigma;
      const Mat3 noise = measurement_noise(sigma);
      RfConfig step_cfg = cfg;
      step_cfg.theta = carried_theta;
      const auto sr = rf_step(st, cp.source_centered[idx], cp.target_centered[idx], sigma, unc,
                              step_cfg, noise);
      carried_theta = std::min(cfg.theta, sr.effective_theta / cfg.theta_backoff);
      const Vec3 innovation =
          cp.target_centered[idx] - build_observation_matrix(cp.source_centered[idx]) * st.x;
      st = sr.state;
      ++step;
      TraceEntry entry{step, innovation.norm(), st.P.trace(), sr.effective_theta, std::nullopt};
      if (cfg.diagnostics) {
        // Contraction of the error dynamics accumulated over the sweep; a
        // single rank-3 update always leaves unobserved directions at unit
        // gain, so the per-step matrix alone is never strictly stable.
        sweep_loop = sr.closed_loop * sweep_loop;
        entry.stable = estimator_stability(sweep_loop);
      }
      result.trace.push_back(entry);
      if (cfg.kf.record_states) result.states.emplace_back(st.x);
      if (cfg.kf.reproject_every > 0 && step % cfg.kf.reproject_every == 0 && step < total) {
        st.x = matrix_to_state(project_to_rotation(state_to_matrix(st.x)));
        st.P.diagonal().array() += cfg.kf.process_sigma * cfg.kf.process_sigma;
      }
    }
    sweep_loop = Mat9::Identity();
  }

  result.pre_projection_state = st.x;
  result.final_covariance = st.P;
  RigidTransform t;
  t.rotation = project_to_rotation(state_to_matrix(st.x));
  t.scale = cfg.kf.estimate_scale ? estimate_scale(t.rotation, cp, cfg.kf.scale_per_term) : 1.0;
  t.translation = recover_translation(t.rotation, cp, t.scale);
  result.transform = t;
  result.rmse = rmse(t, corrs);
  result.steps = step;
  result.under_determined = corrs.size() < 3;
  return result;
}

bool estimator_stability(const Mat9& a_tilde) {
  Eigen::EigenSolver<Mat9> es(a_tilde, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - 1e-12;
}

}  // namespace regfilt
