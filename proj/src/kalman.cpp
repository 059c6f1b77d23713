#include "kalman.hpp"

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
constexpr double kMaxInnovationCondition = 1e12;

void validate_config(const KfConfig& cfg) {
  if (cfg.process_sigma < 0.0) {
    fail(ErrorCode::invalid_argument, "process_sigma must be nonnegative");
  }
  if ((cfg.measurement_sigma.array() <= 0.0).any()) {
    fail(ErrorCode::invalid_argument, "measurement_sigma entries must be positive");
  }
  if (cfg.prior_covariance_scale <= 0.0) {
    fail(ErrorCode::invalid_argument, "prior_covariance_scale must be positive");
  }
  if (cfg.sweeps < 1) fail(ErrorCode::invalid_argument, "sweeps must be at least 1");
  if (cfg.reproject_every < 0) {
    fail(ErrorCode::invalid_argument, "reproject_every must be nonnegative");
  }
}

std::vector<std::size_t> processing_order(std::size_t n, const KfConfig& cfg) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg.shuffle_seed) {
    Rng rng(*cfg.shuffle_seed);
    rng.shuffle(order);
  }
  return order;
}

Vec3 effective_sigma(const Correspondence& c, const KfConfig& cfg) {
  return c.sigma ? *c.sigma : cfg.measurement_sigma;
}

}  // namespace

Vec9 identity_state() {
  return matrix_to_state(Mat3::Identity());
}

ObsMatrix build_observation_matrix(const Vec3& q) {
  ObsMatrix h = ObsMatrix::Zero();
  h.block<1, 3>(0, 0) = q.transpose();
  h.block<1, 3>(1, 3) = q.transpose();
  h.block<1, 3>(2, 6) = q.transpose();
  return h;
}

Mat3 measurement_noise(const Vec3& sigma) {
  Mat3 r = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    r(i, i) = std::max(sigma(i) * sigma(i), kNoiseFloor);
  }
  return r;
}

namespace detail {

KfUpdate kf_update(const FilterState& state, const Vec3& q, const Vec3& z, const Mat9& process,
                   const Mat3& noise) {
  const ObsMatrix h = build_observation_matrix(q);

  // Prediction: identity dynamics, no control.
  const Vec9& x_pred = state.x;
  const Mat9 p_pred = state.P + process;

  const Vec3 innovation = z - h * x_pred;
  Mat3 s = h * p_pred * h.transpose() + noise;
  s = ((s + s.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Mat3> es(s);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(2);
  if (!(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
    fail(ErrorCode::numerical, "kf_update: innovation covariance is ill-conditioned");
  }

  const GainMatrix gain = s.llt().solve(h * p_pred).transpose();

  KfUpdate out;
  out.gain = gain;
  out.innovation = innovation;
  out.state.x = x_pred + gain * innovation;
  Mat9 p_post = (Mat9::Identity() - gain * h) * p_pred;
  out.state.P = (p_post + p_post.transpose()) / 2.0;
  return out;
}

}  // namespace detail

FilterState kf_step(const FilterState& state, const Vec3& q, const Vec3& z, const KfConfig& cfg,
                    const Mat3& noise) {
  const Mat9 process = cfg.process_sigma * Mat9::Identity();
  return detail::kf_update(state, q, z, process, noise).state;
}

namespace {

void reproject_state(FilterState& st, double process_sigma) {
  st.x = matrix_to_state(project_to_rotation(state_to_matrix(st.x)));
  st.P.diagonal().array() += process_sigma * process_sigma;
}

RegistrationResult finalize(const Correspondences& corrs, const CenteredPairs& cp,
                            const KfConfig& cfg, FilterState st, RegistrationResult result) {
  result.pre_projection_state = st.x;
  result.final_covariance = st.P;
  RigidTransform t;
  t.rotation = project_to_rotation(state_to_matrix(st.x));
  t.scale = cfg.estimate_scale ? estimate_scale(t.rotation, cp, cfg.scale_per_term) : 1.0;
  t.translation = recover_translation(t.rotation, cp, t.scale);
  result.transform = t;
  result.rmse = rmse(t, corrs);
  result.under_determined = corrs.size() < 3;
  return result;
}

/// 12-state extension: [r11..r33, tx, ty, tz] observed through
/// H = [blockdiag(q) | I3] on raw pairs. Translation is initialized from the
/// centroid difference.
RegistrationResult register_full_state(const Correspondences& corrs, const KfConfig& cfg) {
  using Vec12 = Eigen::Matrix<double, 12, 1>;
  using Mat12 = Eigen::Matrix<double, 12, 12>;
  using Obs12 = Eigen::Matrix<double, 3, 12>;

  const CenteredPairs cp = center_pairs(corrs);

  Vec12 x = Vec12::Zero();
  x.head<9>() = identity_state();
  x.tail<3>() = initial_guess(cp).translation;
  Mat12 p = cfg.prior_covariance_scale * Mat12::Identity();
  const Mat12 process = cfg.process_sigma * Mat12::Identity();

  RegistrationResult result;
  const auto order = processing_order(corrs.size(), cfg);
  int step = 0;
  const long total = static_cast<long>(cfg.sweeps) * static_cast<long>(corrs.size());
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (std::size_t idx : order) {
      const Correspondence& c = corrs[idx];
      Obs12 h = Obs12::Zero();
      h.block<3, 9>(0, 0) = build_observation_matrix(c.source);
      h.block<3, 3>(0, 9) = Mat3::Identity();

      const Mat12 p_pred = p + process;
      const Vec3 innovation = c.target - h * x;
      Mat3 s = h * p_pred * h.transpose() + measurement_noise(effective_sigma(c, cfg));
      s = ((s + s.transpose()) / 2.0).eval();
      Eigen::SelfAdjointEigenSolver<Mat3> es(s);
      if (!(es.eigenvalues()(0) > 0.0) ||
          es.eigenvalues()(2) / es.eigenvalues()(0) > kMaxInnovationCondition) {
        fail(ErrorCode::numerical, "kf_register: innovation covariance is ill-conditioned");
      }
      const Eigen::Matrix<double, 12, 3> gain = s.llt().solve(h * p_pred).transpose();
      x += gain * innovation;
      Mat12 p_post = (Mat12::Identity() - gain * h) * p_pred;
      p = (p_post + p_post.transpose()) / 2.0;

      ++step;
      result.trace.push_back({step, innovation.norm(), p.trace(), std::nullopt, std::nullopt});
      if (cfg.record_states) result.states.emplace_back(x);
      if (cfg.reproject_every > 0 && step % cfg.reproject_every == 0 && step < total) {
        Vec9 rot = x.head<9>();
        x.head<9>() = matrix_to_state(project_to_rotation(state_to_matrix(rot)));
        p.diagonal().array() += cfg.process_sigma * cfg.process_sigma;
      }
    }
  }

  result.pre_projection_state = x;
  result.final_covariance = p;
  RigidTransform t;
  t.rotation = project_to_rotation(state_to_matrix(Vec9(x.head<9>())));
  t.translation = x.tail<3>();
  result.transform = t;
  result.rmse = rmse(t, corrs);
  result.steps = step;
  result.under_determined = corrs.size() < 3;
  return result;
}

}  // namespace

RegistrationResult kf_register(const Correspondences& corrs, const KfConfig& cfg) {
  if (corrs.empty()) fail(ErrorCode::empty_input, "kf_register: empty correspondence sequence");
  validate_config(cfg);
  if (cfg.translation_in_state) {
    if (cfg.estimate_scale) {
      fail(ErrorCode::invalid_argument,
           "kf_register: scale estimation is not supported in translation-in-state mode");
    }
    return register_full_state(corrs, cfg);
  }

  const CenteredPairs cp = center_pairs(corrs);
  FilterState st{identity_state(), cfg.prior_covariance_scale * Mat9::Identity()};

  RegistrationResult result;
  const auto order = processing_order(corrs.size(), cfg);
  int step = 0;
  const long total = static_cast<long>(cfg.sweeps) * static_cast<long>(corrs.size());
  const Mat9 process = cfg.process_sigma * Mat9::Identity();
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (std::size_t idx : order) {
      const Mat3 noise = measurement_noise(effective_sigma(corrs[idx], cfg));
      const auto up = detail::kf_update(st, cp.source_centered[idx], cp.target_centered[idx],
                                        process, noise);
      st = up.state;
      ++step;
      result.trace.push_back({step, up.innovation.norm(), st.P.trace(), std::nullopt, std::nullopt});
      if (cfg.record_states) result.states.emplace_back(st.x);
      if (cfg.reproject_every > 0 && step % cfg.reproject_every == 0 && step < total) {
        reproject_state(st, cfg.process_sigma);
      }
    }
  }
  result.steps = step;
  return finalize(corrs, cp, cfg, st, std::move(result));
}

}  // namespace regfilt
