#include "botw/policy.hpp"

#include <algorithm>
#include <cmath>

#include "botw/error.hpp"

namespace botw {

double entropy(const SimplexDistribution& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.probs().size(); ++i) {
    const double v = p.probs()[i];
    if (v > 0.0) h -= v * std::log(v);
  }
  // Roundoff can push a uniform vector a few ulps past ln|D|.
  return std::clamp(h, 0.0, std::log(static_cast<double>(p.size())));
}

SimplexDistribution regularized_leader(const Vector& cum_loss_est, double beta) {
  if (!std::isfinite(beta) || !cum_loss_est.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "leader input has non-finite entries");
  }
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  if (cum_loss_est.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty loss vector");

  const double shift = cum_loss_est.minCoeff();
  Vector w = (-(cum_loss_est.array() - shift) / beta).exp().max(kProbabilityFloor);
  w /= w.sum();
  return SimplexDistribution(std::move(w));
}

double ftrl_objective(const Vector& cum_loss_est, double beta, const Vector& p) {
  double neg_entropy = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) neg_entropy += p[i] * std::log(p[i]);
  }
  return cum_loss_est.dot(p) + beta * neg_entropy;
}

double compute_gamma(double beta, double g_pi) { return std::min(g_pi / beta, 0.5); }

SimplexDistribution mix(const SimplexDistribution& q, const SimplexDistribution& pi, double gamma) {
  if (q.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "mixing distributions differ in size");
  if (!(gamma >= 0.0 && gamma <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1/2]");
  }
  return SimplexDistribution(gamma * pi.probs() + (1.0 - gamma) * q.probs());
}

std::size_t sample_arm(const SimplexDistribution& p, CounterRng& rng) {
  const double u = rng.uniform();
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    cdf += p[i];
    last_positive = i;
    if (u < cdf) return i;
  }
  return last_positive;
}

LossEstimate estimate_loss(const ArmSet& arms, const SimplexDistribution& p, std::size_t chosen,
                           double observed_loss) {
  if (!std::isfinite(observed_loss) || std::abs(observed_loss) > 1.0) {
    throw Error(ErrorCode::LossOutOfRange, "observed loss " + std::to_string(observed_loss) +
                                               " outside [-1, 1]");
  }
  if (chosen >= arms.size()) throw Error(ErrorCode::InvalidArgument, "chosen arm out of range");
  const SpdFactor factor(covariance(p, arms));
  const Vector w = factor.solve(arms.arm(chosen));
  return LossEstimate{(arms.matrix() * w) * observed_loss};
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Ftrl: return "ftrl";
    case PolicyKind::Exp2: return "exp2";
    case PolicyKind::Uniform: return "uniform";
  }
  return "unknown";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "ftrl") return PolicyKind::Ftrl;
  if (name == "exp2") return PolicyKind::Exp2;
  if (name == "uniform") return PolicyKind::Uniform;
  throw Error(ErrorCode::InvalidArgument, "unknown policy '" + name + "' (expected ftrl, exp2, uniform)");
}

double schedule_constant(std::size_t dim, std::size_t horizon, std::size_t num_arms) {
  return std::sqrt(static_cast<double>(dim) * std::log(static_cast<double>(horizon)) /
                   std::log(static_cast<double>(num_arms)));
}

FtrlState make_ftrl_state(const ArmSet& arms, const DesignResult& design, std::size_t horizon,
                          Schedule schedule) {
  if (design.pi.size() != arms.size()) {
    throw Error(ErrorCode::DimensionMismatch, "design does not match arm set");
  }
  FtrlState state;
  state.cum_loss_est = Vector::Zero(static_cast<Eigen::Index>(arms.size()));
  state.horizon_T = horizon;
  state.g_pi = design.g_value;
  state.design = design.pi;
  state.num_arms = arms.size();
  state.dim = arms.dim();
  state.schedule = schedule;
  if (horizon > 0) {
    state.c_const = schedule_constant(arms.dim(), horizon, arms.size());
    state.beta = compute_beta(state);
    state.gamma = compute_gamma(state.beta, state.g_pi);
  }
  return state;
}

double compute_beta(const FtrlState& state) {
  if (state.horizon_T == 0) throw Error(ErrorCode::HorizonMissing, "horizon T is required for the beta schedule");
  if (state.schedule == Schedule::Constant) {
    return std::sqrt(static_cast<double>(state.dim) * static_cast<double>(state.horizon_T) /
                     std::log(static_cast<double>(state.num_arms)));
  }
  return 2.0 * state.g_pi + state.c_const + state.beta_increments;
}

namespace {

PolicyDecision leader_step(FtrlState& state, CounterRng& rng) {
  if (state.t > state.horizon_T) {
    throw Error(ErrorCode::HorizonExceeded, "round " + std::to_string(state.t) + " beyond horizon");
  }
  state.beta = compute_beta(state);
  state.gamma = compute_gamma(state.beta, state.g_pi);
  SimplexDistribution q = regularized_leader(state.cum_loss_est, state.beta);
  SimplexDistribution p = mix(q, state.design, state.gamma);
  const std::size_t chosen = sample_arm(p, rng);
  const double h = entropy(q);
  return PolicyDecision{std::move(q), std::move(p), chosen, h, state.beta, state.gamma};
}

}  // namespace

PolicyDecision ftrl_step(FtrlState& state, const ArmSet& /*arms*/, CounterRng& rng) {
  if (state.schedule != Schedule::Adaptive) {
    throw Error(ErrorCode::InvalidArgument, "ftrl_step needs an adaptive-schedule state");
  }
  return leader_step(state, rng);
}

PolicyDecision baseline_exp2_step(FtrlState& state, const ArmSet& /*arms*/, CounterRng& rng) {
  if (state.schedule != Schedule::Constant) {
    throw Error(ErrorCode::InvalidArgument, "baseline_exp2_step needs a constant-schedule state");
  }
  return leader_step(state, rng);
}

LossEstimate absorb_feedback(FtrlState& state, const ArmSet& arms, const PolicyDecision& decision,
                             double observed_loss) {
  LossEstimate est = estimate_loss(arms, decision.p, decision.chosen_index, observed_loss);
  state.cum_loss_est += est.values;
  state.cum_entropy += decision.entropy_q;
  if (state.schedule == Schedule::Adaptive) {
    const double log_arms = std::log(static_cast<double>(state.num_arms));
    state.beta_increments += state.c_const / std::sqrt(1.0 + state.cum_entropy / log_arms);
  }
  ++state.t;
  state.beta = compute_beta(state);
  state.gamma = compute_gamma(state.beta, state.g_pi);
  return est;
}

PolicyDecision baseline_uniform_step(std::size_t num_arms, CounterRng& rng) {
  SimplexDistribution q = SimplexDistribution::uniform(num_arms);
  const std::size_t chosen = sample_arm(q, rng);
  const double h = entropy(q);
  SimplexDistribution p = q;
  return PolicyDecision{std::move(q), std::move(p), chosen, h, 0.0, 0.0};
}

Learner::Learner(PolicyKind kind, const ArmSet& arms, const DesignResult& design, std::size_t horizon)
    : kind_(kind),
      arms_(&arms),
      state_(make_ftrl_state(arms, design, horizon,
                             kind == PolicyKind::Exp2 ? Schedule::Constant : Schedule::Adaptive)) {
  if (horizon == 0) throw Error(ErrorCode::HorizonMissing, "horizon T is required");
}

PolicyDecision Learner::decide(CounterRng& rng) {
  switch (kind_) {
    case PolicyKind::Ftrl: return ftrl_step(state_, *arms_, rng);
    case PolicyKind::Exp2: return baseline_exp2_step(state_, *arms_, rng);
    case PolicyKind::Uniform: return baseline_uniform_step(arms_->size(), rng);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown policy kind");
}

LossEstimate Learner::absorb(const PolicyDecision& decision, double observed_loss) {
  if (kind_ == PolicyKind::Uniform) {
    if (!std::isfinite(observed_loss) || std::abs(observed_loss) > 1.0) {
      throw Error(ErrorCode::LossOutOfRange, "observed loss outside [-1, 1]");
    }
    ++state_.t;
    return LossEstimate{Vector()};
  }
  return absorb_feedback(state_, *arms_, decision, observed_loss);
}

}  // namespace botw
