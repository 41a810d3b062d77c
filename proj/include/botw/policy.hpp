#pragma once

#include <cstddef>
#include <string>

#include "botw/geometry.hpp"
#include "botw/rng.hpp"

namespace botw {

inline constexpr double kProbabilityFloor = 1e-300;

/// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy(const SimplexDistribution& p);

/// Exponential-weights minimizer of <L, p> - beta H(p) over the simplex:
/// p(x) proportional to exp(-L(x) / beta), stabilized by subtracting min L,
/// entries floored at 1e-300 and renormalized.
SimplexDistribution regularized_leader(const Vector& cum_loss_est, double beta);

/// The FTRL objective <L, p> - beta H(p).
double ftrl_objective(const Vector& cum_loss_est, double beta, const Vector& p);

/// min(g_pi / beta, 1/2).
double compute_gamma(double beta, double g_pi);

/// gamma * pi + (1 - gamma) * q.
SimplexDistribution mix(const SimplexDistribution& q, const SimplexDistribution& pi, double gamma);

/// Inverse-CDF draw over arm order; consumes exactly one uniform.
std::size_t sample_arm(const SimplexDistribution& p, CounterRng& rng);

struct LossEstimate {
  Vector values;
};

/// l_hat(x) = x^T Sigma^{-1} x_chosen * observed_loss, with Sigma the
/// covariance of p. One SPD solve plus |D| inner products.
LossEstimate estimate_loss(const ArmSet& arms, const SimplexDistribution& p, std::size_t chosen,
                           double observed_loss);

enum class PolicyKind { Ftrl, Exp2, Uniform };

const char* to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

/// How beta evolves. Adaptive is the entropy-driven schedule; Constant is
/// the fixed-rate exponential-weights baseline.
enum class Schedule { Adaptive, Constant };

struct FtrlState {
  std::size_t t = 1;
  Vector cum_loss_est;
  double cum_entropy = 0.0;
  double beta = 0.0;
  double gamma = 0.5;
  std::size_t horizon_T = 0;
  double c_const = 0.0;
  double g_pi = 0.0;
  SimplexDistribution design = SimplexDistribution::uniform(1);
  std::size_t num_arms = 0;
  std::size_t dim = 0;
  Schedule schedule = Schedule::Adaptive;
  // Running sum of c / sqrt(1 + S_tau / ln|D|) for tau < t.
  double beta_increments = 0.0;
};

/// sqrt(d ln T / ln |D|).
double schedule_constant(std::size_t dim, std::size_t horizon, std::size_t num_arms);

FtrlState make_ftrl_state(const ArmSet& arms, const DesignResult& design, std::size_t horizon,
                          Schedule schedule = Schedule::Adaptive);

/// beta_t = 2 g(pi) + c + sum_{tau < t} c / sqrt(1 + S_tau / ln|D|), where
/// S_tau = H(q_1) + ... + H(q_tau). For the constant schedule,
/// sqrt(d T / ln |D|). Throws HorizonMissing when T is unset.
double compute_beta(const FtrlState& state);

struct PolicyDecision {
  SimplexDistribution q;
  SimplexDistribution p;
  std::size_t chosen_index;
  double entropy_q;
  double beta;
  double gamma;
};

/// Lines 3-5 of one round: refreshes beta and gamma in `state`, computes the
/// leader q and the mixture p, and samples an arm.
PolicyDecision ftrl_step(FtrlState& state, const ArmSet& arms, CounterRng& rng);

/// Line 6 plus bookkeeping: adds the loss estimate to the cumulative sums,
/// adds H(q_t) to the entropy sum, extends the beta schedule, increments t.
/// Throws LossOutOfRange if |observed_loss| > 1.
LossEstimate absorb_feedback(FtrlState& state, const ArmSet& arms, const PolicyDecision& decision,
                             double observed_loss);

/// Same machinery with beta = sqrt(d T / ln|D|) and gamma = min(g/beta, 1/2)
/// held fixed. `state` must come from make_ftrl_state(..., Schedule::Constant).
PolicyDecision baseline_exp2_step(FtrlState& state, const ArmSet& arms, CounterRng& rng);

/// Uniform play every round (linear-regret control). beta and gamma are
/// reported as 0.
PolicyDecision baseline_uniform_step(std::size_t num_arms, CounterRng& rng);

/// One learner for one run: dispatches to the policy kind it was built with.
class Learner {
 public:
  Learner(PolicyKind kind, const ArmSet& arms, const DesignResult& design, std::size_t horizon);

  PolicyDecision decide(CounterRng& rng);
  /// Returns the loss estimate (empty for the uniform policy).
  LossEstimate absorb(const PolicyDecision& decision, double observed_loss);

  PolicyKind kind() const noexcept { return kind_; }
  const FtrlState& state() const noexcept { return state_; }

 private:
  PolicyKind kind_;
  const ArmSet* arms_;
  FtrlState state_;
};

}  // namespace botw
