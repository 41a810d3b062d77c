#include "botw/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "botw/error.hpp"

namespace botw {

namespace {

constexpr double kThetaNormSlack = 1e-12;

std::string describe_vector(const Vector& v) {
  std::string out = "[";
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    if (i) out += ',';
    out += buf;
  }
  return out + "]";
}

void check_theta_norm(const Vector& theta, const std::string& what) {
  if (!theta.allFinite()) throw Error(ErrorCode::NonFiniteInput, what + " has non-finite entries");
  if (theta.norm() > 1.0 + kThetaNormSlack) {
    throw Error(ErrorCode::InvalidArgument, what + " has norm " + std::to_string(theta.norm()) + " > 1");
  }
}

}  // namespace

double draw_noise(const NoiseSpec& spec, double clean_mean, CounterRng& rng) {
  switch (spec.kind) {
    case NoiseKind::None:
      return 0.0;
    case NoiseKind::Uniform:
      return spec.sigma * (2.0 * rng.uniform() - 1.0);
    case NoiseKind::Gaussian: {
      const double room = 1.0 - std::abs(clean_mean);
      if (spec.sigma <= 0.0 || room <= 0.0) return 0.0;
      // Symmetric rejection keeps the mean at zero.
      for (int attempt = 0; attempt < 10000; ++attempt) {
        const double eps = spec.sigma * rng.normal();
        if (std::abs(eps) <= room) return eps;
      }
      return 0.0;
    }
  }
  return 0.0;
}

AlternatingGenerator::AlternatingGenerator(Vector v) : v_(std::move(v)) {
  check_theta_norm(v_, "alternating generator vector");
}

Vector AlternatingGenerator::theta(std::size_t t, std::span<const HistoryEntry>) const {
  return (t % 2 == 0) ? v_ : Vector(-v_);
}

std::string AlternatingGenerator::describe() const { return "alternating" + describe_vector(v_); }

SinusoidalGenerator::SinusoidalGenerator(double omega, Vector u, Vector v)
    : omega_(omega), u_(std::move(u)), v_(std::move(v)) {
  if (u_.size() != v_.size()) throw Error(ErrorCode::DimensionMismatch, "sinusoidal u and v differ in length");
  if (!std::isfinite(omega_)) throw Error(ErrorCode::NonFiniteInput, "omega must be finite");
  // ||cos a u + sin a v||^2 peaks at the largest eigenvalue of the Gram matrix of (u, v).
  const double uu = u_.squaredNorm(), vv = v_.squaredNorm(), uv = u_.dot(v_);
  const double peak = 0.5 * (uu + vv) + std::sqrt(0.25 * (uu - vv) * (uu - vv) + uv * uv);
  if (std::sqrt(peak) > 1.0 + kThetaNormSlack) {
    throw Error(ErrorCode::InvalidArgument, "sinusoidal generator reaches ||theta|| > 1");
  }
}

Vector SinusoidalGenerator::theta(std::size_t t, std::span<const HistoryEntry>) const {
  const double a = omega_ * static_cast<double>(t);
  return std::cos(a) * u_ + std::sin(a) * v_;
}

std::string SinusoidalGenerator::describe() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", omega_);
  return std::string("sinusoidal(") + buf + ")" + describe_vector(u_) + describe_vector(v_);
}

FixedSequenceGenerator::FixedSequenceGenerator(std::vector<Vector> thetas) : thetas_(std::move(thetas)) {
  for (std::size_t i = 0; i < thetas_.size(); ++i) {
    check_theta_norm(thetas_[i], "theta row " + std::to_string(i + 1));
  }
}

Vector FixedSequenceGenerator::theta(std::size_t t, std::span<const HistoryEntry>) const {
  if (t == 0 || t > thetas_.size()) {
    throw Error(ErrorCode::HorizonExceeded, "theta sequence has no row for round " + std::to_string(t));
  }
  return thetas_[t - 1];
}

std::string FixedSequenceGenerator::describe() const {
  std::string out = "file";
  for (const auto& th : thetas_) out += describe_vector(th);
  return out;
}

FollowTheCrowdGenerator::FollowTheCrowdGenerator(const ArmSet& arms) : directions_(arms.matrix()) {
  for (Eigen::Index i = 0; i < directions_.rows(); ++i) {
    const double n = directions_.row(i).norm();
    if (n > 0.0) directions_.row(i) /= n;
  }
}

Vector FollowTheCrowdGenerator::theta(std::size_t, std::span<const HistoryEntry> history) const {
  std::vector<std::size_t> pulls(static_cast<std::size_t>(directions_.rows()), 0);
  for (const auto& h : history) ++pulls.at(h.arm);
  const auto it = std::max_element(pulls.begin(), pulls.end());
  return directions_.row(it - pulls.begin()).transpose();
}

const char* to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::FrontLoaded: return "front_loaded";
    case CorruptionKind::OnOptimalRounds: return "on_optimal_rounds";
    case CorruptionKind::RandomRounds: return "random_rounds";
  }
  return "unknown";
}

CorruptionKind corruption_from_string(const std::string& name) {
  if (name == "front_loaded") return CorruptionKind::FrontLoaded;
  if (name == "on_optimal_rounds") return CorruptionKind::OnOptimalRounds;
  if (name == "random_rounds") return CorruptionKind::RandomRounds;
  throw Error(ErrorCode::InvalidArgument, "unknown corruption kind '" + name + "'");
}

CorruptionSchedule CorruptionSchedule::build(const CorruptionSpec& spec, std::size_t horizon,
                                             CounterRng& rng) {
  if (!(spec.budget >= 0.0) || !std::isfinite(spec.budget)) {
    throw Error(ErrorCode::InvalidArgument, "corruption budget must be finite and >= 0");
  }
  if (!(spec.per_round_cap > 0.0 && spec.per_round_cap <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "per-round corruption cap must lie in (0, 2]");
  }
  if (spec.sign != 1.0 && spec.sign != -1.0) {
    throw Error(ErrorCode::InvalidArgument, "corruption sign must be +1 or -1");
  }
  const double capacity = static_cast<double>(horizon) * spec.per_round_cap;
  if (spec.budget > capacity * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InfeasibleBudget, "budget " + std::to_string(spec.budget) +
                                                 " exceeds T * cap = " + std::to_string(capacity));
  }

  CorruptionSchedule schedule;
  schedule.spec_ = spec;
  if (spec.kind == CorruptionKind::OnOptimalRounds) return schedule;

  schedule.planned_.assign(horizon, 0.0);
  const double cap = spec.per_round_cap;
  const auto full_rounds = static_cast<std::size_t>(std::floor(spec.budget / cap));
  double remainder = spec.budget - static_cast<double>(full_rounds) * cap;
  if (remainder < 1e-15) remainder = 0.0;
  const std::size_t rounds_used = std::min(horizon, full_rounds + (remainder > 0.0 ? 1 : 0));

  std::vector<std::size_t> rounds(rounds_used);
  if (spec.kind == CorruptionKind::FrontLoaded) {
    std::iota(rounds.begin(), rounds.end(), std::size_t{0});
  } else {
    // Partial Fisher-Yates over round indices.
    std::vector<std::size_t> pool(horizon);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < rounds_used; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (horizon - i));
      std::swap(pool[i], pool[j]);
      rounds[i] = pool[i];
    }
  }
  for (std::size_t i = 0; i < rounds_used; ++i) {
    const bool last_partial = (i == full_rounds);
    schedule.planned_[rounds[i]] = spec.sign * (last_partial ? remainder : cap);
  }
  return schedule;
}

double CorruptionSchedule::next(std::size_t t, bool pulled_optimal) {
  double c = 0.0;
  if (spec_.kind == CorruptionKind::OnOptimalRounds) {
    if (pulled_optimal) c = std::min(spec_.per_round_cap, std::max(0.0, spec_.budget - spent_));
  } else {
    if (t == 0 || t > planned_.size()) {
      throw Error(ErrorCode::HorizonExceeded, "no corruption planned for round " + std::to_string(t));
    }
    c = planned_[t - 1];
  }
  applied_.push_back(c);
  spent_ += std::abs(c);
  return c;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Stochastic: return "stochastic";
    case Variant::Adversarial: return "adversarial";
    case Variant::Corrupted: return "corrupted";
  }
  return "unknown";
}

void EnvironmentSpec::validate(std::size_t dim) const {
  if (horizon_T == 0) throw Error(ErrorCode::HorizonMissing, "environment horizon is required");
  if (variant == Variant::Adversarial) {
    if (!generator) throw Error(ErrorCode::InvalidArgument, "adversarial environment needs a theta generator");
    return;
  }
  if (static_cast<std::size_t>(theta.size()) != dim) {
    throw Error(ErrorCode::DimensionMismatch, "theta has length " + std::to_string(theta.size()) +
                                                  ", arms have dimension " + std::to_string(dim));
  }
  check_theta_norm(theta, "theta");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise sigma must be finite and >= 0");
  }
}

GapProfile gap_profile(const ArmSet& arms, const Vector& theta) {
  const Vector losses = arms.losses(theta);
  GapProfile profile;
  for (Eigen::Index i = 1; i < losses.size(); ++i) {
    if (losses[i] < losses[static_cast<Eigen::Index>(profile.optimal_index)]) {
      profile.optimal_index = static_cast<std::size_t>(i);
    }
  }
  const double best = losses[static_cast<Eigen::Index>(profile.optimal_index)];
  profile.gaps = losses.array() - best;
  profile.delta_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    if (static_cast<std::size_t>(i) == profile.optimal_index) continue;
    if (profile.gaps[i] <= 0.0) {
      profile.non_unique = true;
    } else {
      profile.delta_min = std::min(profile.delta_min, profile.gaps[i]);
    }
  }
  if (!std::isfinite(profile.delta_min)) profile.delta_min = 0.0;
  return profile;
}

double realized_regret_increment(const ArmSet& arms, std::size_t chosen, std::size_t optimal,
                                 const Vector& theta) {
  return (arms.arm(chosen) - arms.arm(optimal)).dot(theta);
}

double expected_regret_increment(const ArmSet& arms, const SimplexDistribution& p,
                                 std::size_t optimal, const Vector& theta) {
  const Vector losses = arms.losses(theta);
  return p.probs().dot(losses) - losses[static_cast<Eigen::Index>(optimal)];
}

Environment::Environment(EnvironmentSpec spec, const ArmSet& arms, std::uint64_t seed)
    : spec_(std::move(spec)), arms_(&arms) {
  spec_.validate(arms.dim());
  if (spec_.variant != Variant::Adversarial) {
    gaps_ = std::make_unique<GapProfile>(gap_profile(arms, spec_.theta));
  }
  if (spec_.variant == Variant::Corrupted) {
    CounterRng rng(seed, 0, Stream::kCorruption);
    corruption_ = std::make_unique<CorruptionSchedule>(
        CorruptionSchedule::build(spec_.corruption, spec_.horizon_T, rng));
  }
  history_.reserve(spec_.horizon_T);
}

const Vector& Environment::commit_theta(std::size_t t) {
  if (t > spec_.horizon_T) {
    throw Error(ErrorCode::HorizonExceeded, "round " + std::to_string(t) + " beyond horizon " +
                                                std::to_string(spec_.horizon_T));
  }
  if (t != history_.size() + 1) {
    throw Error(ErrorCode::InvalidArgument, "rounds must be committed in order");
  }
  if (spec_.variant == Variant::Adversarial) {
    theta_t_ = spec_.generator->theta(t, std::span<const HistoryEntry>(history_));
    if (static_cast<std::size_t>(theta_t_.size()) != arms_->dim()) {
      throw Error(ErrorCode::DimensionMismatch, "generated theta has wrong dimension");
    }
    check_theta_norm(theta_t_, "theta_" + std::to_string(t));
  } else {
    theta_t_ = spec_.theta;
  }
  committed_round_ = t;
  return theta_t_;
}

Feedback Environment::emit_loss(std::size_t t, std::size_t chosen, CounterRng& rng) {
  if (t > spec_.horizon_T) {
    throw Error(ErrorCode::HorizonExceeded, "round " + std::to_string(t) + " beyond horizon");
  }
  if (t != committed_round_ || history_.size() != t - 1) {
    throw Error(ErrorCode::InvalidArgument, "emit_loss needs a fresh commit_theta for round " + std::to_string(t));
  }
  if (chosen >= arms_->size()) throw Error(ErrorCode::InvalidArgument, "chosen arm out of range");

  Feedback fb{};
  fb.clean_mean_loss = arms_->arm(chosen).dot(theta_t_);
  double raw = fb.clean_mean_loss;
  if (spec_.variant != Variant::Adversarial) raw += draw_noise(spec_.noise, fb.clean_mean_loss, rng);
  if (corruption_) {
    fb.corruption_applied = corruption_->next(t, chosen == gaps_->optimal_index);
    raw += fb.corruption_applied;
  }
  fb.observed_loss = std::clamp(raw, -1.0, 1.0);
  fb.clipped = fb.observed_loss != raw;
  if (fb.clipped) ++clips_;
  history_.push_back(HistoryEntry{chosen, fb.observed_loss});
  return fb;
}

}  // namespace botw
