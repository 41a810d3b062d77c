#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "botw/geometry.hpp"
#include "botw/rng.hpp"

namespace botw {

// ---------------------------------------------------------------------------
// Noise

enum class NoiseKind { None, Uniform, Gaussian };

/// Zero-mean observation noise. Uniform(-sigma, sigma) is drawn as is (the
/// environment clips the result); Gaussian(0, sigma) is truncated
/// symmetrically to [-(1 - |mean|), 1 - |mean|] so the loss stays in [-1, 1]
/// without biasing it.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double sigma = 0.0;
};

double draw_noise(const NoiseSpec& spec, double clean_mean, CounterRng& rng);

// ---------------------------------------------------------------------------
// Adversaries

struct HistoryEntry {
  std::size_t arm;
  double loss;
};

/// Chooses theta_t from the history of rounds 1..t-1. It never sees x_t.
class ThetaGenerator {
 public:
  virtual ~ThetaGenerator() = default;
  virtual Vector theta(std::size_t t, std::span<const HistoryEntry> history) const = 0;
  virtual std::string name() const = 0;
  /// Name plus parameters, used for config digests.
  virtual std::string describe() const { return name(); }
};

/// theta_t = (-1)^t v.
class AlternatingGenerator final : public ThetaGenerator {
 public:
  explicit AlternatingGenerator(Vector v);
  Vector theta(std::size_t t, std::span<const HistoryEntry> history) const override;
  std::string name() const override { return "alternating"; }
  std::string describe() const override;

 private:
  Vector v_;
};

/// theta_t = cos(omega t) u + sin(omega t) v.
class SinusoidalGenerator final : public ThetaGenerator {
 public:
  SinusoidalGenerator(double omega, Vector u, Vector v);
  Vector theta(std::size_t t, std::span<const HistoryEntry> history) const override;
  std::string name() const override { return "sinusoidal"; }
  std::string describe() const override;

 private:
  double omega_;
  Vector u_;
  Vector v_;
};

/// theta_t read from a precomputed sequence (row t-1).
class FixedSequenceGenerator final : public ThetaGenerator {
 public:
  explicit FixedSequenceGenerator(std::vector<Vector> thetas);
  Vector theta(std::size_t t, std::span<const HistoryEntry> history) const override;
  std::string name() const override { return "file"; }
  std::string describe() const override;
  std::size_t length() const noexcept { return thetas_.size(); }

 private:
  std::vector<Vector> thetas_;
};

/// Points theta_t along the most-pulled arm so far (lowest index on ties,
/// arm 0 in round 1), giving that arm the largest loss.
class FollowTheCrowdGenerator final : public ThetaGenerator {
 public:
  explicit FollowTheCrowdGenerator(const ArmSet& arms);
  Vector theta(std::size_t t, std::span<const HistoryEntry> history) const override;
  std::string name() const override { return "follow_the_crowd"; }

 private:
  Matrix directions_;
};

// ---------------------------------------------------------------------------
// Corruption

enum class CorruptionKind { FrontLoaded, OnOptimalRounds, RandomRounds };

const char* to_string(CorruptionKind kind);
CorruptionKind corruption_from_string(const std::string& name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::FrontLoaded;
  double budget = 0.0;
  double per_round_cap = 0.5;
  /// +1 corrupts upward. Ignored by OnOptimalRounds, which always pushes the
  /// optimal arm's loss up.
  double sign = 1.0;
};

/// c_1..c_T with total |c_t| equal to the budget (OnOptimalRounds spends
/// lazily and may leave budget unspent).
class CorruptionSchedule {
 public:
  /// Throws InfeasibleBudget if budget > T * cap.
  static CorruptionSchedule build(const CorruptionSpec& spec, std::size_t horizon, CounterRng& rng);

  /// Corruption for round t given whether the pulled arm is x*. Advances the
  /// budget counter.
  double next(std::size_t t, bool pulled_optimal);

  /// Planned values for precomputed kinds; empty for OnOptimalRounds.
  const std::vector<double>& planned() const noexcept { return planned_; }
  /// Values applied so far, one per call to next().
  const std::vector<double>& applied() const noexcept { return applied_; }
  double spent() const noexcept { return spent_; }
  const CorruptionSpec& spec() const noexcept { return spec_; }

 private:
  CorruptionSpec spec_;
  std::vector<double> planned_;
  std::vector<double> applied_;
  double spent_ = 0.0;
};

// ---------------------------------------------------------------------------
// Environment

enum class Variant { Stochastic, Adversarial, Corrupted };

const char* to_string(Variant v);

struct EnvironmentSpec {
  Variant variant = Variant::Stochastic;
  Vector theta;  // stochastic / corrupted
  NoiseSpec noise;
  std::shared_ptr<const ThetaGenerator> generator;  // adversarial
  CorruptionSpec corruption;                        // corrupted
  std::size_t horizon_T = 0;

  /// Checks the norm bound on theta and field presence for the variant.
  void validate(std::size_t dim) const;
};

struct Feedback {
  double observed_loss;
  double clean_mean_loss;
  double corruption_applied;
  bool clipped;
};

struct GapProfile {
  std::size_t optimal_index = 0;
  Vector gaps;
  double delta_min = 0.0;
  bool non_unique = false;
};

/// x* = argmin <x, theta> (lowest index on ties, flagged non_unique),
/// gaps <x - x*, theta>, and the smallest positive gap.
GapProfile gap_profile(const ArmSet& arms, const Vector& theta);

/// <x_chosen - x*, theta_t>.
double realized_regret_increment(const ArmSet& arms, std::size_t chosen, std::size_t optimal,
                                 const Vector& theta);

/// sum_x p(x) <x - x*, theta_t>.
double expected_regret_increment(const ArmSet& arms, const SimplexDistribution& p,
                                 std::size_t optimal, const Vector& theta);

/// Single-run loss generator. Call commit_theta(t) before the learner picks
/// x_t, then emit_loss(t, x_t) once.
class Environment {
 public:
  Environment(EnvironmentSpec spec, const ArmSet& arms, std::uint64_t seed);

  /// Fixes theta_t from the history of rounds before t.
  const Vector& commit_theta(std::size_t t);

  /// Loss of the chosen arm for round t, clipped to [-1, 1].
  Feedback emit_loss(std::size_t t, std::size_t chosen, CounterRng& rng);

  const EnvironmentSpec& spec() const noexcept { return spec_; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  /// Present for the corrupted variant only.
  const CorruptionSchedule* corruption() const noexcept { return corruption_.get(); }
  /// x* of the clean theta (stochastic / corrupted only).
  const GapProfile* gaps() const noexcept { return gaps_.get(); }
  std::size_t clip_count() const noexcept { return clips_; }

 private:
  EnvironmentSpec spec_;
  const ArmSet* arms_;
  std::vector<HistoryEntry> history_;
  std::unique_ptr<CorruptionSchedule> corruption_;
  std::unique_ptr<GapProfile> gaps_;
  Vector theta_t_;
  std::size_t committed_round_ = 0;
  std::size_t clips_ = 0;
};

}  // namespace botw
