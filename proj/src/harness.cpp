#include "botw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "botw/error.hpp"

namespace botw {

const char* to_string(Granularity g) {
  return g == Granularity::EveryRound ? "every_round" : "power_of_two_checkpoints";
}

Granularity granularity_from_string(const std::string& name) {
  if (name == "every_round") return Granularity::EveryRound;
  if (name == "power_of_two_checkpoints" || name == "power_of_two") return Granularity::PowerOfTwo;
  throw Error(ErrorCode::InvalidArgument, "unknown record granularity '" + name + "'");
}

void RunConfig::validate() const {
  if (!arms) throw Error(ErrorCode::InvalidArgument, "run config has no arm set");
  if (horizon_T < 1) throw Error(ErrorCode::HorizonMissing, "horizon_T must be >= 1");
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  EnvironmentSpec spec = environment;
  spec.horizon_T = horizon_T;
  spec.validate(arms->dim());
}

namespace {

class Fnv1a {
 public:
  void add(const std::string& s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001B3ULL;
    }
    h_ ^= 0xFF;
    h_ *= 0x100000001B3ULL;
  }
  void add(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    add(std::string(buf));
  }
  void add(std::uint64_t v) { add(std::to_string(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace

std::uint64_t config_hash(const RunConfig& config) {
  Fnv1a h;
  if (config.arms) {
    const Matrix& x = config.arms->matrix();
    h.add(static_cast<std::uint64_t>(x.rows()));
    h.add(static_cast<std::uint64_t>(x.cols()));
    for (const auto& id : config.arms->ids()) h.add(id);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) h.add(x(i, j));
    }
  }
  const EnvironmentSpec& env = config.environment;
  h.add(std::string(to_string(env.variant)));
  for (Eigen::Index i = 0; i < env.theta.size(); ++i) h.add(env.theta[i]);
  h.add(static_cast<std::uint64_t>(env.noise.kind));
  h.add(env.noise.sigma);
  if (env.generator) h.add(env.generator->describe());
  if (env.variant == Variant::Corrupted) {
    h.add(std::string(to_string(env.corruption.kind)));
    h.add(env.corruption.budget);
    h.add(env.corruption.per_round_cap);
    h.add(env.corruption.sign);
  }
  h.add(std::string(to_string(config.policy)));
  h.add(static_cast<std::uint64_t>(config.horizon_T));
  h.add(static_cast<std::uint64_t>(config.repetitions));
  h.add(std::string(to_string(config.granularity)));
  h.add(config.design_tol);
  h.add(static_cast<std::uint64_t>(config.design_max_iter));
  return h.value();
}

// ---------------------------------------------------------------------------
// TraceChecker

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

bool InvariantReport::all_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* InvariantReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

bool exceeds(double lhs, double rhs) { return lhs > rhs + kTraceTol * std::max(1.0, std::abs(rhs)); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

TraceChecker::TraceChecker(TraceContext context)
    : ctx_(context), log_arms_(std::log(static_cast<double>(context.num_arms))) {
  if (context.num_arms < 2) throw Error(ErrorCode::InvalidArgument, "trace context needs num_arms >= 2");
}

void TraceChecker::fail(Running& r, std::size_t t, std::string detail) {
  if (r.status == CheckStatus::Fail) return;
  r.status = CheckStatus::Fail;
  r.first = t;
  r.detail = std::move(detail);
}

void TraceChecker::feed(const TraceRow& row) {
  const std::size_t t = row.t;
  const std::size_t expected_t = prev_ ? prev_->t + 1 : 1;
  ++rows_;
  if (t != expected_t) {
    fail(consecutive_, t, "expected round " + std::to_string(expected_t));
    gapped_ = true;
  }

  if (prev_) {
    const bool strict = ctx_.policy == PolicyKind::Ftrl && ctx_.c_const > 0.0;
    if (strict ? !(row.beta > prev_->beta) : row.beta < prev_->beta) {
      fail(beta_, t, "beta " + fmt(row.beta) + " after " + fmt(prev_->beta));
    }
  }

  if (ctx_.policy != PolicyKind::Uniform) {
    if (!(row.gamma > 0.0 && row.gamma <= 0.5)) fail(gamma_range_, t, "gamma " + fmt(row.gamma));
    if (prev_ && prev_->gamma < 0.5 && exceeds(row.gamma, prev_->gamma)) {
      fail(gamma_mono_, t, "gamma rose from " + fmt(prev_->gamma) + " to " + fmt(row.gamma));
    }
  }

  if (row.entropy_q < 0.0 || row.entropy_q > log_arms_ + 1e-12) {
    fail(entropy_range_, t, "H(q) = " + fmt(row.entropy_q));
  }

  // The running sums below are meaningless once a round is missing.
  if (gapped_) {
    if (std::isfinite(row.estimate_ratio) && row.estimate_ratio > 1.0 + kTraceTol) {
      fail(estimate_, t, "max |l_hat| / bound = " + fmt(row.estimate_ratio));
    }
    if (ctx_.gaps_known && prev_ && row.regret_expected < prev_->regret_expected - kTraceTol) {
      fail(regret_mono_, t, "expected regret fell from " + fmt(prev_->regret_expected));
    }
    prev_ = row;
    return;
  }

  // (beta_s - beta_{s-1}) H(q_s) summed over s <= t, against the entropy sum
  // through t.
  sum_entropy_ += row.entropy_q;
  if (ctx_.policy == PolicyKind::Ftrl && prev_) {
    sum_telescoping_ += (row.beta - prev_->beta) * row.entropy_q;
    const double rhs = 2.0 * ctx_.c_const * std::sqrt(log_arms_ * sum_entropy_);
    if (exceeds(sum_telescoping_, rhs)) {
      fail(telescoping_, t, "lhs " + fmt(sum_telescoping_) + " > rhs " + fmt(rhs));
    }
  }

  sum_selection_ += row.one_minus_qstar;
  {
    const double s = sum_selection_;
    const double rhs =
        s > 0.0 ? s * std::log(std::exp(1.0) * static_cast<double>(ctx_.num_arms) * static_cast<double>(t) / s)
                : 0.0;
    if (exceeds(sum_entropy_, rhs)) {
      fail(selection_, t, "sum H " + fmt(sum_entropy_) + " > " + fmt(rhs));
    }
  }

  if (ctx_.gaps_known && std::isfinite(row.gap_weighted_q)) {
    kernel_.evaluated = true;
    sum_kernel_ += (1.0 - row.gamma) * row.gap_weighted_q;
    const double rhs = 0.5 * ctx_.delta_min * sum_selection_;
    if (exceeds(rhs, sum_kernel_)) {
      fail(kernel_, t, "kernel " + fmt(sum_kernel_) + " < " + fmt(rhs));
    }
  }

  if (std::isfinite(row.estimate_ratio)) {
    estimate_.evaluated = true;
    if (row.estimate_ratio > 1.0 + kTraceTol) {
      fail(estimate_, t, "max |l_hat| / bound = " + fmt(row.estimate_ratio));
    }
  }

  if (ctx_.gaps_known && prev_ && row.regret_expected < prev_->regret_expected - kTraceTol) {
    fail(regret_mono_, t, "expected regret fell from " + fmt(prev_->regret_expected));
  }

  prev_ = row;
}

InvariantReport TraceChecker::report() const {
  InvariantReport out;
  auto add = [&](const char* name, const Running& r, bool applicable) {
    CheckResult c;
    c.name = name;
    if (!applicable || rows_ == 0) {
      c.status = CheckStatus::Skipped;
    } else {
      c.status = r.status;
      c.first_violation = r.first;
      c.detail = r.detail;
    }
    out.checks.push_back(std::move(c));
  };
  // Sum-based checks cannot be judged past a missing round.
  auto add_sum = [&](const char* name, const Running& r, bool applicable) {
    add(name, r, applicable);
    CheckResult& c = out.checks.back();
    if (gapped_ && c.status == CheckStatus::Pass) {
      c.status = CheckStatus::Skipped;
      c.detail = "trace skips rounds";
    }
  };
  const bool mixing = ctx_.policy != PolicyKind::Uniform;
  add("rounds_consecutive", consecutive_, true);
  add("beta_monotone", beta_, true);
  add("gamma_range", gamma_range_, mixing);
  add("gamma_nonincreasing", gamma_mono_, mixing);
  add("entropy_range", entropy_range_, true);
  add_sum("entropy_selection_bound", selection_, true);
  add_sum("telescoping_bound", telescoping_, ctx_.policy == PolicyKind::Ftrl);
  add_sum("self_bounding_kernel", kernel_, kernel_.evaluated);
  add("estimate_bound", estimate_, estimate_.evaluated);
  add("regret_nondecreasing", regret_mono_, ctx_.gaps_known);
  return out;
}

InvariantReport verify_trace_invariants(std::span<const TraceRow> rows, const TraceContext& context) {
  TraceChecker checker(context);
  for (const auto& r : rows) checker.feed(r);
  return checker.report();
}

// ---------------------------------------------------------------------------
// run_single

bool is_checkpoint(std::size_t t, std::size_t horizon, Granularity g) {
  if (g == Granularity::EveryRound || t == horizon) return true;
  return t > 0 && (t & (t - 1)) == 0;
}

namespace {

struct RoundRecord {
  double regret_expected;  // known-gap runs: accumulated directly
  double regret_realized;
  double learner_expected;  // cumulative <p_s, X theta_s>
  double learner_realized;
  double entropy;
  double beta;
  double gamma;
  double one_minus_qstar;
  double gap_weighted_q;
  double estimate_ratio;
  std::size_t clips;
};

std::size_t first_argmin(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return static_cast<std::size_t>(best);
}

}  // namespace

RegretTrace run_single(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  return run_single(config, frank_wolfe_design(*config.arms, config.design_tol, config.design_max_iter), seed);
}

RegretTrace run_single(const RunConfig& config, const DesignResult& design, std::uint64_t seed) {
  config.validate();
  const ArmSet& arms = *config.arms;
  const std::size_t horizon = config.horizon_T;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  EnvironmentSpec spec = config.environment;
  spec.horizon_T = horizon;
  Environment env(std::move(spec), arms, seed);
  Learner learner(config.policy, arms, design, horizon);

  const GapProfile* gaps = env.gaps();
  const bool gaps_known = gaps != nullptr;
  const auto n = static_cast<Eigen::Index>(arms.size());

  std::vector<RoundRecord> records;
  records.reserve(horizon);
  // Adversarial runs learn x* only after the last round; keep what is needed
  // to evaluate every round against it.
  Matrix q_history;
  std::vector<Vector> checkpoint_cum_arm;
  if (!gaps_known) q_history.resize(static_cast<Eigen::Index>(horizon), n);

  Vector cum_arm = Vector::Zero(n);
  double learner_expected = 0.0, learner_realized = 0.0;
  double regret_expected = 0.0, regret_realized = 0.0;
  std::size_t estimate_checks = 0;

  for (std::size_t t = 1; t <= horizon; ++t) {
    const Vector theta = env.commit_theta(t);
    CounterRng policy_rng(seed, t, Stream::kPolicy);
    const PolicyDecision decision = learner.decide(policy_rng);
    CounterRng noise_rng(seed, t, Stream::kNoise);
    const Feedback fb = env.emit_loss(t, decision.chosen_index, noise_rng);
    const LossEstimate est = learner.absorb(decision, fb.observed_loss);

    const Vector losses = arms.losses(theta);
    const double expected_loss = decision.p.probs().dot(losses);
    const double chosen_loss = losses[static_cast<Eigen::Index>(decision.chosen_index)];
    cum_arm += losses;
    learner_expected += expected_loss;
    learner_realized += chosen_loss;

    RoundRecord rec{};
    rec.entropy = decision.entropy_q;
    rec.beta = decision.beta;
    rec.gamma = decision.gamma;
    rec.clips = env.clip_count();
    rec.learner_expected = learner_expected;
    rec.learner_realized = learner_realized;
    rec.estimate_ratio = nan;
    rec.gap_weighted_q = nan;

    if (est.values.size() > 0) {
      const double bound = design.g_value / decision.gamma;
      rec.estimate_ratio = est.values.cwiseAbs().maxCoeff() / bound;
      ++estimate_checks;
      if (rec.estimate_ratio > 1.0 + kTraceTol) {
        throw Error(ErrorCode::InvariantViolation,
                    "round " + std::to_string(t) + ": max |l_hat| exceeds g(pi)/gamma by ratio " +
                        fmt(rec.estimate_ratio));
      }
    }

    if (gaps_known) {
      const auto star = static_cast<Eigen::Index>(gaps->optimal_index);
      regret_expected += expected_loss - losses[star];
      regret_realized += chosen_loss - losses[star];
      rec.regret_expected = regret_expected;
      rec.regret_realized = regret_realized;
      rec.one_minus_qstar = 1.0 - decision.q[gaps->optimal_index];
      rec.gap_weighted_q = decision.q.probs().dot(gaps->gaps);
    } else {
      q_history.row(static_cast<Eigen::Index>(t - 1)) = decision.q.probs().transpose();
      if (is_checkpoint(t, horizon, config.granularity)) checkpoint_cum_arm.push_back(cum_arm);
    }
    records.push_back(rec);
  }

  const std::size_t optimal = gaps_known ? gaps->optimal_index : first_argmin(cum_arm);

  RegretTrace trace;
  trace.seed = seed;
  trace.config_hash = config_hash(config);
  trace.g_pi = design.g_value;
  trace.optimal_index = optimal;
  trace.context.num_arms = arms.size();
  trace.context.c_const = learner.state().c_const;
  trace.context.policy = config.policy;
  trace.context.gaps_known = gaps_known;
  trace.context.delta_min = gaps_known ? gaps->delta_min : 0.0;
  trace.estimate_checks = estimate_checks;
  if (const auto* c = env.corruption()) {
    trace.corruption_spent = c->spent();
    trace.corruption = c->applied();
  }

  TraceChecker checker(trace.context);
  std::size_t checkpoint_index = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const RoundRecord& rec = records[t - 1];
    TraceRow row;
    row.t = t;
    row.entropy_q = rec.entropy;
    row.beta = rec.beta;
    row.gamma = rec.gamma;
    row.clips = rec.clips;
    row.gap_weighted_q = rec.gap_weighted_q;
    row.estimate_ratio = rec.estimate_ratio;
    const bool checkpoint = is_checkpoint(t, horizon, config.granularity);
    if (gaps_known) {
      row.regret_expected = rec.regret_expected;
      row.regret_realized = rec.regret_realized;
      row.one_minus_qstar = rec.one_minus_qstar;
    } else {
      row.one_minus_qstar = 1.0 - q_history(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(optimal));
      if (checkpoint) {
        const double star = checkpoint_cum_arm[checkpoint_index++][static_cast<Eigen::Index>(optimal)];
        row.regret_expected = rec.learner_expected - star;
        row.regret_realized = rec.learner_realized - star;
      } else {
        row.regret_expected = nan;
        row.regret_realized = nan;
      }
    }
    checker.feed(row);
    if (checkpoint) trace.rows.push_back(row);
  }
  trace.report = checker.report();
  return trace;
}

// ---------------------------------------------------------------------------
// Repetitions

std::size_t default_thread_count() {
  if (const char* env = std::getenv("BOTW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<AggregateRow> aggregate_traces(std::span<const RegretTrace> traces) {
  if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "no traces to aggregate");
  const std::size_t rows = traces.front().rows.size();
  for (const auto& tr : traces) {
    if (tr.rows.size() != rows) throw Error(ErrorCode::DimensionMismatch, "traces have different checkpoints");
  }
  std::vector<AggregateRow> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double mean_e = 0.0, m2_e = 0.0, mean_r = 0.0, m2_r = 0.0, mean_h = 0.0;
    std::size_t k = 0;
    for (const auto& tr : traces) {
      const TraceRow& row = tr.rows[i];
      if (row.t != traces.front().rows[i].t) {
        throw Error(ErrorCode::DimensionMismatch, "traces have different checkpoints");
      }
      ++k;
      const double kk = static_cast<double>(k);
      const double de = row.regret_expected - mean_e;
      mean_e += de / kk;
      m2_e += de * (row.regret_expected - mean_e);
      const double dr = row.regret_realized - mean_r;
      mean_r += dr / kk;
      m2_r += dr * (row.regret_realized - mean_r);
      mean_h += (row.entropy_q - mean_h) / kk;
    }
    const double denom = k > 1 ? static_cast<double>(k - 1) : 1.0;
    out[i].t = traces.front().rows[i].t;
    out[i].mean_expected = mean_e;
    out[i].std_expected = k > 1 ? std::sqrt(m2_e / denom) : 0.0;
    out[i].mean_realized = mean_r;
    out[i].std_realized = k > 1 ? std::sqrt(m2_r / denom) : 0.0;
    out[i].mean_entropy = mean_h;
  }
  return out;
}

RepetitionResult run_repetitions(const RunConfig& config, std::size_t threads) {
  config.validate();
  return run_repetitions(config, frank_wolfe_design(*config.arms, config.design_tol, config.design_max_iter),
                         threads);
}

RepetitionResult run_repetitions(const RunConfig& config, const DesignResult& design, std::size_t threads) {
  config.validate();
  const std::size_t reps = config.repetitions;
  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, reps);

  std::vector<std::optional<RegretTrace>> slots(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps) return;
      try {
        slots[rep] = run_single(config, design, config.base_seed + rep);
      } catch (...) {
        errors[rep] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RepetitionResult result;
  result.g_pi = design.g_value;
  result.traces.reserve(reps);
  for (auto& s : slots) result.traces.push_back(std::move(*s));
  result.aggregate = aggregate_traces(result.traces);
  return result;
}

// ---------------------------------------------------------------------------
// Sweeps

LogLogFit fit_loglog_slope(std::span<const double> horizons, std::span<const double> values) {
  if (horizons.empty()) throw Error(ErrorCode::InvalidArgument, "empty horizon grid");
  if (horizons.size() != values.size()) throw Error(ErrorCode::DimensionMismatch, "grid and values differ in length");
  if (horizons.size() < 2) throw Error(ErrorCode::InvalidArgument, "a slope needs at least two horizons");
  const std::size_t n = horizons.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(horizons[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizons must be positive");
    if (i > 0 && !(horizons[i] > horizons[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "horizon grid must be strictly increasing");
    }
    if (!(values[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveRegret, "value at T = " + fmt(horizons[i]) + " is " + fmt(values[i]) +
                                                    "; log-log fit needs positive values");
    }
    lx[i] = std::log(horizons[i]);
    ly[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss);
  return fit;
}

SweepSummary sweep_horizons(const RunConfig& config, std::span<const std::size_t> grid, std::size_t threads) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty horizon grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t T = grid[i];
    if (T == 0 || (T & (T - 1)) != 0) {
      throw Error(ErrorCode::InvalidArgument, "grid value " + std::to_string(T) + " is not a power of two");
    }
    if (i > 0 && T <= grid[i - 1]) throw Error(ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }
  RunConfig base = config;
  base.horizon_T = grid.front();
  base.validate();
  const DesignResult design = frank_wolfe_design(*base.arms, base.design_tol, base.design_max_iter);

  SweepSummary summary;
  summary.g_pi = design.g_value;
  std::vector<double> xs, ys;
  for (const std::size_t T : grid) {
    RunConfig cfg = base;
    cfg.horizon_T = T;
    const RepetitionResult res = run_repetitions(cfg, design, threads);
    const AggregateRow& last = res.aggregate.back();
    HorizonStats stats;
    stats.horizon = T;
    stats.mean_regret = last.mean_expected;
    stats.std_regret = last.std_expected;
    stats.mean_final_entropy = last.mean_entropy;
    for (const auto& tr : res.traces) {
      if (!tr.report.all_passed()) ++stats.invariant_failures;
    }
    summary.per_horizon.push_back(stats);
    xs.push_back(static_cast<double>(T));
    ys.push_back(stats.mean_regret);
  }
  if (xs.size() >= 2) summary.fit = fit_loglog_slope(xs, ys);
  return summary;
}

}  // namespace botw
