#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "botw/environment.hpp"
#include "botw/geometry.hpp"
#include "botw/policy.hpp"

namespace botw {

enum class Granularity { EveryRound, PowerOfTwo };

const char* to_string(Granularity g);
Granularity granularity_from_string(const std::string& name);

struct RunConfig {
  std::string arm_set_source;
  std::optional<ArmSet> arms;
  EnvironmentSpec environment;
  PolicyKind policy = PolicyKind::Ftrl;
  std::size_t horizon_T = 0;
  std::size_t repetitions = 1;
  std::uint64_t base_seed = 0;
  Granularity granularity = Granularity::PowerOfTwo;
  double design_tol = kDefaultDesignTol;
  int design_max_iter = kDefaultDesignMaxIter;
  std::string out_trace;
  std::string out_summary;

  void validate() const;
};

/// Stable 64-bit FNV-1a digest of every field that affects a run.
std::uint64_t config_hash(const RunConfig& config);

/// One recorded round. The last two fields are in-memory diagnostics that
/// the CSV format does not carry; they are NaN when unavailable.
struct TraceRow {
  std::size_t t = 0;
  double regret_expected = 0.0;
  double regret_realized = 0.0;
  double entropy_q = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double one_minus_qstar = 0.0;
  std::size_t clips = 0;
  /// sum_x q_t(x) Delta(x); needs a known gap profile.
  double gap_weighted_q = std::numeric_limits<double>::quiet_NaN();
  /// max_x |l_hat_t(x)| / (g(pi) / gamma_t); equals |l_hat|/beta_t for FTRL.
  double estimate_ratio = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Per-trace inequality checks

enum class CheckStatus { Pass, Fail, Skipped };

const char* to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::optional<std::size_t> first_violation;  // round index t
  std::string detail;
};

struct InvariantReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
};

/// What the checker needs to know beyond the rows themselves.
struct TraceContext {
  std::size_t num_arms = 0;
  double c_const = 0.0;
  PolicyKind policy = PolicyKind::Ftrl;
  /// Smallest positive gap; 0 when the gap profile is unknown (adversarial).
  double delta_min = 0.0;
  bool gaps_known = false;
};

inline constexpr double kTraceTol = 1e-9;

/// Streams rows of one trace (t = 1, 2, ...) and evaluates, for every
/// prefix: beta monotonicity, gamma range and monotonicity, entropy range,
/// the entropy / selection-count bound, the telescoping bound on
/// (beta_{t+1} - beta_t) H(q_{t+1}), the self-bounding kernel, the
/// |l_hat| <= beta bound, and monotone expected regret under known gaps.
/// After a missing round the sum-based checks stop and report skipped.
class TraceChecker {
 public:
  explicit TraceChecker(TraceContext context);

  void feed(const TraceRow& row);
  InvariantReport report() const;

 private:
  struct Running {
    CheckStatus status = CheckStatus::Pass;
    std::optional<std::size_t> first;
    std::string detail;
    bool evaluated = false;
  };

  void fail(Running& r, std::size_t t, std::string detail);

  TraceContext ctx_;
  double log_arms_;
  std::size_t rows_ = 0;
  std::optional<TraceRow> prev_;
  bool gapped_ = false;
  double sum_entropy_ = 0.0;
  double sum_selection_ = 0.0;
  double sum_telescoping_ = 0.0;
  double sum_kernel_ = 0.0;

  Running consecutive_, beta_, gamma_range_, gamma_mono_, entropy_range_, selection_, telescoping_, kernel_,
      estimate_, regret_mono_;
};

InvariantReport verify_trace_invariants(std::span<const TraceRow> rows, const TraceContext& context);

// ---------------------------------------------------------------------------
// Runs

struct RegretTrace {
  std::vector<TraceRow> rows;  // checkpoint rows only
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double g_pi = 0.0;
  std::size_t optimal_index = 0;
  TraceContext context;
  InvariantReport report;       // evaluated on every round, whatever the granularity
  std::size_t estimate_checks = 0;  // rounds whose loss estimate was bound-checked
  double corruption_spent = 0.0;
  std::vector<double> corruption;  // c_t per round; corrupted runs only
};

/// True for t = 1, 2, 4, ... and for t = T.
bool is_checkpoint(std::size_t t, std::size_t horizon, Granularity g);

/// Executes T rounds. Throws InvariantViolation naming the round if a loss
/// estimate breaks |l_hat| <= g(pi) / gamma_t.
RegretTrace run_single(const RunConfig& config, const DesignResult& design, std::uint64_t seed);
RegretTrace run_single(const RunConfig& config, std::uint64_t seed);

struct AggregateRow {
  std::size_t t = 0;
  double mean_expected = 0.0;
  double std_expected = 0.0;
  double mean_realized = 0.0;
  double std_realized = 0.0;
  double mean_entropy = 0.0;
};

struct RepetitionResult {
  std::vector<RegretTrace> traces;  // rep order
  std::vector<AggregateRow> aggregate;
  double g_pi = 0.0;
};

/// Worker count from BOTW_THREADS, else hardware concurrency; at least 1.
std::size_t default_thread_count();

/// Runs reps with seeds base_seed + rep. threads = 0 picks
/// default_thread_count(); results are merged in rep order either way.
RepetitionResult run_repetitions(const RunConfig& config, const DesignResult& design,
                                 std::size_t threads = 0);
RepetitionResult run_repetitions(const RunConfig& config, std::size_t threads = 0);

/// Welford mean / sample standard deviation per checkpoint, in rep order.
std::vector<AggregateRow> aggregate_traces(std::span<const RegretTrace> traces);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // sqrt of the residual sum of squares
};

/// Least-squares line through (ln T, ln value).
LogLogFit fit_loglog_slope(std::span<const double> horizons, std::span<const double> values);

struct HorizonStats {
  std::size_t horizon = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double mean_final_entropy = 0.0;
  std::size_t invariant_failures = 0;
};

struct SweepSummary {
  std::vector<HorizonStats> per_horizon;
  LogLogFit fit;
  double g_pi = 0.0;
};

/// One run_repetitions per T with a fresh schedule for each. The grid must be
/// non-empty, strictly increasing, and made of powers of two.
SweepSummary sweep_horizons(const RunConfig& config, std::span<const std::size_t> grid,
                            std::size_t threads = 0);

}  // namespace botw
