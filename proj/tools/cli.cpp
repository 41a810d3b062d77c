#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>

#include "botw/error.hpp"
#include "botw/harness.hpp"
#include "botw/io.hpp"

namespace botw::cli {

namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix:
    case ErrorCode::InvariantViolation:
    case ErrorCode::NonPositiveRegret:
      return kNumericalFailure;
    default:
      return kInputError;
  }
}

struct DesignArgs {
  std::string arms;
  double tol = kDefaultDesignTol;
  int max_iter = kDefaultDesignMaxIter;
  std::string out;
};

struct RunArgs {
  std::string config;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::string> granularity;
  std::optional<std::size_t> threads;
  std::string out_trace;
  std::string out_summary;
  std::string out_gaps;
  std::string out_corruption;
};

struct SweepArgs {
  std::string config;
  std::vector<std::size_t> grid;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::size_t> threads;
  std::string out;
};

struct VerifyArgs {
  std::string trace;
  std::string gaps;
};

void apply_overrides(RunConfig& cfg, const std::optional<std::size_t>& horizon, const std::optional<std::size_t>& reps,
                     const std::optional<std::uint64_t>& seed, const std::optional<std::string>& policy) {
  if (horizon) cfg.horizon_T = *horizon;
  if (reps) cfg.repetitions = *reps;
  if (seed) cfg.base_seed = *seed;
  if (policy) cfg.policy = policy_from_string(*policy);
}

DesignResult checked_design(const RunConfig& cfg, std::ostream& err) {
  DesignResult design = frank_wolfe_design(*cfg.arms, cfg.design_tol, cfg.design_max_iter);
  if (!design.converged) {
    err << "NotConverged: design reached g = " << io::format_double(design.g_value) << " after "
        << design.iterations << " iterations\n";
  }
  return design;
}

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
  const ArmSet arms = io::read_arm_set(a.arms);
  const DesignResult design = frank_wolfe_design(arms, a.tol, a.max_iter);
  io::write_text_file(a.out, io::design_to_json(design, arms).dump(2) + "\n");
  out << "g_value " << io::format_double(design.g_value) << " (d = " << arms.dim() << "), iterations "
      << design.iterations << '\n';
  if (!design.converged) {
    err << "NotConverged: g = " << io::format_double(design.g_value) << " exceeds d(1 + tol) after "
        << design.iterations << " iterations\n";
    return kNumericalFailure;
  }
  return kOk;
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = io::read_run_config(a.config);
  apply_overrides(cfg, a.horizon, a.reps, a.seed, a.policy);
  if (a.granularity) cfg.granularity = granularity_from_string(*a.granularity);
  if (!a.out_trace.empty()) cfg.out_trace = a.out_trace;
  if (!a.out_summary.empty()) cfg.out_summary = a.out_summary;
  if (cfg.out_trace.empty()) throw Error(ErrorCode::InvalidArgument, "no trace output path (--out-trace)");
  if (cfg.out_summary.empty()) throw Error(ErrorCode::InvalidArgument, "no summary output path (--out-summary)");
  cfg.validate();

  const DesignResult design = checked_design(cfg, err);
  if (!design.converged) return kNumericalFailure;
  const RepetitionResult result = run_repetitions(cfg, design, a.threads.value_or(0));

  io::write_text_file(cfg.out_trace, io::traces_to_csv(result.traces));
  const auto summary = io::summary_to_json(cfg, result);
  io::write_text_file(cfg.out_summary, summary.dump(2) + "\n");
  if (!a.out_gaps.empty()) io::write_text_file(a.out_gaps, summary["gap_profile"].dump(2) + "\n");
  if (!a.out_corruption.empty()) {
    if (cfg.environment.variant != Variant::Corrupted) {
      throw Error(ErrorCode::InvalidArgument, "--out-corruption needs a corrupted environment");
    }
    io::write_text_file(a.out_corruption, io::corruption_schedule_to_csv(result.traces.front().corruption));
  }

  const auto& last = result.aggregate.back();
  std::size_t failing = 0;
  for (const auto& tr : result.traces) failing += tr.report.all_passed() ? 0 : 1;
  out << "T " << cfg.horizon_T << ", reps " << cfg.repetitions << ": mean expected regret "
      << io::format_double(last.mean_expected) << " (std " << io::format_double(last.std_expected) << ")\n";
  out << "traces with failed checks: " << failing << '\n';
  return kOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = io::read_run_config(a.config);
  apply_overrides(cfg, std::nullopt, a.reps, a.seed, a.policy);
  if (a.grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty horizon grid");
  cfg.horizon_T = a.grid.front();
  cfg.validate();
  {
    const DesignResult design = checked_design(cfg, err);
    if (!design.converged) return kNumericalFailure;
  }
  const SweepSummary sweep = sweep_horizons(cfg, a.grid, a.threads.value_or(0));
  io::write_text_file(a.out, io::sweep_to_json(cfg, a.grid, sweep).dump(2) + "\n");
  for (const auto& h : sweep.per_horizon) {
    out << "T " << h.horizon << ": mean regret " << io::format_double(h.mean_regret) << " (std "
        << io::format_double(h.std_regret) << ")\n";
  }
  out << "slope " << io::format_double(sweep.fit.slope) << ", residual " << io::format_double(sweep.fit.residual)
      << '\n';
  return kOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& /*err*/) {
  const auto traces = io::parse_traces_csv(io::read_text_file(a.trace));
  const TraceContext ctx = io::trace_context_from_json(io::json::parse(io::read_text_file(a.gaps)));
  bool all_ok = true;
  bool gapped = false;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const InvariantReport report = verify_trace_invariants(traces[i], ctx);
    const CheckResult* consecutive = report.find("rounds_consecutive");
    gapped = gapped || (consecutive != nullptr && consecutive->status == CheckStatus::Fail);
    for (const auto& c : report.checks) {
      out << "trace " << i << ' ' << c.name << ": " << to_string(c.status);
      if (c.first_violation) out << " at t = " << *c.first_violation;
      if (!c.detail.empty()) out << " (" << c.detail << ')';
      out << '\n';
    }
    all_ok = all_ok && report.all_passed();
  }
  if (gapped) out << "note: the inequalities need every round; record with --granularity every_round\n";
  out << (all_ok ? "all checks passed" : "some checks failed") << " on " << traces.size() << " trace(s)\n";
  return all_ok ? kOk : kChecksFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear bandit simulator: G-optimal design, entropy-regularized FTRL runs, sweeps, trace checks", "botw"};
  app.require_subcommand(1);

  DesignArgs design;
  auto* design_cmd = app.add_subcommand("design", "Compute a G-optimal exploration design for an arm set");
  design_cmd->add_option("--arms", design.arms, "Arm-set file (CSV id,x1..xd or JSON)")->required();
  design_cmd->add_option("--tol", design.tol, "Stop once g <= d (1 + tol)");
  design_cmd->add_option("--max-iter", design.max_iter, "Iteration cap");
  design_cmd->add_option("--out", design.out, "Design JSON output")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run repetitions of one configuration");
  run_cmd->add_option("--config", run.config, "Run config JSON")->required();
  run_cmd->add_option("--horizon", run.horizon, "Override horizon_T");
  run_cmd->add_option("--reps", run.reps, "Override repetitions");
  run_cmd->add_option("--seed", run.seed, "Override base_seed");
  run_cmd->add_option("--policy", run.policy, "Override policy (ftrl, exp2, uniform)");
  run_cmd->add_option("--granularity", run.granularity, "every_round or power_of_two_checkpoints");
  run_cmd->add_option("--threads", run.threads, "Worker threads (default BOTW_THREADS or all cores)");
  run_cmd->add_option("--out-trace", run.out_trace, "Trace CSV output");
  run_cmd->add_option("--out-summary", run.out_summary, "Summary JSON output");
  run_cmd->add_option("--out-gaps", run.out_gaps, "Gap profile JSON output, for verify");
  run_cmd->add_option("--out-corruption", run.out_corruption, "Corruption schedule CSV of the first repetition");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a horizon sweep and fit the log-log regret slope");
  sweep_cmd->add_option("--config", sweep.config, "Run config JSON")->required();
  sweep_cmd->add_option("--grid", sweep.grid, "Comma-separated powers of two")->required()->delimiter(',');
  sweep_cmd->add_option("--reps", sweep.reps, "Override repetitions");
  sweep_cmd->add_option("--seed", sweep.seed, "Override base_seed");
  sweep_cmd->add_option("--policy", sweep.policy, "Override policy");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads");
  sweep_cmd->add_option("--out", sweep.out, "Sweep JSON output")->required();

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check per-round inequalities on an every-round trace");
  verify_cmd->add_option("--trace", verify.trace, "Trace CSV")->required();
  verify_cmd->add_option("--gaps", verify.gaps, "Gap profile JSON, or a run summary")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*design_cmd) return cmd_design(design, out, err);
    if (*run_cmd) return cmd_run(run, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*verify_cmd) return cmd_verify(verify, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "ParseError: " << e.what() << '\n';
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "IoError: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace botw::cli
