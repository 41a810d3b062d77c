#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "botw/environment.hpp"
#include "botw/geometry.hpp"
#include "botw/harness.hpp"

namespace botw::io {

using json = nlohmann::ordered_json;

/// %.17g, so a value read back is bit-identical.
std::string format_double(double v);

/// Strict decimal parse of the whole token. Throws ParseError with `where`.
double parse_double(const std::string& token, const std::string& where);
std::size_t parse_count(const std::string& token, const std::string& where);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Arm sets: CSV `id,x1,...,xd`, or a JSON array of {"id", "vector"}.
ArmSet parse_arm_set_csv(const std::string& text);
ArmSet parse_arm_set_json(const std::string& text);
/// Picks the format from the first non-blank character.
ArmSet read_arm_set(const std::filesystem::path& path);
std::string arm_set_to_csv(const ArmSet& arms);

// theta sequences: CSV `t,theta1,...,thetad` with t = 1, 2, ...
std::vector<Vector> parse_theta_sequence(const std::string& text);
std::string theta_sequence_to_csv(std::span<const Vector> thetas);

// Corruption schedules: CSV `t,c`.
std::vector<double> parse_corruption_schedule(const std::string& text);
std::string corruption_schedule_to_csv(std::span<const double> values);

// Traces: CSV `t,regret_expected,regret_realized,entropy_q,beta,gamma,one_minus_qstar,clips`.
// Several traces are concatenated; a new one starts wherever t fails to increase.
inline constexpr const char* kTraceHeader =
    "t,regret_expected,regret_realized,entropy_q,beta,gamma,one_minus_qstar,clips";
void write_trace_rows(std::ostream& out, std::span<const TraceRow> rows);
std::string traces_to_csv(std::span<const RegretTrace> traces);
std::vector<std::vector<TraceRow>> parse_traces_csv(const std::string& text);

json design_to_json(const DesignResult& design, const ArmSet& arms);

/// Gap profile plus what the trace checker needs.
json trace_context_to_json(const TraceContext& ctx, std::size_t optimal_index, const GapProfile* gaps);
/// Accepts the object above or a summary document carrying it under "gap_profile".
TraceContext trace_context_from_json(const json& doc);

json report_to_json(const InvariantReport& report);
json config_to_json(const RunConfig& config);
json summary_to_json(const RunConfig& config, const RepetitionResult& result);
json sweep_to_json(const RunConfig& config, std::span<const std::size_t> grid, const SweepSummary& sweep);

/// Builds a RunConfig from a JSON document. Relative file references resolve
/// against base_dir. Missing or malformed fields throw ParseError naming the
/// field path, e.g. "environment.theta".
RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir);
RunConfig read_run_config(const std::filesystem::path& path);

}  // namespace botw::io
