#include "botw/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "botw/error.hpp"

namespace botw::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvLine {
  std::size_t number;
  std::vector<std::string> fields;
};

// Non-blank lines, numbered from 1 as they appear in the text.
std::vector<CsvLine> csv_lines(const std::string& text) {
  std::vector<CsvLine> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    out.push_back({number, split_fields(line)});
  }
  return out;
}

std::string at_line(std::size_t n) { return "line " + std::to_string(n); }

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

void expect_header(const CsvLine& line, const std::vector<std::string>& expected) {
  if (line.fields != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    parse_fail(at_line(line.number) + ": expected header '" + want + "'");
  }
}

std::vector<std::string> numbered_header(const std::string& first, const std::string& prefix, std::size_t d) {
  std::vector<std::string> h{first};
  for (std::size_t i = 1; i <= d; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

}  // namespace

double parse_double(const std::string& token, const std::string& where) {
  const std::string s = trim(token);
  if (s.empty()) parse_fail(where + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) parse_fail(where + ": '" + s + "' is not a number");
  if (errno == ERANGE && std::isinf(v)) parse_fail(where + ": '" + s + "' overflows");
  return v;
}

std::size_t parse_count(const std::string& token, const std::string& where) {
  const std::string s = trim(token);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    parse_fail(where + ": '" + s + "' is not a non-negative integer");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) parse_fail(where + ": '" + s + "' overflows");
  return static_cast<std::size_t>(v);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// Arm sets

ArmSet parse_arm_set_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) parse_fail("arm set is empty");
  const auto& header = lines.front();
  if (header.fields.size() < 2 || header.fields[0] != "id") {
    parse_fail(at_line(header.number) + ": expected header 'id,x1,...,xd'");
  }
  const std::size_t d = header.fields.size() - 1;
  expect_header(header, numbered_header("id", "x", d));

  std::vector<std::vector<double>> raw;
  std::vector<std::string> ids;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.fields.size() != d + 1) {
      parse_fail(at_line(line.number) + ": expected " + std::to_string(d + 1) + " fields, found " +
                 std::to_string(line.fields.size()));
    }
    if (line.fields[0].empty()) parse_fail(at_line(line.number) + ": empty id");
    ids.push_back(line.fields[0]);
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = parse_double(line.fields[j + 1], at_line(line.number));
    raw.push_back(std::move(row));
  }
  return ArmSet::validate(raw, std::move(ids));
}

ArmSet parse_arm_set_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("arm set JSON: ") + e.what());
  }
  if (!doc.is_array()) parse_fail("arm set JSON must be an array of {id, vector}");
  std::vector<std::vector<double>> raw;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "arm " + std::to_string(i);
    if (!item.is_object() || !item.contains("vector") || !item["vector"].is_array()) {
      parse_fail(where + ": expected an object with a 'vector' array");
    }
    if (item.contains("id")) {
      const auto& id = item["id"];
      ids.push_back(id.is_string() ? id.get<std::string>() : id.dump());
    } else {
      ids.push_back(std::to_string(i));
    }
    std::vector<double> row;
    for (const auto& v : item["vector"]) {
      if (!v.is_number()) parse_fail(where + ": vector entries must be numbers");
      row.push_back(v.get<double>());
    }
    raw.push_back(std::move(row));
  }
  return ArmSet::validate(raw, std::move(ids));
}

ArmSet read_arm_set(const fs::path& path) {
  const std::string text = read_text_file(path);
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '[') return parse_arm_set_json(text);
  return parse_arm_set_csv(text);
}

std::string arm_set_to_csv(const ArmSet& arms) {
  std::string out;
  for (const auto& h : numbered_header("id", "x", arms.dim())) out += (out.empty() ? "" : ",") + h;
  out += '\n';
  for (std::size_t i = 0; i < arms.size(); ++i) {
    out += arms.ids()[i];
    for (std::size_t j = 0; j < arms.dim(); ++j) {
      out += ',' + format_double(arms.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// theta sequences and corruption schedules

std::vector<Vector> parse_theta_sequence(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) parse_fail("theta sequence is empty");
  const auto& header = lines.front();
  if (header.fields.size() < 2) parse_fail(at_line(header.number) + ": expected header 't,theta1,...,thetad'");
  const std::size_t d = header.fields.size() - 1;
  expect_header(header, numbered_header("t", "theta", d));
  std::vector<Vector> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.fields.size() != d + 1) parse_fail(at_line(line.number) + ": wrong field count");
    const std::size_t t = parse_count(line.fields[0], at_line(line.number));
    if (t != out.size() + 1) {
      parse_fail(at_line(line.number) + ": expected t = " + std::to_string(out.size() + 1));
    }
    Vector theta(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      theta[static_cast<Eigen::Index>(j)] = parse_double(line.fields[j + 1], at_line(line.number));
    }
    out.push_back(std::move(theta));
  }
  return out;
}

std::string theta_sequence_to_csv(std::span<const Vector> thetas) {
  const std::size_t d = thetas.empty() ? 0 : static_cast<std::size_t>(thetas.front().size());
  std::string out;
  for (const auto& h : numbered_header("t", "theta", d)) out += (out.empty() ? "" : ",") + h;
  out += '\n';
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    out += std::to_string(t + 1);
    for (Eigen::Index j = 0; j < thetas[t].size(); ++j) out += ',' + format_double(thetas[t][j]);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_corruption_schedule(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) parse_fail("corruption schedule is empty");
  expect_header(lines.front(), {"t", "c"});
  std::vector<double> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.fields.size() != 2) parse_fail(at_line(line.number) + ": expected 2 fields");
    const std::size_t t = parse_count(line.fields[0], at_line(line.number));
    if (t != out.size() + 1) {
      parse_fail(at_line(line.number) + ": expected t = " + std::to_string(out.size() + 1));
    }
    out.push_back(parse_double(line.fields[1], at_line(line.number)));
  }
  return out;
}

std::string corruption_schedule_to_csv(std::span<const double> values) {
  std::string out = "t,c\n";
  for (std::size_t t = 0; t < values.size(); ++t) {
    out += std::to_string(t + 1) + ',' + format_double(values[t]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traces

void write_trace_rows(std::ostream& out, std::span<const TraceRow> rows) {
  for (const auto& r : rows) {
    out << r.t << ',' << format_double(r.regret_expected) << ',' << format_double(r.regret_realized) << ','
        << format_double(r.entropy_q) << ',' << format_double(r.beta) << ',' << format_double(r.gamma) << ','
        << format_double(r.one_minus_qstar) << ',' << r.clips << '\n';
  }
}

std::string traces_to_csv(std::span<const RegretTrace> traces) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& tr : traces) write_trace_rows(out, tr.rows);
  return out.str();
}

std::vector<std::vector<TraceRow>> parse_traces_csv(const std::string& text) {
  const auto lines = csv_lines(text);
  if (lines.empty()) parse_fail("trace is empty");
  expect_header(lines.front(), split_fields(kTraceHeader));
  std::vector<std::vector<TraceRow>> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const std::string where = at_line(line.number);
    if (line.fields.size() != 8) {
      parse_fail(where + ": expected 8 fields, found " + std::to_string(line.fields.size()));
    }
    TraceRow r;
    r.t = parse_count(line.fields[0], where);
    if (r.t == 0) parse_fail(where + ": t must be >= 1");
    r.regret_expected = parse_double(line.fields[1], where);
    r.regret_realized = parse_double(line.fields[2], where);
    r.entropy_q = parse_double(line.fields[3], where);
    r.beta = parse_double(line.fields[4], where);
    r.gamma = parse_double(line.fields[5], where);
    r.one_minus_qstar = parse_double(line.fields[6], where);
    r.clips = parse_count(line.fields[7], where);
    if (out.empty() || r.t <= out.back().back().t) out.emplace_back();
    out.back().push_back(r);
  }
  if (out.empty()) parse_fail("trace has no rows");
  return out;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

json design_to_json(const DesignResult& design, const ArmSet& arms) {
  json weights = json::object();
  for (std::size_t i = 0; i < arms.size(); ++i) weights[arms.ids()[i]] = design.pi[i];
  return json{{"weights", weights},
              {"g_value", design.g_value},
              {"iterations", design.iterations},
              {"converged", design.converged}};
}

json trace_context_to_json(const TraceContext& ctx, std::size_t optimal_index, const GapProfile* gaps) {
  json doc{{"regime", ctx.gaps_known ? "known_gaps" : "adversarial"},
           {"policy", to_string(ctx.policy)},
           {"num_arms", ctx.num_arms},
           {"c_const", ctx.c_const},
           {"optimal_index", optimal_index},
           {"delta_min", ctx.delta_min}};
  doc["gaps"] = gaps ? vector_json(gaps->gaps) : json::array();
  doc["non_unique"] = gaps ? gaps->non_unique : false;
  return doc;
}

TraceContext trace_context_from_json(const json& input) {
  const json& doc = input.contains("gap_profile") ? input["gap_profile"] : input;
  auto need = [&](const char* key) -> const json& {
    if (!doc.contains(key)) parse_fail(std::string("gap profile: missing field '") + key + "'");
    return doc[key];
  };
  TraceContext ctx;
  try {
    ctx.num_arms = need("num_arms").get<std::size_t>();
    ctx.c_const = need("c_const").get<double>();
    ctx.policy = policy_from_string(need("policy").get<std::string>());
    ctx.delta_min = need("delta_min").get<double>();
    const std::string regime = need("regime").get<std::string>();
    if (regime != "known_gaps" && regime != "adversarial") parse_fail("gap profile: unknown regime '" + regime + "'");
    ctx.gaps_known = regime == "known_gaps";
  } catch (const json::exception& e) {
    parse_fail(std::string("gap profile: ") + e.what());
  }
  if (ctx.num_arms < 2) parse_fail("gap profile: num_arms must be >= 2");
  return ctx;
}

json report_to_json(const InvariantReport& report) {
  json out = json::array();
  for (const auto& c : report.checks) {
    json item{{"name", c.name}, {"status", to_string(c.status)}};
    if (c.first_violation) item["first_violation"] = *c.first_violation;
    if (!c.detail.empty()) item["detail"] = c.detail;
    out.push_back(std::move(item));
  }
  return out;
}

namespace {

json noise_json(const NoiseSpec& n) {
  const char* kind = n.kind == NoiseKind::None ? "none" : n.kind == NoiseKind::Uniform ? "uniform" : "gaussian";
  return json{{"kind", kind}, {"sigma", n.sigma}};
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

json config_to_json(const RunConfig& config) {
  json env{{"variant", to_string(config.environment.variant)}};
  if (config.environment.theta.size() > 0) env["theta"] = vector_json(config.environment.theta);
  env["noise"] = noise_json(config.environment.noise);
  if (config.environment.generator) env["generator"] = config.environment.generator->describe();
  if (config.environment.variant == Variant::Corrupted) {
    const auto& c = config.environment.corruption;
    env["corruption"] = json{{"kind", to_string(c.kind)},
                             {"budget", c.budget},
                             {"per_round_cap", c.per_round_cap},
                             {"sign", c.sign}};
  }
  json doc{{"arm_set_source", config.arm_set_source},
           {"num_arms", config.arms ? config.arms->size() : 0},
           {"dim", config.arms ? config.arms->dim() : 0},
           {"environment", env},
           {"policy", to_string(config.policy)},
           {"horizon_T", config.horizon_T},
           {"repetitions", config.repetitions},
           {"base_seed", config.base_seed},
           {"record_granularity", to_string(config.granularity)},
           {"design_tol", config.design_tol},
           {"design_max_iter", config.design_max_iter}};
  doc["config_hash"] = hex64(config_hash(config));
  return doc;
}

json summary_to_json(const RunConfig& config, const RepetitionResult& result) {
  json doc{{"config", config_to_json(config)}, {"g_pi", result.g_pi}};
  json agg = json::array();
  for (const auto& a : result.aggregate) {
    agg.push_back(json{{"t", a.t},
                       {"mean_regret_expected", a.mean_expected},
                       {"std_regret_expected", a.std_expected},
                       {"mean_regret_realized", a.mean_realized},
                       {"std_regret_realized", a.std_realized},
                       {"mean_entropy_q", a.mean_entropy}});
  }
  doc["aggregate"] = std::move(agg);

  json reps = json::array();
  std::size_t failing = 0;
  for (const auto& tr : result.traces) {
    const bool ok = tr.report.all_passed();
    if (!ok) ++failing;
    json item{{"seed", tr.seed},
              {"optimal_index", tr.optimal_index},
              {"final_regret_expected", tr.rows.empty() ? 0.0 : tr.rows.back().regret_expected},
              {"final_regret_realized", tr.rows.empty() ? 0.0 : tr.rows.back().regret_realized},
              {"estimate_checks", tr.estimate_checks},
              {"invariants_passed", ok}};
    if (config.environment.variant == Variant::Corrupted) item["corruption_spent"] = tr.corruption_spent;
    if (!ok) item["invariants"] = report_to_json(tr.report);
    reps.push_back(std::move(item));
  }
  doc["repetitions"] = std::move(reps);
  doc["invariant_digest"] = json{{"traces", result.traces.size()}, {"failing_traces", failing}};
  if (!result.traces.empty()) {
    const auto& first = result.traces.front();
    GapProfile gp;
    const GapProfile* gaps = nullptr;
    if (first.context.gaps_known) {
      gp = gap_profile(*config.arms, config.environment.theta);
      gaps = &gp;
    }
    doc["gap_profile"] = trace_context_to_json(first.context, first.optimal_index, gaps);
  }
  return doc;
}

json sweep_to_json(const RunConfig& config, std::span<const std::size_t> grid, const SweepSummary& sweep) {
  json rows = json::array();
  for (const auto& h : sweep.per_horizon) {
    rows.push_back(json{{"horizon_T", h.horizon},
                        {"mean_regret", h.mean_regret},
                        {"std_regret", h.std_regret},
                        {"mean_final_entropy", h.mean_final_entropy},
                        {"invariant_failures", h.invariant_failures}});
  }
  json g = json::array();
  for (auto T : grid) g.push_back(T);
  return json{{"config", config_to_json(config)},
              {"grid", g},
              {"g_pi", sweep.g_pi},
              {"per_horizon", rows},
              {"slope", sweep.fit.slope},
              {"intercept", sweep.fit.intercept},
              {"residual", sweep.fit.residual}};
}

// ---------------------------------------------------------------------------
// Run configs

namespace {

class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) parse_fail(name("") + " must be an object");
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_[key].is_null(); }
  std::string name(const char* key) const {
    if (path_.empty()) return key;
    return *key ? path_ + "." + key : path_;
  }
  const json& get(const char* key) const {
    if (!has(key)) parse_fail("config: missing required field '" + name(key) + "'");
    return obj_[key];
  }
  double number(const char* key) const {
    const json& v = get(key);
    if (!v.is_number()) parse_fail("config: field '" + name(key) + "' must be a number");
    return v.get<double>();
  }
  std::uint64_t count(const char* key) const {
    const json& v = get(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      parse_fail("config: field '" + name(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::string text(const char* key) const {
    const json& v = get(key);
    if (!v.is_string()) parse_fail("config: field '" + name(key) + "' must be a string");
    return v.get<std::string>();
  }
  Vector vector(const char* key) const {
    const json& v = get(key);
    if (!v.is_array() || v.empty()) parse_fail("config: field '" + name(key) + "' must be a non-empty array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) parse_fail("config: field '" + name(key) + "' must hold numbers");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }
  Fields child(const char* key) const { return Fields(get(key), name(key)); }

 private:
  const json& obj_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

NoiseSpec parse_noise(const Fields& f) {
  NoiseSpec n;
  const std::string kind = f.text("kind");
  if (kind == "none") {
    n.kind = NoiseKind::None;
  } else if (kind == "uniform") {
    n.kind = NoiseKind::Uniform;
  } else if (kind == "gaussian") {
    n.kind = NoiseKind::Gaussian;
  } else {
    parse_fail("config: field '" + f.name("kind") + "' must be none, uniform or gaussian");
  }
  if (n.kind != NoiseKind::None) n.sigma = f.number("sigma");
  return n;
}

std::shared_ptr<const ThetaGenerator> parse_generator(const Fields& f, const ArmSet& arms,
                                                      const fs::path& base_dir) {
  const std::string kind = f.text("kind");
  if (kind == "alternating") return std::make_shared<AlternatingGenerator>(f.vector("v"));
  if (kind == "sinusoidal") {
    return std::make_shared<SinusoidalGenerator>(f.number("omega"), f.vector("u"), f.vector("v"));
  }
  if (kind == "file") {
    const fs::path path = resolve(base_dir, f.text("path"));
    return std::make_shared<FixedSequenceGenerator>(parse_theta_sequence(read_text_file(path)));
  }
  if (kind == "follow_the_crowd") return std::make_shared<FollowTheCrowdGenerator>(arms);
  parse_fail("config: field '" + f.name("kind") +
             "' must be alternating, sinusoidal, file or follow_the_crowd");
}

CorruptionSpec parse_corruption(const Fields& f) {
  CorruptionSpec c;
  try {
    c.kind = corruption_from_string(f.text("kind"));
  } catch (const Error&) {
    parse_fail("config: field '" + f.name("kind") + "' must be front_loaded, on_optimal_rounds or random_rounds");
  }
  c.budget = f.number("budget");
  if (f.has("per_round_cap")) c.per_round_cap = f.number("per_round_cap");
  if (f.has("sign")) c.sign = f.number("sign");
  return c;
}

}  // namespace

RunConfig config_from_json(const json& doc, const fs::path& base_dir) {
  const Fields top(doc, "");
  RunConfig cfg;

  if (top.has("arms")) {
    cfg.arm_set_source = "inline";
    cfg.arms = parse_arm_set_json(top.get("arms").dump());
  } else {
    cfg.arm_set_source = top.text("arm_set_source");
    cfg.arms = read_arm_set(resolve(base_dir, cfg.arm_set_source));
  }

  const Fields env = top.child("environment");
  const std::string variant = env.text("variant");
  if (variant == "stochastic") {
    cfg.environment.variant = Variant::Stochastic;
  } else if (variant == "adversarial") {
    cfg.environment.variant = Variant::Adversarial;
  } else if (variant == "corrupted") {
    cfg.environment.variant = Variant::Corrupted;
  } else {
    parse_fail("config: field 'environment.variant' must be stochastic, adversarial or corrupted");
  }
  if (cfg.environment.variant == Variant::Adversarial) {
    cfg.environment.generator = parse_generator(env.child("generator"), *cfg.arms, base_dir);
  } else {
    cfg.environment.theta = env.vector("theta");
    if (env.has("noise")) cfg.environment.noise = parse_noise(env.child("noise"));
  }
  if (cfg.environment.variant == Variant::Corrupted) {
    cfg.environment.corruption = parse_corruption(env.child("corruption"));
  }

  cfg.policy = top.has("policy") ? policy_from_string(top.text("policy")) : PolicyKind::Ftrl;
  cfg.horizon_T = top.count("horizon_T");
  if (top.has("repetitions")) cfg.repetitions = top.count("repetitions");
  if (top.has("base_seed")) cfg.base_seed = top.count("base_seed");
  if (top.has("record_granularity")) cfg.granularity = granularity_from_string(top.text("record_granularity"));
  if (top.has("design_tol")) cfg.design_tol = top.number("design_tol");
  if (top.has("design_max_iter")) cfg.design_max_iter = static_cast<int>(top.count("design_max_iter"));
  if (top.has("output")) {
    const Fields out = top.child("output");
    if (out.has("trace")) cfg.out_trace = resolve(base_dir, out.text("trace")).string();
    if (out.has("summary")) cfg.out_summary = resolve(base_dir, out.text("summary")).string();
  }
  return cfg;
}

RunConfig read_run_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    parse_fail("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

}  // namespace botw::io
