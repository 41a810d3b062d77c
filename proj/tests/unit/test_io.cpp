#include <doctest.h>

#include <cmath>
#include <random>

#include "botw/error.hpp"
#include "botw/io.hpp"
#include "fixtures.hpp"

using namespace botw;

namespace {

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an error");
  return "";
}

}  // namespace

TEST_CASE("doubles survive a text round trip bit for bit") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(gen) * std::pow(10.0, double(i % 30) - 15.0);
    CHECK(io::parse_double(io::format_double(v), "x") == v);
  }
  CHECK(error_text([] { io::parse_double("1.5x", "line 3"); }).find("line 3") != std::string::npos);
  CHECK_THROWS_AS(io::parse_count("-2", "x"), Error);
}

TEST_CASE("arm set files") {
  std::mt19937_64 gen(2);
  const ArmSet arms = ArmSet::validate(fixtures::random_ball(7, 3, gen));
  const std::string csv = io::arm_set_to_csv(arms);
  const ArmSet back = io::parse_arm_set_csv(csv);
  CHECK(back.ids() == arms.ids());
  CHECK((back.matrix().array() == arms.matrix().array()).all());

  const ArmSet js = io::parse_arm_set_json(R"([{"id": "a", "vector": [1, 0]}, {"id": "b", "vector": [0, 1]}])");
  CHECK(js.ids() == std::vector<std::string>{"a", "b"});

  const std::string bad = "id,x1,x2\na,1,0\nb,0,oops\n";
  const std::string msg = error_text([&] { io::parse_arm_set_csv(bad); });
  CHECK(msg.find("ParseError") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);

  CHECK(error_text([] { io::parse_arm_set_csv("id,x1,x2\na,1,0\nb,0.5,0\n"); }).find("RankDeficient") !=
        std::string::npos);
  CHECK(error_text([] { io::parse_arm_set_csv("id,x1,x2\na,1,0\nb,0,1,2\n"); }).find("line 3") !=
        std::string::npos);
  CHECK(error_text([] { io::parse_arm_set_csv("name,x1\na,1\n"); }).find("line 1") != std::string::npos);

  const auto dir = fixtures::scratch_dir("io_arms");
  io::write_text_file(dir / "arms.csv", csv);
  io::write_text_file(dir / "arms.json", R"([{"id": "a", "vector": [1, 0]}, {"id": "b", "vector": [0, 1]}])");
  CHECK(io::read_arm_set(dir / "arms.csv").size() == 7);
  CHECK(io::read_arm_set(dir / "arms.json").size() == 2);
  CHECK(error_text([&] { io::read_arm_set(dir / "missing.csv"); }).find("IoError") != std::string::npos);
}

TEST_CASE("theta sequences and corruption schedules") {
  std::vector<Vector> thetas;
  std::mt19937_64 gen(3);
  for (int i = 0; i < 20; ++i) thetas.push_back(fixtures::random_unit_ball_vector(3, gen));
  const auto back = io::parse_theta_sequence(io::theta_sequence_to_csv(thetas));
  REQUIRE(back.size() == thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) CHECK((back[i].array() == thetas[i].array()).all());
  CHECK(error_text([] { io::parse_theta_sequence("t,theta1\n1,0.1\n3,0.2\n"); }).find("line 3") !=
        std::string::npos);

  const std::vector<double> cs{0.5, 0.5, 0.125, 0.0, -0.3};
  CHECK(io::parse_corruption_schedule(io::corruption_schedule_to_csv(cs)) == cs);
  CHECK_THROWS_AS(io::parse_corruption_schedule("t,c\n1\n"), Error);
}

TEST_CASE("trace CSV round trip") {
  RunConfig cfg = fixtures::stochastic_config(100, 3, 7);
  cfg.granularity = Granularity::EveryRound;
  const RepetitionResult res = run_repetitions(cfg, 1);
  const std::string csv = io::traces_to_csv(res.traces);
  CHECK(csv.rfind(std::string(io::kTraceHeader) + "\n", 0) == 0);
  const auto parsed = io::parse_traces_csv(csv);
  REQUIRE(parsed.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    REQUIRE(parsed[r].size() == 100);
    for (std::size_t i = 0; i < 100; ++i) {
      const TraceRow& a = res.traces[r].rows[i];
      const TraceRow& b = parsed[r][i];
      CHECK(a.t == b.t);
      CHECK(a.regret_expected == b.regret_expected);
      CHECK(a.regret_realized == b.regret_realized);
      CHECK(a.entropy_q == b.entropy_q);
      CHECK(a.beta == b.beta);
      CHECK(a.gamma == b.gamma);
      CHECK(a.one_minus_qstar == b.one_minus_qstar);
      CHECK(a.clips == b.clips);
    }
  }
  std::vector<RegretTrace> again(3);
  for (std::size_t r = 0; r < 3; ++r) again[r].rows = parsed[r];
  CHECK(io::traces_to_csv(again) == csv);

  CHECK(error_text([] { io::parse_traces_csv("t,beta\n1,2\n"); }).find("line 1") != std::string::npos);
  CHECK(error_text([&] { io::parse_traces_csv(std::string(io::kTraceHeader) + "\n1,0,0,0,1,0.5,0\n"); })
            .find("line 2") != std::string::npos);
}

TEST_CASE("gap profile documents") {
  const RunConfig cfg = fixtures::stochastic_config(64, 2, 1);
  const RepetitionResult res = run_repetitions(cfg, 1);
  const auto summary = io::summary_to_json(cfg, res);
  const TraceContext a = io::trace_context_from_json(summary);
  const TraceContext b = io::trace_context_from_json(summary["gap_profile"]);
  CHECK(a.num_arms == 5);
  CHECK(a.gaps_known);
  CHECK(a.delta_min == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(a.c_const == res.traces[0].context.c_const);
  CHECK(b.c_const == a.c_const);
  CHECK(summary["gap_profile"]["optimal_index"] == 0);
  CHECK(summary["repetitions"].size() == 2);
  CHECK_THROWS_AS(io::trace_context_from_json(io::json::object()), Error);
}

TEST_CASE("run config documents") {
  const auto dir = fixtures::scratch_dir("io_config");
  io::write_text_file(dir / "arms.csv", "id,x1,x2\ne1,1,0\ne2,0,1\nm,-0.6,0.8\n");
  io::write_text_file(dir / "thetas.csv", "t,theta1,theta2\n1,0.1,0.2\n2,-0.1,0.3\n");

  auto doc = io::json::parse(R"({
    "arm_set_source": "arms.csv",
    "environment": {"variant": "corrupted", "theta": [-0.5, -0.3],
                    "noise": {"kind": "gaussian", "sigma": 0.1},
                    "corruption": {"kind": "random_rounds", "budget": 3, "per_round_cap": 0.5}},
    "policy": "exp2", "horizon_T": 64, "repetitions": 4, "base_seed": 9,
    "record_granularity": "every_round",
    "output": {"trace": "out/t.csv", "summary": "out/s.json"}
  })");
  const RunConfig cfg = io::config_from_json(doc, dir);
  CHECK(cfg.arms->size() == 3);
  CHECK(cfg.environment.variant == Variant::Corrupted);
  CHECK(cfg.environment.noise.kind == NoiseKind::Gaussian);
  CHECK(cfg.environment.corruption.kind == CorruptionKind::RandomRounds);
  CHECK(cfg.policy == PolicyKind::Exp2);
  CHECK(cfg.repetitions == 4);
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.granularity == Granularity::EveryRound);
  CHECK(cfg.out_trace == (dir / "out/t.csv").string());

  auto missing = doc;
  missing["environment"].erase("theta");
  CHECK(error_text([&] { io::config_from_json(missing, dir); }).find("environment.theta") != std::string::npos);
  auto no_horizon = doc;
  no_horizon.erase("horizon_T");
  CHECK(error_text([&] { io::config_from_json(no_horizon, dir); }).find("horizon_T") != std::string::npos);

  auto adv = io::json::parse(R"({
    "arm_set_source": "arms.csv",
    "environment": {"variant": "adversarial", "generator": {"kind": "file", "path": "thetas.csv"}},
    "horizon_T": 2
  })");
  const RunConfig acfg = io::config_from_json(adv, dir);
  CHECK(acfg.environment.generator->name() == "file");
  CHECK(run_single(acfg, 1).rows.size() == 2);

  io::write_text_file(dir / "cfg.json", doc.dump());
  CHECK(io::read_run_config(dir / "cfg.json").horizon_T == 64);
  io::write_text_file(dir / "broken.json", "{\"horizon_T\": ");
  CHECK(error_text([&] { io::read_run_config(dir / "broken.json"); }).find("ParseError") != std::string::npos);
}
