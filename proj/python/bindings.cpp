#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "botw/error.hpp"
#include "botw/harness.hpp"
#include "botw/io.hpp"
#include "botw/policy.hpp"

namespace py = pybind11;
using namespace botw;

namespace {

ArmSet make_arms(const std::vector<std::vector<double>>& rows, std::vector<std::string> ids) {
  return ArmSet::validate(rows, std::move(ids));
}

py::dict design_dict(const DesignResult& d) {
  py::dict out;
  out["weights"] = d.pi.probs();
  out["g_value"] = d.g_value;
  out["iterations"] = d.iterations;
  out["converged"] = d.converged;
  return out;
}

RunConfig config_from_string(const std::string& text, const std::string& base_dir) {
  return io::config_from_json(io::json::parse(text), base_dir);
}

py::dict run_dict(const RunConfig& cfg, const RepetitionResult& res) {
  py::dict out;
  out["trace_csv"] = io::traces_to_csv(res.traces);
  out["summary_json"] = io::summary_to_json(cfg, res).dump();
  py::list finals;
  for (const auto& tr : res.traces) finals.append(tr.rows.back().regret_expected);
  out["final_regret"] = finals;
  out["g_pi"] = res.g_pi;
  return out;
}

}  // namespace

PYBIND11_MODULE(_botw, m) {
  m.doc() = "Linear bandit simulation core";

  py::register_exception<Error>(m, "BotwError", PyExc_ValueError);

  py::class_<ArmSet>(m, "ArmSet")
      .def(py::init(&make_arms), py::arg("rows"), py::arg("ids") = std::vector<std::string>{})
      .def_property_readonly("size", &ArmSet::size)
      .def_property_readonly("dim", &ArmSet::dim)
      .def_property_readonly("matrix", &ArmSet::matrix)
      .def_property_readonly("ids", &ArmSet::ids)
      .def("losses", &ArmSet::losses, py::arg("theta"));

  m.def("read_arm_set", [](const std::string& path) { return io::read_arm_set(path); }, py::arg("path"));

  m.def(
      "frank_wolfe_design",
      [](const ArmSet& arms, double tol, int max_iter) { return design_dict(frank_wolfe_design(arms, tol, max_iter)); },
      py::arg("arms"), py::arg("tol") = kDefaultDesignTol, py::arg("max_iter") = kDefaultDesignMaxIter);

  m.def(
      "g_value",
      [](const Vector& p, const ArmSet& arms) { return g_value(SimplexDistribution(p), arms); },
      py::arg("p"), py::arg("arms"));

  m.def(
      "regularized_leader",
      [](const Vector& cum_loss, double beta) { return regularized_leader(cum_loss, beta).probs(); },
      py::arg("cum_loss"), py::arg("beta"));

  m.def(
      "entropy", [](const Vector& p) { return entropy(SimplexDistribution(p)); }, py::arg("p"));

  m.def(
      "estimate_loss",
      [](const ArmSet& arms, const Vector& p, std::size_t chosen, double loss) {
        return estimate_loss(arms, SimplexDistribution(p), chosen, loss).values;
      },
      py::arg("arms"), py::arg("p"), py::arg("chosen"), py::arg("loss"));

  m.def(
      "run",
      [](const std::string& config_json, const std::string& base_dir, std::size_t threads) {
        const RunConfig cfg = config_from_string(config_json, base_dir);
        RepetitionResult res;
        {
          py::gil_scoped_release release;
          res = run_repetitions(cfg, threads);
        }
        return run_dict(cfg, res);
      },
      py::arg("config_json"), py::arg("base_dir") = ".", py::arg("threads") = 0,
      "Run every repetition of a JSON config; returns the trace CSV, summary JSON and final regrets.");

  m.def(
      "sweep",
      [](const std::string& config_json, const std::vector<std::size_t>& grid, const std::string& base_dir) {
        RunConfig cfg = config_from_string(config_json, base_dir);
        if (!grid.empty()) cfg.horizon_T = grid.front();
        SweepSummary s;
        {
          py::gil_scoped_release release;
          s = sweep_horizons(cfg, grid);
        }
        return io::sweep_to_json(cfg, grid, s).dump();
      },
      py::arg("config_json"), py::arg("grid"), py::arg("base_dir") = ".");

  m.def(
      "verify",
      [](const std::string& trace_csv, const std::string& gaps_json) {
        const auto traces = io::parse_traces_csv(trace_csv);
        const TraceContext ctx = io::trace_context_from_json(io::json::parse(gaps_json));
        py::list reports;
        for (const auto& rows : traces) {
          const InvariantReport r = verify_trace_invariants(rows, ctx);
          py::dict d;
          for (const auto& c : r.checks) d[py::str(c.name)] = to_string(c.status);
          reports.append(d);
        }
        return reports;
      },
      py::arg("trace_csv"), py::arg("gaps_json"));
}
