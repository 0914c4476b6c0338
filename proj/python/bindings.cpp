#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "planner/experiments.hpp"
#include "planner/io.hpp"
#include "planner/manifest.hpp"
#include "planner/plan_solver.hpp"
#include "planner/risk.hpp"

namespace py = pybind11;
using namespace planner;
using nlohmann::json;

namespace {

SolverConfig solver(double gap, double time_limit) {
    SolverConfig cfg;
    cfg.gap = gap;
    cfg.time_limit = time_limit;
    return cfg;
}

BuildOptions build(std::optional<double> epsilon, bool use_transfer) {
    BuildOptions bo;
    bo.epsilon_override = epsilon;
    bo.use_transfer = use_transfer;
    return bo;
}

std::string solve_json(const Problem& p, double lambda, double alpha, std::optional<double> epsilon,
                       bool use_transfer, double gap, double time_limit) {
    py::gil_scoped_release release;
    const auto out = solve_plan(p.instance, p.scenarios, {lambda, alpha}, build(epsilon, use_transfer),
                                solver(gap, time_limit));
    json doc = {{"status", to_string(out.mip.status)},
                {"objective", out.mip.has_incumbent() ? json(out.mip.objective) : json(nullptr)},
                {"best_bound", out.mip.best_bound},
                {"gap", out.mip.gap},
                {"nodes", out.mip.nodes},
                {"violations", out.violations.size()}};
    if (out.plan)
        doc["plan"] = plan_to_json(*out.plan, p.instance);
    return doc.dump();
}

SweepSpec sweep_spec(std::optional<double> time_limit, std::size_t workers) {
    SweepSpec spec;
    if (time_limit)
        spec.solver.time_limit = *time_limit;
    spec.workers = workers;
    return spec;
}

template <class F>
std::string sweep_csv(const Problem& p, std::optional<double> time_limit, std::size_t workers, F&& run) {
    py::gil_scoped_release release;
    return run(p.instance, p.scenarios, sweep_spec(time_limit, workers)).table.to_csv();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-stage stochastic intermodal container planner";
    m.attr("__version__") = std::string(tool_version());

    py::register_exception<PlannerError>(m, "PlannerError");

    py::class_<Problem>(m, "Problem")
        .def_property_readonly("origins",
                               [](const Problem& p) {
                                   std::vector<std::string> ids;
                                   for (const auto& o : p.instance.origins)
                                       ids.push_back(o.id);
                                   return ids;
                               })
        .def_property_readonly("trains",
                               [](const Problem& p) {
                                   std::vector<std::string> ids;
                                   for (const auto& t : p.instance.trains)
                                       ids.push_back(t.id);
                                   return ids;
                               })
        .def_property_readonly("scenario_count", [](const Problem& p) { return p.scenarios.size(); })
        .def("to_json", [](const Problem& p) { return to_json(p).dump(); });

    m.def("load_problem", [](const std::string& path) { return load_problem(path); }, py::arg("path"));
    m.def("parse_problem", [](const std::string& text) { return parse_problem_text(text); }, py::arg("text"));
    m.def("validate",
          [](const std::string& path) {
              std::vector<std::tuple<std::string, std::string, std::string>> out;
              for (const auto& v : load_unvalidated(path).second)
                  out.emplace_back(v.code, v.path, v.message);
              return out;
          },
          py::arg("path"));
    m.def("_solve", &solve_json, py::arg("problem"), py::arg("lambda_") = 0.0, py::arg("alpha") = 0.75,
          py::arg("epsilon") = std::nullopt, py::arg("use_transfer") = false, py::arg("gap") = kDefaultGap,
          py::arg("time_limit") = 0.0);
    m.def("cvar",
          [](const std::vector<double>& costs, const std::vector<double>& probs, double alpha) {
              const auto r = cvar_primal(costs, probs, alpha);
              return std::make_pair(r.var, r.cvar);
          },
          py::arg("costs"), py::arg("probs"), py::arg("alpha"));
    m.def("cvar_dual",
          [](const std::vector<double>& costs, const std::vector<double>& probs, double alpha) {
              const auto r = cvar_dual(costs, probs, alpha);
              return std::make_pair(r.cvar, r.tail_weights);
          },
          py::arg("costs"), py::arg("probs"), py::arg("alpha"));
    m.def("_stochastic_values",
          [](const Problem& p, double alpha) {
              py::gil_scoped_release release;
              StochasticValueOptions o;
              o.alpha = alpha;
              return stochastic_value_table({stochastic_values(p.instance, p.scenarios, SolverConfig{}, o)}).to_csv();
          },
          py::arg("problem"), py::arg("alpha") = 0.75);
    m.def("_risk_grid",
          [](const Problem& p, std::optional<double> t, std::size_t w) { return sweep_csv(p, t, w, run_risk_grid); },
          py::arg("problem"), py::arg("time_limit") = std::nullopt, py::arg("workers") = 1);
    m.def("_emissions_grid",
          [](const Problem& p, std::optional<double> t, std::size_t w) {
              return sweep_csv(p, t, w, run_emissions_grid);
          },
          py::arg("problem"), py::arg("time_limit") = std::nullopt, py::arg("workers") = 1);
    m.def("_capacity_grid",
          [](const Problem& p, std::optional<double> t, std::size_t w) {
              return sweep_csv(p, t, w, run_capacity_grid);
          },
          py::arg("problem"), py::arg("time_limit") = std::nullopt, py::arg("workers") = 1);
    m.def("export_lp",
          [](const Problem& p, double lambda, double alpha, bool use_transfer) {
              std::ostringstream out;
              write_lp(build_milp(p.instance, p.scenarios, {lambda, alpha}, build(std::nullopt, use_transfer)), out);
              return out.str();
          },
          py::arg("problem"), py::arg("lambda_") = 0.0, py::arg("alpha") = 0.75, py::arg("use_transfer") = false);
}
