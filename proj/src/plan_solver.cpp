#include "planner/plan_solver.hpp"

#include <algorithm>
#include <cmath>

namespace planner {

std::vector<double> round_and_repair(const MilpModel& model, const std::vector<double>& lp_point) {
    const auto& L = model.layout;
    const auto& ctx = model.context;
    const auto& inst = ctx.instance;
    const auto& cells = L.cells();
    std::vector<double> v(model.program.num_cols(), 0.0);

    std::vector<double> shipped_max(L.origins(), 0.0);
    for (std::size_t w = 0; w < L.scenarios(); ++w) {
        const auto& s = ctx.scenarios.scenarios[w];
        std::vector<double> shipped(L.origins(), 0.0);
        std::vector<double> per_train(L.trains(), 0.0);
        std::vector<double> per_stop(L.total_stops(), 0.0);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto col = static_cast<std::size_t>(L.x(w, c));
            double q = std::floor(lp_point[col] + 1e-7);
            q = std::clamp(q, model.program.lower[col], model.program.upper[col]);
            v[col] = q;
            shipped[cells[c].origin] += q;
            per_train[cells[c].train] += q;
            per_stop[L.stop_offset()[cells[c].train] + cells[c].stop] += q;
            if (L.linking())
                v[static_cast<std::size_t>(L.z(w, c))] = q > 0 ? 1.0 : 0.0;
        }
        for (std::size_t i = 0; i < L.origins(); ++i)
            shipped_max[i] = std::max(shipped_max[i], shipped[i]);
        for (std::size_t n = 0; n < L.trains(); ++n) {
            const double d = static_cast<double>(s.demand_of(inst.trains[n].id));
            v[static_cast<std::size_t>(L.unmet(w, n))] = std::max(0.0, d - per_train[n]);
            double inv = 0.0;
            for (std::size_t r = L.stop_offset()[n]; r < L.stop_offset()[n + 1]; ++r) {
                inv += per_stop[r];
                v[static_cast<std::size_t>(L.inventory(w, r))] = inv;
            }
        }
    }
    for (std::size_t i = 0; i < L.origins(); ++i) {
        const auto col = static_cast<std::size_t>(L.y(i));
        v[col] = std::clamp(shipped_max[i], model.program.lower[col], model.program.upper[col]);
    }
    return v;
}

PlanOutcome solve_model(MilpModel model, const SolverConfig& cfg) {
    SolverConfig run_cfg = cfg;
    if (!run_cfg.root_heuristic)
        run_cfg.root_heuristic = [&model](const std::vector<double>& root, std::uint64_t) {
            return std::optional<std::vector<double>>(round_and_repair(model, root));
        };
    if (run_cfg.priority.empty()) {
        run_cfg.branching = SolverConfig::Branching::Prioritized;
        run_cfg.priority.assign(model.program.num_cols(), 0);
        for (std::size_t i = 0; i < model.layout.origins(); ++i)
            run_cfg.priority[static_cast<std::size_t>(model.layout.y(i))] = 1;
    }
    PlanOutcome out;
    out.mip = solve_milp(model.program, run_cfg);
    if (out.mip.has_incumbent()) {
        out.violations = check_solution(model.program, out.mip.incumbent);
        out.plan = decode(model, out.mip.incumbent, out.mip.objective);
    }
    out.model = std::move(model);
    return out;
}

PlanOutcome solve_plan(const Instance& inst, const ScenarioSet& scen, const RiskParams& risk,
                       const BuildOptions& options, const SolverConfig& cfg) {
    return solve_model(build_milp(inst, scen, risk, options), cfg);
}

std::pair<Instance, ScenarioSet> single_scenario(const Instance& inst, const ScenarioSet& scen, std::size_t w) {
    Instance one = inst;
    one.cost.unmet_penalty = {inst.cost.unmet_penalty_for(w)};
    ScenarioSet set;
    set.scenarios.push_back(scen.scenarios.at(w));
    set.scenarios.front().probability = 1.0;
    set.seed = scen.seed;
    return {std::move(one), std::move(set)};
}

}  // namespace planner
