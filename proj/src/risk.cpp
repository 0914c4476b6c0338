#include "planner/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "planner/parallel.hpp"
#include "planner/plan_solver.hpp"

namespace planner {

namespace {

void check_distribution(std::span<const double> costs, std::span<const double> probs) {
    if (costs.size() != probs.size())
        throw PlannerError(ErrorCode::InvalidArgument, "cvar: costs and probabilities differ in length");
    if (costs.empty())
        throw PlannerError(ErrorCode::InvalidArgument, "cvar: empty distribution");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0))
            throw PlannerError(ErrorCode::InvalidArgument, "cvar: probabilities must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance)
        throw PlannerError(ErrorCode::InvalidArgument, "cvar: probabilities must sum to 1");
    for (double c : costs)
        if (!std::isfinite(c))
            throw PlannerError(ErrorCode::InvalidArgument, "cvar: costs must be finite");
}

std::vector<std::size_t> sorted_order(std::span<const double> costs, bool descending) {
    std::vector<std::size_t> idx(costs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return descending ? costs[a] > costs[b] : costs[a] < costs[b];
    });
    return idx;
}

}  // namespace

CvarResult cvar_primal(std::span<const double> costs, std::span<const double> probs, double alpha) {
    check_distribution(costs, probs);
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw PlannerError(ErrorCode::RejectAlpha, "cvar_primal: alpha must lie in [0, 1)");
    const auto idx = sorted_order(costs, false);
    const long double scale = 1.0L / (1.0L - alpha);

    CvarResult best{0.0, std::numeric_limits<double>::infinity(), {}};
    long double best_value = std::numeric_limits<long double>::infinity();
    for (std::size_t k : idx) {
        const long double theta = costs[k];
        long double excess = 0.0L;
        for (std::size_t w = 0; w < costs.size(); ++w)
            if (costs[w] > theta)
                excess += static_cast<long double>(probs[w]) * (costs[w] - theta);
        const long double value = theta + scale * excess;
        if (std::isinf(best_value) || value < best_value - 1e-15L * std::max(1.0L, std::abs(best_value))) {
            best_value = value;
            best.var = static_cast<double>(theta);
        }
    }
    best.cvar = static_cast<double>(best_value);
    return best;
}

CvarResult cvar_dual(std::span<const double> costs, std::span<const double> probs, double alpha) {
    check_distribution(costs, probs);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw PlannerError(ErrorCode::RejectAlpha,
                           "cvar_dual: alpha must lie in (0, 1); use cvar_primal for alpha = 0");
    const auto idx = sorted_order(costs, true);
    CvarResult r;
    r.tail_weights.assign(costs.size(), 0.0);
    long double remaining = 1.0L - alpha;
    long double weighted = 0.0L;
    for (std::size_t k : idx) {
        if (remaining <= 0.0L)
            break;
        const long double q = std::min<long double>(probs[k], remaining);
        if (q <= 0.0L)
            continue;
        r.tail_weights[k] = static_cast<double>(q);
        weighted += q * costs[k];
        remaining -= q;
        r.var = costs[k];
    }
    r.cvar = static_cast<double>(weighted / (1.0L - alpha));
    return r;
}

StochasticValueReport stochastic_values(const Instance& inst, const ScenarioSet& scen, const SolverConfig& solver_cfg,
                                        const StochasticValueOptions& opts) {
    StochasticValueReport rep;
    rep.trains = inst.trains.size();
    rep.scenarios = scen.size();
    const RiskParams neutral{0.0, opts.alpha};
    BuildOptions bo;
    bo.epsilon_override = opts.epsilon_override;
    bo.use_transfer = opts.use_transfer;
    bo.linking = opts.linking;
    const std::size_t S = scen.size();

    // SS
    auto ss = solve_plan(inst, scen, neutral, bo, solver_cfg);
    if (ss.optimal() && ss.plan) {
        rep.ss = ss.mip.objective;
        rep.cvar_ss = cvar_primal(ss.plan->second_stage_costs(), ss.plan->probabilities, opts.alpha).cvar;
    } else {
        rep.notes.push_back(std::string("SS: solver status ") + to_string(ss.mip.status));
    }

    // EV problem on the mean scenario
    Instance mean_inst = inst;
    if (inst.cost.unmet_penalty.size() > 1) {
        double pi = 0.0;
        for (std::size_t w = 0; w < S; ++w)
            pi += scen.scenarios[w].probability * inst.cost.unmet_penalty_for(w);
        mean_inst.cost.unmet_penalty = {pi};
    }
    ScenarioSet mean_set;
    mean_set.scenarios.push_back(mean_value_scenario(scen));
    auto ev = solve_plan(mean_inst, mean_set, neutral, bo, solver_cfg);
    const bool have_ev = ev.optimal() && ev.plan;
    if (have_ev)
        rep.ev_prepare = ev.plan->prepare;
    else
        rep.notes.push_back(std::string("EV: solver status ") + to_string(ev.mip.status));

    // Per-scenario recourse (EEV) and perfect-foresight (WS) solves.
    std::vector<std::optional<double>> eev_w(S), ws_w(S);
    std::vector<std::string> cause(2 * S);
    parallel_for(2 * S, opts.workers, [&](std::size_t k) {
        const std::size_t w = k % S;
        const bool recourse = k < S;
        if (recourse && !have_ev)
            return;
        auto [one_inst, one_set] = single_scenario(inst, scen, w);
        auto model = build_milp(one_inst, one_set, neutral, bo);
        if (recourse)
            fix_first_stage(model, rep.ev_prepare);
        auto out = solve_model(std::move(model), solver_cfg);
        if (out.optimal())
            (recourse ? eev_w : ws_w)[w] = out.mip.objective;
        else
            cause[k] = std::string(recourse ? "EEV" : "WS") + " scenario " + std::to_string(w) + ": solver status " +
                       to_string(out.mip.status);
    });
    for (const auto& c : cause)
        if (!c.empty())
            rep.notes.push_back(c);

    auto expectation = [&](const std::vector<std::optional<double>>& vals,
                           std::vector<double>& store) -> std::optional<double> {
        double total = 0.0;
        for (std::size_t w = 0; w < S; ++w) {
            if (!vals[w])
                return std::nullopt;
            store.push_back(*vals[w]);
            total += scen.scenarios[w].probability * *vals[w];
        }
        return total;
    };
    if (have_ev)
        rep.eev = expectation(eev_w, rep.eev_per_scenario);
    rep.ws = expectation(ws_w, rep.ws_per_scenario);

    if (rep.eev && rep.ss) {
        rep.vss = *rep.eev - *rep.ss;
        if (*rep.ss != 0.0)
            rep.vss_pct = 100.0 * *rep.vss / *rep.ss;
    }
    if (rep.ss && rep.ws)
        rep.evpi = *rep.ss - *rep.ws;
    return rep;
}

}  // namespace planner
