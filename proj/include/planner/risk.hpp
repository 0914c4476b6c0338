#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "planner/instance.hpp"
#include "planner/scenario.hpp"
#include "planner/solver.hpp"

namespace planner {

struct CvarResult {
    double var = 0.0;
    double cvar = 0.0;
    /// dual tail weights (cvar_dual only)
    std::vector<double> tail_weights;
};

/// min over theta of theta + E[(c - theta)+] / (1 - alpha), scanning theta over
/// the sorted cost values. Returns the smallest minimizer as VaR.
CvarResult cvar_primal(std::span<const double> costs, std::span<const double> probs, double alpha);

/// Greedy fill of the dual weights q <= p, sum q = 1 - alpha, over costs in
/// decreasing order. Rejects alpha = 0.
CvarResult cvar_dual(std::span<const double> costs, std::span<const double> probs, double alpha);

struct StochasticValueReport {
    std::size_t trains = 0;
    std::size_t scenarios = 0;
    std::optional<double> eev, ss, ws, vss, evpi, vss_pct, cvar_ss;
    /// prepare plan of the mean-value problem, fixed when computing EEV
    std::vector<long> ev_prepare;
    std::vector<double> ws_per_scenario;
    std::vector<double> eev_per_scenario;
    /// causes for unavailable metrics
    std::vector<std::string> notes;

    bool complete() const { return eev && ss && ws; }
};

struct StochasticValueOptions {
    double alpha = 0.75;  // for CVaR_SS
    std::optional<double> epsilon_override;
    bool use_transfer = false;
    bool linking = true;
    std::size_t workers = 1;
};

/// EEV / SS / WS at lambda = 0 and the derived VSS, EVPI and CVaR of the
/// stochastic solution's second-stage costs.
StochasticValueReport stochastic_values(const Instance& inst, const ScenarioSet& scen,
                                        const SolverConfig& solver_cfg,
                                        const StochasticValueOptions& opts = {});

}  // namespace planner
