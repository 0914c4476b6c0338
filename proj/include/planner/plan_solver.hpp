#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planner/model.hpp"
#include "planner/solver.hpp"

namespace planner {

struct PlanOutcome {
    MilpModel model;
    MipResult mip;
    std::optional<Plan> plan;
    /// check_solution on the incumbent; empty certifies feasibility
    std::vector<SolutionViolation> violations;

    bool optimal() const { return mip.status == MipStatus::Optimal; }
};

/// Round-and-repair proposal from an LP point: flows rounded down, each
/// origin prepares the most it ships in any scenario, unmet demand and
/// inventories follow from the balance rows.
std::vector<double> round_and_repair(const MilpModel& model, const std::vector<double>& lp_point);

/// Solves a built model with the round-and-repair root heuristic installed
/// and decodes the incumbent. Unless `cfg.priority` is set, branching takes
/// fractional first-stage columns before the rest.
PlanOutcome solve_model(MilpModel model, const SolverConfig& cfg = {});

PlanOutcome solve_plan(const Instance& inst, const ScenarioSet& scen, const RiskParams& risk,
                       const BuildOptions& options = {}, const SolverConfig& cfg = {});

/// One-scenario set (p = 1) holding scenario `w`, with the instance's unmet
/// penalty narrowed to that scenario.
std::pair<Instance, ScenarioSet> single_scenario(const Instance& inst, const ScenarioSet& scen, std::size_t w);

}  // namespace planner
