#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planner/model.hpp"
#include "planner/report.hpp"
#include "planner/risk.hpp"
#include "planner/solver.hpp"

namespace planner {

/// Report tables carry money in thousands.
inline constexpr double kReportScale = 1e-3;
/// Emission caps on the sweep grid are in tonnes; files hold kilograms.
inline constexpr double kEmissionReportUnit = 1e3;

/// Per-cell solver time limit applied by sweeps unless overridden.
inline constexpr double kSweepTimeLimit = 1.0;

struct SweepSpec {
    std::vector<double> lambdas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> alphas = {0.25, 0.5, 0.75, 0.9};
    /// tonnes
    std::vector<double> epsilons = {25,  50,  75,  100, 125, 150, 175, 200,
                                    225, 250, 275, 300, 325, 350, 375};
    std::vector<double> emission_lambdas = {0.25, 0.5, 0.75, 0.9};
    std::vector<double> emission_alphas = {0.25, 0.5, 0.7, 0.95};
    std::vector<long> capacities = {4, 5, 6, 7, 8, 9, 10};
    /// confidence used for CVaR_SS in the stochastic-value table
    double metrics_alpha = 0.75;
    /// fixed overrides applied to every cell
    std::optional<double> epsilon_override;
    bool use_transfer = false;
    bool linking = true;
    std::size_t workers = 1;
    SolverConfig solver = [] {
        SolverConfig c;
        c.time_limit = kSweepTimeLimit;
        return c;
    }();

    /// Throws InvalidConfig for empty grids or out-of-domain values.
    void check() const;
    BuildOptions build_options() const;
};

/// Per-cell outcome kept next to the table for auditing.
struct CellResult {
    RiskParams risk;
    std::optional<double> epsilon;  // kg
    std::optional<long> capacity;
    std::optional<MipStatus> status;
    std::optional<double> objective;
    std::optional<Plan> plan;
    std::vector<SolutionViolation> violations;
    std::string error;

    bool optimal() const { return status == MipStatus::Optimal; }
    bool certified() const { return plan.has_value() && violations.empty(); }
};

struct SweepResult {
    ReportTable table;
    std::vector<CellResult> cells;
};

/// alpha, lambda, OBJ, ASC, E(TC), VaR, CVaR, status; cells ordered by alpha
/// then lambda.
SweepResult run_risk_grid(const Instance& inst, const ScenarioSet& scen, const SweepSpec& spec);

/// epsilon, lambda, alpha, OBJ, excess, status, plateau; ordered by
/// (lambda, alpha) series then epsilon. `plateau` marks a row whose OBJ equals
/// the previous row of the same series within twice the gap tolerance.
SweepResult run_emissions_grid(const Instance& inst, const ScenarioSet& scen, const SweepSpec& spec);

/// capacity, total_cost, unmet, pct_met, unmet_max, unmet_min, unmet_stddev,
/// status; solved at lambda = 0 with every spot capacity set to the grid value.
SweepResult run_capacity_grid(const Instance& inst, const ScenarioSet& scen, const SweepSpec& spec);

/// Upper bound (kg) on the emissions any feasible plan can produce in a single
/// scenario, from the LP relaxation with the cap lifted.
double max_possible_emissions(const Instance& inst, const ScenarioSet& scen, const BuildOptions& options = {});

ScenarioSet with_uniform_capacity(const Instance& inst, const ScenarioSet& scen, long capacity);

struct BreakdownReport {
    double supply = 0.0;
    double transport = 0.0;
    double unmet = 0.0;
    double emissions = 0.0;
    double total = 0.0;
    /// percentages; all zero when total is zero
    double supply_share = 0.0;
    double transport_share = 0.0;
    double unmet_share = 0.0;
    double emissions_share = 0.0;
    bool zero_total = false;

    ReportTable table() const;
};

BreakdownReport cost_breakdown(const Plan& plan);

/// Trains, Scen, EEV, SS, WS, VSS, EVPI, VSS(%), CVaR_SS.
ReportTable stochastic_value_table(const std::vector<StochasticValueReport>& reports);

/// True when a within `tol` relative (max(1, |a|)) is equal to b.
bool within_gap(double a, double b, double tol);

}  // namespace planner
