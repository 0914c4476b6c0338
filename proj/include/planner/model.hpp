#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "planner/instance.hpp"
#include "planner/linear_program.hpp"
#include "planner/scenario.hpp"

namespace planner {

struct RiskParams {
    double lambda = 0.0;
    double alpha = 0.0;
};

/// Throws RejectAlpha for alpha outside [0, 1) and InvalidArgument for lambda
/// outside [0, 1].
void check_risk(const RiskParams& risk);

struct BuildOptions {
    std::optional<double> epsilon_override;
    bool use_transfer = false;
    /// Emit binary z variables and their big-M linking rows.
    bool linking = true;
};

/// A time-feasible dispatch cell (origin, hub, train, period), shared by all
/// scenarios.
struct DispatchCell {
    std::size_t origin = 0;
    std::size_t hub = 0;
    std::size_t train = 0;
    std::size_t stop = 0;  // position along the train's route
    int period = 0;
};

enum class VarKind { Prepare, Flow, Link, Unmet, Inventory, Excess, Var, Shortfall };

const char* to_string(VarKind kind);

struct VarRef {
    VarKind kind = VarKind::Prepare;
    std::size_t scenario = 0;
    /// origin for Prepare, cell for Flow/Link, train for Unmet, global stop for
    /// Inventory; unused otherwise.
    std::size_t entity = 0;

    bool operator==(const VarRef&) const = default;
};

/// Column layout of the deterministic equivalent.
///   y | x (scenario-major over cells) | z | U | I | eta | xi | theta
class VariableLayout {
public:
    VariableLayout() = default;
    VariableLayout(std::size_t origins, std::vector<DispatchCell> cells, std::size_t scenarios,
                   std::size_t trains, std::vector<std::size_t> stop_offset, std::size_t total_stops,
                   bool linking);

    std::size_t origins() const { return origins_; }
    std::size_t scenarios() const { return scenarios_; }
    std::size_t trains() const { return trains_; }
    std::size_t total_stops() const { return stops_; }
    bool linking() const { return linking_; }
    const std::vector<DispatchCell>& cells() const { return cells_; }
    const std::vector<std::size_t>& stop_offset() const { return stop_offset_; }

    int y(std::size_t origin) const { return static_cast<int>(y0_ + origin); }
    int x(std::size_t scenario, std::size_t cell) const {
        return static_cast<int>(x0_ + scenario * cells_.size() + cell);
    }
    int z(std::size_t scenario, std::size_t cell) const;
    int unmet(std::size_t scenario, std::size_t train) const {
        return static_cast<int>(u0_ + scenario * trains_ + train);
    }
    int inventory(std::size_t scenario, std::size_t global_stop) const {
        return static_cast<int>(i0_ + scenario * stops_ + global_stop);
    }
    int excess(std::size_t scenario) const { return static_cast<int>(e0_ + scenario); }
    int shortfall(std::size_t scenario) const { return static_cast<int>(s0_ + scenario); }
    int var() const { return static_cast<int>(theta_); }

    std::size_t size() const { return theta_ + 1; }

    /// Reverse map from a column to its role; throws IndexOutOfRange.
    VarRef describe(std::size_t col) const;
    std::string name(std::size_t col) const;

private:
    std::size_t origins_ = 0, scenarios_ = 0, trains_ = 0, stops_ = 0;
    bool linking_ = true;
    std::vector<DispatchCell> cells_;
    std::vector<std::size_t> stop_offset_;
    std::size_t y0_ = 0, x0_ = 0, z0_ = 0, u0_ = 0, i0_ = 0, e0_ = 0, s0_ = 0, theta_ = 0;
};

/// Everything the builder consumed, kept so a solution can be decoded and
/// re-costed from first principles.
struct BuildContext {
    Instance instance;
    ScenarioSet scenarios;
    RiskParams risk;
    BuildOptions options;
    double epsilon = 0.0;
};

struct MilpModel {
    LinearProgram program;
    VariableLayout layout;
    BuildContext context;
};

/// Builds the deterministic-equivalent MILP with CVaR rows. Throws RejectAlpha
/// for alpha >= 1. Row and column counts are checked against their closed
/// forms before returning.
MilpModel build_milp(const Instance& inst, const ScenarioSet& scen, const RiskParams& risk,
                     const BuildOptions& options = {});

/// Enumerates time-feasible dispatch cells in (origin, train, stop, period) order.
std::vector<DispatchCell> dispatch_cells(const Instance& inst, bool use_transfer);

/// Per-cell linking constant min(kappa_i, K_jnw, D_nw).
long big_m(const Instance& inst, const ScenarioSet& scen, std::size_t origin, std::size_t hub,
           std::size_t train, std::size_t scenario);

/// Linear expression for the second-stage cost of one scenario.
struct LinearExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    double evaluate(std::span<const double> x) const;
};

LinearExpr scenario_cost_expr(const MilpModel& model, std::size_t scenario);

/// Fixes every first-stage prepare variable to the given quantities.
void fix_first_stage(MilpModel& model, std::span<const long> prepare);

struct Flow {
    std::size_t origin = 0;
    std::size_t hub = 0;
    std::size_t train = 0;
    int period = 0;
    long quantity = 0;
};

struct ScenarioPlan {
    std::vector<Flow> flows;
    std::vector<long> unmet;      // per train
    std::vector<long> inventory;  // per global stop
    double excess_emissions = 0.0;
    double shortfall = 0.0;  // xi
    double emissions = 0.0;
    double transport_cost = 0.0;
    double unmet_cost = 0.0;
    double emissions_penalty = 0.0;

    double second_stage_cost() const { return transport_cost + unmet_cost; }
};

struct CostBreakdown {
    double first_stage = 0.0;
    /// probability-weighted
    double transport = 0.0;
    double unmet = 0.0;
    double emissions = 0.0;
    double cvar = 0.0;
};

struct Plan {
    std::vector<long> prepare;
    std::vector<ScenarioPlan> scenarios;
    std::vector<double> probabilities;
    double var = 0.0;
    double cvar = 0.0;
    double objective = 0.0;
    RiskParams risk;
    CostBreakdown breakdown;

    /// Recombines the breakdown under the mean-risk weighting.
    double weighted_total() const;
    /// Expected second-stage cost.
    double expected_second_stage() const { return breakdown.transport + breakdown.unmet; }
    std::vector<double> second_stage_costs() const;
};

inline constexpr double kIntegralityTolerance = 1e-6;

/// Decodes a solver vector. Throws DecodeInconsistent when integrality, sign
/// or the objective cross-check (relative 1e-6) fails.
Plan decode(const MilpModel& model, std::span<const double> solution);
Plan decode(const MilpModel& model, std::span<const double> solution, double solver_objective);

/// CPLEX-style LP text.
void write_lp(const MilpModel& model, std::ostream& out);

}  // namespace planner
