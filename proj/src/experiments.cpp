#include "planner/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "planner/error.hpp"
#include "planner/parallel.hpp"
#include "planner/plan_solver.hpp"

namespace planner {

namespace {

ReportTable::Cell money(const std::optional<double>& v) {
    if (!v)
        return std::monostate{};
    return *v * kReportScale;
}

ReportTable::Cell status_cell(const CellResult& c) {
    if (!c.error.empty())
        return std::string("error: ") + c.error;
    if (!c.status)
        return std::string("not run");
    return std::string(to_string(*c.status));
}

/// Solves one cell, recording failures instead of propagating them.
CellResult solve_cell(const Instance& inst, const ScenarioSet& scen, RiskParams risk, BuildOptions bo,
                      const SolverConfig& cfg) {
    CellResult out;
    out.risk = risk;
    out.epsilon = bo.epsilon_override;
    try {
        auto res = solve_plan(inst, scen, risk, bo, cfg);
        out.status = res.mip.status;
        if (res.mip.has_incumbent())
            out.objective = res.mip.objective;
        out.plan = std::move(res.plan);
        out.violations = std::move(res.violations);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

void check_grid(const std::vector<double>& g, const char* what, double lo, double hi, bool open_hi) {
    if (g.empty())
        throw PlannerError(ErrorCode::InvalidConfig, std::string(what) + " grid is empty");
    for (double v : g)
        if (!(v >= lo && (open_hi ? v < hi : v <= hi)))
            throw PlannerError(ErrorCode::InvalidConfig, std::string(what) + " grid value out of range");
}

}  // namespace

bool within_gap(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

void SweepSpec::check() const {
    check_grid(lambdas, "lambda", 0.0, 1.0, false);
    check_grid(alphas, "alpha", 0.0, 1.0, true);
    check_grid(epsilons, "epsilon", 0.0, std::numeric_limits<double>::max(), false);
    check_grid(emission_lambdas, "emission lambda", 0.0, 1.0, false);
    check_grid(emission_alphas, "emission alpha", 0.0, 1.0, true);
    if (capacities.empty())
        throw PlannerError(ErrorCode::InvalidConfig, "capacity grid is empty");
    for (long c : capacities)
        if (c < 0)
            throw PlannerError(ErrorCode::InvalidConfig, "capacity grid value out of range");
    if (!(metrics_alpha >= 0.0 && metrics_alpha < 1.0))
        throw PlannerError(ErrorCode::RejectAlpha, "alpha must lie in [0, 1)");
}

BuildOptions SweepSpec::build_options() const {
    BuildOptions bo;
    bo.epsilon_override = epsilon_override;
    bo.use_transfer = use_transfer;
    bo.linking = linking;
    return bo;
}

SweepResult run_risk_grid(const Instance& inst, const ScenarioSet& scen, const SweepSpec& spec) {
    spec.check();
    std::vector<RiskParams> grid;
    for (double a : spec.alphas)
        for (double l : spec.lambdas)
            grid.push_back({l, a});
    SweepResult out;
    out.cells.resize(grid.size());
    parallel_for(grid.size(), spec.workers, [&](std::size_t k) {
        out.cells[k] = solve_cell(inst, scen, grid[k], spec.build_options(), spec.solver);
    });

    out.table = ReportTable({"alpha", "lambda", "OBJ", "ASC", "E(TC)", "VaR", "CVaR", "status"});
    for (const auto& c : out.cells) {
        std::optional<double> asc, etc, var, cvar;
        if (c.plan) {
            const auto& b = c.plan->breakdown;
            asc = c.plan->expected_second_stage();
            etc = b.first_stage + *asc + b.emissions;
            const auto tail = cvar_primal(c.plan->second_stage_costs(), c.plan->probabilities, c.risk.alpha);
            var = tail.var;
            cvar = tail.cvar;
        }
        out.table.add_row({c.risk.alpha, c.risk.lambda, money(c.objective), money(asc), money(etc), money(var),
                           money(cvar), status_cell(c)});
    }
    return out;
}

SweepResult run_emissions_grid(const Instance& inst, const ScenarioSet& scen, const SweepSpec& spec) {
    spec.check();
    struct Key {
        double eps, lambda, alpha;
    };
    std::vector<Key> grid;
    for (double l : spec.emission_lambdas)
        for (double a : spec.emission_alphas)
            for (double e : spec.epsilons)
                grid.push_back({e, l, a});
    SweepResult out;
    out.cells.resize(grid.size());
    parallel_for(grid.size(), spec.workers, [&](std::size_t k) {
        auto bo = spec.build_options();
        bo.epsilon_override = grid[k].eps * kEmissionReportUnit;
        out.cells[k] = solve_cell(inst, scen, {grid[k].lambda, grid[k].alpha}, bo, spec.solver);
    });

    out.table = ReportTable({"epsilon", "lambda", "alpha", "OBJ", "excess", "status", "plateau"});
    const double tol = 2.0 * spec.solver.gap;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& c = out.cells[k];
        std::optional<double> excess;
        if (c.plan) {
            double e = 0.0;
            for (std::size_t w = 0; w < c.plan->scenarios.size(); ++w)
                e += c.plan->probabilities[w] * c.plan->scenarios[w].excess_emissions;
            excess = e / kEmissionReportUnit;
        }
        const bool same_series =
            k > 0 && grid[k - 1].lambda == grid[k].lambda && grid[k - 1].alpha == grid[k].alpha;
        const bool plateau = same_series && c.objective && out.cells[k - 1].objective &&
                             within_gap(*c.objective, *out.cells[k - 1].objective, tol);
        ReportTable::Cell ex = excess ? ReportTable::Cell(*excess) : ReportTable::Cell(std::monostate{});
        out.table.add_row({grid[k].eps, grid[k].lambda, grid[k].alpha, money(c.objective), ex, status_cell(c),
                           plateau ? 1L : 0L});
    }
    return out;
}

double max_possible_emissions(const Instance& inst, const ScenarioSet& scen, const BuildOptions& options) {
    BuildOptions bo = options;
    bo.epsilon_override = 1e12;
    const auto model = build_milp(inst, scen, {0.0, 0.0}, bo);
    double worst = 0.0;
    for (std::size_t r = 0; r < model.program.num_rows(); ++r) {
        if (model.program.row_name[r].rfind("emissions", 0) != 0)
            continue;
        LinearProgram lp = model.program;
        std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
        for (std::size_t k = lp.row_start[r]; k < lp.row_start[r + 1]; ++k)
            if (lp.row_value[k] > 0.0)
                lp.objective[static_cast<std::size_t>(lp.row_index[k])] = -lp.row_value[k];
        const auto sol = solve_lp(lp);
        if (sol.status != LpStatus::Optimal)
            throw PlannerError(ErrorCode::NumericalBreakdown, "emissions bound LP did not solve");
        worst = std::max(worst, -sol.objective);
    }
    return worst;
}

ScenarioSet with_uniform_capacity(const Instance& inst, const ScenarioSet& scen, long capacity) {
    ScenarioSet out = scen;
    for (auto& s : out.scenarios) {
        s.capacity.clear();
        for (const auto& t : inst.trains)
            for (const auto& st : t.stops)
                s.capacity[t.id][st.hub] = capacity;
    }
    return out;
}

SweepResult run_capacity_grid(const Instance& inst, const ScenarioSet& scen, const SweepSpec& spec) {
    spec.check();
    SweepResult out;
    out.cells.resize(spec.capacities.size());
    parallel_for(spec.capacities.size(), spec.workers, [&](std::size_t k) {
        out.cells[k] = solve_cell(inst, with_uniform_capacity(inst, scen, spec.capacities[k]), {0.0, 0.0},
                                  spec.build_options(), spec.solver);
        out.cells[k].capacity = spec.capacities[k];
    });

    double total_demand = 0.0;
    for (const auto& s : scen.scenarios)
        for (const auto& t : inst.trains)
            total_demand += s.probability * static_cast<double>(s.demand_of(t.id));

    out.table = ReportTable(
        {"capacity", "total_cost", "unmet", "pct_met", "unmet_max", "unmet_min", "unmet_stddev", "status"});
    for (const auto& c : out.cells) {
        std::vector<ReportTable::Cell> row{*c.capacity, money(c.objective)};
        if (c.plan) {
            std::vector<double> per_pair;
            double expected = 0.0;
            for (std::size_t w = 0; w < c.plan->scenarios.size(); ++w)
                for (long u : c.plan->scenarios[w].unmet) {
                    per_pair.push_back(static_cast<double>(u));
                    expected += c.plan->probabilities[w] * static_cast<double>(u);
                }
            const double mean = std::accumulate(per_pair.begin(), per_pair.end(), 0.0) / per_pair.size();
            double ss = 0.0;
            for (double u : per_pair)
                ss += (u - mean) * (u - mean);
            row.emplace_back(expected);
            row.emplace_back(total_demand > 0 ? 100.0 * (1.0 - expected / total_demand) : 100.0);
            row.emplace_back(*std::max_element(per_pair.begin(), per_pair.end()));
            row.emplace_back(*std::min_element(per_pair.begin(), per_pair.end()));
            row.emplace_back(std::sqrt(ss / per_pair.size()));
        } else {
            for (int k = 0; k < 5; ++k)
                row.emplace_back(std::monostate{});
        }
        row.push_back(status_cell(c));
        out.table.add_row(std::move(row));
    }
    return out;
}

BreakdownReport cost_breakdown(const Plan& plan) {
    BreakdownReport r;
    r.supply = plan.breakdown.first_stage;
    r.transport = plan.breakdown.transport;
    r.unmet = plan.breakdown.unmet;
    r.emissions = plan.breakdown.emissions;
    r.total = r.supply + r.transport + r.unmet + r.emissions;
    if (r.total <= 0.0) {
        r.zero_total = true;
        return r;
    }
    r.supply_share = 100.0 * r.supply / r.total;
    r.transport_share = 100.0 * r.transport / r.total;
    r.unmet_share = 100.0 * r.unmet / r.total;
    r.emissions_share = 100.0 * r.emissions / r.total;
    return r;
}

ReportTable BreakdownReport::table() const {
    ReportTable t({"component", "cost", "share"});
    t.add_row({std::string("supply"), supply * kReportScale, supply_share});
    t.add_row({std::string("transport"), transport * kReportScale, transport_share});
    t.add_row({std::string("unmet_penalty"), unmet * kReportScale, unmet_share});
    t.add_row({std::string("emissions_penalty"), emissions * kReportScale, emissions_share});
    t.add_row({std::string("total"), total * kReportScale, zero_total ? 0.0 : 100.0});
    return t;
}

ReportTable stochastic_value_table(const std::vector<StochasticValueReport>& reports) {
    ReportTable t({"Trains", "Scen", "EEV", "SS", "WS", "VSS", "EVPI", "VSS(%)", "CVaR_SS"});
    for (const auto& r : reports) {
        ReportTable::Cell pct = r.vss_pct ? ReportTable::Cell(*r.vss_pct) : ReportTable::Cell(std::monostate{});
        t.add_row({static_cast<long>(r.trains), static_cast<long>(r.scenarios), money(r.eev), money(r.ss), money(r.ws),
                   money(r.vss), money(r.evpi), pct, money(r.cvar_ss)});
    }
    return t;
}

}  // namespace planner
