#include "planner/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace planner {

const char* to_string(VarKind kind) {
    switch (kind) {
        case VarKind::Prepare: return "y";
        case VarKind::Flow: return "x";
        case VarKind::Link: return "z";
        case VarKind::Unmet: return "U";
        case VarKind::Inventory: return "I";
        case VarKind::Excess: return "eta";
        case VarKind::Var: return "theta";
        case VarKind::Shortfall: return "xi";
    }
    return "?";
}

void check_risk(const RiskParams& risk) {
    if (!(risk.alpha >= 0.0 && risk.alpha < 1.0))
        throw PlannerError(ErrorCode::RejectAlpha,
                           "alpha must lie in [0, 1); got " + std::to_string(risk.alpha));
    if (!(risk.lambda >= 0.0 && risk.lambda <= 1.0))
        throw PlannerError(ErrorCode::InvalidArgument,
                           "lambda must lie in [0, 1]; got " + std::to_string(risk.lambda));
}

VariableLayout::VariableLayout(std::size_t origins, std::vector<DispatchCell> cells, std::size_t scenarios,
                               std::size_t trains, std::vector<std::size_t> stop_offset,
                               std::size_t total_stops, bool linking)
    : origins_(origins), scenarios_(scenarios), trains_(trains), stops_(total_stops), linking_(linking),
      cells_(std::move(cells)), stop_offset_(std::move(stop_offset)) {
    const std::size_t h = cells_.size() * scenarios_;
    y0_ = 0;
    x0_ = y0_ + origins_;
    z0_ = x0_ + h;
    u0_ = z0_ + (linking_ ? h : 0);
    i0_ = u0_ + scenarios_ * trains_;
    e0_ = i0_ + scenarios_ * stops_;
    s0_ = e0_ + scenarios_;
    theta_ = s0_ + scenarios_;
}

int VariableLayout::z(std::size_t scenario, std::size_t cell) const {
    if (!linking_)
        throw PlannerError(ErrorCode::IndexOutOfRange, "layout has no linking variables");
    return static_cast<int>(z0_ + scenario * cells_.size() + cell);
}

VarRef VariableLayout::describe(std::size_t col) const {
    const std::size_t h = cells_.size();
    if (col < x0_)
        return {VarKind::Prepare, 0, col - y0_};
    if (col < z0_)
        return {VarKind::Flow, (col - x0_) / h, (col - x0_) % h};
    if (col < u0_)
        return {VarKind::Link, (col - z0_) / h, (col - z0_) % h};
    if (col < i0_)
        return {VarKind::Unmet, (col - u0_) / trains_, (col - u0_) % trains_};
    if (col < e0_)
        return {VarKind::Inventory, (col - i0_) / stops_, (col - i0_) % stops_};
    if (col < s0_)
        return {VarKind::Excess, col - e0_, 0};
    if (col < theta_)
        return {VarKind::Shortfall, col - s0_, 0};
    if (col == theta_)
        return {VarKind::Var, 0, 0};
    throw PlannerError(ErrorCode::IndexOutOfRange, "column " + std::to_string(col) + " is not allocated");
}

std::string VariableLayout::name(std::size_t col) const {
    const VarRef r = describe(col);
    std::ostringstream s;
    s << to_string(r.kind);
    switch (r.kind) {
        case VarKind::Prepare: s << "_i" << r.entity; break;
        case VarKind::Flow:
        case VarKind::Link: {
            const auto& c = cells_[r.entity];
            s << "_i" << c.origin << "_j" << c.hub << "_n" << c.train << "_t" << c.period << "_w" << r.scenario;
            break;
        }
        case VarKind::Unmet: s << "_n" << r.entity << "_w" << r.scenario; break;
        case VarKind::Inventory: {
            const auto it = std::upper_bound(stop_offset_.begin(), stop_offset_.end(), r.entity);
            const auto train = static_cast<std::size_t>(it - stop_offset_.begin()) - 1;
            s << "_n" << train << "_k" << (r.entity - stop_offset_[train]) << "_w" << r.scenario;
            break;
        }
        case VarKind::Excess:
        case VarKind::Shortfall: s << "_w" << r.scenario; break;
        case VarKind::Var: break;
    }
    return s.str();
}

double LinearExpr::evaluate(std::span<const double> x) const {
    double v = constant;
    for (const auto& [col, coef] : terms)
        v += coef * x[static_cast<std::size_t>(col)];
    return v;
}

std::vector<DispatchCell> dispatch_cells(const Instance& inst, bool use_transfer) {
    std::vector<DispatchCell> cells;
    for (std::size_t i = 0; i < inst.origins.size(); ++i) {
        for (std::size_t n = 0; n < inst.trains.size(); ++n) {
            const auto& stops = inst.trains[n].stops;
            for (std::size_t k = 0; k < stops.size(); ++k) {
                const auto hub = inst.hub_index(stops[k].hub);
                if (!hub || !inst.origins[i].arcs.count(stops[k].hub))
                    continue;
                for (int t = 0; t < inst.periods; ++t) {
                    if (!time_feasible(inst, i, *hub, n, t, use_transfer))
                        break;  // feasible periods form a prefix
                    cells.push_back({i, *hub, n, k, t});
                }
            }
        }
    }
    return cells;
}

namespace {

void require_valid(const Instance& inst, const ScenarioSet& scen) {
    auto report = validate_instance(inst);
    auto more = validate_scenarios(scen, inst);
    report.insert(report.end(), more.begin(), more.end());
    if (!report.empty())
        throw PlannerError(ErrorCode::ValidationFailed,
                           "invalid input: " + report.front().code + " (" + report.front().message + ")");
}

std::string suffix_w(std::size_t w) { return "_w" + std::to_string(w); }

}  // namespace

long big_m(const Instance& inst, const ScenarioSet& scen, std::size_t origin, std::size_t hub,
           std::size_t train, std::size_t scenario) {
    if (origin >= inst.origins.size() || hub >= inst.hubs.size() || train >= inst.trains.size() ||
        scenario >= scen.size())
        throw PlannerError(ErrorCode::IndexOutOfRange, "big_m: index out of range");
    const auto& s = scen.scenarios[scenario];
    const auto& tid = inst.trains[train].id;
    const long m = std::min({inst.origins[origin].max_prepare, s.capacity_at(tid, inst.hubs[hub].id),
                             s.demand_of(tid)});
    return std::max(0L, m);
}

MilpModel build_milp(const Instance& inst, const ScenarioSet& scen, const RiskParams& risk,
                     const BuildOptions& options) {
    check_risk(risk);
    require_valid(inst, scen);

    const std::size_t O = inst.origins.size();
    const std::size_t N = inst.trains.size();
    const std::size_t S = scen.size();
    std::vector<std::size_t> stop_offset(N + 1, 0);
    for (std::size_t n = 0; n < N; ++n)
        stop_offset[n + 1] = stop_offset[n] + inst.trains[n].stops.size();
    const std::size_t R = stop_offset[N];

    MilpModel model;
    model.context = BuildContext{inst, scen, risk, options, options.epsilon_override.value_or(inst.emissions.cap)};
    model.layout = VariableLayout(O, dispatch_cells(inst, options.use_transfer), S, N, stop_offset, R,
                                  options.linking);
    const auto& L = model.layout;
    const auto& cells = L.cells();
    const std::size_t H0 = cells.size();
    auto& lp = model.program;

    const double lambda = risk.lambda;
    const double rho = inst.cost.emissions_penalty;

    auto arc_of = [&](const DispatchCell& c) -> const Arc& {
        return inst.origins[c.origin].arcs.at(inst.hubs[c.hub].id);
    };
    auto unit_cost = [&](const DispatchCell& c) {
        const Arc& a = arc_of(c);
        return options.use_transfer ? a.cost + a.transfer_cost : a.cost;
    };

    // Columns, in layout order.
    for (std::size_t i = 0; i < O; ++i)
        lp.add_column(inst.origins[i].prep_cost, 0.0, static_cast<double>(inst.origins[i].max_prepare),
                      VarType::Integer);
    for (std::size_t w = 0; w < S; ++w) {
        const double p = scen.scenarios[w].probability;
        for (const auto& c : cells)
            lp.add_column((1.0 - lambda) * p * unit_cost(c), 0.0, kInf, VarType::Integer);
    }
    if (options.linking)
        for (std::size_t k = 0; k < S * H0; ++k)
            lp.add_column(0.0, 0.0, 1.0, VarType::Binary);
    for (std::size_t w = 0; w < S; ++w) {
        const double p = scen.scenarios[w].probability;
        for (std::size_t n = 0; n < N; ++n)
            lp.add_column((1.0 - lambda) * p * inst.cost.unmet_penalty_for(w), 0.0, kInf, VarType::Integer);
    }
    for (std::size_t k = 0; k < S * R; ++k)
        lp.add_column(0.0, 0.0, kInf, VarType::Integer);
    for (std::size_t w = 0; w < S; ++w)
        lp.add_column(rho * scen.scenarios[w].probability, 0.0, kInf, VarType::Continuous);
    for (std::size_t w = 0; w < S; ++w)
        lp.add_column(lambda * scen.scenarios[w].probability / (1.0 - risk.alpha), 0.0, kInf,
                      VarType::Continuous);
    lp.add_column(lambda, -kInf, kInf, VarType::Continuous);

    // Cells grouped by origin, by global stop and by train for the row blocks.
    std::vector<std::vector<std::size_t>> by_origin(O), by_stop(R), by_train(N);
    for (std::size_t c = 0; c < H0; ++c) {
        by_origin[cells[c].origin].push_back(c);
        by_stop[stop_offset[cells[c].train] + cells[c].stop].push_back(c);
        by_train[cells[c].train].push_back(c);
    }

    for (std::size_t w = 0; w < S; ++w) {
        const Scenario& s = scen.scenarios[w];
        const std::string sw = suffix_w(w);

        for (std::size_t i = 0; i < O; ++i) {
            std::vector<std::pair<int, double>> t;
            for (auto c : by_origin[i])
                t.emplace_back(L.x(w, c), 1.0);
            t.emplace_back(L.y(i), -1.0);
            lp.add_row(std::move(t), Sense::LessEqual, 0.0, "supply_i" + std::to_string(i) + sw);
        }

        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t k = 0; k < inst.trains[n].stops.size(); ++k) {
                const auto r = stop_offset[n] + k;
                std::vector<std::pair<int, double>> t;
                for (auto c : by_stop[r])
                    t.emplace_back(L.x(w, c), 1.0);
                const auto K = s.capacity_at(inst.trains[n].id, inst.trains[n].stops[k].hub);
                lp.add_row(std::move(t), Sense::LessEqual, static_cast<double>(K),
                           "capacity_n" + std::to_string(n) + "_k" + std::to_string(k) + sw);
            }

        if (options.linking)
            for (std::size_t c = 0; c < H0; ++c) {
                const auto& cell = cells[c];
                const auto M = big_m(inst, scen, cell.origin, cell.hub, cell.train, w);
                lp.add_row({{L.x(w, c), 1.0}, {L.z(w, c), -static_cast<double>(M)}}, Sense::LessEqual, 0.0,
                           "link" + L.name(static_cast<std::size_t>(L.x(w, c))).substr(1));
            }

        {
            std::vector<std::pair<int, double>> t;
            for (std::size_t c = 0; c < H0; ++c) {
                const double coef = inst.emission_rate(cells[c].period) * arc_of(cells[c]).travel_time;
                if (coef != 0.0)
                    t.emplace_back(L.x(w, c), coef);
            }
            t.emplace_back(L.excess(w), -1.0);
            lp.add_row(std::move(t), Sense::LessEqual, model.context.epsilon, "emissions" + sw);
        }

        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t k = 0; k < inst.trains[n].stops.size(); ++k) {
                const auto r = stop_offset[n] + k;
                std::vector<std::pair<int, double>> t{{L.inventory(w, r), 1.0}};
                if (k > 0)
                    t.emplace_back(L.inventory(w, r - 1), -1.0);
                for (auto c : by_stop[r])
                    t.emplace_back(L.x(w, c), -1.0);
                lp.add_row(std::move(t), Sense::Equal, 0.0,
                           (k == 0 ? "inventory_first_n" : "inventory_n") + std::to_string(n) + "_k" +
                               std::to_string(k) + sw);
            }

        for (std::size_t n = 0; n < N; ++n) {
            std::vector<std::pair<int, double>> t;
            for (auto c : by_train[n])
                t.emplace_back(L.x(w, c), 1.0);
            t.emplace_back(L.unmet(w, n), 1.0);
            lp.add_row(std::move(t), Sense::Equal, static_cast<double>(s.demand_of(inst.trains[n].id)),
                       "demand_n" + std::to_string(n) + sw);
        }

        for (std::size_t n = 0; n < N; ++n) {
            const auto last = stop_offset[n + 1] - 1;
            lp.add_row({{L.inventory(w, last), 1.0}}, Sense::LessEqual,
                       static_cast<double>(s.demand_of(inst.trains[n].id)),
                       "final_inventory_n" + std::to_string(n) + sw);
        }

        // xi_w >= c_ew - theta
        {
            auto expr = scenario_cost_expr(model, w);
            std::vector<std::pair<int, double>> t{{L.shortfall(w), 1.0}, {L.var(), 1.0}};
            for (const auto& [col, coef] : expr.terms)
                t.emplace_back(col, -coef);
            lp.add_row(std::move(t), Sense::GreaterEqual, expr.constant, "cvar" + sw);
        }
    }

    // Census against the closed forms.
    const std::size_t H = S * H0;
    const std::size_t expect_cols = O + (options.linking ? 2 : 1) * H + S * N + S * R + S + S + 1;
    const std::size_t expect_rows = S * (O + R + 1 + R + N + N + 1) + (options.linking ? H : 0);
    if (lp.num_cols() != expect_cols || lp.num_rows() != expect_rows || L.size() != expect_cols)
        throw std::logic_error("build_milp: census mismatch (cols " + std::to_string(lp.num_cols()) + " vs " +
                               std::to_string(expect_cols) + ", rows " + std::to_string(lp.num_rows()) +
                               " vs " + std::to_string(expect_rows) + ")");
    return model;
}

LinearExpr scenario_cost_expr(const MilpModel& model, std::size_t scenario) {
    const auto& ctx = model.context;
    const auto& L = model.layout;
    if (scenario >= L.scenarios())
        throw PlannerError(ErrorCode::IndexOutOfRange, "scenario_cost_expr: scenario out of range");
    LinearExpr e;
    const auto& cells = L.cells();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Arc& a = ctx.instance.origins[cells[c].origin].arcs.at(ctx.instance.hubs[cells[c].hub].id);
        const double coef = ctx.options.use_transfer ? a.cost + a.transfer_cost : a.cost;
        if (coef != 0.0)
            e.terms.emplace_back(L.x(scenario, c), coef);
    }
    const double pi = ctx.instance.cost.unmet_penalty_for(scenario);
    if (pi != 0.0)
        for (std::size_t n = 0; n < L.trains(); ++n)
            e.terms.emplace_back(L.unmet(scenario, n), pi);
    return e;
}

void fix_first_stage(MilpModel& model, std::span<const long> prepare) {
    if (prepare.size() != model.layout.origins())
        throw PlannerError(ErrorCode::InvalidArgument, "fix_first_stage: expected one quantity per origin");
    for (std::size_t i = 0; i < prepare.size(); ++i) {
        const auto col = static_cast<std::size_t>(model.layout.y(i));
        model.program.lower[col] = static_cast<double>(prepare[i]);
        model.program.upper[col] = static_cast<double>(prepare[i]);
    }
}

double Plan::weighted_total() const {
    return breakdown.first_stage + (1.0 - risk.lambda) * (breakdown.transport + breakdown.unmet) +
           risk.lambda * breakdown.cvar + breakdown.emissions;
}

std::vector<double> Plan::second_stage_costs() const {
    std::vector<double> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios)
        out.push_back(s.second_stage_cost());
    return out;
}

namespace {

long as_count(double v, const VariableLayout& L, std::size_t col) {
    const double r = std::round(v);
    if (std::abs(v - r) > kIntegralityTolerance)
        throw PlannerError(ErrorCode::DecodeInconsistent,
                           "decode: " + L.name(col) + " = " + std::to_string(v) + " is not integral");
    if (r < 0)
        throw PlannerError(ErrorCode::DecodeInconsistent, "decode: " + L.name(col) + " is negative");
    return static_cast<long>(r);
}

}  // namespace

Plan decode(const MilpModel& model, std::span<const double> v) {
    if (v.size() != model.program.num_cols())
        throw PlannerError(ErrorCode::DecodeInconsistent, "decode: vector length does not match the model");
    double obj = model.program.objective_constant;
    for (std::size_t j = 0; j < v.size(); ++j)
        obj += model.program.objective[j] * v[j];
    return decode(model, v, obj);
}

Plan decode(const MilpModel& model, std::span<const double> v, double solver_objective) {
    const auto& L = model.layout;
    const auto& ctx = model.context;
    const auto& inst = ctx.instance;
    if (v.size() != model.program.num_cols())
        throw PlannerError(ErrorCode::DecodeInconsistent, "decode: vector length does not match the model");

    Plan plan;
    plan.risk = ctx.risk;
    for (std::size_t i = 0; i < L.origins(); ++i) {
        const auto col = static_cast<std::size_t>(L.y(i));
        plan.prepare.push_back(as_count(v[col], L, col));
        plan.breakdown.first_stage += inst.origins[i].prep_cost * static_cast<double>(plan.prepare.back());
    }
    if (L.linking())
        for (std::size_t w = 0; w < L.scenarios(); ++w)
            for (std::size_t c = 0; c < L.cells().size(); ++c) {
                const auto col = static_cast<std::size_t>(L.z(w, c));
                if (as_count(v[col], L, col) > 1)
                    throw PlannerError(ErrorCode::DecodeInconsistent, "decode: " + L.name(col) + " exceeds 1");
            }

    const double rho = inst.cost.emissions_penalty;
    const auto& cells = L.cells();
    for (std::size_t w = 0; w < L.scenarios(); ++w) {
        ScenarioPlan sp;
        const double p = ctx.scenarios.scenarios[w].probability;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto col = static_cast<std::size_t>(L.x(w, c));
            const long q = as_count(v[col], L, col);
            if (q == 0)
                continue;
            const auto& cell = cells[c];
            const Arc& a = inst.origins[cell.origin].arcs.at(inst.hubs[cell.hub].id);
            const double unit = ctx.options.use_transfer ? a.cost + a.transfer_cost : a.cost;
            sp.flows.push_back({cell.origin, cell.hub, cell.train, cell.period, q});
            sp.transport_cost += unit * static_cast<double>(q);
            sp.emissions += inst.emission_rate(cell.period) * a.travel_time * static_cast<double>(q);
        }
        for (std::size_t n = 0; n < L.trains(); ++n) {
            const auto col = static_cast<std::size_t>(L.unmet(w, n));
            sp.unmet.push_back(as_count(v[col], L, col));
            sp.unmet_cost += inst.cost.unmet_penalty_for(w) * static_cast<double>(sp.unmet.back());
        }
        for (std::size_t r = 0; r < L.total_stops(); ++r) {
            const auto col = static_cast<std::size_t>(L.inventory(w, r));
            sp.inventory.push_back(as_count(v[col], L, col));
        }
        sp.excess_emissions = v[static_cast<std::size_t>(L.excess(w))];
        sp.shortfall = v[static_cast<std::size_t>(L.shortfall(w))];
        if (sp.excess_emissions < -kIntegralityTolerance || sp.shortfall < -kIntegralityTolerance)
            throw PlannerError(ErrorCode::DecodeInconsistent, "decode: negative excess or shortfall");
        sp.emissions_penalty = rho * sp.excess_emissions;

        plan.breakdown.transport += p * sp.transport_cost;
        plan.breakdown.unmet += p * sp.unmet_cost;
        plan.breakdown.emissions += p * sp.emissions_penalty;
        plan.probabilities.push_back(p);
        plan.scenarios.push_back(std::move(sp));
    }
    plan.var = v[static_cast<std::size_t>(L.var())];
    double tail = 0.0;
    for (std::size_t w = 0; w < L.scenarios(); ++w)
        tail += plan.probabilities[w] * plan.scenarios[w].shortfall;
    plan.cvar = plan.var + tail / (1.0 - ctx.risk.alpha);
    plan.breakdown.cvar = plan.cvar;
    plan.objective = solver_objective;

    const double recomputed = plan.weighted_total();
    if (std::abs(recomputed - solver_objective) > 1e-6 * std::max(1.0, std::abs(solver_objective)))
        throw PlannerError(ErrorCode::DecodeInconsistent,
                           "decode: recomputed objective " + std::to_string(recomputed) +
                               " differs from solver objective " + std::to_string(solver_objective));
    return plan;
}

namespace {

void write_term(std::ostream& out, double coef, const std::string& name, bool first) {
    if (coef < 0)
        out << (first ? "- " : " - ");
    else if (!first)
        out << " + ";
    const double a = std::abs(coef);
    if (a != 1.0)
        out << a << ' ';
    out << name;
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
    const auto& lp = model.program;
    const auto& L = model.layout;
    out << std::setprecision(17);
    out << "\\ deterministic-equivalent intermodal planning model\n";
    out << "Minimize\n obj:";
    bool first = true;
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
        if (lp.objective[j] == 0.0)
            continue;
        out << ' ';
        write_term(out, lp.objective[j], L.name(j), first);
        first = false;
    }
    if (first)
        out << " 0 " << L.name(0);
    out << "\nSubject To\n";
    for (std::size_t r = 0; r < lp.num_rows(); ++r) {
        out << ' ' << lp.row_name[r] << ": ";
        bool f = true;
        for (std::size_t k = lp.row_start[r]; k < lp.row_start[r + 1]; ++k) {
            write_term(out, lp.row_value[k], L.name(static_cast<std::size_t>(lp.row_index[k])), f);
            f = false;
        }
        if (f)
            out << "0 " << L.name(0);
        switch (lp.sense[r]) {
            case Sense::LessEqual: out << " <= "; break;
            case Sense::Equal: out << " = "; break;
            case Sense::GreaterEqual: out << " >= "; break;
        }
        out << lp.rhs[r] << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
        const auto& n = L.name(j);
        if (lp.lower[j] == -kInf && lp.upper[j] == kInf)
            out << ' ' << n << " free\n";
        else if (lp.upper[j] == kInf)
            out << ' ' << n << " >= " << lp.lower[j] << '\n';
        else
            out << ' ' << lp.lower[j] << " <= " << n << " <= " << lp.upper[j] << '\n';
    }
    out << "Generals\n";
    for (std::size_t j = 0; j < lp.num_cols(); ++j)
        if (lp.type[j] == VarType::Integer)
            out << ' ' << L.name(j) << '\n';
    out << "Binaries\n";
    for (std::size_t j = 0; j < lp.num_cols(); ++j)
        if (lp.type[j] == VarType::Binary)
            out << ' ' << L.name(j) << '\n';
    out << "End\n";
}

}  // namespace planner
