#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "planner/error.hpp"
#include "planner/model.hpp"
#include "planner/plan_solver.hpp"

#include <set>
#include <sstream>

using namespace planner;
using testing::tiny_instance;
using testing::tiny_scenarios;

namespace {

Instance single_arc(long kappa, double cost, double transfer_cost = 0, int transfer_time = 0) {
    auto inst = tiny_instance();
    inst.origins[0].max_prepare = kappa;
    inst.origins[0].arcs["H1"] = Arc{0, cost, transfer_time, transfer_cost};
    return inst;
}

double coef(const MilpModel& m, int col) { return m.program.objective[static_cast<std::size_t>(col)]; }

}  // namespace

TEST_CASE("single-scenario objective weight") {
    auto m = build_milp(tiny_instance(), tiny_scenarios(), {0.0, 0.0});
    CHECK(coef(m, m.layout.x(0, 0)) == 10.0);
    CHECK(coef(m, m.layout.y(0)) == 2.0);
    CHECK(coef(m, m.layout.unmet(0, 0)) == 100.0);
    CHECK(coef(m, m.layout.var()) == 0.0);
    CHECK(coef(m, m.layout.shortfall(0)) == 0.0);
}

TEST_CASE("lambda = 1 leaves only risk, emissions and first stage in the objective") {
    auto m = build_milp(testing::two_by_two_instance(), testing::two_by_two_scenarios(), {1.0, 0.5});
    const auto& L = m.layout;
    for (std::size_t w = 0; w < L.scenarios(); ++w) {
        for (std::size_t c = 0; c < L.cells().size(); ++c)
            CHECK(coef(m, L.x(w, c)) == 0.0);
        for (std::size_t n = 0; n < L.trains(); ++n)
            CHECK(coef(m, L.unmet(w, n)) == 0.0);
        CHECK(coef(m, L.excess(w)) > 0.0);
        CHECK(coef(m, L.shortfall(w)) == doctest::Approx(1.0));
    }
    CHECK(coef(m, L.var()) == 1.0);
    CHECK(coef(m, L.y(0)) == 5.0);
}

TEST_CASE("xi coefficient") {
    const auto inst = testing::two_by_two_instance();
    const auto scen = testing::two_by_two_scenarios();
    for (double lambda : {0.0, 0.3, 0.8}) {
        auto m = build_milp(inst, scen, {lambda, 0.5});
        CHECK(coef(m, m.layout.shortfall(0)) == doctest::Approx(lambda));
        auto m0 = build_milp(inst, scen, {lambda, 0.0});
        CHECK(coef(m0, m0.layout.shortfall(1)) == doctest::Approx(lambda * 0.5));
        if (lambda == 0.0)
            CHECK(coef(m, m.layout.var()) == 0.0);
    }
}

TEST_CASE("alpha outside [0, 1) is rejected") {
    try {
        build_milp(tiny_instance(), tiny_scenarios(), {0.5, 1.0});
        FAIL("expected rejection");
    } catch (const PlannerError& e) {
        CHECK(e.code() == ErrorCode::RejectAlpha);
    }
    CHECK_THROWS_AS(build_milp(tiny_instance(), tiny_scenarios(), {1.2, 0.5}), PlannerError);
}

TEST_CASE("big M") {
    auto inst = single_arc(50, 10);
    CHECK(big_m(inst, tiny_scenarios(8, 30), 0, 0, 0, 0) == 8);
    inst.origins[0].max_prepare = 5;
    CHECK(big_m(inst, tiny_scenarios(8, 30), 0, 0, 0, 0) == 5);
    CHECK(big_m(inst, tiny_scenarios(8, 0), 0, 0, 0, 0) == 0);
}

TEST_CASE("scenario cost expression") {
    {
        auto m = build_milp(tiny_instance(), tiny_scenarios(3, 3), {0.0, 0.0});
        std::vector<double> v(m.program.num_cols(), 0.0);
        v[static_cast<std::size_t>(m.layout.unmet(0, 0))] = 3;
        CHECK(scenario_cost_expr(m, 0).evaluate(v) == doctest::Approx(300));
    }
    auto inst = single_arc(5, 50, 10);
    {
        auto m = build_milp(inst, tiny_scenarios(3, 2), {0.0, 0.0});
        std::vector<double> v(m.program.num_cols(), 0.0);
        v[static_cast<std::size_t>(m.layout.x(0, 0))] = 2;
        CHECK(scenario_cost_expr(m, 0).evaluate(v) == doctest::Approx(100));
    }
    {
        BuildOptions bo;
        bo.use_transfer = true;
        auto m = build_milp(inst, tiny_scenarios(3, 2), {0.0, 0.0}, bo);
        std::vector<double> v(m.program.num_cols(), 0.0);
        v[static_cast<std::size_t>(m.layout.x(0, 0))] = 2;
        CHECK(scenario_cost_expr(m, 0).evaluate(v) == doctest::Approx(120));
    }
}

TEST_CASE("decode rejects fractional first stage") {
    auto m = build_milp(tiny_instance(), tiny_scenarios(), {0.0, 0.0});
    std::vector<double> v(m.program.num_cols(), 0.0);
    v[static_cast<std::size_t>(m.layout.y(0))] = 1.4;
    try {
        decode(m, v);
        FAIL("expected DecodeInconsistent");
    } catch (const PlannerError& e) {
        CHECK(e.code() == ErrorCode::DecodeInconsistent);
    }
}

TEST_CASE("decode of the zero vector on a zero-demand instance") {
    auto m = build_milp(tiny_instance(), tiny_scenarios(3, 0), {0.0, 0.0});
    std::vector<double> v(m.program.num_cols(), 0.0);
    auto plan = decode(m, v, 0.0);
    CHECK(plan.objective == 0.0);
    CHECK(plan.weighted_total() == 0.0);
}

TEST_CASE("decode cross-check catches a wrong solver objective") {
    auto out = solve_plan(tiny_instance(), tiny_scenarios(), {0.0, 0.0});
    REQUIRE(out.mip.has_incumbent());
    CHECK_THROWS_AS(decode(out.model, out.mip.incumbent, out.mip.objective + 1.0), PlannerError);
}

TEST_CASE("tiny optimum breakdown") {
    auto out = solve_plan(tiny_instance(), tiny_scenarios(), {0.0, 0.0});
    REQUIRE(out.plan);
    const auto& b = out.plan->breakdown;
    CHECK(b.first_stage == doctest::Approx(6));
    CHECK(b.transport == doctest::Approx(30));
    CHECK(b.unmet == doctest::Approx(100));
    CHECK(b.emissions == doctest::Approx(0));
    CHECK(out.plan->weighted_total() == doctest::Approx(136));
    CHECK(out.plan->scenarios[0].flows.size() == 1);
    CHECK(out.plan->scenarios[0].flows[0].quantity == 3);
}

TEST_CASE("breakdown recombines to the objective under risk weighting") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        testing::RandomShape shape;
        shape.max_hubs = 2;
        shape.max_trains = 2;
        shape.max_scenarios = 4;
        auto [inst, scen] = testing::random_problem(seed, shape);
        auto out = solve_plan(inst, scen, {0.35, 0.6});
        REQUIRE(out.plan);
        CHECK(out.plan->weighted_total() == doctest::Approx(out.mip.objective).epsilon(1e-6));
    }
}

namespace {
std::size_t total_stops(const Instance& inst) {
    std::size_t r = 0;
    for (const auto& t : inst.trains)
        r += t.stops.size();
    return r;
}
}  // namespace

TEST_CASE("census matches closed form on random shapes") {
    testing::RandomShape shape;
    shape.max_origins = 4;
    shape.max_hubs = 6;
    shape.max_trains = 4;
    shape.max_periods = 5;
    shape.max_scenarios = 5;
    for (std::uint64_t seed = 100; seed < 300; ++seed) {
        auto [inst, scen] = testing::random_problem(seed, shape);
        const bool transfer = seed % 3 == 0;
        const bool linking = seed % 4 != 0;
        const std::size_t H = testing::oracle_cells(inst, transfer).size() * scen.size();
        const std::size_t O = inst.origins.size(), S = scen.size(), N = inst.trains.size();
        const std::size_t R = total_stops(inst);
        BuildOptions bo;
        bo.use_transfer = transfer;
        bo.linking = linking;
        auto m = build_milp(inst, scen, {0.2, 0.5}, bo);
        CHECK(m.program.num_cols() == O + (linking ? 2 : 1) * H + S * N + S * R + 2 * S + 1);
        CHECK(m.program.num_rows() == S * (O + 2 * R + 2 * N + 2) + (linking ? H : 0));
        CHECK(m.layout.size() == m.program.num_cols());
    }
}

TEST_CASE("admitted cells are time-feasible and the layout is a bijection") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto [inst, scen] = testing::random_problem(seed);
        const bool transfer = seed % 2 == 0;
        BuildOptions bo;
        bo.use_transfer = transfer;
        auto m = build_milp(inst, scen, {0.5, 0.5}, bo);
        for (const auto& c : m.layout.cells())
            CHECK(time_feasible(inst, c.origin, c.hub, c.train, c.period, transfer));
        std::set<std::string> names;
        for (std::size_t col = 0; col < m.layout.size(); ++col) {
            const auto ref = m.layout.describe(col);
            int back = -1;
            switch (ref.kind) {
                case VarKind::Prepare: back = m.layout.y(ref.entity); break;
                case VarKind::Flow: back = m.layout.x(ref.scenario, ref.entity); break;
                case VarKind::Link: back = m.layout.z(ref.scenario, ref.entity); break;
                case VarKind::Unmet: back = m.layout.unmet(ref.scenario, ref.entity); break;
                case VarKind::Inventory: back = m.layout.inventory(ref.scenario, ref.entity); break;
                case VarKind::Excess: back = m.layout.excess(ref.scenario); break;
                case VarKind::Shortfall: back = m.layout.shortfall(ref.scenario); break;
                case VarKind::Var: back = m.layout.var(); break;
            }
            CHECK(back == static_cast<int>(col));
            names.insert(m.layout.name(col));
        }
        CHECK(names.size() == m.layout.size());
        CHECK_THROWS_AS(m.layout.describe(m.layout.size()), PlannerError);
    }
}

TEST_CASE("zero transfer data gives a bit-identical model") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto [inst, scen] = testing::random_problem(seed);
        auto zeroed = inst;
        for (auto& o : zeroed.origins)
            for (auto& [hub, arc] : o.arcs) {
                arc.transfer_time = 0;
                arc.transfer_cost = 0;
            }
        auto plain = build_milp(inst, scen, {0.3, 0.7});
        BuildOptions bo;
        bo.use_transfer = true;
        auto with = build_milp(zeroed, scen, {0.3, 0.7}, bo);
        CHECK(plain.program.same_numbers(with.program));
        CHECK(plain.program.row_name == with.program.row_name);
    }
}

TEST_CASE("LP export names every constraint family") {
    auto m = build_milp(testing::two_by_two_instance(), testing::two_by_two_scenarios(), {0.5, 0.5});
    std::ostringstream out;
    write_lp(m, out);
    const auto text = out.str();
    for (const char* key : {"Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End", "supply_", "capacity_",
                            "link_", "emissions_", "inventory_first_", "demand_", "final_inventory_", "cvar_"})
        CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("no time-feasible cell still builds and meets demand by shortfall") {
    auto inst = tiny_instance();
    inst.origins[0].arcs["H1"].travel_time = 3;
    auto out = solve_plan(inst, tiny_scenarios(), {0.0, 0.0});
    CHECK(out.model.layout.cells().empty());
    REQUIRE(out.optimal());
    CHECK(out.mip.objective == doctest::Approx(400));
}

TEST_CASE("small random instances agree with exhaustive enumeration") {
    testing::RandomShape shape;
    shape.max_origins = 2;
    shape.max_hubs = 2;
    shape.max_trains = 2;
    shape.max_periods = 2;
    shape.max_scenarios = 3;
    shape.max_kappa = 4;
    shape.max_capacity = 3;
    shape.max_demand = 4;
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 120 && compared < 40; ++seed) {
        auto [inst, scen] = testing::random_problem(seed, shape);
        if (testing::oracle_cells(inst, false).size() * scen.size() > 6)
            continue;
        for (RiskParams risk : {RiskParams{0.0, 0.0}, RiskParams{0.6, 0.5}}) {
            testing::OracleOptions o;
            o.lambda = risk.lambda;
            o.alpha = risk.alpha;
            const double ref = testing::brute_force_optimum(inst, scen, o);
            auto out = solve_plan(inst, scen, risk);
            REQUIRE(out.optimal());
            CHECK(out.mip.objective == doctest::Approx(ref).epsilon(1e-9));
            CHECK(out.violations.empty());
        }
        ++compared;
    }
    CHECK(compared >= 20);
}
