#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "planner/error.hpp"
#include "planner/risk.hpp"

#include <random>

using namespace planner;

namespace {
const std::vector<double> kCosts{10, 20, 30, 40};
const std::vector<double> kUniform{0.25, 0.25, 0.25, 0.25};
}  // namespace

TEST_CASE("spot values") {
    CHECK(cvar_primal(kCosts, kUniform, 0.75).cvar == doctest::Approx(40));
    CHECK(cvar_primal(kCosts, kUniform, 0.5).cvar == doctest::Approx(35));
    CHECK(cvar_primal(kCosts, kUniform, 0.0).cvar == doctest::Approx(25));
    auto single = cvar_primal(std::vector<double>{136}, std::vector<double>{1.0}, 0.4);
    CHECK(single.var == 136);
    CHECK(single.cvar == 136);
}

TEST_CASE("dual tail weights") {
    auto d = cvar_dual(kCosts, kUniform, 0.75);
    CHECK(d.cvar == doctest::Approx(40));
    CHECK(d.tail_weights == std::vector<double>{0, 0, 0, 0.25});
    d = cvar_dual(kCosts, kUniform, 0.5);
    CHECK(d.cvar == doctest::Approx(35));
    CHECK(d.tail_weights == std::vector<double>{0, 0, 0.25, 0.25});
    for (double a : {0.1, 0.5, 0.95})
        CHECK(cvar_dual(std::vector<double>{7, 7, 7}, std::vector<double>{0.2, 0.3, 0.5}, a).cvar ==
              doctest::Approx(7));
}

TEST_CASE("bad inputs") {
    CHECK_THROWS_AS(cvar_dual(kCosts, kUniform, 0.0), PlannerError);
    CHECK_THROWS_AS(cvar_primal(kCosts, kUniform, 1.0), PlannerError);
    CHECK_THROWS_AS(cvar_primal(kCosts, std::vector<double>{0.5, 0.5}, 0.5), PlannerError);
    CHECK_THROWS_AS(cvar_primal(kCosts, std::vector<double>{0.3, 0.3, 0.3, 0.3}, 0.5), PlannerError);
}

TEST_CASE("primal, dual and tail oracle agree; coherence properties") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 20;
        std::vector<double> c(n), p(n);
        double total = 0;
        for (std::size_t k = 0; k < n; ++k) {
            c[k] = std::round(u(rng) * 1000) / 10;
            p[k] = u(rng) + 0.01;
            total += p[k];
        }
        for (auto& x : p)
            x /= total;
        const double alpha = 0.01 + 0.98 * u(rng);
        const auto primal = cvar_primal(c, p, alpha);
        CHECK(std::abs(primal.cvar - cvar_dual(c, p, alpha).cvar) <= 1e-9);
        CHECK(primal.cvar == doctest::Approx(testing::tail_average(c, p, alpha)));
        CHECK(primal.cvar >= primal.var - 1e-12);
        double mean = 0;
        for (std::size_t k = 0; k < n; ++k)
            mean += p[k] * c[k];
        CHECK(primal.cvar >= mean - 1e-9);
        CHECK(cvar_primal(c, p, std::min(0.99, alpha + 0.05)).cvar >= primal.cvar - 1e-9);
        auto shifted = c, scaled = c;
        for (auto& x : shifted)
            x += 12.5;
        for (auto& x : scaled)
            x *= 3;
        CHECK(cvar_primal(shifted, p, alpha).cvar == doctest::Approx(primal.cvar + 12.5));
        CHECK(cvar_primal(scaled, p, alpha).cvar == doctest::Approx(3 * primal.cvar));
    }
}

TEST_CASE("single-scenario stochastic values coincide") {
    SolverConfig cfg;
    auto rep = stochastic_values(testing::tiny_instance(), testing::tiny_scenarios(), cfg);
    REQUIRE(rep.complete());
    CHECK(*rep.ss == doctest::Approx(136));
    CHECK(*rep.eev == doctest::Approx(136));
    CHECK(*rep.ws == doctest::Approx(136));
    CHECK(*rep.vss == doctest::Approx(0));
    CHECK(*rep.evpi == doctest::Approx(0));
    CHECK(*rep.cvar_ss == doctest::Approx(130));
}

TEST_CASE("two-scenario values match enumeration") {
    auto inst = testing::two_by_two_instance();
    auto scen = testing::two_by_two_scenarios();
    auto rep = stochastic_values(inst, scen, SolverConfig{});
    REQUIRE(rep.complete());
    const double ss = testing::brute_force_optimum(inst, scen);
    double ws = 0;
    for (std::size_t w = 0; w < scen.size(); ++w) {
        ScenarioSet one;
        one.scenarios = {scen.scenarios[w]};
        one.scenarios[0].probability = 1;
        ws += scen.scenarios[w].probability * testing::brute_force_optimum(inst, one);
    }
    testing::OracleOptions fixed;
    fixed.prepare = rep.ev_prepare;
    const double eev = testing::brute_force_optimum(inst, scen, fixed);
    CHECK(*rep.ss == doctest::Approx(ss));
    CHECK(*rep.ws == doctest::Approx(ws));
    CHECK(*rep.eev == doctest::Approx(eev));
    CHECK(*rep.vss >= -1e-9);
    CHECK(*rep.evpi >= -1e-9);
}
