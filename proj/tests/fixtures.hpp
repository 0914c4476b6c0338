#pragma once

// Shared test instances and generators.

#include <cstdint>
#include <random>
#include <string>

#include "planner/instance.hpp"
#include "planner/scenario.hpp"

namespace planner::testing {

/// One origin, one hub, one train, one period, one scenario:
/// kappa=5, K=3, D=4, C=10, O=2, pi=100.
inline Instance tiny_instance() {
    Instance inst;
    inst.periods = 1;
    Origin o;
    o.id = "W1";
    o.prep_cost = 2.0;
    o.max_prepare = 5;
    o.arcs["H1"] = Arc{0, 10.0, 0, 0.0};
    inst.origins.push_back(o);
    inst.hubs.push_back({"H1"});
    inst.trains.push_back({"T1", {{"H1", 0}}});
    inst.cost.unmet_penalty = {100.0};
    inst.cost.emissions_penalty = 0.0;
    inst.emissions.cap = 0.0;
    inst.emissions.rate = {0.0};
    return inst;
}

inline ScenarioSet tiny_scenarios(long capacity = 3, long demand = 4) {
    ScenarioSet s;
    Scenario sc;
    sc.capacity["T1"]["H1"] = capacity;
    sc.demand["T1"] = demand;
    sc.probability = 1.0;
    s.scenarios.push_back(sc);
    return s;
}

/// Two origins, two hubs, one train through both hubs.
inline Instance two_by_two_instance() {
    Instance inst;
    inst.periods = 3;
    Origin a;
    a.id = "A";
    a.prep_cost = 5.0;
    a.max_prepare = 10;
    a.arcs["H1"] = Arc{1, 20.0, 1, 4.0};
    a.arcs["H2"] = Arc{2, 30.0, 0, 0.0};
    Origin b;
    b.id = "B";
    b.prep_cost = 3.0;
    b.max_prepare = 6;
    b.arcs["H2"] = Arc{1, 25.0, 1, 2.0};
    inst.origins = {a, b};
    inst.hubs = {{"H1"}, {"H2"}};
    inst.trains.push_back({"T1", {{"H1", 2}, {"H2", 4}}});
    inst.cost.unmet_penalty = {200.0};
    inst.cost.emissions_penalty = 1.0;
    inst.emissions.cap = 10.0;
    inst.emissions.rate = {2.0, 1.0, 0.5};
    return inst;
}

inline ScenarioSet two_by_two_scenarios() {
    ScenarioSet s;
    Scenario lo, hi;
    lo.capacity["T1"] = {{"H1", 2}, {"H2", 3}};
    lo.demand["T1"] = 3;
    lo.probability = 0.5;
    hi.capacity["T1"] = {{"H1", 3}, {"H2", 4}};
    hi.demand["T1"] = 7;
    hi.probability = 0.5;
    s.scenarios = {lo, hi};
    return s;
}

struct RandomShape {
    std::size_t max_origins = 2;
    std::size_t max_hubs = 4;
    std::size_t max_trains = 3;
    int max_periods = 3;
    std::size_t max_scenarios = 6;
    long max_kappa = 8;
    long max_capacity = 5;
    long max_demand = 8;
};

inline long rand_between(std::mt19937_64& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Random valid instance + scenario set. Train routes are random subsets of
/// hubs with increasing departures.
inline std::pair<Instance, ScenarioSet> random_problem(std::uint64_t seed, const RandomShape& shape = {}) {
    std::mt19937_64 rng(seed);
    Instance inst;
    inst.periods = static_cast<int>(rand_between(rng, 1, shape.max_periods));
    const auto hubs = static_cast<std::size_t>(rand_between(rng, 1, static_cast<long>(shape.max_hubs)));
    for (std::size_t j = 0; j < hubs; ++j)
        inst.hubs.push_back({"H" + std::to_string(j)});
    const auto origins = static_cast<std::size_t>(rand_between(rng, 1, static_cast<long>(shape.max_origins)));
    for (std::size_t i = 0; i < origins; ++i) {
        Origin o;
        o.id = "W" + std::to_string(i);
        o.prep_cost = static_cast<double>(rand_between(rng, 0, 20));
        o.max_prepare = rand_between(rng, 0, shape.max_kappa);
        for (std::size_t j = 0; j < hubs; ++j)
            if (rng() % 3 != 0)
                o.arcs["H" + std::to_string(j)] =
                    Arc{static_cast<int>(rand_between(rng, 0, 2)), static_cast<double>(rand_between(rng, 5, 60)),
                        static_cast<int>(rand_between(rng, 0, 1)), static_cast<double>(rand_between(rng, 0, 10))};
        inst.origins.push_back(o);
    }
    const auto trains = static_cast<std::size_t>(rand_between(rng, 1, static_cast<long>(shape.max_trains)));
    for (std::size_t n = 0; n < trains; ++n) {
        Train t;
        t.id = "T" + std::to_string(n);
        int dep = static_cast<int>(rand_between(rng, 0, 2));
        for (std::size_t j = 0; j < hubs; ++j)
            if (t.stops.empty() || rng() % 2 == 0) {
                t.stops.push_back({"H" + std::to_string(j), dep});
                dep += static_cast<int>(rand_between(rng, 1, 2));
            }
        inst.trains.push_back(t);
    }
    inst.cost.unmet_penalty = {static_cast<double>(rand_between(rng, 50, 150))};
    inst.cost.emissions_penalty = static_cast<double>(rand_between(rng, 0, 3));
    inst.emissions.cap = static_cast<double>(rand_between(rng, 0, 20));
    for (int t = 0; t < inst.periods; ++t)
        inst.emissions.rate.push_back(static_cast<double>(rand_between(rng, 0, 4)) * 0.5);

    ScenarioSet set;
    const auto S = static_cast<std::size_t>(rand_between(rng, 1, static_cast<long>(shape.max_scenarios)));
    for (std::size_t w = 0; w < S; ++w) {
        Scenario sc;
        sc.probability = 1.0 / static_cast<double>(S);
        for (const auto& t : inst.trains) {
            sc.demand[t.id] = rand_between(rng, 0, shape.max_demand);
            for (const auto& st : t.stops)
                sc.capacity[t.id][st.hub] = rand_between(rng, 0, shape.max_capacity);
        }
        set.scenarios.push_back(sc);
    }
    return {inst, set};
}

}  // namespace planner::testing
