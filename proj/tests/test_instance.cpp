#include "doctest.h"
#include "fixtures.hpp"
#include "planner/error.hpp"
#include "planner/instance.hpp"

using namespace planner;
using planner::testing::two_by_two_instance;

TEST_CASE("well-formed instance validates clean") {
    CHECK(validate_instance(two_by_two_instance()).empty());
    CHECK(validate_instance(testing::tiny_instance()).empty());
}

TEST_CASE("negative kappa is reported") {
    auto inst = two_by_two_instance();
    inst.origins[0].max_prepare = -1;
    auto rep = validate_instance(inst);
    REQUIRE(has_code(rep, "NEGATIVE_CAPACITY"));
    CHECK(rep.front().path == "/origins/0/kappa");
}

TEST_CASE("train stopping at an undeclared hub") {
    auto inst = two_by_two_instance();
    inst.trains[0].stops.push_back({"X", 9});
    CHECK(has_code(validate_instance(inst), "DANGLING_HUB_REF"));
}

TEST_CASE("other structural violations") {
    auto inst = two_by_two_instance();
    inst.trains[0].stops[1].departure = 1;
    CHECK(has_code(validate_instance(inst), "NONMONOTONE_SCHEDULE"));

    inst = two_by_two_instance();
    inst.periods = 0;
    CHECK(has_code(validate_instance(inst), "BAD_PERIODS"));

    inst = two_by_two_instance();
    inst.origins[1].arcs["H2"].cost = -1;
    CHECK(has_code(validate_instance(inst), "NEGATIVE_COST"));

    inst = two_by_two_instance();
    inst.emissions.rate = {1.0, 2.0};
    CHECK(has_code(validate_instance(inst), "RATE_LENGTH"));

    inst = two_by_two_instance();
    inst.cost.emissions_penalty = -2;
    CHECK(has_code(validate_instance(inst), "NEGATIVE_PENALTY"));

    inst = two_by_two_instance();
    inst.origins.clear();
    CHECK(has_code(validate_instance(inst), "EMPTY_ORIGINS"));
}

TEST_CASE("validation is idempotent and leaves the instance untouched") {
    auto inst = two_by_two_instance();
    inst.origins[0].max_prepare = -4;
    const auto copy = inst;
    auto a = validate_instance(inst);
    auto b = validate_instance(inst);
    CHECK(inst == copy);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(a[k].code == b[k].code);
}

namespace {
Instance timing_instance() {
    Instance inst;
    inst.periods = 6;
    Origin o;
    o.id = "W";
    o.max_prepare = 1;
    o.arcs["J"] = Arc{2, 1.0, 1, 0.0};
    inst.origins.push_back(o);
    inst.hubs.push_back({"J"});
    inst.trains.push_back({"N", {{"J", 5}}});
    inst.cost.unmet_penalty = {1.0};
    inst.emissions.rate = {0.0};
    return inst;
}
}  // namespace

TEST_CASE("time feasibility boundary") {
    auto inst = timing_instance();
    CHECK(time_feasible(inst, 0, 0, 0, 3, false));
    CHECK_FALSE(time_feasible(inst, 0, 0, 0, 4, false));
    CHECK_FALSE(time_feasible(inst, 0, 0, 0, 3, true));
    CHECK(time_feasible(inst, 0, 0, 0, 2, true));
}

TEST_CASE("time feasibility rejects bad indices") {
    auto inst = timing_instance();
    CHECK_THROWS_AS(time_feasible(inst, 1, 0, 0, 0, false), PlannerError);
    CHECK_THROWS_AS(time_feasible(inst, 0, 1, 0, 0, false), PlannerError);
    CHECK_THROWS_AS(time_feasible(inst, 0, 0, 3, 0, false), PlannerError);
    CHECK_THROWS_AS(time_feasible(inst, 0, 0, 0, 6, false), PlannerError);
    try {
        time_feasible(inst, 7, 0, 0, 0, false);
    } catch (const PlannerError& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
}

TEST_CASE("feasible periods form a prefix and transfer only shrinks them") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto [inst, scen] = testing::random_problem(seed);
        for (std::size_t i = 0; i < inst.origins.size(); ++i)
            for (std::size_t n = 0; n < inst.trains.size(); ++n)
                for (const auto& st : inst.trains[n].stops) {
                    if (!inst.origins[i].arcs.count(st.hub))
                        continue;
                    const auto j = *inst.hub_index(st.hub);
                    bool seen_false = false;
                    for (int t = 0; t < inst.periods; ++t) {
                        const bool plain = time_feasible(inst, i, j, n, t, false);
                        const bool tr = time_feasible(inst, i, j, n, t, true);
                        CHECK_FALSE((seen_false && plain));
                        seen_false = seen_false || !plain;
                        CHECK((!tr || plain));
                    }
                }
    }
}
