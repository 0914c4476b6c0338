#include "doctest.h"
#include "fixtures.hpp"
#include "planner/io.hpp"
#include "planner/plan_solver.hpp"
#include "planner/report.hpp"

#include <filesystem>

using namespace planner;
using nlohmann::json;

namespace {

json tiny_doc() { return json::parse(read_file(std::filesystem::path(PLANNER_DATA_DIR) / "tiny.json")); }

template <class F>
InputError input_error(F&& f) {
    try {
        f();
    } catch (const InputError& e) {
        return e;
    }
    FAIL("expected InputError");
    return InputError(ErrorCode::Io, "");
}

}  // namespace

TEST_CASE("tiny file matches the in-memory fixture") {
    const Problem p = parse_problem(tiny_doc());
    CHECK(p.instance == testing::tiny_instance());
    REQUIRE(p.scenarios.scenarios.size() == 1);
    CHECK(p.scenarios.scenarios[0].demand_of("T1") == 4);
    CHECK(solve_plan(p.instance, p.scenarios, {0.5, 0.75}).mip.objective == doctest::Approx(136));
}

TEST_CASE("problem round trip") {
    for (const char* name : {"tiny.json", "medium.json", "capacity.json"}) {
        const Problem p = load_problem(std::filesystem::path(PLANNER_DATA_DIR) / name);
        CHECK(parse_problem(to_json(p)) == p);
        CHECK(to_json(parse_problem(to_json(p))) == to_json(p));
    }
    Problem p;
    p.instance = testing::two_by_two_instance();
    p.scenarios = testing::two_by_two_scenarios();
    CHECK(parse_problem(to_json(p)) == p);
}

TEST_CASE("schema errors carry a pointer") {
    auto doc = tiny_doc();
    doc["origins"][0]["kappa"] = -3;
    auto e = input_error([&] { parse_problem(doc); });
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(e.path() == "/origins/0/kappa");

    doc = tiny_doc();
    doc["origins"][0]["colour"] = "red";
    e = input_error([&] { parse_problem(doc); });
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(e.path() == "/origins/0/colour");

    doc = tiny_doc();
    doc["periods"] = "six";
    CHECK(input_error([&] { parse_problem(doc); }).path() == "/periods");

    CHECK(input_error([] { parse_problem_text("{\"periods\": "); }).code() == ErrorCode::ParseError);
}

TEST_CASE("validation failures list codes") {
    auto doc = tiny_doc();
    doc["scenarios"][0]["probability"] = 0.9;
    auto e = input_error([&] { parse_problem(doc); });
    CHECK(e.code() == ErrorCode::ValidationFailed);
    REQUIRE_FALSE(e.report().empty());
    CHECK(e.report().front().code == "PROB_SUM");
    CHECK(std::string(e.what()).find("PROB_SUM") != std::string::npos);
}

TEST_CASE("times are rounded up to whole periods") {
    auto doc = tiny_doc();
    doc["periods"] = 2;
    doc["origins"][0]["arcs"]["H1"]["travel_time"] = 0.2;
    doc["trains"][0]["stops"][0]["departure"] = 1.5;
    const Problem p = parse_problem(doc);
    CHECK(p.instance.origins[0].arcs.at("H1").travel_time == 1);
    CHECK(p.instance.trains[0].stops[0].departure == 2);
}

TEST_CASE("sampler documents draw scenarios") {
    auto doc = tiny_doc();
    doc.erase("scenarios");
    doc["seed"] = 11;
    doc["sampler"] = json::parse(R"({
        "scenario_count": 5,
        "demand": {"T1": {"uniform": [2, 6]}},
        "capacity": {"T1": {"H1": {"pmf": {"values": [2, 4], "weights": [1, 3]}}}}
    })");
    const Problem a = parse_problem(doc);
    const Problem b = parse_problem(doc);
    CHECK(a.scenarios == b.scenarios);
    REQUIRE(a.scenarios.scenarios.size() == 5);
    for (const auto& s : a.scenarios.scenarios) {
        CHECK(s.demand_of("T1") >= 2);
        CHECK(s.demand_of("T1") <= 6);
    }
    REQUIRE(a.sampler);
    CHECK(parse_problem(to_json(a)) == a);
}

TEST_CASE("csv round trip") {
    ReportTable t({"name", "value", "count"});
    t.add_row({std::string("a,b"), 1.23456, 7L});
    t.add_row({std::string("say \"hi\""), std::monostate{}, 0L});
    const auto csv = t.to_csv();
    CHECK(csv.rfind("name,value,count\n", 0) == 0);
    CHECK(csv.find("\"a,b\",1.2346,7") != std::string::npos);
    const auto back = parse_csv(csv);
    REQUIRE(back.rows() == 2);
    CHECK(back.text(0, "name") == "a,b");
    CHECK(back.text(1, "name") == "say \"hi\"");
    CHECK(*back.number(0, "value") == doctest::Approx(1.2346));
    CHECK_FALSE(back.number(1, "value"));
    CHECK(*back.number(0, "count") == 7);
    CHECK_THROWS_AS(t.add_row({1.0}), PlannerError);
    CHECK_THROWS_AS(t.column_index("missing"), PlannerError);
}

TEST_CASE("plan json resolves ids") {
    const auto out = solve_plan(testing::tiny_instance(), testing::tiny_scenarios(), {0.5, 0.75});
    REQUIRE(out.plan);
    const json j = plan_to_json(*out.plan, testing::tiny_instance());
    CHECK(j.dump().find("W1") != std::string::npos);
    CHECK(j.dump().find("T1") != std::string::npos);
}
