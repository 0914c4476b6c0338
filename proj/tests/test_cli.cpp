#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"
#include "planner/io.hpp"
#include "planner/manifest.hpp"
#include "planner/report.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = PLANNER_DATA_DIR;

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("planner_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(PLANNER_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) { return json::parse(planner::read_file(p)); }

}  // namespace

TEST_CASE("validate") {
    CHECK(run("validate " + (kData / "tiny.json").string() + " " + (kData / "medium.json").string()) == 0);
    const auto dir = scratch("validate");
    auto doc = read_json(kData / "tiny.json");
    doc["scenarios"][0]["probability"] = 0.9;
    planner::write_file(dir / "bad.json", doc.dump());
    CHECK(run("validate " + (dir / "bad.json").string()) == 2);
    CHECK(run("validate " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("solve writes a plan and a manifest") {
    const auto dir = scratch("solve");
    const auto tiny = (kData / "tiny.json").string();
    REQUIRE(run("solve " + tiny + " --lambda 0.5 --alpha 0.75 --output " + dir.string()) == 0);
    const auto plan = read_json(dir / "plan.json");
    CHECK(plan["status"] == "optimal");
    CHECK(plan["objective"].get<double>() == doctest::Approx(136));
    CHECK(plan["violations"] == 0);

    const auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest["command"] == "solve");
    CHECK(manifest["tool_version"] == planner::tool_version());
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["inputs"][0]["sha256"] == planner::sha256_file(tiny));
    CHECK(manifest["config"]["lambda"] == 0.5);
}

TEST_CASE("bad arguments exit with 2") {
    const auto tiny = (kData / "tiny.json").string();
    const auto out = " --output " + scratch("bad").string();
    CHECK(run("solve " + tiny + " --alpha 1.0" + out) == 2);
    CHECK(run("solve " + tiny + " --lambda 1.5" + out) == 2);
    CHECK(run("solve " + tiny + " --gap 0" + out) == 2);
    CHECK(run("solve " + tiny + " --workers 0" + out) == 2);
    CHECK(run("solve " + tiny + " --bogus" + out) == 2);
    CHECK(run("frobnicate " + tiny) == 2);
}

TEST_CASE("sweeps and reports") {
    const auto dir = scratch("sweeps");
    const auto tiny = (kData / "tiny.json").string();
    const auto out = " --output " + dir.string();
    CHECK(run("sweep-risk " + tiny + out) == 0);
    const auto risk = planner::parse_csv(planner::read_file(dir / "risk_grid.csv"));
    CHECK(risk.rows() == 44);
    CHECK(run("sweep-capacity " + tiny + out) == 0);
    CHECK(planner::parse_csv(planner::read_file(dir / "capacity_grid.csv")).rows() == 7);
    CHECK(run("sweep-emissions " + tiny + out) == 0);
    CHECK(planner::parse_csv(planner::read_file(dir / "emissions_grid.csv")).rows() == 240);
    CHECK(run("metrics " + tiny + " " + (kData / "capacity.json").string() + out) == 0);
    CHECK(planner::parse_csv(planner::read_file(dir / "stochastic_values.csv")).rows() == 2);
    CHECK(run("breakdown " + tiny + out) == 0);
    const auto b = planner::parse_csv(planner::read_file(dir / "breakdown.csv"));
    CHECK(*b.number(b.rows() - 1, "share") == doctest::Approx(100.0));
    CHECK(run("export-lp " + tiny + out) == 0);
    CHECK(planner::read_file(dir / "model.lp").find("Generals") != std::string::npos);
}

TEST_CASE("gen-scenarios") {
    const auto dir = scratch("gen");
    auto doc = read_json(kData / "tiny.json");
    doc.erase("scenarios");
    doc["sampler"] = json::parse(R"({"scenario_count": 4, "demand": {"T1": {"uniform": [1, 5]}},
                                     "capacity": {"T1": {"H1": {"uniform": [2, 3]}}}})");
    planner::write_file(dir / "sampled.json", doc.dump());
    REQUIRE(run("gen-scenarios " + (dir / "sampled.json").string() + " --seed 9 --output " + dir.string()) == 0);
    const auto first = planner::read_file(dir / "scenarios.json");
    REQUIRE(run("gen-scenarios " + (dir / "sampled.json").string() + " --seed 9 --output " + dir.string()) == 0);
    CHECK(planner::read_file(dir / "scenarios.json") == first);
    const auto p = planner::parse_problem_text(first);
    CHECK(p.scenarios.size() == 4);
    CHECK(run("gen-scenarios " + (kData / "tiny.json").string() + " --output " + dir.string()) == 2);
}
