// planner: command-line front end for the stochastic intermodal planner.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "planner/error.hpp"
#include "planner/experiments.hpp"
#include "planner/io.hpp"
#include "planner/manifest.hpp"
#include "planner/parallel.hpp"
#include "planner/plan_solver.hpp"
#include "planner/risk.hpp"

namespace fs = std::filesystem;
using namespace planner;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonOptimal = 1;
constexpr int kExitInput = 2;

struct Options {
    std::vector<std::string> inputs;
    double lambda = 0.0;
    double alpha = 0.75;
    std::optional<double> epsilon;
    double gap = kDefaultGap;
    std::optional<double> time_limit;
    std::optional<std::uint64_t> seed;
    std::size_t workers = default_workers();
    bool use_transfer = false;
    bool no_linking = false;
    std::string output = "out";
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects stage timings and writes the manifest on the way out.
class Run {
public:
    Run(std::string command, const Options& opt) : opt_(opt), start_(Clock::now()) {
        manifest_.tool_version = tool_version();
        manifest_.command = std::move(command);
        manifest_.config = {{"inputs", opt.inputs},
                            {"lambda", opt.lambda},
                            {"alpha", opt.alpha},
                            {"epsilon", opt.epsilon ? json(*opt.epsilon) : json(nullptr)},
                            {"gap", opt.gap},
                            {"time_limit", opt.time_limit ? json(*opt.time_limit) : json(nullptr)},
                            {"seed", opt.seed ? json(*opt.seed) : json(nullptr)},
                            {"workers", opt.workers},
                            {"use_transfer", opt.use_transfer},
                            {"linking", !opt.no_linking},
                            {"output", opt.output}};
    }

    template <class Fn>
    auto stage(const std::string& name, Fn&& fn) {
        const auto t0 = Clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            manifest_.stages.emplace_back(name, seconds_since(t0));
        } else {
            auto result = fn();
            manifest_.stages.emplace_back(name, seconds_since(t0));
            return result;
        }
    }

    void input(const fs::path& p) { manifest_.add_input(p); }

    void emit(const std::string& file, const std::string& content) {
        const auto path = fs::path(opt_.output) / file;
        write_file(path, content);
        manifest_.outputs.push_back(path.string());
        spdlog::info("wrote {}", path.string());
    }

    int finish(int code) {
        manifest_.exit_code = code;
        manifest_.wall_time = seconds_since(start_);
        write_file(fs::path(opt_.output) / "manifest.json", manifest_.to_json().dump(2) + "\n");
        return code;
    }

    json& config() { return manifest_.config; }

private:
    const Options& opt_;
    Clock::time_point start_;
    RunManifest manifest_;
};

SolverConfig solver_config(const Options& opt) {
    SolverConfig cfg;
    cfg.gap = opt.gap;
    cfg.time_limit = opt.time_limit.value_or(0.0);
    cfg.seed = opt.seed.value_or(0);
    return cfg;
}

BuildOptions build_options(const Options& opt) {
    BuildOptions bo;
    bo.epsilon_override = opt.epsilon;
    bo.use_transfer = opt.use_transfer;
    bo.linking = !opt.no_linking;
    return bo;
}

SweepSpec sweep_spec(const Options& opt) {
    SweepSpec spec;
    spec.use_transfer = opt.use_transfer;
    spec.linking = !opt.no_linking;
    spec.workers = opt.workers;
    spec.solver = solver_config(opt);
    spec.solver.time_limit = opt.time_limit.value_or(kSweepTimeLimit);
    spec.epsilon_override = opt.epsilon;
    spec.metrics_alpha = opt.alpha;
    return spec;
}

void check_options(const Options& opt) {
    if (!(opt.lambda >= 0.0 && opt.lambda <= 1.0))
        throw PlannerError(ErrorCode::InvalidArgument, "--lambda must lie in [0, 1]");
    if (!(opt.alpha >= 0.0 && opt.alpha < 1.0))
        throw PlannerError(ErrorCode::RejectAlpha, "--alpha must lie in [0, 1)");
    if (opt.epsilon && !(*opt.epsilon >= 0.0))
        throw PlannerError(ErrorCode::InvalidArgument, "--epsilon must be >= 0");
    if (!(opt.gap > 0.0))
        throw PlannerError(ErrorCode::InvalidArgument, "--gap must be > 0");
    if (opt.time_limit && !(*opt.time_limit >= 0.0))
        throw PlannerError(ErrorCode::InvalidArgument, "--time-limit must be >= 0");
    if (opt.workers == 0)
        throw PlannerError(ErrorCode::InvalidArgument, "--workers must be >= 1");
}

int sweep_exit(const SweepResult& r) {
    for (const auto& c : r.cells)
        if (!c.optimal())
            return kExitNonOptimal;
    return kExitOk;
}

json cell_diagnostics(const SweepResult& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        json j = {{"lambda", c.risk.lambda}, {"alpha", c.risk.alpha}};
        if (c.epsilon)
            j["epsilon"] = *c.epsilon;
        if (c.capacity)
            j["capacity"] = *c.capacity;
        j["status"] = c.status ? to_string(*c.status) : "not run";
        j["objective"] = c.objective ? json(*c.objective) : json(nullptr);
        j["violations"] = c.violations.size();
        if (!c.error.empty())
            j["error"] = c.error;
        cells.push_back(j);
    }
    return cells;
}

Problem load_input(Run& run, const std::string& path) {
    run.input(path);
    return run.stage("load", [&] { return load_problem(path); });
}

int cmd_validate(const Options& opt) {
    int code = kExitOk;
    for (const auto& in : opt.inputs) {
        auto [problem, report] = load_unvalidated(in);
        if (report.empty()) {
            std::cout << in << ": valid (" << problem.instance.origins.size() << " origins, "
                      << problem.instance.hubs.size() << " hubs, " << problem.instance.trains.size() << " trains, "
                      << problem.scenarios.size() << " scenarios)\n";
            continue;
        }
        code = kExitInput;
        for (const auto& v : report)
            std::cout << in << ": " << v.code << " at " << (v.path.empty() ? "/" : v.path) << ": " << v.message
                      << "\n";
    }
    return code;
}

int cmd_solve(const Options& opt) {
    Run run("solve", opt);
    auto problem = load_input(run, opt.inputs.front());
    auto model = run.stage("build", [&] {
        return build_milp(problem.instance, problem.scenarios, {opt.lambda, opt.alpha}, build_options(opt));
    });
    auto out = run.stage("solve", [&] { return solve_model(std::move(model), solver_config(opt)); });
    json doc = {{"status", to_string(out.mip.status)},
                {"objective", out.mip.has_incumbent() ? json(out.mip.objective) : json(nullptr)},
                {"best_bound", out.mip.best_bound},
                {"gap", out.mip.gap},
                {"nodes", out.mip.nodes},
                {"lp_iterations", out.mip.lp_iterations},
                {"violations", out.violations.size()}};
    if (out.plan)
        doc["plan"] = plan_to_json(*out.plan, problem.instance);
    run.emit("plan.json", doc.dump(2) + "\n");
    std::cout << "status " << to_string(out.mip.status);
    if (out.mip.has_incumbent())
        std::cout << "  objective " << out.mip.objective << "  nodes " << out.mip.nodes;
    std::cout << "\n";
    return run.finish(out.optimal() && out.violations.empty() ? kExitOk : kExitNonOptimal);
}

template <class Sweep>
int cmd_sweep(const Options& opt, const std::string& name, Sweep&& sweep) {
    Run run(name, opt);
    auto problem = load_input(run, opt.inputs.front());
    auto spec = sweep_spec(opt);
    auto result = run.stage("sweep", [&] { return sweep(problem, spec); });
    const std::string base = name == "sweep-risk" ? "risk_grid"
                             : name == "sweep-emissions" ? "emissions_grid"
                                                         : "capacity_grid";
    run.emit(base + ".csv", result.table.to_csv());
    run.emit(base + ".json", cell_diagnostics(result).dump(2) + "\n");
    std::cout << result.table.rows() << " rows written to " << (fs::path(opt.output) / (base + ".csv")).string()
              << "\n";
    return run.finish(sweep_exit(result));
}

int cmd_metrics(const Options& opt) {
    Run run("metrics", opt);
    std::vector<StochasticValueReport> reports;
    StochasticValueOptions svo;
    svo.alpha = opt.alpha;
    svo.epsilon_override = opt.epsilon;
    svo.use_transfer = opt.use_transfer;
    svo.linking = !opt.no_linking;
    svo.workers = opt.workers;
    for (const auto& in : opt.inputs) {
        auto problem = load_input(run, in);
        reports.push_back(run.stage("metrics", [&] {
            return stochastic_values(problem.instance, problem.scenarios, solver_config(opt), svo);
        }));
    }
    run.emit("stochastic_values.csv", stochastic_value_table(reports).to_csv());
    json notes = json::array();
    bool complete = true;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        notes.push_back({{"input", opt.inputs[k]}, {"notes", reports[k].notes}, {"ev_prepare", reports[k].ev_prepare}});
        complete = complete && reports[k].complete();
    }
    run.emit("stochastic_values.json", notes.dump(2) + "\n");
    return run.finish(complete ? kExitOk : kExitNonOptimal);
}

int cmd_breakdown(const Options& opt) {
    Run run("breakdown", opt);
    auto problem = load_input(run, opt.inputs.front());
    auto out = run.stage("solve", [&] {
        return solve_plan(problem.instance, problem.scenarios, {opt.lambda, opt.alpha}, build_options(opt),
                          solver_config(opt));
    });
    if (!out.plan) {
        std::cerr << "no feasible plan: " << to_string(out.mip.status) << "\n";
        return run.finish(kExitNonOptimal);
    }
    auto report = cost_breakdown(*out.plan);
    run.emit("breakdown.csv", report.table().to_csv());
    return run.finish(out.optimal() ? kExitOk : kExitNonOptimal);
}

int cmd_gen_scenarios(const Options& opt) {
    Run run("gen-scenarios", opt);
    auto problem = load_input(run, opt.inputs.front());
    if (!problem.sampler)
        throw InputError(ErrorCode::SchemaViolation, "input has no 'sampler' section", "/sampler");
    const auto seed = opt.seed.value_or(problem.scenarios.seed.value_or(0));
    problem.scenarios = run.stage("sample", [&] { return sample_scenarios(*problem.sampler, seed); });
    run.emit("scenarios.json", to_json(problem).dump(2) + "\n");
    return run.finish(kExitOk);
}

int cmd_export_lp(const Options& opt) {
    Run run("export-lp", opt);
    auto problem = load_input(run, opt.inputs.front());
    auto model = run.stage("build", [&] {
        return build_milp(problem.instance, problem.scenarios, {opt.lambda, opt.alpha}, build_options(opt));
    });
    std::ostringstream lp;
    write_lp(model, lp);
    run.emit("model.lp", lp.str());
    return run.finish(kExitOk);
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("planner");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("PLANNER_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Two-stage stochastic intermodal container planner"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool many_inputs) {
        auto in = sub->add_option("input", opt.inputs, many_inputs ? "Problem files" : "Problem file")
                      ->required()
                      ->check(CLI::ExistingFile);
        if (!many_inputs)
            in->expected(1);
        sub->add_option("--lambda", opt.lambda, "Risk weight in [0, 1]");
        sub->add_option("--alpha", opt.alpha, "CVaR confidence in [0, 1)");
        sub->add_option("--epsilon", opt.epsilon, "Emissions cap override (kg)");
        sub->add_option("--gap", opt.gap, "Relative optimality gap");
        sub->add_option("--time-limit", opt.time_limit, "Per-solve time limit in seconds (0 = none; sweeps default to 1)");
        sub->add_option("--seed", opt.seed, "Seed for sampling and solver tie-breaking");
        sub->add_option("--workers", opt.workers, "Worker threads");
        sub->add_flag("--use-transfer", opt.use_transfer, "Enable transfer times and costs");
        sub->add_option("--output", opt.output, "Output directory");
        sub->add_flag("--no-linking", opt.no_linking, "Drop binary linking variables");
    };

    struct Command {
        const char* name;
        const char* help;
        bool many;
        std::function<int()> run;
    };
    const std::vector<Command> commands = {
        {"validate", "Check problem files", true, [&] { return cmd_validate(opt); }},
        {"solve", "Solve the mean-risk model and write plan.json", false, [&] { return cmd_solve(opt); }},
        {"sweep-risk", "Lambda x alpha grid", false,
         [&] {
             return cmd_sweep(opt, "sweep-risk",
                              [](const Problem& p, const SweepSpec& s) { return run_risk_grid(p.instance, p.scenarios, s); });
         }},
        {"sweep-emissions", "Emissions cap grid", false,
         [&] {
             return cmd_sweep(opt, "sweep-emissions", [](const Problem& p, const SweepSpec& s) {
                 return run_emissions_grid(p.instance, p.scenarios, s);
             });
         }},
        {"sweep-capacity", "Uniform train capacity grid", false,
         [&] {
             return cmd_sweep(opt, "sweep-capacity", [](const Problem& p, const SweepSpec& s) {
                 return run_capacity_grid(p.instance, p.scenarios, s);
             });
         }},
        {"metrics", "EEV, SS, WS, VSS and EVPI", true, [&] { return cmd_metrics(opt); }},
        {"breakdown", "Cost shares of the optimal plan", false, [&] { return cmd_breakdown(opt); }},
        {"gen-scenarios", "Draw a scenario set from the sampler section", false,
         [&] { return cmd_gen_scenarios(opt); }},
        {"export-lp", "Write the deterministic equivalent as LP text", false, [&] { return cmd_export_lp(opt); }},
    };
    for (const auto& c : commands)
        add_common(app.add_subcommand(c.name, c.help), c.many);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        check_options(opt);
        for (const auto& c : commands)
            if (app.got_subcommand(c.name))
                return c.run();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PlannerError& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        const bool input = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::RejectAlpha ||
                           e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::ParseError ||
                           e.code() == ErrorCode::SchemaViolation || e.code() == ErrorCode::ValidationFailed ||
                           e.code() == ErrorCode::IndexOutOfRange;
        return input ? kExitInput : kExitNonOptimal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonOptimal;
    }
    return kExitInput;
}
