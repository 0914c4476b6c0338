#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "planner/error.hpp"
#include "planner/instance.hpp"
#include "planner/model.hpp"
#include "planner/scenario.hpp"

namespace planner {

/// Everything a problem file can hold. `scenarios` is either read from the
/// file or drawn from `sampler` when the file has no explicit set.
struct Problem {
    Instance instance;
    ScenarioSet scenarios;
    std::optional<SamplerConfig> sampler;

    bool operator==(const Problem&) const = default;
};

/// Input failure with the offending JSON pointer and, for validation failures,
/// the full report.
class InputError : public PlannerError {
public:
    InputError(ErrorCode code, const std::string& message, std::string path = {}, ValidationReport report = {})
        : PlannerError(code, message), path_(std::move(path)), report_(std::move(report)) {}

    const std::string& path() const noexcept { return path_; }
    const ValidationReport& report() const noexcept { return report_; }

private:
    std::string path_;
    ValidationReport report_;
};

/// Strict parse: unknown keys, wrong types and out-of-domain numbers raise
/// SchemaViolation; a well-formed document that fails validation raises
/// ValidationFailed. Times are rounded up to whole periods.
Problem parse_problem(const nlohmann::json& doc);
Problem parse_problem_text(const std::string& text);
Problem load_problem(const std::filesystem::path& path);

/// Like load_problem but returns the validation report instead of throwing
/// on validation failures. Parse and schema errors still throw.
std::pair<Problem, ValidationReport> load_unvalidated(const std::filesystem::path& path);

nlohmann::json to_json(const Problem& problem);
nlohmann::json to_json(const ScenarioSet& set);
nlohmann::json to_json(const SamplerConfig& cfg);
void save_problem(const Problem& problem, const std::filesystem::path& path);

/// Plan with ids resolved against the instance.
nlohmann::json plan_to_json(const Plan& plan, const Instance& inst);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace planner
