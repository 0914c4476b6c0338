#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace planner {

const char* tool_version();

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

struct RunManifest {
    std::string tool_version;
    std::string command;
    struct Input {
        std::string path;
        std::string sha256;
    };
    std::vector<Input> inputs;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> outputs;
    double wall_time = 0.0;
    std::vector<std::pair<std::string, double>> stages;
    int exit_code = 0;

    void add_input(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

}  // namespace planner
