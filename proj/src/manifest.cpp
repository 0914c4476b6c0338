#include "planner/manifest.hpp"

#include <openssl/evp.h>

#include <memory>

#include "planner/error.hpp"
#include "planner/io.hpp"

#ifndef PLANNER_VERSION
#define PLANNER_VERSION "0.0.0"
#endif

namespace planner {

const char* tool_version() { return PLANNER_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw PlannerError(ErrorCode::Io, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.push_back({path.string(), sha256_file(path)});
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["inputs"] = nlohmann::json::array();
    for (const auto& in : inputs)
        j["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}});
    j["config"] = config;
    j["outputs"] = outputs;
    j["wall_time"] = wall_time;
    j["stages"] = nlohmann::json::array();
    for (const auto& [name, secs] : stages)
        j["stages"].push_back({{"stage", name}, {"seconds", secs}});
    j["exit_code"] = exit_code;
    return j;
}

}  // namespace planner
