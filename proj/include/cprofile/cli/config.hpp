#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace cprofile::cli {

/// A config file key or flag value that cannot be used. Reported as a usage error.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct RunConfig {
    std::filesystem::path benchmark;
    std::filesystem::path profiles = "profiles";
    std::filesystem::path output = "runs";
    std::string provider = "http";  // http | mock
    std::filesystem::path mock_script;
    std::string model;
    std::string oracle_model;
    double temperature = 0.0;
    std::string granularity = "paragraph";
    bool include_randomness = false;
    std::string mode = "codified";
    int cot_budget = 0;
    int k = 4;
    std::uint64_t base_seed = 0;
    int workers = 1;
    int max_attempts = 3;
    std::string oracle = "llm";  // llm | table | remote
    std::string nli = "llm";     // llm | table
    bool nli_scene_context = true;
    std::filesystem::path condition_table;
    std::filesystem::path nli_table;
    std::filesystem::path templates;
    std::filesystem::path cache_dir;  // empty: memory only
};

/**
 * Reads a JSON config. Relative paths resolve against the file's directory.
 * Unknown keys and ill-typed values raise ConfigError naming the key.
 */
RunConfig load_config(const std::filesystem::path& path);
void apply_json(RunConfig& config, const nlohmann::json& j, const std::filesystem::path& base);

/// Fills model names from CP_LLM_MODEL / CP_ORACLE_MODEL and templates from CP_TEMPLATE_DIR when unset.
void apply_env(RunConfig& config);

/// Checks enumerations and ranges; throws ConfigError.
void validate(const RunConfig& config);

/// The resolved config, echoed into report metadata.
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace cprofile::cli
