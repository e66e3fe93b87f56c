#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "cprofile/engine/oracle.hpp"
#include "cprofile/llm/client.hpp"
#include "json.hpp"

namespace cprofile::oracles {

/// Verbalizers of the three verdicts, in TRUE / FALSE / UNKNOWN order.
const std::vector<std::string>& condition_labels();

/// Asks the condition template at temperature 0. Unparseable answers become UNKNOWN.
class LlmConditionOracle : public engine::ConditionOracle {
public:
    explicit LlmConditionOracle(llm::LlmContext ctx);

    engine::ConditionVerdict check_condition(const engine::Scene& scene, std::string_view question) override;

    /// Every distinct (scene, question) answered so far, in first-asked order.
    struct Asked {
        engine::Scene scene;
        std::string question;
        engine::Tri verdict;
    };
    std::vector<Asked> answered() const;

private:
    llm::LlmContext ctx_;
    engine::OracleCache memo_;
    mutable std::mutex log_mutex_;
    std::vector<Asked> log_;
};

/// Exact lookup in `{scene_id: {question: label}}`; a miss is UNKNOWN with raw label "".
class TableConditionOracle : public engine::ConditionOracle {
public:
    TableConditionOracle() = default;
    explicit TableConditionOracle(const nlohmann::json& table);
    static TableConditionOracle from_json_file(const std::filesystem::path& path);

    engine::ConditionVerdict check_condition(const engine::Scene& scene, std::string_view question) override;

    std::size_t size() const;

private:
    std::map<std::string, std::map<std::string, engine::Tri, std::less<>>, std::less<>> table_;
};

/**
 * Client of a served three-class checker: POST `{scene, question}` and expect
 * `{label, scores}`. Transport failures are retried; a malformed reply is
 * UNKNOWN with a warning.
 */
class RemoteConditionOracle : public engine::ConditionOracle {
public:
    explicit RemoteConditionOracle(std::string url, int timeout_seconds = 30, llm::RetryPolicy retry = {});
    /// Reads CP_REMOTE_CHECKER_URL.
    static RemoteConditionOracle from_env();

    engine::ConditionVerdict check_condition(const engine::Scene& scene, std::string_view question) override;

    /// Maps a checker reply body to a verdict; exposed for tests.
    static engine::ConditionVerdict parse_reply(const std::string& body);

private:
    std::string scheme_host_port_;
    std::string path_;
    int timeout_seconds_;
    llm::RetryPolicy retry_;
};

/// One labeled condition-checking case.
struct DistillRecord {
    engine::Scene scene;
    std::string question;
    engine::Tri verdict;
};

/**
 * Writes `{scene, question, label}` JSONL, dropping repeats of a
 * (scene context, question) pair after the first. Returns the number of lines.
 */
std::size_t export_distillation_data(const std::vector<DistillRecord>& records, const std::filesystem::path& path);

}  // namespace cprofile::oracles
