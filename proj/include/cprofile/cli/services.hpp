#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "cprofile/cli/config.hpp"
#include "cprofile/engine/oracle.hpp"
#include "cprofile/llm/client.hpp"
#include "cprofile/oracles/condition.hpp"
#include "cprofile/oracles/judges.hpp"

namespace cprofile::cli {

/// Provider, client, templates, oracle and judge built from one RunConfig.
struct Services {
    std::shared_ptr<llm::Provider> provider;
    std::unique_ptr<llm::LlmClient> client;
    llm::TemplateLibrary templates;
    std::unique_ptr<engine::ConditionOracle> oracle;
    std::unique_ptr<oracles::NliJudge> judge;
    llm::GenerationConfig generation;
    llm::GenerationConfig oracle_generation;

    llm::LlmContext llm() { return {*client, templates, generation}; }
    llm::LlmContext oracle_llm() { return {*client, templates, oracle_generation}; }
};

/// Throws ConfigError for unusable settings.
std::unique_ptr<Services> make_services(const RunConfig& config);

/// Passes calls through and keeps every answer, for distillation export.
class RecordingOracle : public engine::ConditionOracle {
public:
    explicit RecordingOracle(engine::ConditionOracle& inner) : inner_(inner) {}

    engine::ConditionVerdict check_condition(const engine::Scene& scene, std::string_view question) override;
    std::vector<oracles::DistillRecord> records() const;

private:
    engine::ConditionOracle& inner_;
    mutable std::mutex mutex_;
    std::vector<oracles::DistillRecord> records_;
};

}  // namespace cprofile::cli
