#include "cprofile/cli/services.hpp"

namespace cprofile::cli {

std::unique_ptr<Services> make_services(const RunConfig& config) {
    validate(config);
    auto s = std::make_unique<Services>();
    if (config.provider == "mock") {
        try {
            s->provider = llm::MockProvider::from_json_file(config.mock_script);
        } catch (const std::exception& e) {
            throw ConfigError("mock_script", e.what());
        }
    } else {
        try {
            s->provider = llm::HttpProvider::from_env();
        } catch (const std::exception& e) {
            throw ConfigError("provider", e.what());
        }
    }
    auto cache = config.cache_dir.empty() ? std::make_shared<llm::ResponseCache>()
                                          : std::make_shared<llm::ResponseCache>(config.cache_dir);
    s->client = std::make_unique<llm::LlmClient>(s->provider, cache, llm::RetryPolicy{}, std::max(1, config.workers));
    s->templates = config.templates.empty() ? llm::TemplateLibrary::builtin() : llm::TemplateLibrary::with_overrides(config.templates);
    s->generation.model = config.model;
    s->generation.temperature = config.temperature;
    s->oracle_generation.model = config.oracle_model.empty() ? config.model : config.oracle_model;
    s->oracle_generation.temperature = 0.0;

    try {
        if (config.oracle == "table") {
            s->oracle = std::make_unique<oracles::TableConditionOracle>(oracles::TableConditionOracle::from_json_file(config.condition_table));
        } else if (config.oracle == "remote") {
            s->oracle = std::make_unique<oracles::RemoteConditionOracle>(oracles::RemoteConditionOracle::from_env());
        } else {
            s->oracle = std::make_unique<oracles::LlmConditionOracle>(s->oracle_llm());
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(config.oracle == "table" ? "condition_table" : "oracle", e.what());
    }
    try {
        if (config.nli == "table") {
            s->judge = std::make_unique<oracles::TableNliJudge>(oracles::TableNliJudge::from_json_file(config.nli_table));
        } else {
            s->judge = std::make_unique<oracles::LlmNliJudge>(s->oracle_llm(), config.nli_scene_context);
        }
    } catch (const std::exception& e) {
        throw ConfigError("nli_table", e.what());
    }
    return s;
}

engine::ConditionVerdict RecordingOracle::check_condition(const engine::Scene& scene, std::string_view question) {
    auto v = inner_.check_condition(scene, question);
    std::lock_guard lock(mutex_);
    records_.push_back(oracles::DistillRecord{scene, std::string(question), v.verdict});
    return v;
}

std::vector<oracles::DistillRecord> RecordingOracle::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

}  // namespace cprofile::cli
