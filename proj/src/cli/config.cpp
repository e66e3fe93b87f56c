#include "cprofile/cli/config.hpp"

#include <cstdlib>

#include "cprofile/codifier/segment.hpp"
#include "cprofile/responder/respond.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::cli {

namespace {

template <class T>
T get(const nlohmann::json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(key, "has the wrong type");
    }
}

std::filesystem::path resolve(const nlohmann::json& j, const std::string& key, const std::filesystem::path& base) {
    std::filesystem::path p = get<std::string>(j, key);
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

void apply_json(RunConfig& c, const nlohmann::json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "benchmark") c.benchmark = resolve(v, key, base);
        else if (key == "profiles") c.profiles = resolve(v, key, base);
        else if (key == "output") c.output = resolve(v, key, base);
        else if (key == "provider") c.provider = get<std::string>(v, key);
        else if (key == "mock_script") c.mock_script = resolve(v, key, base);
        else if (key == "model") c.model = get<std::string>(v, key);
        else if (key == "oracle_model") c.oracle_model = get<std::string>(v, key);
        else if (key == "temperature") c.temperature = get<double>(v, key);
        else if (key == "granularity") c.granularity = get<std::string>(v, key);
        else if (key == "include_randomness") c.include_randomness = get<bool>(v, key);
        else if (key == "mode") c.mode = get<std::string>(v, key);
        else if (key == "cot_budget") c.cot_budget = get<int>(v, key);
        else if (key == "k") c.k = get<int>(v, key);
        else if (key == "base_seed") c.base_seed = get<std::uint64_t>(v, key);
        else if (key == "workers") c.workers = get<int>(v, key);
        else if (key == "max_attempts") c.max_attempts = get<int>(v, key);
        else if (key == "oracle") c.oracle = get<std::string>(v, key);
        else if (key == "nli") c.nli = get<std::string>(v, key);
        else if (key == "nli_scene_context") c.nli_scene_context = get<bool>(v, key);
        else if (key == "condition_table") c.condition_table = resolve(v, key, base);
        else if (key == "nli_table") c.nli_table = resolve(v, key, base);
        else if (key == "templates") c.templates = resolve(v, key, base);
        else if (key == "cache_dir") c.cache_dir = resolve(v, key, base);
        else throw ConfigError(key, "unknown config key");
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string(), std::string("not valid JSON: ") + e.what());
    }
    RunConfig c;
    apply_json(c, j, path.parent_path());
    return c;
}

void apply_env(RunConfig& c) {
    if (c.model.empty()) {
        const char* m = std::getenv("CP_LLM_MODEL");
        if (m != nullptr && *m != '\0') c.model = m;
        else if (c.provider == "mock") c.model = "mock";
    }
    if (c.oracle_model.empty()) {
        const char* m = std::getenv("CP_ORACLE_MODEL");
        c.oracle_model = m != nullptr && *m != '\0' ? m : c.model;
    }
    if (c.templates.empty()) {
        const char* t = std::getenv("CP_TEMPLATE_DIR");
        if (t != nullptr && *t != '\0') c.templates = t;
    }
}

void validate(const RunConfig& c) {
    if (c.provider != "http" && c.provider != "mock") throw ConfigError("provider", "must be http or mock");
    if (c.provider == "mock" && c.mock_script.empty()) throw ConfigError("mock_script", "required with provider mock");
    if (c.provider == "http" && c.model.empty()) throw ConfigError("model", "set it in the config or via CP_LLM_MODEL");
    if (c.oracle != "llm" && c.oracle != "table" && c.oracle != "remote") throw ConfigError("oracle", "must be llm, table or remote");
    if (c.nli != "llm" && c.nli != "table") throw ConfigError("nli", "must be llm or table");
    if (c.oracle == "table" && c.condition_table.empty()) throw ConfigError("condition_table", "required with oracle table");
    if (c.nli == "table" && c.nli_table.empty()) throw ConfigError("nli_table", "required with nli table");
    if (!codifier::granularity_from_string(c.granularity)) throw ConfigError("granularity", "must be section, paragraph or sentence");
    if (!responder::mode_from_string(c.mode)) {
        throw ConfigError("mode", "must be vanilla, textual, codified, codified_rag or ensemble");
    }
    if (c.temperature < 0.0) throw ConfigError("temperature", "must be >= 0");
    if (c.cot_budget < 0) throw ConfigError("cot_budget", "must be >= 0");
    if (c.k < 1) throw ConfigError("k", "must be >= 1");
    if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
    if (c.max_attempts < 1) throw ConfigError("max_attempts", "must be >= 1");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["benchmark"] = c.benchmark.string();
    j["profiles"] = c.profiles.string();
    j["output"] = c.output.string();
    j["provider"] = c.provider;
    j["mock_script"] = c.mock_script.string();
    j["model"] = c.model;
    j["oracle_model"] = c.oracle_model;
    j["temperature"] = c.temperature;
    j["granularity"] = c.granularity;
    j["include_randomness"] = c.include_randomness;
    j["mode"] = c.mode;
    j["cot_budget"] = c.cot_budget;
    j["k"] = c.k;
    j["base_seed"] = c.base_seed;
    j["workers"] = c.workers;
    j["max_attempts"] = c.max_attempts;
    j["oracle"] = c.oracle;
    j["nli"] = c.nli;
    j["nli_scene_context"] = c.nli_scene_context;
    j["condition_table"] = c.condition_table.string();
    j["nli_table"] = c.nli_table.string();
    j["templates"] = c.templates.string();
    j["cache_dir"] = c.cache_dir.string();
    return j;
}

}  // namespace cprofile::cli
