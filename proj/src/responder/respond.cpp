#include "cprofile/responder/respond.hpp"

#include <set>
#include <stdexcept>

#include "cprofile/util/text.hpp"

namespace cprofile::responder {

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Vanilla: return "vanilla";
        case Mode::Textual: return "textual";
        case Mode::Codified: return "codified";
        case Mode::CodifiedRag: return "codified_rag";
        case Mode::Ensemble: return "ensemble";
    }
    return "codified";
}

std::optional<Mode> mode_from_string(std::string_view s) {
    const auto l = to_lower(trim(s));
    for (Mode m : {Mode::Vanilla, Mode::Textual, Mode::Codified, Mode::CodifiedRag, Mode::Ensemble}) {
        if (l == to_string(m)) return m;
    }
    if (l == "codified-rag" || l == "rag") return Mode::CodifiedRag;
    return std::nullopt;
}

Grounding ground(const std::vector<dsl::Program>& programs, const engine::Scene& scene, engine::ConditionOracle& oracle,
                 const engine::RunSeed& seed, engine::OracleCache* cache) {
    auto exec = engine::execute_profile(programs, scene, oracle, seed, cache);
    Grounding g;
    g.oracle_calls = engine::oracle_calls(exec.trace);
    g.triggered = std::move(exec.statements);
    g.trace = std::move(exec.trace);
    return g;
}

nlohmann::ordered_json to_json(const ResponseRecord& r) {
    nlohmann::ordered_json j;
    j["scene_id"] = r.scene_id;
    j["mode"] = std::string(to_string(r.mode));
    j["response"] = r.response;
    j["reasoning"] = r.reasoning ? nlohmann::ordered_json(*r.reasoning) : nlohmann::ordered_json(nullptr);
    j["cot_budget"] = r.cot_budget;
    j["reasoning_steps"] = r.reasoning_steps;
    j["triggered"] = nlohmann::ordered_json::array();
    for (const auto& t : r.triggered) j["triggered"].push_back(engine::to_json(t));
    j["trace"] = engine::to_json(r.trace);
    j["forward_passes"] = r.forward_passes;
    j["run_index"] = r.run_index ? nlohmann::ordered_json(*r.run_index) : nlohmann::ordered_json(nullptr);
    return j;
}

namespace {

std::string statements_block(const std::vector<engine::TriggeredStatement>& triggered) {
    std::string out = "Profile rules that apply to this scene:\n";
    if (triggered.empty()) return out + std::string(kNothingFired) + "\n";
    std::set<std::string> seen;
    for (const auto& t : triggered) {
        if (!seen.insert(t.text).second) continue;  // the record keeps duplicates, the prompt does not
        out += "- " + t.text + "\n";
    }
    return out;
}

std::string profile_block(const std::string& text) { return "Character profile:\n" + text + "\n"; }

int count_steps(const std::string& reasoning) {
    int n = 0;
    std::size_t pos = 0;
    while (pos <= reasoning.size()) {
        auto nl = reasoning.find('\n', pos);
        if (nl == std::string::npos) nl = reasoning.size();
        if (!trim(std::string_view(reasoning).substr(pos, nl - pos)).empty()) ++n;
        pos = nl + 1;
    }
    return n;
}

}  // namespace

std::string grounding_block(Mode mode, const Grounding& grounding) {
    switch (mode) {
        case Mode::Vanilla: return "";
        case Mode::Textual: return "\n" + profile_block(grounding.profile_text);
        case Mode::Codified:
        case Mode::CodifiedRag: return "\n" + statements_block(grounding.triggered);
        case Mode::Ensemble: return "\n" + statements_block(grounding.triggered) + "\n" + profile_block(grounding.profile_text);
    }
    return "";
}

ResponseRecord respond(const engine::Scene& scene, const std::string& character, const Grounding& grounding,
                       const RespondConfig& config, llm::LlmContext llm) {
    if (config.cot_budget < 0) throw std::invalid_argument("cot_budget must be >= 0");
    if ((config.mode == Mode::Textual || config.mode == Mode::Ensemble) && trim(grounding.profile_text).empty()) {
        throw std::invalid_argument(std::string(to_string(config.mode)) + " mode needs the profile text");
    }
    ResponseRecord rec;
    rec.scene_id = scene.id;
    rec.mode = config.mode;
    rec.cot_budget = config.cot_budget;
    if (config.mode != Mode::Vanilla && config.mode != Mode::Textual) {
        rec.triggered = grounding.triggered;
        rec.trace = grounding.trace;
    }
    std::size_t passes = config.mode == Mode::Vanilla || config.mode == Mode::Textual ? 0 : grounding.oracle_calls;

    const std::string guidance =
        config.guiding_question && !trim(scene.question).empty() ? "\nGuiding question: " + scene.question + "\n" : "";
    const std::string block = grounding_block(config.mode, grounding);

    std::string reasoning_block;
    if (config.cot_budget > 0) {
        auto ex = llm.client.complete(llm.templates.get("cot"),
                                      {{"character", character},
                                       {"scene", scene.context},
                                       {"guidance", guidance},
                                       {"grounding", block},
                                       {"budget", std::to_string(config.cot_budget)}},
                                      llm.config);
        if (!ex.cache_hit) ++passes;
        rec.reasoning = std::string(trim(ex.completion));
        rec.reasoning_steps = count_steps(*rec.reasoning);
        reasoning_block = "\nYour reasoning:\n" + *rec.reasoning + "\n";
    }
    auto ex = llm.client.complete(llm.templates.get("role_play"),
                                  {{"character", character},
                                   {"scene", scene.context},
                                   {"guidance", guidance},
                                   {"grounding", block},
                                   {"reasoning", reasoning_block}},
                                  llm.config);
    if (!ex.cache_hit) ++passes;
    rec.response = std::string(trim(ex.completion));
    rec.forward_passes = passes;
    return rec;
}

std::vector<ResponseRecord> respond_stochastic(const engine::Scene& scene, const std::string& character,
                                               const std::vector<dsl::Program>& programs, engine::ConditionOracle& oracle,
                                               const RespondConfig& config, llm::LlmContext llm, int k,
                                               std::uint64_t base_seed) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (config.mode != Mode::Codified) throw std::invalid_argument("stochastic responses need CODIFIED mode");
    if (llm.config.temperature > llm::kMaxStochasticTemperature) {
        throw std::invalid_argument("stochastic responses need temperature <= 0.7");
    }
    engine::OracleCache memo;
    std::vector<ResponseRecord> out;
    for (int r = 0; r < k; ++r) {
        const engine::RunSeed seed{base_seed, scene.id, static_cast<std::uint64_t>(r)};
        auto rec = respond(scene, character, ground(programs, scene, oracle, seed, &memo), config, llm);
        rec.run_index = static_cast<std::uint64_t>(r);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace cprofile::responder
