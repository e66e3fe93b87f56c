#include "cprofile/oracles/judges.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

#include "cprofile/util/hash.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::oracles {

std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::Entailed: return "entailed";
        case Relation::Neutral: return "neutral";
        case Relation::Contradicted: return "contradicted";
    }
    return "neutral";
}

std::optional<Relation> relation_from_string(std::string_view s) {
    const auto l = to_lower(trim(s));
    if (l == "entailed") return Relation::Entailed;
    if (l == "neutral") return Relation::Neutral;
    if (l == "contradicted") return Relation::Contradicted;
    return std::nullopt;
}

int score_of(Relation r) {
    switch (r) {
        case Relation::Entailed: return 100;
        case Relation::Neutral: return 50;
        case Relation::Contradicted: return 0;
    }
    return 50;
}

NliVerdict make_verdict(Relation r) { return NliVerdict{r, score_of(r)}; }

nlohmann::ordered_json to_json(const NliVerdict& v) {
    return {{"relation", std::string(to_string(v.relation))}, {"score", v.score}};
}

NliVerdict nli_from_json(const nlohmann::json& j) {
    auto r = relation_from_string(j.at("relation").get<std::string>());
    if (!r) throw std::invalid_argument("unknown NLI relation in record");
    auto v = make_verdict(*r);
    if (j.contains("score") && j.at("score").get<int>() != v.score) throw std::invalid_argument("NLI score does not match relation");
    return v;
}

NliVerdict NliJudge::judge(const engine::Scene* scene, const std::string& reference, const std::string& response) {
    if (trim(reference).empty() || trim(response).empty()) throw std::invalid_argument("NLI judge needs a reference and a response");
    if (reference == response) return make_verdict(Relation::Entailed);
    return judge_backend(scene, reference, response);
}

NliVerdict LlmNliJudge::judge_backend(const engine::Scene* scene, const std::string& reference, const std::string& response) {
    std::string scene_block;
    if (include_scene_ && scene != nullptr) scene_block = "\nScene:\n" + scene->context + "\n";
    auto cfg = ctx_.config;
    cfg.temperature = 0.0;
    try {
        auto c = ctx_.client.classify(ctx_.templates.get("nli"),
                                      {{"scene_block", scene_block}, {"reference", reference}, {"response", response}},
                                      {"entailed", "neutral", "contradicted"}, cfg);
        return make_verdict(relation_from_string(c.label).value_or(Relation::Neutral));
    } catch (const llm::Unparseable& e) {
        spdlog::warn("NLI judge answer '{}' is not a relation; scoring as neutral", e.completion());
        return make_verdict(Relation::Neutral);
    }
}

TableNliJudge::TableNliJudge(const nlohmann::json& table) {
    if (!table.is_object()) throw std::invalid_argument("NLI table must be a JSON object");
    for (const auto& [ref_hash, row] : table.items()) {
        for (const auto& [resp_hash, rel] : row.items()) {
            auto r = relation_from_string(rel.get<std::string>());
            if (!r) throw std::invalid_argument("NLI table relation '" + rel.get<std::string>() + "'");
            table_[ref_hash][resp_hash] = *r;
        }
    }
}

TableNliJudge TableNliJudge::from_json_file(const std::filesystem::path& path) {
    return TableNliJudge(nlohmann::json::parse(read_text_file(path)));
}

void TableNliJudge::set(const std::string& reference, const std::string& response, Relation r) {
    table_[sha256_hex(reference)][sha256_hex(response)] = r;
}

NliVerdict TableNliJudge::judge_backend(const engine::Scene*, const std::string& reference, const std::string& response) {
    if (auto row = table_.find(sha256_hex(reference)); row != table_.end()) {
        if (auto cell = row->second.find(sha256_hex(response)); cell != row->second.end()) return make_verdict(cell->second);
    }
    spdlog::warn("NLI table has no entry for this response; scoring as neutral");
    return make_verdict(Relation::Neutral);
}

std::string_view to_string(Winner w) {
    switch (w) {
        case Winner::A: return "A";
        case Winner::B: return "B";
        case Winner::Tie: return "tie";
    }
    return "tie";
}

PreferenceVerdict PreferenceJudge::judge(const std::string& reference, const std::string& response_a, const std::string& response_b) {
    if (trim(reference).empty() || trim(response_a).empty() || trim(response_b).empty()) {
        throw std::invalid_argument("preference judge needs a reference and two responses");
    }
    if (response_a == response_b) return {Winner::Tie, true};
    const Winner forward = pick(reference, response_a, response_b);
    Winner backward = pick(reference, response_b, response_a);
    // Map the swapped judgment back onto the original labels.
    if (backward == Winner::A) {
        backward = Winner::B;
    } else if (backward == Winner::B) {
        backward = Winner::A;
    }
    if (forward == backward) return {forward, true};
    return {Winner::Tie, false};
}

Winner LlmPreferenceJudge::pick(const std::string& reference, const std::string& first, const std::string& second) {
    auto cfg = ctx_.config;
    cfg.temperature = 0.0;
    try {
        auto c = ctx_.client.classify(ctx_.templates.get("preference"),
                                      {{"reference", reference}, {"first", first}, {"second", second}}, {"A", "B"}, cfg);
        return c.label == "A" ? Winner::A : Winner::B;
    } catch (const llm::Unparseable& e) {
        spdlog::warn("preference judge answer '{}' names no candidate; counting as a tie", e.completion());
        return Winner::Tie;
    }
}

}  // namespace cprofile::oracles
