#include "cprofile/bench/record.hpp"

#include "cprofile/util/text.hpp"

namespace cprofile::bench {

std::string_view to_string(Tier t) { return t == Tier::Main ? "main" : "minor"; }

std::optional<Tier> tier_from_string(std::string_view s) {
    const auto l = to_lower(trim(s));
    if (l == "main") return Tier::Main;
    if (l == "minor") return Tier::Minor;
    return std::nullopt;
}

nlohmann::ordered_json to_json(const EvalRecord& r) {
    nlohmann::ordered_json j;
    j["scene_id"] = r.scene_id;
    j["character"] = r.character;
    j["artifact"] = r.artifact;
    j["tier"] = std::string(to_string(r.tier));
    j["mode"] = std::string(responder::to_string(r.mode));
    j["response"] = r.response;
    j["reasoning"] = r.reasoning ? nlohmann::ordered_json(*r.reasoning) : nlohmann::ordered_json(nullptr);
    j["nli"] = r.nli ? oracles::to_json(*r.nli) : nlohmann::ordered_json(nullptr);
    j["version_used"] = r.version_used;
    j["forward_passes"] = r.forward_passes;
    j["k_index"] = r.k_index ? nlohmann::ordered_json(*r.k_index) : nlohmann::ordered_json(nullptr);
    j["triggered"] = nlohmann::ordered_json::array();
    for (const auto& t : r.triggered) j["triggered"].push_back(engine::to_json(t));
    j["trace"] = engine::to_json(r.trace);
    j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
    return j;
}

EvalRecord record_from_json(const nlohmann::json& j) {
    EvalRecord r;
    r.scene_id = j.at("scene_id").get<std::string>();
    r.character = j.value("character", std::string{});
    r.artifact = j.value("artifact", std::string{});
    r.tier = tier_from_string(j.value("tier", std::string("main"))).value_or(Tier::Main);
    if (auto m = responder::mode_from_string(j.value("mode", std::string("codified")))) r.mode = *m;
    r.response = j.value("response", std::string{});
    if (j.contains("reasoning") && !j["reasoning"].is_null()) r.reasoning = j["reasoning"].get<std::string>();
    if (j.contains("nli") && !j["nli"].is_null()) r.nli = oracles::nli_from_json(j["nli"]);
    r.version_used = j.value("version_used", 0);
    r.forward_passes = j.value("forward_passes", std::size_t{0});
    if (j.contains("k_index") && !j["k_index"].is_null()) r.k_index = j["k_index"].get<std::uint64_t>();
    for (const auto& t : j.value("triggered", nlohmann::json::array())) r.triggered.push_back(engine::triggered_from_json(t));
    if (j.contains("trace")) r.trace = engine::trace_from_json(j["trace"]);
    if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<std::string>();
    return r;
}

EvalRecord make_record(const engine::Scene& scene, Tier tier, const responder::ResponseRecord& response, int version_used) {
    EvalRecord r;
    r.scene_id = scene.id;
    r.character = scene.character;
    r.artifact = scene.artifact;
    r.tier = tier;
    r.mode = response.mode;
    r.response = response.response;
    r.reasoning = response.reasoning;
    r.version_used = version_used;
    r.forward_passes = response.forward_passes;
    r.k_index = response.run_index;
    r.triggered = response.triggered;
    r.trace = response.trace;
    return r;
}

}  // namespace cprofile::bench
