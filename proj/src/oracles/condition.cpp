#include "cprofile/oracles/condition.hpp"

#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "cprofile/util/text.hpp"

namespace cprofile::oracles {

using engine::ConditionVerdict;
using engine::OracleSource;
using engine::Tri;

const std::vector<std::string>& condition_labels() {
    static const std::vector<std::string> labels{"yes", "no", "unknown"};
    return labels;
}

namespace {

void require_question(std::string_view question) {
    if (trim(question).empty()) throw std::invalid_argument("condition question must be non-empty");
}

}  // namespace

LlmConditionOracle::LlmConditionOracle(llm::LlmContext ctx) : ctx_(ctx) { ctx_.config.temperature = 0.0; }

ConditionVerdict LlmConditionOracle::check_condition(const engine::Scene& scene, std::string_view question) {
    require_question(question);
    const std::string q(question);
    if (auto hit = memo_.find(scene.id, q)) {
        hit->cached = true;
        return *hit;
    }
    ConditionVerdict v;
    v.source = OracleSource::Llm;
    try {
        auto c = ctx_.client.classify(ctx_.templates.get("condition"), {{"scene", scene.context}, {"question", q}},
                                      condition_labels(), ctx_.config);
        v.raw_label = c.label;
        v.verdict = engine::tri_from_label(c.label).value_or(Tri::Unknown);
        v.cached = c.exchange.cache_hit;
    } catch (const llm::Unparseable& e) {
        spdlog::warn("condition answer '{}' matches no verbalizer; treating as unknown", e.completion());
        v.verdict = Tri::Unknown;
        v.cached = false;
    } catch (const llm::LlmUnavailable& e) {
        throw engine::OracleUnavailable(e.what());
    }
    const bool fresh = !memo_.find(scene.id, q).has_value();
    auto committed = memo_.commit(scene.id, q, v);
    if (fresh) {
        std::lock_guard lock(log_mutex_);
        log_.push_back(Asked{scene, q, committed.verdict});
    }
    committed.cached = v.cached;
    return committed;
}

std::vector<LlmConditionOracle::Asked> LlmConditionOracle::answered() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

TableConditionOracle::TableConditionOracle(const nlohmann::json& table) {
    if (!table.is_object()) throw std::invalid_argument("condition table must be a JSON object");
    for (const auto& [scene_id, questions] : table.items()) {
        for (const auto& [q, label] : questions.items()) {
            auto tri = engine::tri_from_label(label.get<std::string>());
            if (!tri) throw std::invalid_argument("condition table label '" + label.get<std::string>() + "' for " + scene_id);
            table_[scene_id][q] = *tri;
        }
    }
}

TableConditionOracle TableConditionOracle::from_json_file(const std::filesystem::path& path) {
    return TableConditionOracle(nlohmann::json::parse(read_text_file(path)));
}

ConditionVerdict TableConditionOracle::check_condition(const engine::Scene& scene, std::string_view question) {
    require_question(question);
    ConditionVerdict v;
    v.source = OracleSource::Table;
    if (auto s = table_.find(scene.id); s != table_.end()) {
        if (auto q = s->second.find(question); q != s->second.end()) {
            v.verdict = q->second;
            v.raw_label = std::string(engine::to_label(q->second));
        }
    }
    return v;
}

std::size_t TableConditionOracle::size() const {
    std::size_t n = 0;
    for (const auto& [_, qs] : table_) n += qs.size();
    return n;
}

std::size_t export_distillation_data(const std::vector<DistillRecord>& records, const std::filesystem::path& path) {
    if (records.empty()) throw std::invalid_argument("no distillation records to export");
    std::set<std::pair<std::string, std::string>> seen;
    std::string out;
    std::size_t lines = 0;
    for (const auto& r : records) {
        if (!seen.emplace(r.scene.context, r.question).second) continue;
        nlohmann::ordered_json j;
        j["scene"] = r.scene.context;
        j["question"] = r.question;
        j["label"] = std::string(engine::to_label(r.verdict));
        out += j.dump();
        out += '\n';
        ++lines;
    }
    write_text_file(path, out);
    return lines;
}

}  // namespace cprofile::oracles
