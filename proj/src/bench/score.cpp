#include "cprofile/bench/score.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace cprofile::bench {

double best_at_k(const std::vector<std::vector<int>>& scores_per_scene, int k) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (scores_per_scene.empty()) throw std::invalid_argument("no scenes to score");
    double sum = 0.0;
    for (const auto& s : scores_per_scene) {
        if (s.size() < static_cast<std::size_t>(k)) throw std::invalid_argument("a scene has fewer than k scores");
        sum += *std::max_element(s.begin(), s.begin() + k);
    }
    return sum / static_cast<double>(scores_per_scene.size());
}

namespace {

struct SceneGroup {
    std::string character;
    std::string artifact;
    Tier tier = Tier::Main;
    std::string scene_id;
    std::vector<const EvalRecord*> records;
};

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace

Report score_run(const std::vector<EvalRecord>& records, std::optional<int> k) {
    if (k && *k < 1) throw std::invalid_argument("k must be at least 1");
    const std::size_t need = k ? static_cast<std::size_t>(*k) : 1;
    Report rep;
    rep.k = k;
    rep.records = records.size();

    // Groups in first-seen order, so the report follows the records.
    std::vector<SceneGroup> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    std::vector<std::string> char_order;
    for (const auto& r : records) {
        rep.forward_passes += r.forward_passes;
        if (r.error) ++rep.failures;
        auto key = std::make_pair(r.character, r.scene_id);
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) {
            groups.push_back(SceneGroup{r.character, r.artifact, r.tier, r.scene_id, {}});
            if (std::find(char_order.begin(), char_order.end(), r.character) == char_order.end()) char_order.push_back(r.character);
        }
        groups[it->second].records.push_back(&r);
    }

    struct Acc {
        CharacterScore score;
        std::vector<std::vector<int>> lists;  // complete scenes only
    };
    std::map<std::string, Acc> per_char;
    std::map<std::string, std::vector<double>> per_artifact;
    std::vector<double> main_scores, minor_scores, all_scores;
    std::vector<std::vector<int>> all_lists;

    for (auto& g : groups) {
        std::stable_sort(g.records.begin(), g.records.end(), [](const EvalRecord* a, const EvalRecord* b) {
            return a->k_index.value_or(0) < b->k_index.value_or(0);
        });
        auto& acc = per_char[g.character];
        acc.score.character = g.character;
        acc.score.artifact = g.artifact;
        acc.score.tier = g.tier;
        bool complete = g.records.size() >= need;
        std::vector<int> scores;
        for (std::size_t i = 0; complete && i < need; ++i) {
            const auto* r = g.records[i];
            if (r->error || !r->nli) {
                complete = false;
            } else {
                scores.push_back(r->nli->score);
            }
        }
        if (!complete) {
            ++acc.score.incomplete;
            rep.incomplete.push_back(g.character + "/" + g.scene_id);
            continue;
        }
        const double s = *std::max_element(scores.begin(), scores.end());
        ++acc.score.scenes;
        acc.lists.push_back(scores);
        all_lists.push_back(scores);
        per_artifact[g.artifact].push_back(s);
        (g.tier == Tier::Main ? main_scores : minor_scores).push_back(s);
        all_scores.push_back(s);
    }

    for (const auto& name : char_order) {
        auto& acc = per_char[name];
        if (!acc.lists.empty()) {
            acc.score.mean = best_at_k(acc.lists, static_cast<int>(need));
            if (k) {
                for (int kk = 1; kk <= *k; ++kk) acc.score.best_at[kk] = best_at_k(acc.lists, kk);
            }
        }
        rep.characters.push_back(acc.score);
    }
    for (const auto& [a, xs] : per_artifact) rep.artifact_means[a] = mean(xs);
    if (!main_scores.empty()) rep.main_mean = mean(main_scores);
    if (!minor_scores.empty()) rep.minor_mean = mean(minor_scores);
    if (!all_scores.empty()) rep.overall_mean = mean(all_scores);
    if (k && !all_lists.empty()) {
        for (int kk = 1; kk <= *k; ++kk) rep.best_at[kk] = best_at_k(all_lists, kk);
    }
    return rep;
}

namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); }

nlohmann::ordered_json curve(const std::map<int, double>& m) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [kk, v] : m) j[std::to_string(kk)] = v;
    return j;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace

nlohmann::ordered_json to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["order_dependent"] = r.order_dependent;
    j["config"] = r.config;
    j["k"] = r.k ? nlohmann::ordered_json(*r.k) : nlohmann::ordered_json(nullptr);
    j["characters"] = nlohmann::ordered_json::array();
    for (const auto& c : r.characters) {
        nlohmann::ordered_json cj;
        cj["character"] = c.character;
        cj["artifact"] = c.artifact;
        cj["tier"] = std::string(to_string(c.tier));
        cj["mean"] = c.scenes ? nlohmann::ordered_json(c.mean) : nlohmann::ordered_json(nullptr);
        cj["scenes"] = c.scenes;
        cj["incomplete"] = c.incomplete;
        if (r.k) cj["best_at"] = curve(c.best_at);
        j["characters"].push_back(cj);
    }
    j["artifact_means"] = nlohmann::ordered_json::object();
    for (const auto& [a, m] : r.artifact_means) j["artifact_means"][a] = m;
    j["main_mean"] = opt(r.main_mean);
    j["minor_mean"] = opt(r.minor_mean);
    j["overall_mean"] = opt(r.overall_mean);
    if (r.k) j["best_at"] = curve(r.best_at);
    j["incomplete"] = r.incomplete;
    if (r.preference) j["preference"] = {{"win", r.preference->win}, {"tie", r.preference->tie}, {"loss", r.preference->loss}};
    j["forward_passes"] = r.forward_passes;
    j["records"] = r.records;
    j["failures"] = r.failures;
    return j;
}

std::string render_text(const Report& r) {
    std::string out;
    if (!r.scenario.empty()) out += "Scenario: " + r.scenario + (r.order_dependent ? " (order dependent)" : "") + "\n";
    std::string header = pad("Character", 24) + pad("Artifact", 16) + pad("Tier", 7) + pad("Scenes", 8);
    header += pad(r.k ? "Best@" + std::to_string(*r.k) : std::string("Mean"), 8);
    if (r.k) {
        for (int kk = 1; kk < *r.k; ++kk) header += pad("@" + std::to_string(kk), 8);
    }
    while (!header.empty() && header.back() == ' ') header.pop_back();
    out += header + "\n" + std::string(header.size(), '-') + "\n";
    for (const auto& c : r.characters) {
        std::string row = pad(c.character, 24) + pad(c.artifact, 16) + pad(std::string(to_string(c.tier)), 7) +
                          pad(std::to_string(c.scenes), 8) + pad(c.scenes ? fixed2(c.mean) : "n/a", 8);
        if (r.k) {
            for (int kk = 1; kk < *r.k; ++kk) row += pad(c.best_at.count(kk) ? fixed2(c.best_at.at(kk)) : "n/a", 8);
        }
        while (!row.empty() && row.back() == ' ') row.pop_back();
        if (c.incomplete) row += "  (" + std::to_string(c.incomplete) + " incomplete)";
        out += row + "\n";
    }
    out += "\n";
    for (const auto& [a, m] : r.artifact_means) out += pad("Artifact " + a, 40) + fixed2(m) + "\n";
    if (r.main_mean) out += pad("Main characters", 40) + fixed2(*r.main_mean) + "\n";
    if (r.minor_mean) out += pad("Minor characters", 40) + fixed2(*r.minor_mean) + "\n";
    out += pad("Average", 40) + (r.overall_mean ? fixed2(*r.overall_mean) : "n/a") + "\n";
    if (r.k) {
        out += "Best@K:";
        for (const auto& [kk, v] : r.best_at) out += " K=" + std::to_string(kk) + " " + fixed2(v);
        out += "\n";
    }
    if (r.preference) {
        out += "Preference: win " + std::to_string(r.preference->win) + ", tie " + std::to_string(r.preference->tie) + ", loss " +
               std::to_string(r.preference->loss) + "\n";
    }
    out += "Forward passes: " + std::to_string(r.forward_passes) + "\n";
    if (!r.incomplete.empty()) {
        out += "Incomplete scenes (excluded):";
        for (const auto& s : r.incomplete) out += " " + s;
        out += "\n";
    }
    return out;
}

PreferenceTally compare_runs(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b,
                             const std::map<std::string, std::string>& references, oracles::PreferenceJudge& judge) {
    std::map<std::pair<std::string, std::string>, const EvalRecord*> theirs;
    for (const auto& r : b) theirs.emplace(std::make_pair(r.character, r.scene_id), &r);
    PreferenceTally t;
    for (const auto& r : a) {
        auto it = theirs.find({r.character, r.scene_id});
        auto ref = references.find(r.scene_id);
        if (it == theirs.end() || ref == references.end() || r.error || it->second->error) continue;
        switch (judge.judge(ref->second, r.response, it->second->response).winner) {
            case oracles::Winner::A: ++t.win; break;
            case oracles::Winner::B: ++t.loss; break;
            case oracles::Winner::Tie: ++t.tie; break;
        }
    }
    return t;
}

}  // namespace cprofile::bench
