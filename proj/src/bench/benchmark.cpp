#include "cprofile/bench/benchmark.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cprofile/util/text.hpp"

namespace cprofile::bench {

const CharacterEntry& BenchmarkSet::find(const std::string& character) const {
    for (const auto& c : characters) {
        if (c.character == character) return c;
    }
    throw std::out_of_range("no character '" + character + "' in benchmark " + artifact);
}

namespace {

template <class F>
void for_each_line(const std::string& text, F&& f) {
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        ++lineno;
        const auto line = trim(std::string_view(text).substr(pos, nl - pos));
        if (!line.empty()) f(line, lineno);
        pos = nl + 1;
    }
}

}  // namespace

std::vector<engine::Scene> load_scenes_jsonl(const std::filesystem::path& path) {
    std::vector<engine::Scene> scenes;
    for_each_line(read_text_file(path), [&](std::string_view line, std::size_t lineno) {
        try {
            scenes.push_back(engine::scene_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return scenes;
}

void write_scenes_jsonl(const std::filesystem::path& path, const std::vector<engine::Scene>& scenes) {
    std::string out;
    for (const auto& s : scenes) out += engine::to_json(s).dump() + "\n";
    write_text_file(path, out);
}

void check_benchmark(const BenchmarkSet& set) {
    std::set<std::string> names;
    for (const auto& c : set.characters) {
        if (!names.insert(c.character).second) throw std::invalid_argument("character listed twice: " + c.character);
        std::set<std::string> ids;
        for (std::size_t i = 0; i < c.scenes.size(); ++i) {
            if (!ids.insert(c.scenes[i].id).second) throw std::invalid_argument("duplicate scene id " + c.scenes[i].id);
            if (i > 0 && c.scenes[i].order_index < c.scenes[i - 1].order_index) {
                throw std::invalid_argument("scenes of " + c.character + " are not sorted by order_index");
            }
        }
    }
}

BenchmarkSet load_benchmark(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(read_text_file(path));
    const auto base = path.parent_path();
    BenchmarkSet set;
    set.artifact = j.at("artifact").get<std::string>();
    for (const auto& c : j.at("characters")) {
        CharacterEntry e;
        e.character = c.at("character").get<std::string>();
        const auto tier = c.value("tier", std::string("main"));
        e.tier = tier_from_string(tier).value_or(Tier::Main);
        if (!tier_from_string(tier)) throw std::invalid_argument("characters[].tier must be main or minor, got " + tier);
        e.profile = codifier::load_profile(base / c.at("profile").get<std::string>());
        e.scenes = load_scenes_jsonl(base / c.at("scenes").get<std::string>());
        std::stable_sort(e.scenes.begin(), e.scenes.end(),
                         [](const auto& a, const auto& b) { return a.order_index < b.order_index; });
        for (auto& s : e.scenes) {
            if (s.character.empty()) s.character = e.character;
            if (s.artifact.empty()) s.artifact = set.artifact;
        }
        set.characters.push_back(std::move(e));
    }
    check_benchmark(set);
    return set;
}

std::vector<EvalRecord> load_records_jsonl(const std::filesystem::path& path) {
    std::vector<EvalRecord> out;
    for_each_line(read_text_file(path), [&](std::string_view line, std::size_t lineno) {
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

std::string records_jsonl(const std::vector<EvalRecord>& records) {
    std::string out;
    for (const auto& r : records) out += to_json(r).dump() + "\n";
    return out;
}

}  // namespace cprofile::bench
