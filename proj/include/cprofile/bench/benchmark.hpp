#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cprofile/bench/record.hpp"
#include "cprofile/codifier/segment.hpp"
#include "cprofile/engine/scene.hpp"

namespace cprofile::bench {

struct CharacterEntry {
    std::string character;
    Tier tier = Tier::Main;
    codifier::Profile profile;
    std::vector<engine::Scene> scenes;  // sorted by order_index
};

struct BenchmarkSet {
    std::string artifact;
    std::vector<CharacterEntry> characters;

    const CharacterEntry& find(const std::string& character) const;
};

/// Scene JSONL: one {id, artifact, character, order_index, context, question, reference_action} per line.
std::vector<engine::Scene> load_scenes_jsonl(const std::filesystem::path& path);
void write_scenes_jsonl(const std::filesystem::path& path, const std::vector<engine::Scene>& scenes);

/**
 * benchmark.json: {artifact, characters: [{character, tier, profile, scenes}]},
 * where profile and scenes are paths relative to the file. Scenes are sorted by
 * order_index; duplicate scene ids within a character are rejected.
 */
BenchmarkSet load_benchmark(const std::filesystem::path& path);

/// Throws std::invalid_argument when scene ids repeat within a character or order is not ascending.
void check_benchmark(const BenchmarkSet& set);

std::vector<EvalRecord> load_records_jsonl(const std::filesystem::path& path);
std::string records_jsonl(const std::vector<EvalRecord>& records);

}  // namespace cprofile::bench
