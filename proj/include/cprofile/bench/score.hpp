#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cprofile/bench/record.hpp"
#include "cprofile/oracles/judges.hpp"
#include "json.hpp"

namespace cprofile::bench {

/// Mean over scenes of the best score among each scene's first k scores. Needs k >= 1 and k scores per scene.
double best_at_k(const std::vector<std::vector<int>>& scores_per_scene, int k);

struct CharacterScore {
    std::string character;
    std::string artifact;
    Tier tier = Tier::Main;
    double mean = 0.0;
    std::size_t scenes = 0;      // complete scenes counted in the mean
    std::size_t incomplete = 0;  // scenes left out
    std::map<int, double> best_at;  // K -> Best@K, when k was given
};

struct PreferenceTally {
    int win = 0;
    int tie = 0;
    int loss = 0;
};

struct Report {
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::string scenario;  // basic, evolving, stochastic or report
    bool order_dependent = false;
    std::optional<int> k;
    std::vector<CharacterScore> characters;
    std::map<std::string, double> artifact_means;
    std::optional<double> main_mean;
    std::optional<double> minor_mean;
    std::optional<double> overall_mean;
    std::map<int, double> best_at;  // overall Best@K curve
    std::vector<std::string> incomplete;  // "character/scene_id"
    std::optional<PreferenceTally> preference;
    std::size_t forward_passes = 0;
    std::size_t records = 0;
    std::size_t failures = 0;  // records carrying an error
};

/**
 * Folds records into a report. Records of a scene are taken in k_index order
 * (record order when absent). Without k a scene scores its first record; with
 * k it scores the best of its first k. A scene with an errored or missing
 * record among those counted is incomplete and left out of every mean.
 */
Report score_run(const std::vector<EvalRecord>& records, std::optional<int> k = std::nullopt);

nlohmann::ordered_json to_json(const Report& report);
/// Plain-text table: one row per character, then artifact and tier rollups.
std::string render_text(const Report& report);

/// Win/tie/loss of run `a` against run `b`, matching records by (character, scene_id).
PreferenceTally compare_runs(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b,
                             const std::map<std::string, std::string>& references, oracles::PreferenceJudge& judge);

}  // namespace cprofile::bench
