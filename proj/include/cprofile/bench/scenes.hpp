#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cprofile/codifier/segment.hpp"
#include "cprofile/engine/scene.hpp"
#include "cprofile/llm/client.hpp"

namespace cprofile::bench {

struct SceneBuildOptions {
    std::string artifact;
    std::int64_t first_order_index = 0;
};

/// True when the question shares a word of six or more letters with the reference (case-insensitive).
bool question_leaks(const std::string& question, const std::string& reference);

/**
 * Extracts the character's action sentences from an episode summary. Each
 * kept sentence is a verbatim substring of the summary; the text before it is
 * the scene context. Non-verbatim extractions and sentences with nothing
 * before them are dropped with a warning.
 */
std::vector<engine::Scene> build_scenes(const std::string& episode_summary, const std::string& character, llm::LlmContext llm,
                                        const SceneBuildOptions& options = {});

class OverAggressiveFilter : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FilterResult {
    codifier::Profile profile;
    std::vector<std::string> removed;  // segment ids
};

/**
 * Drops the segments the spoiler_filter template flags as happening after
 * `cutoff_order`. Refuses to drop more than half the segments unless
 * `allow_aggressive`. On LLM failure the profile is returned unfiltered.
 */
FilterResult filter_spoilers(const codifier::Profile& profile, std::int64_t cutoff_order, llm::LlmContext llm,
                             bool allow_aggressive = false);

}  // namespace cprofile::bench
