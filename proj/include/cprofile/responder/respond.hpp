#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cprofile/dsl/ast.hpp"
#include "cprofile/engine/interpreter.hpp"
#include "cprofile/llm/client.hpp"
#include "json.hpp"

namespace cprofile::responder {

enum class Mode { Vanilla, Textual, Codified, CodifiedRag, Ensemble };

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

/// What a mode may show the role-play model. Fields a mode does not use are ignored.
struct Grounding {
    std::string profile_text;                             // TEXTUAL, ENSEMBLE
    std::vector<engine::TriggeredStatement> triggered;    // CODIFIED, CODIFIED_RAG, ENSEMBLE
    engine::Trace trace;
    std::size_t oracle_calls = 0;                         // non-cached oracle calls spent producing `triggered`
};

/// Executes `programs` for `scene` and packages the result as grounding.
Grounding ground(const std::vector<dsl::Program>& programs, const engine::Scene& scene, engine::ConditionOracle& oracle,
                 const engine::RunSeed& seed, engine::OracleCache* cache = nullptr);

struct RespondConfig {
    Mode mode = Mode::Codified;
    int cot_budget = 0;
    bool guiding_question = true;  // benchmark scenes show it; live chat does not
};

struct ResponseRecord {
    std::string scene_id;
    Mode mode = Mode::Codified;
    std::string response;
    std::optional<std::string> reasoning;  // present iff cot_budget > 0
    int cot_budget = 0;
    int reasoning_steps = 0;               // non-empty lines of the reasoning
    std::vector<engine::TriggeredStatement> triggered;
    engine::Trace trace;
    std::size_t forward_passes = 0;
    std::optional<std::uint64_t> run_index;
};

nlohmann::ordered_json to_json(const ResponseRecord& r);

/// The grounding block exactly as it appears in the role-play prompt.
std::string grounding_block(Mode mode, const Grounding& grounding);

/// Text used when no statement fired.
inline constexpr std::string_view kNothingFired = "No profile rule fired for this scene.";

/**
 * Renders the role-play template (after a budgeted CoT call when cot_budget > 0)
 * and returns the character's next action. forward_passes counts the grounding's
 * oracle calls plus the non-cached LLM calls made here.
 */
ResponseRecord respond(const engine::Scene& scene, const std::string& character, const Grounding& grounding,
                       const RespondConfig& config, llm::LlmContext llm);

/**
 * k runs of the same codified profile with run_index 0..k-1, each with fresh
 * randomness. Requires k >= 1, CODIFIED mode and temperature <= 0.7.
 */
std::vector<ResponseRecord> respond_stochastic(const engine::Scene& scene, const std::string& character,
                                               const std::vector<dsl::Program>& programs, engine::ConditionOracle& oracle,
                                               const RespondConfig& config, llm::LlmContext llm, int k,
                                               std::uint64_t base_seed);

}  // namespace cprofile::responder
