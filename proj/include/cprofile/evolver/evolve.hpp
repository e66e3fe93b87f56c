#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cprofile/bench/record.hpp"
#include "cprofile/evolver/store.hpp"
#include "cprofile/llm/client.hpp"
#include "cprofile/oracles/judges.hpp"
#include "cprofile/responder/respond.hpp"

namespace cprofile::evolver {

struct Blame {
    std::string segment_id;
    oracles::Relation issue = oracles::Relation::Contradicted;
    int attempts = 0;       // blame prompts sent
    bool fallback = false;  // chosen by the most-statements rule, not by the model
};

/// Wording of an issue in prompts: "contradicted" or "relevant but not detailed".
std::string_view issue_phrase(oracles::Relation issue);

/**
 * Asks the blame template which segment caused a non-entailed verdict. Every
 * segment is listed, those that fired nothing included. An answer naming no
 * listed id is asked once more; after that the segment with the most triggered
 * statements is chosen (ties to the lowest index).
 */
Blame diagnose(const engine::Scene& scene, const std::string& character, const responder::ResponseRecord& response,
               const oracles::NliVerdict& verdict, const std::vector<std::string>& segment_ids, llm::LlmContext llm);

class ReviseFailed : public std::runtime_error {
public:
    ReviseFailed(std::string segment_id, int attempts, std::string diagnostics);
    const std::string& segment_id() const { return segment_id_; }
    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string segment_id_;
    std::string diagnostics_;
};

/**
 * Asks the revise template for a new program for the blamed segment and
 * commits it to `store`. The result must parse clean and differ from the old
 * program; otherwise the diagnostics are sent back, up to max_attempts. Throws
 * ReviseFailed with the store unchanged.
 */
Revision revise_segment(VersionStore& store, const Blame& blame, const engine::Scene& scene, const std::string& character,
                        const std::vector<engine::TriggeredStatement>& triggered, const std::string& response,
                        llm::LlmContext llm, int max_attempts = 3);

struct TimelineEvent {
    std::uint64_t seq = 0;
    enum class Kind { Evaluated, Committed, ReviseFailed } kind = Kind::Evaluated;
    std::string scene_id;
    int version = 0;
};

struct EvolvingResult {
    std::vector<bench::EvalRecord> records;
    std::vector<Revision> revisions;
    std::vector<TimelineEvent> timeline;
};

struct EvolvingOptions {
    responder::RespondConfig respond;
    std::uint64_t base_seed = 0;
    int max_attempts = 3;
    bench::Tier tier = bench::Tier::Main;
};

/**
 * Test, then evolve when not entailed, then move to the next scene. Scenes
 * must be sorted by order_index. Each record carries the version it used.
 * Per-scene failures are recorded and the run continues.
 */
EvolvingResult evolving_run(const std::vector<engine::Scene>& scenes, VersionStore& store, engine::ConditionOracle& oracle,
                            oracles::NliJudge& judge, llm::LlmContext llm, const EvolvingOptions& options = {});

}  // namespace cprofile::evolver
