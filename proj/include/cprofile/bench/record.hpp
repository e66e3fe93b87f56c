#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cprofile/oracles/judges.hpp"
#include "cprofile/responder/respond.hpp"
#include "json.hpp"

namespace cprofile::bench {

enum class Tier { Main, Minor };

std::string_view to_string(Tier t);
std::optional<Tier> tier_from_string(std::string_view s);

/// One scored trial. A record with `error` set has no verdict and is left out of means.
struct EvalRecord {
    std::string scene_id;
    std::string character;
    std::string artifact;
    Tier tier = Tier::Main;
    responder::Mode mode = responder::Mode::Codified;
    std::string response;
    std::optional<std::string> reasoning;
    std::optional<oracles::NliVerdict> nli;
    int version_used = 0;
    std::size_t forward_passes = 0;
    std::optional<std::uint64_t> k_index;
    std::vector<engine::TriggeredStatement> triggered;
    engine::Trace trace;
    std::optional<std::string> error;
};

nlohmann::ordered_json to_json(const EvalRecord& r);
EvalRecord record_from_json(const nlohmann::json& j);

/// Builds a record from a response; the verdict is filled in by the caller.
EvalRecord make_record(const engine::Scene& scene, Tier tier, const responder::ResponseRecord& response, int version_used);

}  // namespace cprofile::bench
