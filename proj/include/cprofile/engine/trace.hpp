#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "cprofile/engine/oracle.hpp"
#include "cprofile/engine/tri.hpp"
#include "json.hpp"

namespace cprofile::engine {

struct Checked {
    std::string question;
    Tri verdict = Tri::Unknown;
    OracleSource source = OracleSource::Table;
    bool cached = false;
};

struct ChanceDrawn {
    double p = 0.0;
    double draw = 0.0;
    bool passed = false;
};

struct ChoiceMade {
    std::vector<std::string> options;
    std::size_t chosen_index = 0;
};

struct Triggered {
    std::string text;
};

/// Which arm of an if statement ran. `elif_index` is meaningful for Kind::Elif only.
struct BranchTaken {
    enum class Kind { Then, Elif, Else, Skipped };
    Kind kind = Kind::Skipped;
    std::size_t elif_index = 0;
};

struct TraceEvent {
    std::string segment_id;
    std::variant<Checked, ChanceDrawn, ChoiceMade, Triggered, BranchTaken> event;
};

using Trace = std::vector<TraceEvent>;

inline constexpr int kTraceSchemaVersion = 1;

/// One JSON object per event, tagged with "v":1 and "type".
nlohmann::ordered_json to_json(const TraceEvent& event);
nlohmann::ordered_json to_json(const Trace& trace);
TraceEvent trace_event_from_json(const nlohmann::json& j);
Trace trace_from_json(const nlohmann::json& j);

/// Number of Checked events that were answered by the oracle rather than a cache.
std::size_t oracle_calls(const Trace& trace);

}  // namespace cprofile::engine
