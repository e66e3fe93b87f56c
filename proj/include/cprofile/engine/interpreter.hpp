#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cprofile/dsl/ast.hpp"
#include "cprofile/engine/oracle.hpp"
#include "cprofile/engine/rng.hpp"
#include "cprofile/engine/scene.hpp"
#include "cprofile/engine/trace.hpp"
#include "cprofile/engine/tri.hpp"
#include "json.hpp"

namespace cprofile::engine {

struct TriggeredStatement {
    std::string text;
    std::string segment_id;
    /// Arm index of every enclosing if: 0 = then, i + 1 = elif i, elifs + 1 = else.
    std::vector<std::size_t> path;
    /// Some guard decision on the path resolved UNKNOWN.
    bool uncertain = false;

    bool operator==(const TriggeredStatement&) const = default;
};

nlohmann::ordered_json to_json(const TriggeredStatement& s);
TriggeredStatement triggered_from_json(const nlohmann::json& j);

struct Execution {
    std::vector<TriggeredStatement> statements;
    Trace trace;
};

/// Shared state of one evaluation: the scene, the oracle with its memo, and the active stream.
struct EvalContext {
    const Scene& scene;
    ConditionOracle& oracle;
    OracleCache& cache;
    RandomStream& rng;
    std::string segment_id;
    Trace* trace = nullptr;  // events are appended when non-null
};

/// Kleene evaluation with left-to-right short-circuit; Chance never yields UNKNOWN.
Tri eval_expr(const dsl::Expr& expr, EvalContext& ctx);

/// Runs one program on its own substream (keyed by the program's segment id).
Execution execute_segment(const dsl::Program& program, const Scene& scene, ConditionOracle& oracle,
                          const RunSeed& seed, OracleCache* cache = nullptr);

/**
 * Runs every program in order and concatenates the results. Oracle answers are
 * memoized per (scene_id, question) for the whole call. Throws
 * std::invalid_argument on duplicate segment ids; an OracleUnavailable raised
 * inside a segment is rethrown carrying that segment id.
 */
Execution execute_profile(const std::vector<dsl::Program>& programs, const Scene& scene, ConditionOracle& oracle,
                          const RunSeed& seed, OracleCache* cache = nullptr);

}  // namespace cprofile::engine
