#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "cprofile/engine/scene.hpp"
#include "cprofile/engine/tri.hpp"

namespace cprofile::engine {

enum class OracleSource { Llm, Table, Remote };

std::string_view to_string(OracleSource source);

struct ConditionVerdict {
    Tri verdict = Tri::Unknown;
    OracleSource source = OracleSource::Table;
    std::string raw_label;  // one of the verbalizers, or "" when nothing matched
    bool cached = false;
};

/// The condition oracle could not answer after exhausting retries.
class OracleUnavailable : public std::runtime_error {
public:
    explicit OracleUnavailable(const std::string& what, std::string segment_id = {})
        : std::runtime_error(what), segment_id_(std::move(segment_id)) {}

    const std::string& segment_id() const { return segment_id_; }

private:
    std::string segment_id_;
};

/// Answers a natural-language question about a scene with TRUE / FALSE / UNKNOWN.
class ConditionOracle {
public:
    virtual ~ConditionOracle() = default;

    /// Precondition: question is non-empty (std::invalid_argument otherwise).
    virtual ConditionVerdict check_condition(const Scene& scene, std::string_view question) = 0;
};

/**
 * Memo of oracle answers keyed by (scene_id, question).
 * Single write wins; readers only ever see a committed value.
 */
class OracleCache {
public:
    std::optional<ConditionVerdict> find(const std::string& scene_id, const std::string& question) const;

    /// Stores `verdict` unless a value is already present; returns the committed value.
    ConditionVerdict commit(const std::string& scene_id, const std::string& question, ConditionVerdict verdict);

    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, ConditionVerdict> entries_;
};

}  // namespace cprofile::engine
