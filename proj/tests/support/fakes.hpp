#pragma once

// Test doubles shared by unit and acceptance suites.

#include <atomic>
#include <map>
#include <string>

#include "cprofile/engine/oracle.hpp"

namespace cprofile::testing {

/// Answers from a question -> verdict map; unknown questions yield UNKNOWN. Counts calls.
class MapOracle : public engine::ConditionOracle {
public:
    MapOracle() = default;
    explicit MapOracle(std::map<std::string, engine::Tri> answers) : answers_(std::move(answers)) {}

    engine::ConditionVerdict check_condition(const engine::Scene&, std::string_view question) override {
        ++calls_;
        auto it = answers_.find(std::string(question));
        const engine::Tri v = it == answers_.end() ? engine::Tri::Unknown : it->second;
        return {v, engine::OracleSource::Table, std::string(engine::to_label(v)), false};
    }

    int calls() const { return calls_.load(); }
    void set(const std::string& q, engine::Tri v) { answers_[q] = v; }

private:
    std::map<std::string, engine::Tri> answers_;
    std::atomic<int> calls_{0};
};

/// Always fails, as an exhausted remote would.
class DownOracle : public engine::ConditionOracle {
public:
    engine::ConditionVerdict check_condition(const engine::Scene&, std::string_view) override {
        throw engine::OracleUnavailable("oracle down");
    }
};

inline engine::Scene make_scene(std::string id = "s1", std::string context = "X walks into the tavern.") {
    engine::Scene s;
    s.id = std::move(id);
    s.context = std::move(context);
    s.question = "What does X do next?";
    s.character = "X";
    s.artifact = "test";
    return s;
}

}  // namespace cprofile::testing
