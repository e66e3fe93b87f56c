#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cprofile/engine/scene.hpp"
#include "cprofile/llm/client.hpp"
#include "json.hpp"

namespace cprofile::oracles {

enum class Relation { Entailed, Neutral, Contradicted };

std::string_view to_string(Relation r);
/// Accepts "entailed", "neutral", "contradicted" in any case.
std::optional<Relation> relation_from_string(std::string_view s);
/// 100 / 50 / 0.
int score_of(Relation r);

struct NliVerdict {
    Relation relation = Relation::Neutral;
    int score = 50;
};

NliVerdict make_verdict(Relation r);
nlohmann::ordered_json to_json(const NliVerdict& v);
NliVerdict nli_from_json(const nlohmann::json& j);

/**
 * Judges a response against the reference action. Identical strings are
 * ENTAILED without consulting the backend.
 */
class NliJudge {
public:
    virtual ~NliJudge() = default;

    /// `scene` may be null. Throws std::invalid_argument on empty inputs.
    NliVerdict judge(const engine::Scene* scene, const std::string& reference, const std::string& response);

protected:
    virtual NliVerdict judge_backend(const engine::Scene* scene, const std::string& reference, const std::string& response) = 0;
};

class LlmNliJudge : public NliJudge {
public:
    explicit LlmNliJudge(llm::LlmContext ctx, bool include_scene = true) : ctx_(ctx), include_scene_(include_scene) {}

protected:
    NliVerdict judge_backend(const engine::Scene* scene, const std::string& reference, const std::string& response) override;

private:
    llm::LlmContext ctx_;
    bool include_scene_;
};

/// Lookup in `{sha256(reference): {sha256(response): relation}}`; a miss is NEUTRAL.
class TableNliJudge : public NliJudge {
public:
    TableNliJudge() = default;
    explicit TableNliJudge(const nlohmann::json& table);
    static TableNliJudge from_json_file(const std::filesystem::path& path);

    void set(const std::string& reference, const std::string& response, Relation r);

protected:
    NliVerdict judge_backend(const engine::Scene* scene, const std::string& reference, const std::string& response) override;

private:
    std::map<std::string, std::map<std::string, Relation>> table_;
};

enum class Winner { A, B, Tie };

std::string_view to_string(Winner w);

struct PreferenceVerdict {
    Winner winner = Winner::Tie;
    bool order_consistent = true;
};

/**
 * Pairwise preference shown in both orders. Disagreement between the two
 * orders is a TIE; identical candidates are a TIE without judging.
 */
class PreferenceJudge {
public:
    virtual ~PreferenceJudge() = default;

    PreferenceVerdict judge(const std::string& reference, const std::string& response_a, const std::string& response_b);

protected:
    /// Which shown candidate is better: A = first, B = second, Tie = undecidable.
    virtual Winner pick(const std::string& reference, const std::string& first, const std::string& second) = 0;
};

class LlmPreferenceJudge : public PreferenceJudge {
public:
    explicit LlmPreferenceJudge(llm::LlmContext ctx) : ctx_(ctx) {}

protected:
    Winner pick(const std::string& reference, const std::string& first, const std::string& second) override;

private:
    llm::LlmContext ctx_;
};

}  // namespace cprofile::oracles
