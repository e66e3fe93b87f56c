#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "cprofile/oracles/condition.hpp"
#include "cprofile/oracles/judges.hpp"
#include "cprofile/util/hash.hpp"
#include "support/fakes.hpp"

using namespace cprofile;
using namespace cprofile::oracles;
using engine::Tri;

namespace {

struct LlmRig {
    std::shared_ptr<llm::MockProvider> mock = std::make_shared<llm::MockProvider>();
    llm::LlmClient client{mock, nullptr, llm::RetryPolicy{2, std::chrono::milliseconds(0), 1.0}};
    llm::TemplateLibrary templates = llm::TemplateLibrary::builtin();
    llm::LlmContext ctx() { return {client, templates, llm::GenerationConfig{"mock"}}; }
};

std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "cprofile_oracles_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// Prefers the lexicographically smaller candidate whichever slot it is shown in.
class SmallerWins : public PreferenceJudge {
public:
    int calls = 0;

protected:
    Winner pick(const std::string&, const std::string& first, const std::string& second) override {
        ++calls;
        return first < second ? Winner::A : Winner::B;
    }
};

class FirstShownWins : public PreferenceJudge {
protected:
    Winner pick(const std::string&, const std::string&, const std::string&) override { return Winner::A; }
};

}  // namespace

TEST(TableOracle, ExactLookupAndMiss) {
    TableConditionOracle o(nlohmann::json{{"s1", {{"Is X being insulted?", "yes"}, {"Is X alone?", "no"}}}});
    auto s1 = cprofile::testing::make_scene("s1");
    EXPECT_EQ(o.check_condition(s1, "Is X being insulted?").verdict, Tri::True);
    EXPECT_EQ(o.check_condition(s1, "Is X alone?").verdict, Tri::False);
    auto miss = o.check_condition(s1, "Is X hungry?");
    EXPECT_EQ(miss.verdict, Tri::Unknown);
    EXPECT_EQ(miss.raw_label, "");
    EXPECT_EQ(o.check_condition(cprofile::testing::make_scene("s2"), "Is X alone?").verdict, Tri::Unknown);
    EXPECT_THROW(o.check_condition(s1, ""), std::invalid_argument);
}

TEST(TableOracle, RejectsUnknownLabels) {
    EXPECT_THROW(TableConditionOracle(nlohmann::json{{"s1", {{"q?", "maybe"}}}}), std::invalid_argument);
}

TEST(LlmOracle, MapsVerbalizers) {
    LlmRig rig;
    rig.mock->on("condition", {"Is it raining?"}, {"Yes."});
    rig.mock->on("condition", {"Is it night?"}, {"no"});
    rig.mock->on("condition", {"Is it cold?"}, {"unknown"});
    rig.mock->on("condition", {"Is it odd?"}, {"Perhaps, hard to say"});
    LlmConditionOracle o(rig.ctx());
    auto s = cprofile::testing::make_scene();
    EXPECT_EQ(o.check_condition(s, "Is it raining?").verdict, Tri::True);
    EXPECT_EQ(o.check_condition(s, "Is it night?").verdict, Tri::False);
    EXPECT_EQ(o.check_condition(s, "Is it cold?").verdict, Tri::Unknown);
    auto odd = o.check_condition(s, "Is it odd?");
    EXPECT_EQ(odd.verdict, Tri::Unknown);
    EXPECT_EQ(odd.raw_label, "");
    EXPECT_EQ(odd.source, engine::OracleSource::Llm);
    EXPECT_THROW(o.check_condition(s, ""), std::invalid_argument);
}

TEST(LlmOracle, SameSceneAndQuestionCallsProviderOnce) {
    LlmRig rig;
    rig.mock->on("condition", {}, {"yes"});
    LlmConditionOracle o(rig.ctx());
    auto s = cprofile::testing::make_scene("s1");
    auto first = o.check_condition(s, "Is X armed?");
    auto second = o.check_condition(s, "Is X armed?");
    EXPECT_EQ(rig.mock->calls(), 1);
    EXPECT_FALSE(first.cached);
    EXPECT_TRUE(second.cached);
    o.check_condition(cprofile::testing::make_scene("s2", "X sits by the fire."), "Is X armed?");
    EXPECT_EQ(rig.mock->calls(), 2);
    EXPECT_EQ(o.answered().size(), 2u);
}

TEST(LlmOracle, ExhaustedRetriesAreOracleUnavailable) {
    LlmRig rig;
    rig.mock->add_rule({"condition", {}, {"yes"}, {}, 100});
    LlmConditionOracle o(rig.ctx());
    EXPECT_THROW(o.check_condition(cprofile::testing::make_scene(), "Is X armed?"), engine::OracleUnavailable);
}

TEST(LlmOracle, UsesFirstTokenScoresWhenAvailable) {
    LlmRig rig;
    rig.mock->add_rule({"condition", {}, {"no"}, {{"Yes", -0.1}, {"no", -2.5}, {"unknown", -4.0}}, 0});
    LlmConditionOracle o(rig.ctx());
    EXPECT_EQ(o.check_condition(cprofile::testing::make_scene(), "Is X armed?").verdict, Tri::True);
}

TEST(RemoteOracle, ParsesReplies) {
    EXPECT_EQ(RemoteConditionOracle::parse_reply(R"({"label":"yes","scores":{"yes":0.9}})").verdict, Tri::True);
    EXPECT_EQ(RemoteConditionOracle::parse_reply(R"({"label":"NO"})").verdict, Tri::False);
    EXPECT_EQ(RemoteConditionOracle::parse_reply(R"({"label":"unknown"})").verdict, Tri::Unknown);
    auto bad = RemoteConditionOracle::parse_reply("not json");
    EXPECT_EQ(bad.verdict, Tri::Unknown);
    EXPECT_EQ(bad.raw_label, "");
    EXPECT_EQ(RemoteConditionOracle::parse_reply(R"({"label":"sure"})").verdict, Tri::Unknown);
    EXPECT_EQ(bad.source, engine::OracleSource::Remote);
}

TEST(RemoteOracle, UnreachableEndpointIsOracleUnavailable) {
    RemoteConditionOracle o("http://127.0.0.1:1/check", 1, llm::RetryPolicy{2, std::chrono::milliseconds(0), 1.0});
    EXPECT_THROW(o.check_condition(cprofile::testing::make_scene(), "Is X armed?"), engine::OracleUnavailable);
}

TEST(Nli, ScoreMappingIsExact) {
    EXPECT_EQ(score_of(Relation::Entailed), 100);
    EXPECT_EQ(score_of(Relation::Neutral), 50);
    EXPECT_EQ(score_of(Relation::Contradicted), 0);
    for (auto r : {Relation::Entailed, Relation::Neutral, Relation::Contradicted}) {
        auto v = make_verdict(r);
        EXPECT_EQ(v.score, score_of(r));
        auto back = nli_from_json(to_json(v));
        EXPECT_EQ(back.relation, r);
        EXPECT_EQ(back.score, v.score);
        EXPECT_EQ(relation_from_string(to_string(r)), r);
    }
    EXPECT_THROW(nli_from_json(nlohmann::json{{"relation", "entailed"}, {"score", 50}}), std::invalid_argument);
    EXPECT_EQ(relation_from_string("CONTRADICTED"), Relation::Contradicted);
    EXPECT_FALSE(relation_from_string("maybe").has_value());
}

TEST(Nli, IdenticalStringsAreEntailedWithoutJudging) {
    LlmRig rig;
    LlmNliJudge judge(rig.ctx());
    auto v = judge.judge(nullptr, "X leaves.", "X leaves.");
    EXPECT_EQ(v.relation, Relation::Entailed);
    EXPECT_EQ(v.score, 100);
    EXPECT_EQ(rig.mock->calls(), 0);
}

TEST(Nli, LlmLabelsAndFallback) {
    LlmRig rig;
    rig.mock->on("nli", {"X sings."}, {"neutral"});
    rig.mock->on("nli", {"X weeps."}, {"Contradicted"});
    rig.mock->on("nli", {"X hums."}, {"I cannot decide"});
    LlmNliJudge judge(rig.ctx());
    EXPECT_EQ(judge.judge(nullptr, "X dances.", "X sings.").score, 50);
    EXPECT_EQ(judge.judge(nullptr, "X dances.", "X weeps.").score, 0);
    EXPECT_EQ(judge.judge(nullptr, "X dances.", "X hums.").relation, Relation::Neutral);
    EXPECT_THROW(judge.judge(nullptr, "", "X hums."), std::invalid_argument);
    EXPECT_THROW(judge.judge(nullptr, "X dances.", ""), std::invalid_argument);
}

TEST(Nli, SceneContextFlagControlsPrompt) {
    LlmRig rig;
    rig.mock->on("nli", {}, {"entailed"});
    auto scene = cprofile::testing::make_scene("s1", "A unique tavern brawl.");
    LlmNliJudge with(rig.ctx(), true);
    with.judge(&scene, "X fights.", "X punches.");
    LlmNliJudge without(rig.ctx(), false);
    without.judge(&scene, "X fights.", "X kicks.");
    auto reqs = rig.mock->requests_for("nli");
    ASSERT_EQ(reqs.size(), 2u);
    EXPECT_NE(reqs[0].prompt.find("A unique tavern brawl."), std::string::npos);
    EXPECT_EQ(reqs[1].prompt.find("A unique tavern brawl."), std::string::npos);
}

TEST(Nli, TableDouble) {
    TableNliJudge t(nlohmann::json{{sha256_hex("r1"), {{sha256_hex("resp_a"), "contradicted"}}}});
    EXPECT_EQ(t.judge(nullptr, "r1", "resp_a").score, 0);
    EXPECT_EQ(t.judge(nullptr, "r1", "resp_b").relation, Relation::Neutral);
    t.set("r1", "resp_b", Relation::Entailed);
    EXPECT_EQ(t.judge(nullptr, "r1", "resp_b").score, 100);
}

TEST(Preference, ConsistentJudgeIsOrderInvariant) {
    SmallerWins judge;
    auto ab = judge.judge("ref", "apple", "banana");
    auto ba = judge.judge("ref", "banana", "apple");
    EXPECT_EQ(ab.winner, Winner::A);
    EXPECT_EQ(ba.winner, Winner::B);
    EXPECT_TRUE(ab.order_consistent);
    EXPECT_TRUE(ba.order_consistent);
    EXPECT_EQ(judge.calls, 4);
}

TEST(Preference, PositionBiasIsTie) {
    FirstShownWins judge;
    auto v = judge.judge("ref", "apple", "banana");
    EXPECT_EQ(v.winner, Winner::Tie);
    EXPECT_FALSE(v.order_consistent);
}

TEST(Preference, IdenticalCandidatesTieWithoutCalls) {
    SmallerWins judge;
    EXPECT_EQ(judge.judge("ref", "same", "same").winner, Winner::Tie);
    EXPECT_EQ(judge.calls, 0);
    EXPECT_THROW(judge.judge("", "a", "b"), std::invalid_argument);
}

TEST(Preference, LlmJudgeSeesBothOrders) {
    LlmRig rig;
    // The candidate mentioning "lantern" is better in either slot.
    rig.mock->add_handler([](const llm::ProviderRequest& r) -> std::optional<llm::ProviderReply> {
        if (r.template_name != "preference") return std::nullopt;
        const auto a = r.prompt.find("lantern");
        const auto b = r.prompt.find("torch");
        return llm::ProviderReply{a < b ? "A" : "B", 1, 1, {}};
    });
    LlmPreferenceJudge judge(rig.ctx());
    EXPECT_EQ(judge.judge("ref", "X lifts the lantern.", "X lifts the torch.").winner, Winner::A);
    EXPECT_EQ(judge.judge("ref", "X lifts the torch.", "X lifts the lantern.").winner, Winner::B);
    // The second judgment shows the same two prompts, which the temperature-0 cache answers.
    EXPECT_EQ(rig.mock->requests_for("preference").size(), 2u);
}

TEST(Distill, WritesOneLinePerRecordInStableFieldOrder) {
    auto path = temp_path("three.jsonl");
    std::vector<DistillRecord> recs{{cprofile::testing::make_scene("a", "ctx a"), "q1?", Tri::True},
                                    {cprofile::testing::make_scene("b", "ctx b"), "q1?", Tri::False},
                                    {cprofile::testing::make_scene("c", "ctx c"), "q2?", Tri::Unknown}};
    EXPECT_EQ(export_distillation_data(recs, path), 3u);
    auto lines = read_lines(path);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], R"({"scene":"ctx a","question":"q1?","label":"yes"})");
    EXPECT_EQ(lines[1], R"({"scene":"ctx b","question":"q1?","label":"no"})");
    EXPECT_EQ(lines[2], R"({"scene":"ctx c","question":"q2?","label":"unknown"})");
    EXPECT_THROW(export_distillation_data({}, path), std::invalid_argument);
}

TEST(Distill, DeduplicatesKeepingFirstAgainstSortUniqueOracle) {
    std::mt19937_64 rng(11);
    std::vector<DistillRecord> recs;
    for (int i = 0; i < 300; ++i) {
        const auto ctx = "ctx " + std::to_string(rng() % 7);
        const auto q = "q" + std::to_string(rng() % 5) + "?";
        recs.push_back({cprofile::testing::make_scene("s" + std::to_string(i), ctx), q, static_cast<Tri>(rng() % 3)});
    }
    // Oracle: stable sort by key, unique keeps the first of each run, then restore input order.
    std::vector<std::size_t> idx(recs.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto key = [&](std::size_t i) { return std::make_pair(recs[i].scene.context, recs[i].question); };
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return key(a) < key(b); });
    idx.erase(std::unique(idx.begin(), idx.end(), [&](auto a, auto b) { return key(a) == key(b); }), idx.end());
    std::sort(idx.begin(), idx.end());

    auto path = temp_path("dedup.jsonl");
    EXPECT_EQ(export_distillation_data(recs, path), idx.size());
    auto lines = read_lines(path);
    ASSERT_EQ(lines.size(), idx.size());
    const std::vector<std::string> labels{"yes", "no", "unknown"};
    for (std::size_t n = 0; n < idx.size(); ++n) {
        auto j = nlohmann::json::parse(lines[n]);
        const auto& r = recs[idx[n]];
        EXPECT_EQ(j["scene"], r.scene.context);
        EXPECT_EQ(j["question"], r.question);
        EXPECT_EQ(j["label"], labels[static_cast<int>(r.verdict)]);
    }
}
