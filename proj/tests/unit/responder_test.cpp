#include <gtest/gtest.h>

#include <set>

#include "cprofile/dsl/parser.hpp"
#include "cprofile/responder/chat.hpp"
#include "cprofile/responder/respond.hpp"
#include "support/fakes.hpp"

using namespace cprofile;
using namespace cprofile::responder;
using cprofile::testing::MapOracle;
using engine::Tri;

namespace {

struct LlmRig {
    std::shared_ptr<llm::MockProvider> mock = std::make_shared<llm::MockProvider>();
    llm::LlmClient client{mock, nullptr, llm::RetryPolicy{2, std::chrono::milliseconds(0), 1.0}};
    llm::TemplateLibrary templates = llm::TemplateLibrary::builtin();
    llm::GenerationConfig config{"mock"};
    llm::LlmContext ctx() { return {client, templates, config}; }
};

engine::TriggeredStatement st(std::string text, std::string seg = "seg1") { return {std::move(text), std::move(seg), {}, false}; }

std::vector<dsl::Program> programs(std::initializer_list<std::pair<const char*, const char*>> srcs) {
    std::vector<dsl::Program> out;
    for (const auto& [id, src] : srcs) out.push_back(dsl::parse_or_throw(src, id));
    return out;
}

const std::string kProfile = "X is a retired pirate who hates the sea.";

std::string role_play_prompt(LlmRig& rig) { return rig.mock->requests_for("role_play").back().prompt; }

}  // namespace

TEST(Respond, CodifiedWithNothingFiredSaysSo) {
    LlmRig rig;
    rig.mock->on("role_play", {}, {"X shrugs."});
    Grounding g;
    g.profile_text = kProfile;
    auto rec = respond(cprofile::testing::make_scene(), "X", g, {}, rig.ctx());
    EXPECT_EQ(rec.response, "X shrugs.");
    const auto prompt = role_play_prompt(rig);
    EXPECT_NE(prompt.find(kNothingFired), std::string::npos);
    EXPECT_EQ(prompt.find(kProfile), std::string::npos);
}

TEST(Respond, PromptCarriesOnlyTheBlocksItsModeAllows) {
    Grounding g;
    g.profile_text = kProfile;
    g.triggered = {st("X refuses to board the ship.")};
    const std::string statement = "X refuses to board the ship.";
    struct Case {
        Mode mode;
        bool statements;
        bool profile;
    };
    for (const auto& c : {Case{Mode::Vanilla, false, false}, Case{Mode::Textual, false, true}, Case{Mode::Codified, true, false},
                          Case{Mode::CodifiedRag, true, false}, Case{Mode::Ensemble, true, true}}) {
        LlmRig rig;
        rig.mock->set_echo(true);
        RespondConfig cfg;
        cfg.mode = c.mode;
        respond(cprofile::testing::make_scene(), "X", g, cfg, rig.ctx());
        const auto prompt = role_play_prompt(rig);
        SCOPED_TRACE(std::string(to_string(c.mode)));
        EXPECT_EQ(prompt.find(statement) != std::string::npos, c.statements);
        EXPECT_EQ(prompt.find(kProfile) != std::string::npos, c.profile);
        EXPECT_EQ(prompt.find("Profile rules") != std::string::npos, c.statements);
        EXPECT_EQ(prompt.find(kNothingFired), std::string::npos);
        if (c.mode == Mode::Ensemble) EXPECT_LT(prompt.find(statement), prompt.find(kProfile));
    }
}

TEST(Respond, DuplicatesCollapsedInPromptButKeptInRecord) {
    LlmRig rig;
    rig.mock->set_echo(true);
    Grounding g;
    g.triggered = {st("X waves."), st("X smiles.", "seg2"), st("X waves.", "seg3")};
    auto rec = respond(cprofile::testing::make_scene(), "X", g, {}, rig.ctx());
    EXPECT_EQ(rec.triggered.size(), 3u);
    const auto block = grounding_block(Mode::Codified, g);
    EXPECT_EQ(block, "\nProfile rules that apply to this scene:\n- X waves.\n- X smiles.\n");
}

TEST(Respond, GuidingQuestionOnlyWhenAsked) {
    LlmRig rig;
    rig.mock->set_echo(true);
    auto scene = cprofile::testing::make_scene();
    respond(scene, "X", {}, {}, rig.ctx());
    EXPECT_NE(role_play_prompt(rig).find("Guiding question: " + scene.question), std::string::npos);
    RespondConfig chat;
    chat.guiding_question = false;
    scene.context += " Later.";
    respond(scene, "X", {}, chat, rig.ctx());
    EXPECT_EQ(role_play_prompt(rig).find("Guiding question"), std::string::npos);
}

TEST(Respond, ChainOfThoughtBudget) {
    LlmRig rig;
    rig.mock->on("cot", {}, {"1. X is tired.\n\n2. X wants rest."});
    rig.mock->on("role_play", {}, {"X sleeps."});
    RespondConfig cfg;
    cfg.cot_budget = 2;
    auto rec = respond(cprofile::testing::make_scene(), "X", {}, cfg, rig.ctx());
    ASSERT_TRUE(rec.reasoning.has_value());
    EXPECT_EQ(rec.reasoning_steps, 2);
    EXPECT_EQ(rec.forward_passes, 2u);
    EXPECT_NE(rig.mock->requests_for("cot").at(0).prompt.find("at most 2"), std::string::npos);
    EXPECT_NE(role_play_prompt(rig).find("X wants rest."), std::string::npos);

    cfg.cot_budget = 0;
    auto plain = respond(cprofile::testing::make_scene("s2", "Other."), "X", {}, cfg, rig.ctx());
    EXPECT_FALSE(plain.reasoning.has_value());
    cfg.cot_budget = -1;
    EXPECT_THROW(respond(cprofile::testing::make_scene(), "X", {}, cfg, rig.ctx()), std::invalid_argument);
}

TEST(Respond, ForwardPassesCountOracleAndFreshLlmCalls) {
    LlmRig rig;
    rig.mock->on("role_play", {}, {"X sits."});
    MapOracle oracle({{"Is X tired?", Tri::True}, {"Is X hungry?", Tri::False}});
    auto progs = programs({{"seg1", "when scene:\n  if check(\"Is X tired?\"):\n    trigger \"X sits.\"\n"},
                           {"seg2", "when scene:\n  if check(\"Is X hungry?\") or check(\"Is X tired?\"):\n    trigger \"X eats.\"\n"}});
    auto scene = cprofile::testing::make_scene();
    auto g = ground(progs, scene, oracle, {1, scene.id, 0});
    EXPECT_EQ(g.oracle_calls, 2u);
    EXPECT_EQ(oracle.calls(), 2);
    auto rec = respond(scene, "X", g, {}, rig.ctx());
    EXPECT_EQ(rec.forward_passes, 3u);
    // Same prompt again: the cached completion costs nothing.
    EXPECT_EQ(respond(scene, "X", g, {}, rig.ctx()).forward_passes, 2u);
    RespondConfig vanilla;
    vanilla.mode = Mode::Vanilla;
    EXPECT_EQ(respond(scene, "X", g, vanilla, rig.ctx()).forward_passes, 1u);
}

TEST(Respond, EchoLlmMakesRespondPure) {
    auto scene = cprofile::testing::make_scene();
    Grounding g;
    g.triggered = {st("X laughs.")};
    std::string first;
    for (int i = 0; i < 3; ++i) {
        LlmRig rig;
        rig.mock->set_echo(true);
        auto out = to_json(respond(scene, "X", g, {}, rig.ctx())).dump();
        if (i == 0) first = out;
        else EXPECT_EQ(out, first);
    }
}

TEST(Stochastic, Preconditions) {
    LlmRig rig;
    rig.mock->set_echo(true);
    MapOracle oracle;
    auto progs = programs({{"seg1", "when scene:\n  trigger \"X waits.\"\n"}});
    auto scene = cprofile::testing::make_scene();
    EXPECT_THROW(respond_stochastic(scene, "X", progs, oracle, {}, rig.ctx(), 0, 1), std::invalid_argument);
    RespondConfig textual;
    textual.mode = Mode::Textual;
    EXPECT_THROW(respond_stochastic(scene, "X", progs, oracle, textual, rig.ctx(), 2, 1), std::invalid_argument);
    rig.config.temperature = 0.8;
    EXPECT_THROW(respond_stochastic(scene, "X", progs, oracle, {}, rig.ctx(), 2, 1), std::invalid_argument);
    rig.config.temperature = 0.7;
    EXPECT_EQ(respond_stochastic(scene, "X", progs, oracle, {}, rig.ctx(), 2, 1).size(), 2u);
}

TEST(Stochastic, SingleRunMatchesRespondAtRunIndexZero) {
    MapOracle oracle({{"Is X bored?", Tri::True}});
    auto progs = programs({{"seg1", "when scene:\n  if check(\"Is X bored?\"):\n    trigger choice([\"X hums.\", \"X naps.\", \"X reads.\"])\n"}});
    auto scene = cprofile::testing::make_scene();
    LlmRig a;
    a.mock->set_echo(true);
    auto runs = respond_stochastic(scene, "X", progs, oracle, {}, a.ctx(), 1, 99);
    ASSERT_EQ(runs.size(), 1u);
    EXPECT_EQ(runs[0].run_index, 0u);
    LlmRig b;
    b.mock->set_echo(true);
    auto direct = respond(scene, "X", ground(progs, scene, oracle, {99, scene.id, 0}), {}, b.ctx());
    EXPECT_EQ(runs[0].response, direct.response);
    EXPECT_EQ(runs[0].triggered, direct.triggered);
}

TEST(Stochastic, TwoWayChoiceVariesAcrossRuns) {
    MapOracle oracle;
    auto progs = programs({{"seg1", "when scene:\n  trigger choice([\"X goes left.\", \"X goes right.\"])\n"}});
    auto scene = cprofile::testing::make_scene();
    LlmRig rig;
    rig.mock->set_echo(true);
    auto runs = respond_stochastic(scene, "X", progs, oracle, {}, rig.ctx(), 20, 3);
    ASSERT_EQ(runs.size(), 20u);
    // Oracle: the same seed sweep executed directly by the engine.
    std::set<std::string> seen;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        EXPECT_EQ(runs[r].run_index, r);
        auto direct = engine::execute_profile(progs, scene, oracle, {3, scene.id, r});
        ASSERT_EQ(runs[r].triggered, direct.statements);
        seen.insert(runs[r].triggered.at(0).text);
    }
    EXPECT_GE(seen.size(), 2u);
}

TEST(Chat, ScenesUseTheLastTwentyTurnsAndNoGuidingQuestion) {
    LlmRig rig;
    rig.mock->on("role_play", {}, {"Char replies."});
    MapOracle oracle;
    auto progs = programs({{"seg1", "when scene:\n  trigger \"X is polite.\"\n"}});
    ChatSession chat("c1", "X", progs, oracle, rig.ctx(), 7, "A quiet inn.");
    for (int i = 0; i < 25; ++i) chat.turn("message " + std::to_string(i));
    EXPECT_EQ(chat.transcript().size(), 25u);
    auto scene = chat.scene_for("final");
    EXPECT_EQ(scene.context.find("message 4\n"), std::string::npos);
    EXPECT_NE(scene.context.find("message 5"), std::string::npos);
    EXPECT_NE(scene.context.find("message 24"), std::string::npos);
    EXPECT_NE(scene.context.find("final"), std::string::npos);
    EXPECT_NE(scene.context.find("A quiet inn."), std::string::npos);
    EXPECT_EQ(role_play_prompt(rig).find("Guiding question"), std::string::npos);
    auto t = chat.transcript().back();
    EXPECT_EQ(t.response, "Char replies.");
    ASSERT_EQ(t.triggered.size(), 1u);
    EXPECT_EQ(to_json(t)["user_text"], "message 24");
}
