#include <gtest/gtest.h>

#include <set>

#include "cprofile/dsl/parser.hpp"
#include "cprofile/engine/interpreter.hpp"
#include "support/fakes.hpp"

namespace dsl = cprofile::dsl;
namespace engine = cprofile::engine;
using cprofile::testing::MapOracle;
using cprofile::testing::make_scene;
using engine::Tri;

namespace {

const char* kInsult = "when scene:\n  if check(\"Is X being insulted?\"):\n    trigger \"X become outrageous\"\n";
const char* kSentiment =
    "when scene:\n  let sentiment_statement = choice([\"X is positive.\", \"X is negative.\"])\n  trigger sentiment_statement\n";

dsl::Program prog(std::string_view src, std::string id = "seg1") { return dsl::parse_or_throw(src, std::move(id)); }

// Truth-table oracle: F=0, U=1/2, T=1 with not = 1-x, and = min, or = max.
double num(Tri t) { return t == Tri::False ? 0.0 : t == Tri::True ? 1.0 : 0.5; }
Tri tri(double v) { return v == 0.0 ? Tri::False : v == 1.0 ? Tri::True : Tri::Unknown; }

dsl::Expr literal_expr(Tri t) {
    switch (t) {
        case Tri::True: return dsl::make_const(true);
        case Tri::False: return dsl::make_const(false);
        case Tri::Unknown: return dsl::make_check("U?");
    }
    return dsl::make_const(false);
}

struct Harness {
    MapOracle oracle{{{"U?", Tri::Unknown}}};
    engine::OracleCache cache;
    engine::RandomStream rng{7};
    engine::Scene scene = make_scene();
    engine::Trace trace;

    Tri eval(const dsl::Expr& e) {
        engine::EvalContext ctx{scene, oracle, cache, rng, "seg1", &trace};
        return engine::eval_expr(e, ctx);
    }
};

}  // namespace

TEST(Kleene, ExhaustiveTruthTables) {
    const Tri all[] = {Tri::True, Tri::False, Tri::Unknown};
    for (Tri a : all) {
        Harness h;
        EXPECT_EQ(h.eval(dsl::make_not(literal_expr(a))), tri(1.0 - num(a)));
        for (Tri b : all) {
            Harness h2;
            EXPECT_EQ(h2.eval(dsl::make_and(literal_expr(a), literal_expr(b))), tri(std::min(num(a), num(b))));
            Harness h3;
            EXPECT_EQ(h3.eval(dsl::make_or(literal_expr(a), literal_expr(b))), tri(std::max(num(a), num(b))));
        }
    }
}

TEST(Kleene, SpecExamples) {
    Harness h;
    EXPECT_EQ(h.eval(dsl::make_not(dsl::make_check("U?"))), Tri::Unknown);
    Harness h2;
    EXPECT_EQ(h2.eval(dsl::make_or(dsl::make_const(true), dsl::make_check("q?"))), Tri::True);
    EXPECT_EQ(h2.oracle.calls(), 0);
    Harness h3;
    EXPECT_EQ(h3.eval(dsl::make_and(dsl::make_check("U?"), dsl::make_const(false))), Tri::False);
}

TEST(Kleene, ShortCircuitEconomy) {
    Harness h;
    h.oracle.set("a?", Tri::True);
    EXPECT_EQ(h.eval(dsl::make_or(dsl::make_check("a?"), dsl::make_check("b?"))), Tri::True);
    EXPECT_EQ(h.oracle.calls(), 1);
    EXPECT_EQ(engine::oracle_calls(h.trace), 1u);

    Harness h2;
    h2.oracle.set("a?", Tri::False);
    EXPECT_EQ(h2.eval(dsl::make_and(dsl::make_check("a?"), dsl::make_check("b?"))), Tri::False);
    EXPECT_EQ(h2.oracle.calls(), 1);

    // UNKNOWN does not short-circuit either operator.
    Harness h3;
    h3.eval(dsl::make_and(dsl::make_check("U?"), dsl::make_check("b?")));
    EXPECT_EQ(h3.oracle.calls(), 2);
}

TEST(Chance, NeverUnknownAndTraced) {
    Harness h;
    for (int i = 0; i < 50; ++i) EXPECT_NE(h.eval(dsl::make_chance(0.5)), Tri::Unknown);
    for (const auto& ev : h.trace) {
        const auto& c = std::get<engine::ChanceDrawn>(ev.event);
        EXPECT_EQ(c.passed, c.draw < c.p);
        EXPECT_GE(c.draw, 0.0);
        EXPECT_LT(c.draw, 1.0);
    }
    Harness h0;
    EXPECT_EQ(h0.eval(dsl::make_chance(0.0)), Tri::False);
    Harness h1;
    EXPECT_EQ(h1.eval(dsl::make_chance(1.0)), Tri::True);
}

TEST(ExecuteSegment, InsultTrue) {
    MapOracle oracle({{"Is X being insulted?", Tri::True}});
    const auto r = engine::execute_segment(prog(kInsult), make_scene(), oracle, {1, "s1", 0});
    ASSERT_EQ(r.statements.size(), 1u);
    EXPECT_EQ(r.statements[0].text, "X become outrageous");
    EXPECT_EQ(r.statements[0].path, std::vector<std::size_t>{0});
    EXPECT_FALSE(r.statements[0].uncertain);
    ASSERT_EQ(r.trace.size(), 3u);
    EXPECT_EQ(std::get<engine::Checked>(r.trace[0].event).verdict, Tri::True);
    EXPECT_EQ(std::get<engine::BranchTaken>(r.trace[1].event).kind, engine::BranchTaken::Kind::Then);
    EXPECT_EQ(std::get<engine::Triggered>(r.trace[2].event).text, "X become outrageous");
}

TEST(ExecuteSegment, InsultUnknownSkips) {
    MapOracle oracle;
    const auto r = engine::execute_segment(prog(kInsult), make_scene(), oracle, {1, "s1", 0});
    EXPECT_TRUE(r.statements.empty());
    ASSERT_EQ(r.trace.size(), 2u);
    EXPECT_EQ(std::get<engine::BranchTaken>(r.trace[1].event).kind, engine::BranchTaken::Kind::Skipped);
}

TEST(ExecuteSegment, UnknownTakesElseAndFlagsUncertain) {
    MapOracle oracle({{"B?", Tri::False}});
    const auto p = prog("when scene:\n  if check(\"A?\"):\n    trigger \"a\"\n  elif check(\"B?\"):\n    trigger \"b\"\n  else:\n    if true:\n      trigger \"c\"\n");
    const auto r = engine::execute_segment(p, make_scene(), oracle, {1, "s1", 0});
    ASSERT_EQ(r.statements.size(), 1u);
    EXPECT_EQ(r.statements[0].text, "c");
    EXPECT_TRUE(r.statements[0].uncertain);
    EXPECT_EQ(r.statements[0].path, (std::vector<std::size_t>{2, 0}));

    MapOracle definite({{"A?", Tri::False}, {"B?", Tri::True}});
    const auto r2 = engine::execute_segment(p, make_scene(), definite, {1, "s1", 0});
    ASSERT_EQ(r2.statements.size(), 1u);
    EXPECT_EQ(r2.statements[0].text, "b");
    EXPECT_FALSE(r2.statements[0].uncertain);
    EXPECT_EQ(std::get<engine::BranchTaken>(r2.trace[2].event).kind, engine::BranchTaken::Kind::Elif);
}

TEST(ExecuteSegment, ElifGuardsNotEvaluatedAfterTrue) {
    MapOracle oracle({{"A?", Tri::True}});
    const auto p = prog("when scene:\n  if check(\"A?\"):\n    trigger \"a\"\n  elif check(\"B?\"):\n    trigger \"b\"\n");
    engine::execute_segment(p, make_scene(), oracle, {1, "s1", 0});
    EXPECT_EQ(oracle.calls(), 1);
}

TEST(ExecuteSegment, SentimentSeedSweepProducesBothOutputs) {
    MapOracle oracle;
    std::set<std::string> seen;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const auto r = engine::execute_segment(prog(kSentiment), make_scene(), oracle, {42, "s1", run});
        ASSERT_EQ(r.statements.size(), 1u);
        seen.insert(r.statements[0].text);
        EXPECT_TRUE(std::holds_alternative<engine::ChoiceMade>(r.trace[0].event));
    }
    EXPECT_EQ(seen, (std::set<std::string>{"X is positive.", "X is negative."}));
}

TEST(ExecuteProfile, ConcatenatesInOrderAndMemoizes) {
    MapOracle oracle({{"Q?", Tri::True}});
    const std::vector<dsl::Program> programs = {
        prog("when scene:\n  if check(\"Q?\"):\n    trigger \"one\"\n", "a"),
        prog("when scene:\n  if check(\"Q?\"):\n    trigger \"two\"\n", "b"),
    };
    const auto r = engine::execute_profile(programs, make_scene(), oracle, {1, "s1", 0});
    ASSERT_EQ(r.statements.size(), 2u);
    EXPECT_EQ(r.statements[0].text, "one");
    EXPECT_EQ(r.statements[0].segment_id, "a");
    EXPECT_EQ(r.statements[1].segment_id, "b");
    EXPECT_EQ(oracle.calls(), 1);
    EXPECT_TRUE(std::get<engine::Checked>(r.trace[3].event).cached);
    EXPECT_EQ(engine::oracle_calls(r.trace), 1u);
}

TEST(ExecuteProfile, EmptyResults) {
    MapOracle oracle;
    const auto r = engine::execute_profile({prog(kInsult, "a"), prog(kInsult, "b")}, make_scene(), oracle, {1, "s1", 0});
    EXPECT_TRUE(r.statements.empty());
}

TEST(ExecuteProfile, DuplicateIdsRejected) {
    MapOracle oracle;
    EXPECT_THROW(engine::execute_profile({prog(kInsult, "a"), prog(kInsult, "a")}, make_scene(), oracle, {1, "s1", 0}),
                 std::invalid_argument);
}

TEST(ExecuteProfile, OracleFailureCarriesSegment) {
    cprofile::testing::DownOracle oracle;
    try {
        engine::execute_profile({prog("when scene:\n  trigger \"x\"\n", "a"), prog(kInsult, "b")}, make_scene(), oracle, {1, "s1", 0});
        FAIL() << "expected OracleUnavailable";
    } catch (const engine::OracleUnavailable& e) {
        EXPECT_EQ(e.segment_id(), "b");
    }
}

TEST(ExecuteProfile, PermutationPermutesOutput) {
    MapOracle oracle({{"Q?", Tri::True}});
    std::vector<dsl::Program> programs;
    for (int i = 0; i < 5; ++i) {
        programs.push_back(prog("when scene:\n  if chance(0.5):\n    trigger choice([\"a" + std::to_string(i) + "\", \"b" +
                                    std::to_string(i) + "\"])\n  if check(\"Q?\"):\n    trigger \"q" + std::to_string(i) + "\"\n",
                                "seg" + std::to_string(i)));
    }
    std::mt19937 shuffler(3);
    const auto base = engine::execute_profile(programs, make_scene(), oracle, {9, "s1", 4});
    for (int trial = 0; trial < 20; ++trial) {
        auto permuted = programs;
        std::shuffle(permuted.begin(), permuted.end(), shuffler);
        const auto r = engine::execute_profile(permuted, make_scene(), oracle, {9, "s1", 4});
        std::vector<engine::TriggeredStatement> expected;
        for (const auto& p : permuted) {
            for (const auto& s : base.statements) {
                if (s.segment_id == p.segment_id) expected.push_back(s);
            }
        }
        EXPECT_EQ(r.statements, expected);
    }
}

TEST(Rng, SubstreamsAreKeyedIndependently) {
    const engine::RunSeed a{1, "s1", 0};
    EXPECT_EQ(engine::substream_seed(a, "seg1"), engine::substream_seed(a, "seg1"));
    EXPECT_NE(engine::substream_seed(a, "seg1"), engine::substream_seed(a, "seg2"));
    EXPECT_NE(engine::substream_seed(a, "seg1"), engine::substream_seed({1, "s1", 1}, "seg1"));
    EXPECT_NE(engine::substream_seed(a, "seg1"), engine::substream_seed({1, "s2", 0}, "seg1"));
    EXPECT_NE(engine::substream_seed(a, "seg1"), engine::substream_seed({2, "s1", 0}, "seg1"));
}

TEST(Trace, JsonRoundTrip) {
    MapOracle oracle({{"Q?", Tri::True}});
    const auto p = prog("when scene:\n  if check(\"Q?\") and chance(0.5):\n    trigger choice([\"a\", \"b\"])\n  else:\n    trigger \"c\"\n");
    const auto r = engine::execute_segment(p, make_scene(), oracle, {5, "s1", 0});
    const auto j = engine::to_json(r.trace);
    for (const auto& ev : j) EXPECT_EQ(ev["v"], 1);
    EXPECT_EQ(engine::to_json(engine::trace_from_json(nlohmann::json::parse(j.dump()))).dump(), j.dump());
}
