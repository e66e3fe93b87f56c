#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "cprofile/bench/benchmark.hpp"
#include "cprofile/bench/run.hpp"
#include "cprofile/bench/scenes.hpp"
#include "cprofile/bench/score.hpp"
#include "cprofile/oracles/condition.hpp"

using namespace cprofile;
using namespace cprofile::bench;
using oracles::Relation;

namespace {

struct LlmRig {
    std::shared_ptr<llm::MockProvider> mock = std::make_shared<llm::MockProvider>();
    llm::LlmClient client{mock, nullptr, llm::RetryPolicy{2, std::chrono::milliseconds(0), 1.0}};
    llm::TemplateLibrary templates = llm::TemplateLibrary::builtin();
    llm::LlmContext ctx() { return {client, templates, llm::GenerationConfig{"mock"}}; }
};

EvalRecord rec(std::string character, std::string scene, std::optional<Relation> rel, Tier tier = Tier::Main,
               std::optional<std::uint64_t> k = std::nullopt, std::string artifact = "A") {
    EvalRecord r;
    r.character = std::move(character);
    r.scene_id = std::move(scene);
    r.artifact = std::move(artifact);
    r.tier = tier;
    r.response = "resp";
    r.k_index = k;
    if (rel) r.nli = oracles::make_verdict(*rel);
    else r.error = "transport failure";
    return r;
}

Relation from_score(int s) { return s == 100 ? Relation::Entailed : s == 50 ? Relation::Neutral : Relation::Contradicted; }

std::filesystem::path miniverse() { return std::filesystem::path(CPROFILE_DATA_DIR) / "miniverse"; }

// Miniverse wired the way the CLI does it, over a private copy of the profile stores.
struct Miniverse {
    std::filesystem::path root;
    BenchmarkSet benchmark = load_benchmark(miniverse() / "benchmark.json");
    std::map<std::string, evolver::VersionStore> stores;
    std::shared_ptr<llm::MockProvider> mock = llm::MockProvider::from_json_file(miniverse() / "mock_llm.json");
    llm::LlmClient client{mock, nullptr, llm::RetryPolicy{1, std::chrono::milliseconds(0), 1.0}};
    llm::TemplateLibrary templates = llm::TemplateLibrary::builtin();
    oracles::TableConditionOracle oracle = oracles::TableConditionOracle::from_json_file(miniverse() / "conditions.json");
    oracles::TableNliJudge judge = oracles::TableNliJudge::from_json_file(miniverse() / "nli.json");

    explicit Miniverse(const std::string& name) {
        root = std::filesystem::temp_directory_path() / "cprofile_bench_test" / name;
        std::filesystem::remove_all(root);
        std::filesystem::create_directories(root);
        std::filesystem::copy(miniverse() / "profiles", root, std::filesystem::copy_options::recursive);
        for (const auto& c : benchmark.characters) stores.emplace(c.character, evolver::VersionStore::open(root, c.character));
    }

    RunInputs inputs() {
        std::map<std::string, evolver::VersionStore*> ptrs;
        for (auto& [name, store] : stores) ptrs[name] = &store;
        return RunInputs{benchmark, ptrs, oracle, judge, {client, templates, llm::GenerationConfig{"mock"}}};
    }
};

const CharacterScore& score_of(const Report& r, const std::string& character) {
    auto it = std::find_if(r.characters.begin(), r.characters.end(), [&](const auto& c) { return c.character == character; });
    if (it == r.characters.end()) throw std::runtime_error("no score for " + character);
    return *it;
}

}  // namespace

TEST(BestAtK, SmallCases) {
    EXPECT_DOUBLE_EQ(best_at_k({{0, 50, 100}}, 2), 50.0);
    EXPECT_DOUBLE_EQ(best_at_k({{0, 50, 100}}, 3), 100.0);
    EXPECT_DOUBLE_EQ(best_at_k({{100, 100}, {100, 100}}, 1), 100.0);
    EXPECT_THROW(best_at_k({{0}}, 0), std::invalid_argument);
    EXPECT_THROW(best_at_k({{0}}, 2), std::invalid_argument);
}

TEST(BestAtK, MatchesPrefixMaxOracleAndIsMonotone) {
    std::mt19937_64 rng(2024);
    const int values[] = {0, 50, 100};
    for (int trial = 0; trial < 1000; ++trial) {
        const int scenes = 1 + static_cast<int>(rng() % 8);
        const int k = 1 + static_cast<int>(rng() % 8);
        std::vector<std::vector<int>> lists(scenes);
        for (auto& l : lists) {
            for (int i = 0; i < k; ++i) l.push_back(values[rng() % 3]);
        }
        double prev = -1.0;
        for (int kk = 1; kk <= k; ++kk) {
            double sum = 0.0;
            for (const auto& l : lists) {
                int best = 0;
                for (int i = 0; i < kk; ++i) best = l[i] > best ? l[i] : best;
                sum += best;
            }
            const double oracle = sum / scenes;
            const double got = best_at_k(lists, kk);
            ASSERT_DOUBLE_EQ(got, oracle) << "trial " << trial << " k " << kk;
            ASSERT_GE(got, prev);
            prev = got;
        }
    }
}

TEST(Score, HandArithmetic) {
    auto r = score_run({rec("Ayla", "a1", Relation::Entailed), rec("Ayla", "a2", Relation::Neutral),
                        rec("Ayla", "a3", Relation::Entailed), rec("Ayla", "a4", Relation::Contradicted)});
    ASSERT_EQ(r.characters.size(), 1u);
    EXPECT_DOUBLE_EQ(r.characters[0].mean, 62.5);
    EXPECT_DOUBLE_EQ(*r.overall_mean, 62.5);
    auto all = score_run({rec("B", "b1", Relation::Entailed), rec("B", "b2", Relation::Entailed)});
    EXPECT_DOUBLE_EQ(*all.overall_mean, 100.0);
}

TEST(Score, IncompleteScenesAreExcludedAndFlagged) {
    auto r = score_run({rec("C", "c1", Relation::Entailed), rec("C", "c2", std::nullopt), rec("C", "c3", Relation::Neutral)});
    EXPECT_DOUBLE_EQ(r.characters[0].mean, 75.0);
    EXPECT_EQ(r.characters[0].scenes, 2u);
    EXPECT_EQ(r.characters[0].incomplete, 1u);
    EXPECT_EQ(r.incomplete, std::vector<std::string>{"C/c2"});
    EXPECT_EQ(r.failures, 1u);

    auto k = score_run({rec("C", "c1", Relation::Entailed, Tier::Main, 0), rec("C", "c1", Relation::Neutral, Tier::Main, 1),
                        rec("C", "c2", Relation::Entailed, Tier::Main, 0)},
                       2);
    EXPECT_EQ(k.incomplete, std::vector<std::string>{"C/c2"});
    EXPECT_DOUBLE_EQ(k.characters[0].mean, 100.0);
}

TEST(Score, RollupsPartitionCharacters) {
    std::vector<EvalRecord> rs{rec("M1", "s", Relation::Entailed, Tier::Main),
                               rec("M2", "s", Relation::Contradicted, Tier::Main, std::nullopt, "B"),
                               rec("m1", "s", Relation::Neutral, Tier::Minor)};
    auto r = score_run(rs);
    EXPECT_DOUBLE_EQ(*r.main_mean, 50.0);
    EXPECT_DOUBLE_EQ(*r.minor_mean, 50.0);
    EXPECT_DOUBLE_EQ(r.artifact_means.at("A"), 75.0);
    EXPECT_DOUBLE_EQ(r.artifact_means.at("B"), 0.0);
    std::size_t main = 0, minor = 0;
    for (const auto& c : r.characters) (c.tier == Tier::Main ? main : minor) += 1;
    EXPECT_EQ(main + minor, r.characters.size());
    EXPECT_EQ(main, 2u);
}

TEST(Score, BestAtKOrdersByKIndex) {
    std::vector<EvalRecord> rs{rec("R", "r1", Relation::Entailed, Tier::Minor, 2), rec("R", "r1", Relation::Contradicted, Tier::Minor, 0),
                               rec("R", "r1", Relation::Neutral, Tier::Minor, 1)};
    auto r = score_run(rs, 3);
    EXPECT_DOUBLE_EQ(r.best_at.at(1), 0.0);
    EXPECT_DOUBLE_EQ(r.best_at.at(2), 50.0);
    EXPECT_DOUBLE_EQ(r.best_at.at(3), 100.0);
    EXPECT_NE(render_text(r).find("Best@K: K=1 0.00 K=2 50.00 K=3 100.00"), std::string::npos);
}

TEST(Score, ReportIsAFoldOverTheJsonl) {
    std::mt19937_64 rng(8);
    std::vector<EvalRecord> rs;
    for (int c = 0; c < 4; ++c) {
        for (int s = 0; s < 5; ++s) {
            for (std::uint64_t k = 0; k < 3; ++k) {
                rs.push_back(rec("c" + std::to_string(c), "s" + std::to_string(s), from_score(50 * static_cast<int>(rng() % 3)),
                                 c % 2 ? Tier::Minor : Tier::Main, k));
            }
        }
    }
    auto path = std::filesystem::temp_directory_path() / "cprofile_fold.jsonl";
    {
        std::ofstream out(path);
        out << records_jsonl(rs);
    }
    auto reloaded = load_records_jsonl(path);
    EXPECT_EQ(records_jsonl(reloaded), records_jsonl(rs));
    EXPECT_EQ(to_json(score_run(reloaded, 3)).dump(), to_json(score_run(rs, 3)).dump());
}

TEST(Score, CompareRunsTalliesPreferences) {
    class Longer : public oracles::PreferenceJudge {
    protected:
        oracles::Winner pick(const std::string&, const std::string& a, const std::string& b) override {
            if (a.size() == b.size()) return oracles::Winner::Tie;
            return a.size() > b.size() ? oracles::Winner::A : oracles::Winner::B;
        }
    } judge;
    auto mk = [](std::string scene, std::string response) {
        auto r = rec("X", std::move(scene), Relation::Neutral);
        r.response = std::move(response);
        return r;
    };
    auto t = compare_runs({mk("s1", "long answer"), mk("s2", "no"), mk("s3", "same")},
                          {mk("s1", "short"), mk("s2", "much longer"), mk("s3", "same")},
                          {{"s1", "ref"}, {"s2", "ref"}, {"s3", "ref"}}, judge);
    EXPECT_EQ(t.win, 1);
    EXPECT_EQ(t.loss, 1);
    EXPECT_EQ(t.tie, 1);
}

TEST(Scenes, ExtractiveContextAndReference) {
    LlmRig rig;
    const std::string summary = "Mara reaches the harbor. The ship is gone. Mara steals a fishing boat. She sails north.";
    rig.mock->on("scene_extract", {}, {"Mara steals a fishing boat."});
    rig.mock->on("guiding_question", {}, {"How does Mara respond?"});
    auto scenes = build_scenes(summary, "Mara", rig.ctx(), {"Tides", 10});
    ASSERT_EQ(scenes.size(), 1u);
    EXPECT_EQ(scenes[0].context, "Mara reaches the harbor. The ship is gone.");
    EXPECT_EQ(scenes[0].reference_action, "Mara steals a fishing boat.");
    EXPECT_EQ(scenes[0].question, "How does Mara respond?");
    EXPECT_EQ(scenes[0].artifact, "Tides");
    EXPECT_EQ(scenes[0].order_index, 10);
    EXPECT_THROW(build_scenes("  ", "Mara", rig.ctx()), std::invalid_argument);
}

TEST(Scenes, ParaphrasesDroppedAndOrderIncreases) {
    LlmRig rig;
    const std::string summary = "Mara reaches the harbor. Mara steals a fishing boat. The storm hits. Mara ties herself to the mast.";
    rig.mock->on("scene_extract", {}, {"- Mara ties herself to the mast.\n- Mara takes a boat.\n1. Mara steals a fishing boat."});
    rig.mock->on("guiding_question", {}, {"What does Mara do?"});
    auto scenes = build_scenes(summary, "Mara", rig.ctx());
    ASSERT_EQ(scenes.size(), 2u);
    EXPECT_EQ(scenes[0].reference_action, "Mara steals a fishing boat.");
    EXPECT_EQ(scenes[1].reference_action, "Mara ties herself to the mast.");
    EXPECT_LT(scenes[0].order_index, scenes[1].order_index);
    EXPECT_NE(scenes[0].id, scenes[1].id);

    LlmRig none;
    none.mock->on("scene_extract", {}, {"Nothing happens."});
    EXPECT_TRUE(build_scenes(summary, "Mara", none.ctx()).empty());
}

TEST(Scenes, LeakHeuristic) {
    EXPECT_FALSE(question_leaks("What does Mara do next?", "Mara steals a fishing boat."));
    EXPECT_TRUE(question_leaks("Will she go fishing?", "Mara steals a fishing boat."));
}

TEST(Spoilers, RemovesFlaggedSegments) {
    LlmRig rig;
    codifier::Profile p{"Mara", "Tides", "Early days.\n\nThe betrayal.\n\nLater years.", {}};
    rig.mock->on("spoiler_filter", {}, {"seg2"});
    auto out = filter_spoilers(p, 3, rig.ctx());
    EXPECT_EQ(out.removed, std::vector<std::string>{"seg2"});
    ASSERT_EQ(out.profile.segments.size(), 2u);
    EXPECT_EQ(out.profile.text, "Early days.\n\nLater years.");

    LlmRig quiet;
    quiet.mock->on("spoiler_filter", {}, {"none"});
    auto same = filter_spoilers(p, 3, quiet.ctx());
    EXPECT_TRUE(same.removed.empty());
    EXPECT_EQ(same.profile.text, p.text);
    EXPECT_THROW(filter_spoilers(p, -1, quiet.ctx()), std::invalid_argument);
}

TEST(Spoilers, RefusesToRemoveMostSegments) {
    LlmRig rig;
    codifier::Profile p{"Mara", "Tides", "A.\n\nB.\n\nC.\n\nD.", {}};
    rig.mock->on("spoiler_filter", {}, {"seg1, seg2, seg3, seg4"});
    EXPECT_THROW(filter_spoilers(p, 0, rig.ctx()), OverAggressiveFilter);
    EXPECT_EQ(filter_spoilers(p, 0, rig.ctx(), true).profile.segments.size(), 0u);
}

TEST(Spoilers, LlmFailureLeavesProfileUnfiltered) {
    LlmRig rig;
    rig.mock->add_rule({"spoiler_filter", {}, {"seg1"}, {}, 100});
    codifier::Profile p{"Mara", "Tides", "A.\n\nB.", {}};
    auto out = filter_spoilers(p, 0, rig.ctx());
    EXPECT_TRUE(out.removed.empty());
    EXPECT_EQ(out.profile.segments.size(), 2u);
}

TEST(Benchmark, MiniverseLoads) {
    auto b = load_benchmark(miniverse() / "benchmark.json");
    EXPECT_EQ(b.artifact, "Miniverse");
    ASSERT_EQ(b.characters.size(), 3u);
    EXPECT_EQ(b.find("Ayla Stone").scenes.size(), 4u);
    EXPECT_EQ(b.find("Robotia").tier, Tier::Minor);
    EXPECT_NO_THROW(check_benchmark(b));
    auto dup = b;
    dup.characters[0].scenes.push_back(dup.characters[0].scenes[0]);
    EXPECT_THROW(check_benchmark(dup), std::invalid_argument);
}

TEST(Drivers, BasicRunOnMiniverse) {
    Miniverse mv("basic");
    RunOptions opt;
    opt.workers = 3;
    auto result = run_basic(mv.inputs(), opt);
    EXPECT_EQ(result.records.size(), 16u);
    EXPECT_DOUBLE_EQ(score_of(result.report, "Ayla Stone").mean, 62.5);
    EXPECT_NEAR(score_of(result.report, "Brakk").mean, 400.0 / 6, 1e-9);
    EXPECT_FALSE(result.report.order_dependent);
    EXPECT_EQ(result.report.failures, 0u);
    // Parallel workers do not change the outcome.
    Miniverse again("basic_serial");
    auto serial = run_basic(again.inputs(), RunOptions{});
    EXPECT_EQ(records_jsonl(serial.records), records_jsonl(result.records));
}

TEST(Drivers, EvolvingBeatsBasicOnMiniverse) {
    Miniverse basic_mv("evolving_basic");
    auto basic = run_basic(basic_mv.inputs(), RunOptions{});
    Miniverse mv("evolving");
    auto evolving = run_evolving(mv.inputs(), RunOptions{});
    EXPECT_TRUE(evolving.report.order_dependent);
    EXPECT_GT(score_of(evolving.report, "Brakk").mean, score_of(basic.report, "Brakk").mean);
    EXPECT_GT(*evolving.report.overall_mean, *basic.report.overall_mean);
    auto brakk = std::count_if(evolving.revisions.begin(), evolving.revisions.end(),
                               [](const auto& r) { return r.scene_id.rfind("brakk-", 0) == 0; });
    EXPECT_EQ(brakk, 1);
    EXPECT_EQ(mv.stores.at("Brakk").head(), 1);
}

TEST(Drivers, StochasticBestAtKIsMonotone) {
    Miniverse mv("stochastic");
    RunOptions opt;
    opt.k = 4;
    opt.base_seed = 7;
    auto result = run_stochastic(mv.inputs(), opt);
    EXPECT_EQ(result.records.size(), 16u * 4);
    for (int k = 2; k <= 4; ++k) EXPECT_GE(result.report.best_at.at(k), result.report.best_at.at(k - 1));
    EXPECT_GE(result.report.best_at.at(4), result.report.best_at.at(1));
    opt.k = 1;
    EXPECT_THROW(run_stochastic(mv.inputs(), opt), std::invalid_argument);
}
