#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "cprofile/codifier/codify.hpp"
#include "cprofile/dsl/format.hpp"
#include "cprofile/dsl/parser.hpp"
#include "cprofile/util/text.hpp"

using namespace cprofile;
using namespace cprofile::codifier;

namespace {

struct LlmRig {
    std::shared_ptr<llm::MockProvider> mock = std::make_shared<llm::MockProvider>();
    llm::LlmClient client{mock, nullptr, llm::RetryPolicy{2, std::chrono::milliseconds(0), 1.0}};
    llm::TemplateLibrary templates = llm::TemplateLibrary::builtin();
    llm::LlmContext ctx() { return {client, templates, llm::GenerationConfig{"mock"}}; }
};

const std::string kValid = "```cpl\nwhen scene:\n  if check(\"Is X hungry?\"):\n    trigger \"X eats.\"\n```";
const std::string kInvalid = "```cpl\nwhen scene:\n  if check(\"Is X hungry?\")\n    trigger \"X eats.\"\n```";

std::vector<std::string> texts(const std::vector<Segment>& segs) {
    std::vector<std::string> out;
    for (const auto& s : segs) out.push_back(s.text);
    return out;
}

std::string collapse(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

void expect_partition(const std::string& text, const std::vector<Segment>& segs) {
    std::size_t cursor = 0;
    std::string joined;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        EXPECT_EQ(s.id, "seg" + std::to_string(i + 1));
        EXPECT_EQ(s.index, i);
        EXPECT_FALSE(s.text.empty());
        ASSERT_GE(s.begin, cursor) << "overlap at " << s.id;
        ASSERT_LE(s.end, text.size());
        EXPECT_EQ(text.substr(s.begin, s.end - s.begin), s.text);
        // Nothing but whitespace is left between consecutive segments.
        EXPECT_TRUE(trim(text.substr(cursor, s.begin - cursor)).empty());
        cursor = s.end;
        joined += s.text + " ";
    }
    EXPECT_TRUE(trim(text.substr(cursor)).empty());
    EXPECT_EQ(collapse(joined), collapse(text));
}

}  // namespace

TEST(Segment, ParagraphsSplitOnBlankLines) {
    auto segs = segment_profile("A.\n\nB.", Granularity::Paragraph);
    EXPECT_EQ(texts(segs), (std::vector<std::string>{"A.", "B."}));
    EXPECT_EQ(segment_profile("one\ntwo\n\n\n  \nthree\n", Granularity::Paragraph).size(), 2u);
    EXPECT_TRUE(segment_profile(" \n\t\n", Granularity::Paragraph).empty());
    EXPECT_TRUE(segment_profile("", Granularity::Sentence).empty());
}

TEST(Segment, SectionsGroupParagraphsUnderHeadings) {
    EXPECT_EQ(segment_profile("# Early life\nShe was born at sea.", Granularity::Section).size(), 1u);
    const std::string text =
        "# Early life\nShe was born at sea.\n\nShe learned to sail.\n\n== Career ==\nShe became a captain.\n\n"
        "PERSONALITY\nShe is stubborn.\n";
    auto segs = segment_profile(text, Granularity::Section);
    ASSERT_EQ(segs.size(), 3u);
    EXPECT_EQ(segs[0].text, "# Early life\nShe was born at sea.\n\nShe learned to sail.");
    EXPECT_EQ(segs[1].text, "== Career ==\nShe became a captain.");
    EXPECT_EQ(segs[2].text, "PERSONALITY\nShe is stubborn.");
    expect_partition(text, segs);
}

TEST(Segment, AbbreviationIsNotASentenceEnd) {
    EXPECT_EQ(texts(segment_profile("Dr. Who ran. He hid.", Granularity::Sentence)),
              (std::vector<std::string>{"Dr. Who ran.", "He hid."}));
}

TEST(Segment, SentenceSplitterMatchesHandLabels) {
    std::ifstream in(std::string(CPROFILE_FIXTURE_DIR) + "/sentences50.json");
    auto cases = nlohmann::json::parse(in);
    std::size_t total = 0;
    std::size_t matched = 0;
    for (const auto& c : cases) {
        const auto expected = c.at("sentences").get<std::vector<std::string>>();
        total += expected.size();
        auto got = texts(segment_profile(c.at("paragraph").get<std::string>(), Granularity::Sentence));
        EXPECT_EQ(got, expected) << c.at("paragraph");
        if (got == expected) matched += expected.size();
    }
    EXPECT_EQ(total, 50u);
    EXPECT_EQ(matched, total);
}

TEST(Segment, SentencesNeverCrossParagraphs) {
    auto segs = segment_profile("She waits. He runs\n\nand falls.", Granularity::Sentence);
    EXPECT_EQ(texts(segs), (std::vector<std::string>{"She waits.", "He runs", "and falls."}));
}

TEST(Segment, EveryGranularityPartitionsRandomText) {
    std::mt19937_64 rng(5);
    const std::vector<std::string> words{"Ayla", "runs.", "Mr.", "Kell", "hides!", "the", "boat", "\"Go!\"", "is", "late?",
                                         "rope", "St.", "A.", "“Why?”", "(quietly.)", "e.g.", "Then", "she", "sleeps."};
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const int n = 5 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            text += words[rng() % words.size()];
            const auto r = rng() % 12;
            text += r == 0 ? "\n\n" : r == 1 ? "\n" : r == 2 ? "\n# HEAD\n" : " ";
        }
        for (auto g : {Granularity::Section, Granularity::Paragraph, Granularity::Sentence}) {
            SCOPED_TRACE(std::string(to_string(g)) + ": " + text);
            expect_partition(text, segment_profile(text, g));
        }
    }
}

TEST(Segment, ProfileJson) {
    auto p = profile_from_json(nlohmann::json{{"character", "Ayla"}, {"artifact", "Vell"}, {"text", "A."}});
    EXPECT_EQ(p.character, "Ayla");
    EXPECT_THROW(profile_from_json(nlohmann::json{{"text", "A."}}), std::invalid_argument);
    EXPECT_EQ(granularity_from_string("Sentence"), Granularity::Sentence);
    EXPECT_FALSE(granularity_from_string("chapter").has_value());
}

TEST(Codify, SucceedsOnFirstAttempt) {
    LlmRig rig;
    rig.mock->on("codify", {}, {kValid});
    Segment seg{"seg1", "X eats when hungry.", Granularity::Paragraph, 0, 0, 19};
    auto cs = codify_segment(seg, "X", rig.ctx());
    EXPECT_EQ(cs.attempts, 1);
    EXPECT_EQ(cs.program.segment_id, "seg1");
    EXPECT_FALSE(cs.fallback);
    EXPECT_EQ(cs.codify_model, "mock");
    auto req = rig.mock->requests_for("codify").at(0);
    EXPECT_NE(req.prompt.find("X eats when hungry."), std::string::npos);
    EXPECT_NE(req.prompt.find("when scene:"), std::string::npos);
}

TEST(Codify, RetriesWithDiagnosticsThenSucceeds) {
    LlmRig rig;
    rig.mock->on("codify", {}, {kInvalid, kValid});
    Segment seg{"seg1", "X eats when hungry.", Granularity::Paragraph, 0, 0, 19};
    auto cs = codify_segment(seg, "X", rig.ctx());
    EXPECT_EQ(cs.attempts, 2);
    auto reqs = rig.mock->requests_for("codify");
    ASSERT_EQ(reqs.size(), 2u);
    EXPECT_NE(reqs[1].prompt.find("expected ':'"), std::string::npos) << reqs[1].prompt;
}

TEST(Codify, FailsAtAttemptCap) {
    LlmRig rig;
    rig.mock->on("codify", {}, {kInvalid, kInvalid + "\n", kInvalid + "\n\n", kValid});
    Segment seg{"seg3", "X eats when hungry.", Granularity::Paragraph, 2, 0, 19};
    try {
        codify_segment(seg, "X", rig.ctx(), CodifyOptions{3, false});
        FAIL() << "expected CodifyFailed";
    } catch (const CodifyFailed& e) {
        EXPECT_EQ(e.segment_id(), "seg3");
        EXPECT_EQ(e.attempts(), 3);
        EXPECT_FALSE(e.diagnostics().empty());
    }
    // The third prompt repeats the second (same diagnostics) and is answered from the cache.
    EXPECT_EQ(rig.mock->requests_for("codify").size(), 2u);
    EXPECT_THROW(codify_segment(seg, "X", rig.ctx(), CodifyOptions{0, false}), std::invalid_argument);
}

TEST(Codify, DeterministicUnderDeterministicMock) {
    Segment seg{"seg1", "X eats when hungry.", Granularity::Paragraph, 0, 0, 19};
    std::string first;
    for (int i = 0; i < 2; ++i) {
        LlmRig rig;
        rig.mock->on("codify", {}, {kInvalid, kValid});
        auto cs = codify_segment(seg, "X", rig.ctx());
        EXPECT_EQ(cs.attempts, 2);
        if (i == 0) first = dsl::format(cs.program);
        else EXPECT_EQ(dsl::format(cs.program), first);
    }
}

TEST(Codify, RandomnessFlagReachesPrompt) {
    LlmRig rig;
    rig.mock->on("codify", {}, {kValid});
    Segment seg{"seg1", "X eats when hungry.", Granularity::Paragraph, 0, 0, 19};
    codify_segment(seg, "X", rig.ctx(), CodifyOptions{3, false});
    codify_segment(seg, "Y", rig.ctx(), CodifyOptions{3, true});
    auto reqs = rig.mock->requests_for("codify");
    ASSERT_EQ(reqs.size(), 2u);
    EXPECT_EQ(reqs[0].prompt.find("not fully predictable"), std::string::npos);
    EXPECT_NE(reqs[1].prompt.find("not fully predictable"), std::string::npos);
}

TEST(Codify, RagWrapperShape) {
    Segment seg{"seg2", "Ayla  keeps\nthe lighthouse on the island of Vell and never leaves it during storms at all.",
                Granularity::Paragraph, 1, 0, 0};
    auto p = rag_wrapper(seg);
    EXPECT_EQ(p.segment_id, "seg2");
    EXPECT_EQ(dsl::format(p),
              "when scene:\n"
              "  if check(\"Is this relevant: Ayla keeps the lighthouse on the island of Vell and never leaves…?\"):\n"
              "    trigger \"Ayla keeps the lighthouse on the island of Vell and never leaves it during storms at all.\"\n");
    EXPECT_TRUE(dsl::parse(dsl::format(p), "seg2").ok());
}

TEST(Codify, ProfileFallsBackPerSegment) {
    LlmRig rig;
    rig.mock->on("codify", {"Second paragraph"}, {kInvalid});
    rig.mock->on("codify", {}, {kValid});
    Profile p{"X", "A", "First paragraph.\n\nSecond paragraph.\n\nThird paragraph.", {}};
    auto report = codify_profile(p, rig.ctx(), Granularity::Paragraph, CodifyOptions{3, false}, 2);
    ASSERT_EQ(report.segments.size(), 3u);
    EXPECT_EQ(report.segments[0].segment.id, "seg1");
    EXPECT_FALSE(report.segments[0].fallback);
    EXPECT_TRUE(report.segments[1].fallback);
    EXPECT_EQ(dsl::format(report.segments[1].program), dsl::format(rag_wrapper(report.segments[1].segment)));
    EXPECT_FALSE(report.segments[2].fallback);
    ASSERT_EQ(report.failures.size(), 1u);
    EXPECT_EQ(report.failures[0].segment_id, "seg2");
    EXPECT_EQ(report.failures[0].attempts, 3);
    auto m = manifest(report, Granularity::Paragraph, CodifyOptions{}, "mock");
    EXPECT_EQ(m["granularity"], "paragraph");
    EXPECT_EQ(m["segments"].size(), 3u);
    EXPECT_EQ(m["failures"].size(), 1u);
}

TEST(Codify, SentenceGranularityGivesOneProgramPerSentence) {
    LlmRig rig;
    rig.mock->on("codify", {}, {kValid});
    Profile p{"X", "A", "X eats. X sleeps.", {}};
    auto report = codify_profile(p, rig.ctx(), Granularity::Sentence);
    ASSERT_EQ(report.segments.size(), 2u);
    EXPECT_EQ(report.segments[1].program.segment_id, "seg2");
}
