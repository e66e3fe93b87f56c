#include "cprofile/codifier/codify.hpp"

#include <atomic>
#include <optional>
#include <thread>

#include <spdlog/spdlog.h>

#include "cprofile/dsl/format.hpp"
#include "cprofile/dsl/parser.hpp"
#include "cprofile/util/text.hpp"

namespace cprofile::codifier {

CodifyFailed::CodifyFailed(std::string segment_id, int attempts, std::string diagnostics)
    : std::runtime_error("could not codify " + segment_id + " after " + std::to_string(attempts) + " attempts:\n" + diagnostics),
      segment_id_(std::move(segment_id)),
      attempts_(attempts),
      diagnostics_(std::move(diagnostics)) {}

namespace {

constexpr const char* kRandomnessNote =
    "- The character's behavior is not fully predictable. Where the paragraph describes habits, moods or varied "
    "reactions, encode them with chance(p) or choice([...]) instead of a fixed trigger.\n";

}  // namespace

CodifiedSegment codify_segment(const Segment& segment, const std::string& character, llm::LlmContext llm,
                               const CodifyOptions& options) {
    if (options.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
    if (trim(segment.text).empty() || segment.id.empty()) throw std::invalid_argument("segment needs an id and text");
    const auto& tpl = llm.templates.get("codify");
    std::string diagnostics;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        llm::Bindings b{{"character", character},
                        {"segment", segment.text},
                        {"randomness", options.include_randomness ? kRandomnessNote : ""},
                        {"diagnostics", diagnostics.empty() ? ""
                                                            : "\nYour previous program had these errors:\n" + diagnostics +
                                                                  "Fix them and answer again.\n"}};
        const auto ex = llm.client.complete(tpl, b, llm.config);
        auto parsed = dsl::parse(llm::extract_code_block(ex.completion), segment.id);
        if (parsed.ok()) {
            return CodifiedSegment{segment, std::move(parsed).program(), attempt, llm.config.model, false};
        }
        diagnostics = dsl::render(parsed.errors());
        if (!diagnostics.empty() && diagnostics.back() != '\n') diagnostics += '\n';
        spdlog::debug("codify {} attempt {} failed:\n{}", segment.id, attempt, diagnostics);
    }
    throw CodifyFailed(segment.id, options.max_attempts, diagnostics);
}

dsl::Program rag_wrapper(const Segment& segment) {
    const auto words = split_words(segment.text);
    std::string head;
    for (std::size_t i = 0; i < words.size() && i < 12; ++i) {
        if (i > 0) head += ' ';
        head += words[i];
    }
    if (words.size() > 12) head += "\xE2\x80\xA6";  // ellipsis
    dsl::Program p;
    p.segment_id = segment.id;
    p.body.push_back(dsl::make_if(dsl::make_check("Is this relevant: " + head + "?"),
                                  dsl::Block{dsl::make_trigger(collapse_whitespace(segment.text))}));
    p.source_text = dsl::format(p);
    return p;
}

CodifyReport codify_profile(const Profile& profile, llm::LlmContext llm, Granularity granularity, const CodifyOptions& options,
                            int workers) {
    const auto segments = profile.segments.empty() ? segment_profile(profile.text, granularity) : profile.segments;
    std::vector<std::optional<CodifiedSegment>> done(segments.size());
    std::vector<std::optional<CodifyFailure>> failed(segments.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < segments.size(); i = next++) {
            try {
                done[i] = codify_segment(segments[i], profile.character, llm, options);
            } catch (const CodifyFailed& e) {
                failed[i] = CodifyFailure{segments[i].id, e.attempts(), e.diagnostics()};
            } catch (const llm::LlmUnavailable& e) {
                failed[i] = CodifyFailure{segments[i].id, 0, e.what()};
            }
            if (failed[i]) {
                spdlog::warn("segment {} of {} falls back to a relevance wrapper", segments[i].id, profile.character);
                done[i] = CodifiedSegment{segments[i], rag_wrapper(segments[i]), std::max(1, failed[i]->attempts),
                                          llm.config.model, true};
            }
        }
    };
    const int n = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(1, segments.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    CodifyReport report;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        report.segments.push_back(std::move(*done[i]));
        if (failed[i]) report.failures.push_back(std::move(*failed[i]));
    }
    return report;
}

nlohmann::ordered_json manifest(const CodifyReport& report, Granularity granularity, const CodifyOptions& options,
                                const std::string& model) {
    nlohmann::ordered_json j;
    j["granularity"] = std::string(to_string(granularity));
    j["model"] = model;
    j["include_randomness"] = options.include_randomness;
    j["max_attempts"] = options.max_attempts;
    j["segments"] = nlohmann::ordered_json::array();
    for (const auto& s : report.segments) {
        j["segments"].push_back({{"id", s.segment.id}, {"attempts", s.attempts}, {"fallback", s.fallback}});
    }
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : report.failures) {
        j["failures"].push_back({{"segment_id", f.segment_id}, {"attempts", f.attempts}, {"reason", f.reason}});
    }
    return j;
}

}  // namespace cprofile::codifier
