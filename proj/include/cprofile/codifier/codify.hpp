#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cprofile/codifier/segment.hpp"
#include "cprofile/dsl/ast.hpp"
#include "cprofile/dsl/diagnostic.hpp"
#include "cprofile/llm/client.hpp"
#include "json.hpp"

namespace cprofile::codifier {

struct CodifiedSegment {
    Segment segment;
    dsl::Program program;
    int attempts = 1;
    std::string codify_model;
    bool fallback = false;  // program is the relevance-check wrapper, not a codification
};

class CodifyFailed : public std::runtime_error {
public:
    CodifyFailed(std::string segment_id, int attempts, std::string diagnostics);

    const std::string& segment_id() const { return segment_id_; }
    int attempts() const { return attempts_; }
    const std::string& diagnostics() const { return diagnostics_; }

private:
    std::string segment_id_;
    int attempts_;
    std::string diagnostics_;
};

struct CodifyOptions {
    int max_attempts = 3;
    bool include_randomness = false;
};

/**
 * Asks the codify template for a program, parses the first fenced block and,
 * on errors, asks again with the diagnostics appended. Throws CodifyFailed
 * once max_attempts completions have failed to parse.
 */
CodifiedSegment codify_segment(const Segment& segment, const std::string& character, llm::LlmContext llm,
                               const CodifyOptions& options = {});

/// `if check("Is this relevant: <first 12 words>…?"): trigger <segment text>`
dsl::Program rag_wrapper(const Segment& segment);

struct CodifyFailure {
    std::string segment_id;
    int attempts = 0;
    std::string reason;
};

struct CodifyReport {
    std::vector<CodifiedSegment> segments;  // document order, fallbacks included
    std::vector<CodifyFailure> failures;
};

/// Codifies every segment of `profile` (segmenting it first when it has none).
CodifyReport codify_profile(const Profile& profile, llm::LlmContext llm, Granularity granularity,
                            const CodifyOptions& options = {}, int workers = 1);

/// manifest.json content: {granularity, model, include_randomness, segments: [{id, attempts, fallback}], failures}.
nlohmann::ordered_json manifest(const CodifyReport& report, Granularity granularity, const CodifyOptions& options,
                                const std::string& model);

}  // namespace cprofile::codifier
