#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cprofile::codifier {

enum class Granularity { Section, Paragraph, Sentence };

std::string_view to_string(Granularity g);
std::optional<Granularity> granularity_from_string(std::string_view s);

struct Segment {
    std::string id;  // "seg1", "seg2", ... in document order
    std::string text;
    Granularity granularity = Granularity::Paragraph;
    std::size_t index = 0;
    // Byte span of `text` inside the source; spans are disjoint and increasing.
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Profile {
    std::string character;
    std::string artifact;
    std::string text;
    std::vector<Segment> segments;
};

/// Profile JSON: {character, artifact, text}. Throws std::invalid_argument on missing fields.
Profile profile_from_json(const nlohmann::json& j);
Profile load_profile(const std::filesystem::path& path);

/// Abbreviations (lowercase, with their dot) that never end a sentence.
const std::vector<std::string>& abbreviations();

/**
 * Splits profile text. Whitespace-only text gives no segments.
 *
 * Section: a heading line (`#...`, `==...`, or a short all-caps line) starts a
 * new section that runs to the next heading. Paragraph: blank-line runs.
 * Sentence: inside each paragraph, after . ! or ? (plus closing quotes or
 * brackets) followed by whitespace and an uppercase letter, unless the break
 * falls inside a quotation or right after an abbreviation or an initial.
 */
std::vector<Segment> segment_profile(std::string_view text, Granularity granularity);

}  // namespace cprofile::codifier
