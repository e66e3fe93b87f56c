#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cprofile {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapses every whitespace run (including newlines) into one space and trims.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split_words(std::string_view s);

/// Position of `word` in `text` bounded by non-identifier characters, or npos.
std::size_t find_whole_word(std::string_view text, std::string_view word);

/// File-system friendly lowercase name: "Ayla Stone" -> "ayla_stone".
std::string slugify(std::string_view name);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cprofile
