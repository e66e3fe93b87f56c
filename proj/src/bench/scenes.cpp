#include "cprofile/bench/scenes.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <spdlog/spdlog.h>

#include "cprofile/util/text.hpp"

namespace cprofile::bench {

namespace {

std::set<std::string> long_words(const std::string& text) {
    std::set<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 6) out.insert(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

// Removes list decoration a model may add: "- ", "* ", "3. ", "3) ".
std::string strip_list_marker(std::string_view line) {
    line = trim(line);
    if (line.size() > 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') return std::string(trim(line.substr(2)));
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ') {
        return std::string(trim(line.substr(i + 2)));
    }
    return std::string(line);
}

}  // namespace

bool question_leaks(const std::string& question, const std::string& reference) {
    const auto a = long_words(question);
    const auto b = long_words(reference);
    return std::any_of(a.begin(), a.end(), [&](const std::string& w) { return b.count(w) > 0; });
}

std::vector<engine::Scene> build_scenes(const std::string& episode_summary, const std::string& character, llm::LlmContext llm,
                                        const SceneBuildOptions& options) {
    if (trim(episode_summary).empty()) throw std::invalid_argument("episode summary is empty");
    const auto ex = llm.client.complete(llm.templates.get("scene_extract"),
                                        {{"character", character}, {"summary", episode_summary}}, llm.config);
    std::vector<std::pair<std::size_t, std::string>> found;
    std::size_t pos = 0;
    while (pos < ex.completion.size()) {
        auto nl = ex.completion.find('\n', pos);
        if (nl == std::string::npos) nl = ex.completion.size();
        const auto sentence = strip_list_marker(std::string_view(ex.completion).substr(pos, nl - pos));
        pos = nl + 1;
        if (sentence.empty()) continue;
        const auto at = episode_summary.find(sentence);
        if (at == std::string::npos) {
            spdlog::warn("dropping non-verbatim extraction for {}: {}", character, sentence);
            continue;
        }
        if (trim(std::string_view(episode_summary).substr(0, at)).empty()) {
            spdlog::warn("dropping extraction with no preceding context for {}: {}", character, sentence);
            continue;
        }
        found.emplace_back(at, sentence);
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    if (found.empty()) spdlog::warn("no action sentences extracted for {}", character);

    std::vector<engine::Scene> scenes;
    for (const auto& [at, sentence] : found) {
        engine::Scene s;
        s.id = slugify(character) + "-" + std::to_string(options.first_order_index + static_cast<std::int64_t>(scenes.size()));
        s.artifact = options.artifact;
        s.character = character;
        s.order_index = options.first_order_index + static_cast<std::int64_t>(scenes.size());
        s.context = std::string(trim(std::string_view(episode_summary).substr(0, at)));
        s.reference_action = sentence;
        const auto q = llm.client.complete(llm.templates.get("guiding_question"),
                                           {{"character", character}, {"context", s.context}, {"reference", sentence}},
                                           llm.config);
        s.question = std::string(trim(q.completion));
        if (s.question.empty()) s.question = "What does " + character + " do next?";
        if (question_leaks(s.question, sentence)) {
            spdlog::warn("guiding question for {} may leak the answer: {}", s.id, s.question);
        }
        scenes.push_back(std::move(s));
    }
    return scenes;
}

FilterResult filter_spoilers(const codifier::Profile& profile, std::int64_t cutoff_order, llm::LlmContext llm,
                             bool allow_aggressive) {
    if (cutoff_order < 0) throw std::invalid_argument("cutoff_order must be >= 0");
    FilterResult out;
    out.profile = profile;
    if (out.profile.segments.empty()) out.profile.segments = codifier::segment_profile(profile.text, codifier::Granularity::Paragraph);
    const auto& segs = out.profile.segments;
    if (segs.empty()) return out;

    std::string listing;
    for (const auto& s : segs) listing += s.id + ": " + collapse_whitespace(s.text) + "\n";
    std::string answer;
    try {
        answer = llm.client
                     .complete(llm.templates.get("spoiler_filter"),
                               {{"character", profile.character}, {"cutoff", std::to_string(cutoff_order)}, {"segments", listing}},
                               llm.config)
                     .completion;
    } catch (const llm::LlmUnavailable& e) {
        spdlog::warn("spoiler filter unavailable ({}); profile of {} left unfiltered", e.what(), profile.character);
        return out;
    }
    std::vector<codifier::Segment> kept;
    for (const auto& s : segs) {
        if (find_whole_word(answer, s.id) != std::string::npos) {
            out.removed.push_back(s.id);
        } else {
            kept.push_back(s);
        }
    }
    if (out.removed.size() * 2 > segs.size() && !allow_aggressive) {
        throw OverAggressiveFilter("spoiler filter would remove " + std::to_string(out.removed.size()) + " of " +
                                   std::to_string(segs.size()) + " segments of " + profile.character);
    }
    if (!out.removed.empty()) {
        std::string ids;
        for (const auto& id : out.removed) ids += (ids.empty() ? "" : ", ") + id;
        spdlog::info("spoiler filter removed from {}: {}", profile.character, ids);
    }
    std::string text;
    for (const auto& s : kept) text += (text.empty() ? "" : "\n\n") + s.text;
    out.profile.segments = std::move(kept);
    out.profile.text = std::move(text);
    return out;
}

}  // namespace cprofile::bench
