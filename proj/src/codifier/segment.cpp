#include "cprofile/codifier/segment.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "cprofile/util/text.hpp"

namespace cprofile::codifier {

std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::Section: return "section";
        case Granularity::Paragraph: return "paragraph";
        case Granularity::Sentence: return "sentence";
    }
    return "paragraph";
}

std::optional<Granularity> granularity_from_string(std::string_view s) {
    const auto l = to_lower(trim(s));
    if (l == "section") return Granularity::Section;
    if (l == "paragraph") return Granularity::Paragraph;
    if (l == "sentence") return Granularity::Sentence;
    return std::nullopt;
}

Profile profile_from_json(const nlohmann::json& j) {
    Profile p;
    if (!j.is_object() || !j.contains("character") || !j.contains("text")) {
        throw std::invalid_argument("profile JSON needs 'character' and 'text'");
    }
    p.character = j.at("character").get<std::string>();
    p.artifact = j.value("artifact", std::string{});
    p.text = j.at("text").get<std::string>();
    if (trim(p.character).empty()) throw std::invalid_argument("profile character is empty");
    return p;
}

Profile load_profile(const std::filesystem::path& path) { return profile_from_json(nlohmann::json::parse(read_text_file(path))); }

const std::vector<std::string>& abbreviations() {
    static const std::vector<std::string> list{
        "mr.",   "mrs.", "ms.",   "dr.",   "prof.", "st.",   "jr.",  "sr.",   "vs.",  "etc.", "e.g.", "i.e.",
        "capt.", "gen.", "lt.",   "col.",  "sgt.",  "cmdr.", "adm.", "gov.",  "sen.", "rep.", "rev.", "fr.",
        "mt.",   "ft.",  "no.",   "vol.",  "fig.",  "ch.",   "ep.",  "approx.", "inc.", "ltd.", "co.", "u.s.",
        "u.k.",  "a.m.", "p.m.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.",
        "oct.",  "nov.", "dec.", "lord.", "sir."};
    return list;
}

namespace {

struct Line {
    std::size_t begin;  // first byte
    std::size_t end;    // one past the last byte, newline excluded
    bool blank;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back({pos, nl, trim(text.substr(pos, nl - pos)).empty()});
        if (nl == text.size()) break;
        pos = nl + 1;
    }
    return lines;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Shrinks [begin, end) to exclude surrounding whitespace.
std::pair<std::size_t, std::size_t> tighten(std::string_view text, std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    return {begin, end};
}

bool is_heading(std::string_view line) {
    line = trim(line);
    if (line.empty()) return false;
    if (line.front() == '#' || line.substr(0, 2) == "==") return true;
    if (line.size() > 60) return false;
    int letters = 0;
    for (char c : line) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isupper(static_cast<unsigned char>(c))) ++letters;
    }
    const char last = line.back();
    return letters >= 2 && last != '.' && last != '!' && last != '?' && last != ',';
}

using Span = std::pair<std::size_t, std::size_t>;

std::vector<Span> paragraph_spans(std::string_view text) {
    std::vector<Span> spans;
    std::optional<std::size_t> start;
    std::size_t last_end = 0;
    for (const auto& l : split_lines(text)) {
        if (l.blank) {
            if (start) spans.push_back(tighten(text, *start, last_end));
            start.reset();
            continue;
        }
        if (!start) start = l.begin;
        last_end = l.end;
    }
    if (start) spans.push_back(tighten(text, *start, last_end));
    return spans;
}

std::vector<Span> section_spans(std::string_view text) {
    std::vector<Span> spans;
    std::optional<std::size_t> start;
    std::size_t last_end = 0;
    for (const auto& l : split_lines(text)) {
        if (l.blank) continue;
        if (is_heading(text.substr(l.begin, l.end - l.begin)) && start) {
            spans.push_back(tighten(text, *start, last_end));
            start.reset();
        }
        if (!start) start = l.begin;
        last_end = l.end;
    }
    if (start) spans.push_back(tighten(text, *start, last_end));
    return spans;
}

bool starts_with(std::string_view s, std::size_t at, std::string_view prefix) { return s.substr(at, prefix.size()) == prefix; }

constexpr std::string_view kOpenCurly = "\xE2\x80\x9C";
constexpr std::string_view kCloseCurly = "\xE2\x80\x9D";

bool sentence_start(std::string_view p, std::size_t k) {
    if (k < p.size() && (p[k] == '"' || p[k] == '(')) ++k;
    else if (starts_with(p, k, kOpenCurly)) k += kOpenCurly.size();
    return k < p.size() && std::isupper(static_cast<unsigned char>(p[k]));
}

bool protected_dot(std::string_view p, std::size_t dot) {
    std::size_t b = dot;
    while (b > 0 && !is_space(p[b - 1])) --b;
    std::string_view word = p.substr(b, dot + 1 - b);
    while (!word.empty() && (word.front() == '"' || word.front() == '(')) word.remove_prefix(1);
    if (word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]))) return true;  // an initial
    const auto lower = to_lower(word);
    const auto& abbr = abbreviations();
    return std::find(abbr.begin(), abbr.end(), lower) != abbr.end();
}

std::vector<Span> sentence_spans(std::string_view text, Span para) {
    std::vector<Span> spans;
    const std::string_view p = text.substr(para.first, para.second - para.first);
    std::size_t start = 0;
    bool in_straight = false;
    int curly = 0;
    std::size_t i = 0;
    while (i < p.size()) {
        const char c = p[i];
        if (c == '"') {
            in_straight = !in_straight;
            ++i;
            continue;
        }
        if (starts_with(p, i, kOpenCurly)) {
            ++curly;
            i += kOpenCurly.size();
            continue;
        }
        if (starts_with(p, i, kCloseCurly)) {
            curly = std::max(0, curly - 1);
            i += kCloseCurly.size();
            continue;
        }
        if (c != '.' && c != '!' && c != '?') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < p.size() && (p[j] == '.' || p[j] == '!' || p[j] == '?')) ++j;
        while (j < p.size()) {
            if (p[j] == '"' && in_straight) {
                in_straight = false;
                ++j;
            } else if (starts_with(p, j, kCloseCurly)) {
                curly = std::max(0, curly - 1);
                j += kCloseCurly.size();
            } else if (p[j] == ')' || p[j] == ']' || p[j] == '\'') {
                ++j;
            } else {
                break;
            }
        }
        const bool single_dot = c == '.' && j == i + 1;
        if (!in_straight && curly == 0 && j < p.size() && is_space(p[j])) {
            std::size_t k = j;
            while (k < p.size() && is_space(p[k])) ++k;
            if (sentence_start(p, k) && !(single_dot && protected_dot(p, i))) {
                spans.push_back(tighten(text, para.first + start, para.first + j));
                start = k;
            }
        }
        i = j;
    }
    if (start < p.size()) spans.push_back(tighten(text, para.first + start, para.second));
    return spans;
}

}  // namespace

std::vector<Segment> segment_profile(std::string_view text, Granularity granularity) {
    std::vector<Span> spans;
    switch (granularity) {
        case Granularity::Section: spans = section_spans(text); break;
        case Granularity::Paragraph: spans = paragraph_spans(text); break;
        case Granularity::Sentence:
            for (const auto& para : paragraph_spans(text)) {
                auto s = sentence_spans(text, para);
                spans.insert(spans.end(), s.begin(), s.end());
            }
            break;
    }
    std::vector<Segment> out;
    for (const auto& [b, e] : spans) {
        if (b >= e) continue;
        Segment s;
        s.index = out.size();
        s.id = "seg" + std::to_string(s.index + 1);
        s.text = std::string(text.substr(b, e - b));
        s.granularity = granularity;
        s.begin = b;
        s.end = e;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace cprofile::codifier
