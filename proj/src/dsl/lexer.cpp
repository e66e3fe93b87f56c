#include "lexer.hpp"

#include <charconv>
#include <cstdint>
#include <unordered_map>

namespace cprofile::dsl::detail {

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
    static const std::unordered_map<std::string_view, Tok> table = {
        {"when", Tok::When},       {"scene", Tok::Scene},   {"if", Tok::If},
        {"elif", Tok::Elif},       {"else", Tok::Else},     {"trigger", Tok::Trigger},
        {"let", Tok::Let},         {"and", Tok::And},       {"or", Tok::Or},
        {"not", Tok::Not},         {"true", Tok::True},     {"false", Tok::False},
        {"check", Tok::Check},     {"chance", Tok::Chance}, {"choice", Tok::ChoiceKw},
    };
    return table;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c >> 5) == 0x6) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c >> 4) == 0xE) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c >> 3) == 0x1E) {
            len = 4;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + len > s.size()) return i;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc >> 6) != 0x2) return i;
            cp = (cp << 6) | (cc & 0x3F);
        }
        const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
        i += len;
    }
    return std::string_view::npos;
}

class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(source) {}

    LexResult run() {
        if (const auto bad = find_invalid_utf8(src_); bad != std::string_view::npos) {
            error(position_of(bad), DiagCode::LexicalError, "invalid UTF-8 sequence");
            return std::move(out_);
        }
        std::size_t line_start = 0;
        std::size_t line_no = 1;
        while (line_start <= src_.size()) {
            auto line_end = src_.find('\n', line_start);
            if (line_end == std::string_view::npos) line_end = src_.size();
            auto line = src_.substr(line_start, line_end - line_start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lex_line(line, line_no);
            if (line_end == src_.size()) break;
            line_start = line_end + 1;
            ++line_no;
        }
        const SourcePos eof = last_pos_;
        if (!out_.tokens.empty() && out_.tokens.back().kind != Tok::Newline && out_.tokens.back().kind != Tok::Dedent) {
            push(Tok::Newline, eof);
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            push(Tok::Dedent, eof);
        }
        push(Tok::End, eof);
        return std::move(out_);
    }

private:
    SourcePos position_of(std::size_t offset) const {
        SourcePos p{1, 1};
        for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++p.line;
                p.column = 1;
            } else {
                ++p.column;
            }
        }
        return p;
    }

    void error(SourcePos pos, DiagCode code, std::string message) {
        out_.errors.push_back(Diagnostic{Severity::Error, pos, code, std::move(message)});
    }

    void push(Tok kind, SourcePos pos, std::string text = {}, double number = 0.0) {
        out_.tokens.push_back(Token{kind, std::move(text), number, pos});
    }

    void lex_line(std::string_view line, std::size_t line_no) {
        std::size_t i = 0;
        if (depth_ == 0) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
                if (line[i] == '\t') {
                    error({line_no, i + 1}, DiagCode::IndentationError, "tab character in indentation");
                    return;
                }
                ++i;
            }
            if (i == line.size() || line[i] == '#') return;  // blank or comment-only
            const std::size_t width = i;
            const SourcePos at{line_no, i + 1};
            if (width > indents_.back()) {
                if (out_.tokens.empty()) {
                    error(at, DiagCode::IndentationError, "unexpected indent");
                    return;
                }
                indents_.push_back(width);
                push(Tok::Indent, at);
            } else {
                while (width < indents_.back()) {
                    indents_.pop_back();
                    push(Tok::Dedent, at);
                }
                if (width != indents_.back()) {
                    error(at, DiagCode::IndentationError, "unindent does not match any outer indentation level");
                    indents_.push_back(width);
                }
            }
        }
        bool emitted = false;
        while (i < line.size()) {
            const char c = line[i];
            const SourcePos at{line_no, i + 1};
            last_pos_ = at;
            if (c == ' ' || c == '\t') {
                ++i;
                continue;
            }
            if (c == '#') break;
            emitted = true;
            if (is_ident_start(c)) {
                std::size_t j = i;
                while (j < line.size() && is_ident_char(line[j])) ++j;
                const auto word = line.substr(i, j - i);
                const auto& kw = keywords();
                if (auto it = kw.find(word); it != kw.end()) {
                    push(it->second, at, std::string(word));
                } else {
                    push(Tok::Ident, at, std::string(word));
                }
                last_pos_ = {line_no, j};
                i = j;
                continue;
            }
            if (is_digit(c) || (c == '.' && i + 1 < line.size() && is_digit(line[i + 1]))) {
                std::size_t j = i;
                while (j < line.size() && is_digit(line[j])) ++j;
                if (j < line.size() && line[j] == '.') {
                    ++j;
                    while (j < line.size() && is_digit(line[j])) ++j;
                }
                if (j < line.size() && is_ident_char(line[j])) {
                    error(at, DiagCode::LexicalError, "malformed number");
                    while (j < line.size() && is_ident_char(line[j])) ++j;
                    i = j;
                    continue;
                }
                const auto spelling = line.substr(i, j - i);
                double value = 0.0;
                const auto [ptr, ec] = std::from_chars(spelling.data(), spelling.data() + spelling.size(), value);
                if (ec != std::errc{} || ptr != spelling.data() + spelling.size()) {
                    error(at, DiagCode::LexicalError, "malformed number");
                } else {
                    push(Tok::Number, at, std::string(spelling), value);
                }
                last_pos_ = {line_no, j};
                i = j;
                continue;
            }
            if (c == '"') {
                std::string value;
                std::size_t j = i + 1;
                bool closed = false;
                bool bad = false;
                while (j < line.size()) {
                    if (line[j] == '\\') {
                        if (j + 1 < line.size() && (line[j + 1] == '"' || line[j + 1] == '\\')) {
                            value.push_back(line[j + 1]);
                            j += 2;
                            continue;
                        }
                        error({line_no, j + 1}, DiagCode::LexicalError, "invalid escape sequence in string");
                        bad = true;
                        ++j;
                        continue;
                    }
                    if (line[j] == '"') {
                        closed = true;
                        break;
                    }
                    value.push_back(line[j]);
                    ++j;
                }
                if (!closed) {
                    error(at, DiagCode::LexicalError, "unterminated string literal");
                    return;
                }
                if (!bad) push(Tok::String, at, std::move(value));
                last_pos_ = {line_no, j + 1};
                i = j + 1;
                continue;
            }
            Tok kind = Tok::End;
            switch (c) {
                case ':': kind = Tok::Colon; break;
                case '(': kind = Tok::LParen; ++depth_; break;
                case ')': kind = Tok::RParen; if (depth_ > 0) --depth_; break;
                case '[': kind = Tok::LBracket; ++depth_; break;
                case ']': kind = Tok::RBracket; if (depth_ > 0) --depth_; break;
                case ',': kind = Tok::Comma; break;
                case '=': kind = Tok::Assign; break;
                default: break;
            }
            if (kind == Tok::End) {
                error(at, DiagCode::LexicalError, std::string("unexpected character '") + c + "'");
            } else {
                push(kind, at, std::string(1, c));
            }
            ++i;
        }
        if (emitted && depth_ == 0) push(Tok::Newline, last_pos_);
    }

    std::string_view src_;
    LexResult out_;
    std::vector<std::size_t> indents_{0};
    int depth_ = 0;
    SourcePos last_pos_{1, 1};
};

}  // namespace

std::string_view describe(Tok kind) {
    switch (kind) {
        case Tok::When: return "'when'";
        case Tok::Scene: return "'scene'";
        case Tok::If: return "'if'";
        case Tok::Elif: return "'elif'";
        case Tok::Else: return "'else'";
        case Tok::Trigger: return "'trigger'";
        case Tok::Let: return "'let'";
        case Tok::And: return "'and'";
        case Tok::Or: return "'or'";
        case Tok::Not: return "'not'";
        case Tok::True: return "'true'";
        case Tok::False: return "'false'";
        case Tok::Check: return "'check'";
        case Tok::Chance: return "'chance'";
        case Tok::ChoiceKw: return "'choice'";
        case Tok::Colon: return "':'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Assign: return "'='";
        case Tok::String: return "string";
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Newline: return "end of line";
        case Tok::Indent: return "indent";
        case Tok::Dedent: return "dedent";
        case Tok::End: return "end of input";
    }
    return "token";
}

LexResult lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace cprofile::dsl::detail
