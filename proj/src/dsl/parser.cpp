#include "cprofile/dsl/parser.hpp"

#include <stdexcept>
#include <unordered_set>

#include "lexer.hpp"

namespace cprofile::dsl {

namespace {

using detail::Tok;
using detail::Token;

struct GrammarFailure {
    Diagnostic diagnostic;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string segment_id)
        : tokens_(std::move(tokens)), segment_id_(std::move(segment_id)) {}

    Program parse_program() {
        expect(Tok::When, "expected 'when scene:' header");
        expect(Tok::Scene, "expected 'scene' after 'when'");
        const SourcePos header = previous().pos;
        expect(Tok::Colon, "expected ':' after 'when scene'");
        scopes_.emplace_back();
        Program program;
        program.segment_id = segment_id_;
        program.body = parse_block(header, "program body");
        scopes_.pop_back();
        if (!at(Tok::End)) fail(peek(), DiagCode::GrammarError, "unexpected " + std::string(describe(peek().kind)) + " after program body");
        return program;
    }

    std::vector<Diagnostic> take_semantic_errors() { return std::move(semantic_); }

private:
    const Token& peek() const { return tokens_[index_]; }
    const Token& previous() const { return tokens_[index_ - 1]; }
    bool at(Tok kind) const { return peek().kind == kind; }

    const Token& advance() {
        const Token& t = tokens_[index_];
        if (t.kind != Tok::End) ++index_;
        return t;
    }

    bool accept(Tok kind) {
        if (!at(kind)) return false;
        advance();
        return true;
    }

    [[noreturn]] void fail(const Token& at_token, DiagCode code, std::string message) {
        throw GrammarFailure{Diagnostic{Severity::Error, at_token.pos, code, std::move(message)}};
    }

    const Token& expect(Tok kind, const std::string& message) {
        if (!at(kind)) {
            if (at(Tok::Indent)) fail(peek(), DiagCode::IndentationError, "unexpected indent");
            fail(peek(), DiagCode::GrammarError, message + ", found " + std::string(describe(peek().kind)));
        }
        return advance();
    }

    // block := NEWLINE INDENT stmt+ DEDENT
    Block parse_block(SourcePos owner, const char* what) {
        expect(Tok::Newline, "expected end of line after ':'");
        if (!at(Tok::Indent)) {
            fail(Token{Tok::End, {}, 0.0, owner}, DiagCode::EmptyBlock, std::string("empty ") + what);
        }
        advance();
        scopes_.emplace_back();
        Block block;
        while (!at(Tok::Dedent) && !at(Tok::End)) block.push_back(parse_stmt());
        scopes_.pop_back();
        expect(Tok::Dedent, "expected dedent");
        return block;
    }

    Stmt parse_stmt() {
        const Token& first = peek();
        if (accept(Tok::If)) return parse_if(first.pos);
        if (accept(Tok::Trigger)) {
            Stmt s{Trigger{parse_str_expr()}, first.pos};
            expect(Tok::Newline, "expected end of line after trigger");
            return s;
        }
        if (accept(Tok::Let)) {
            const Token& name = expect(Tok::Ident, "expected identifier after 'let'");
            expect(Tok::Assign, "expected '=' in let binding");
            StrExpr value = parse_str_expr();
            expect(Tok::Newline, "expected end of line after let binding");
            scopes_.back().insert(name.text);
            return Stmt{Let{name.text, std::move(value)}, first.pos};
        }
        if (at(Tok::Indent)) fail(first, DiagCode::IndentationError, "unexpected indent");
        if (at(Tok::Elif) || at(Tok::Else)) fail(first, DiagCode::GrammarError, describe(first.kind).data() + std::string(" without matching 'if'"));
        fail(first, DiagCode::GrammarError, "expected statement ('if', 'trigger' or 'let'), found " + std::string(describe(first.kind)));
    }

    Stmt parse_if(SourcePos pos) {
        If node{parse_expr(), {}, {}, std::nullopt, {}};
        expect(Tok::Colon, "expected ':' after if condition");
        node.then = parse_block(pos, "if block");
        while (at(Tok::Elif)) {
            const SourcePos elif_pos = advance().pos;
            ElifArm arm{parse_expr(), {}, elif_pos};
            expect(Tok::Colon, "expected ':' after elif condition");
            arm.body = parse_block(elif_pos, "elif block");
            node.elifs.push_back(std::move(arm));
        }
        if (at(Tok::Else)) {
            node.else_pos = advance().pos;
            expect(Tok::Colon, "expected ':' after 'else'");
            node.else_ = parse_block(node.else_pos, "else block");
        }
        return Stmt{std::move(node), pos};
    }

    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        Expr left = parse_and();
        while (at(Tok::Or)) {
            const SourcePos pos = advance().pos;
            Expr right = parse_and();
            left = Expr{Or{std::move(left), std::move(right)}, pos};
        }
        return left;
    }

    Expr parse_and() {
        Expr left = parse_not();
        while (at(Tok::And)) {
            const SourcePos pos = advance().pos;
            Expr right = parse_not();
            left = Expr{And{std::move(left), std::move(right)}, pos};
        }
        return left;
    }

    Expr parse_not() {
        if (at(Tok::Not)) {
            const SourcePos pos = advance().pos;
            return Expr{Not{parse_not()}, pos};
        }
        return parse_atom();
    }

    Expr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Check: {
                advance();
                expect(Tok::LParen, "expected '(' after 'check'");
                const Token& q = expect(Tok::String, "check expects a question string");
                if (q.text.empty() || q.text.back() != '?') {
                    fail(q, DiagCode::GrammarError, "check question must be non-empty and end with '?'");
                }
                expect(Tok::RParen, "expected ')' after check question");
                return Expr{Check{q.text}, t.pos};
            }
            case Tok::Chance: {
                advance();
                expect(Tok::LParen, "expected '(' after 'chance'");
                const Token& n = expect(Tok::Number, "chance expects a probability");
                if (!(n.number >= 0.0 && n.number <= 1.0)) {
                    fail(n, DiagCode::GrammarError, "chance probability must lie in [0, 1]");
                }
                expect(Tok::RParen, "expected ')' after chance probability");
                return Expr{Chance{n.number}, t.pos};
            }
            case Tok::True: advance(); return Expr{Const{true}, t.pos};
            case Tok::False: advance(); return Expr{Const{false}, t.pos};
            case Tok::LParen: {
                advance();
                Expr inner = parse_expr();
                expect(Tok::RParen, "expected ')'");
                return inner;
            }
            default:
                fail(t, DiagCode::GrammarError, "expected condition (check, chance, true, false, not or '('), found " + std::string(describe(t.kind)));
        }
    }

    StrExpr parse_str_expr() {
        const Token& t = peek();
        if (accept(Tok::String)) {
            if (t.text.empty()) fail(t, DiagCode::GrammarError, "statement text must be non-empty");
            return StrExpr{Literal{t.text}, t.pos};
        }
        if (accept(Tok::Ident)) {
            if (!bound(t.text)) {
                semantic_.push_back(Diagnostic{Severity::Error, t.pos, DiagCode::UnboundIdentifier, "unbound identifier " + t.text});
            }
            return StrExpr{Var{t.text}, t.pos};
        }
        if (accept(Tok::ChoiceKw)) {
            expect(Tok::LParen, "expected '(' after 'choice'");
            expect(Tok::LBracket, "expected '[' in choice");
            Choice choice;
            do {
                const Token& opt = expect(Tok::String, "choice options must be strings");
                if (opt.text.empty()) fail(opt, DiagCode::GrammarError, "choice options must be non-empty");
                choice.options.push_back(opt.text);
            } while (accept(Tok::Comma) && !at(Tok::RBracket));
            expect(Tok::RBracket, "expected ']' after choice options");
            expect(Tok::RParen, "expected ')' after choice list");
            if (choice.options.size() < 2) fail(t, DiagCode::GrammarError, "choice needs at least two options");
            const std::unordered_set<std::string> distinct(choice.options.begin(), choice.options.end());
            if (distinct.size() < 2) fail(t, DiagCode::GrammarError, "choice needs at least two distinct options");
            return StrExpr{std::move(choice), t.pos};
        }
        fail(t, DiagCode::GrammarError, "expected string, identifier or choice([...]), found " + std::string(describe(t.kind)));
    }

    bool bound(const std::string& name) const {
        for (const auto& scope : scopes_) {
            if (scope.count(name) != 0) return true;
        }
        return false;
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    std::string segment_id_;
    std::vector<std::unordered_set<std::string>> scopes_;
    std::vector<Diagnostic> semantic_;
};

// Keeps reported positions inside the source text.
SourcePos clamp(SourcePos pos, std::string_view source) {
    std::vector<std::size_t> lengths{0};
    for (const char c : source) {
        if (c == '\n') {
            lengths.push_back(0);
        } else {
            ++lengths.back();
        }
    }
    if (lengths.size() > 1 && lengths.back() == 0) lengths.pop_back();
    if (pos.line == 0) pos.line = 1;
    if (pos.line > lengths.size()) pos = {lengths.size(), lengths.back() + 1};
    const std::size_t len = lengths[pos.line - 1];
    if (pos.column == 0) pos.column = 1;
    if (pos.column > std::max<std::size_t>(len, 1)) pos.column = std::max<std::size_t>(len, 1);
    return pos;
}

}  // namespace

ParseResult parse(std::string_view source, std::string segment_id) {
    auto lexed = detail::lex(source);
    std::vector<Diagnostic> errors = std::move(lexed.errors);
    if (errors.empty()) {
        Parser parser(std::move(lexed.tokens), segment_id);
        try {
            Program program = parser.parse_program();
            errors = parser.take_semantic_errors();
            if (errors.empty()) {
                program.source_text = std::string(source);
                return ParseResult(std::move(program));
            }
        } catch (const GrammarFailure& failure) {
            errors = parser.take_semantic_errors();
            errors.push_back(failure.diagnostic);
        }
    }
    for (auto& e : errors) e.position = clamp(e.position, source);
    return ParseResult(std::move(errors));
}

Program parse_or_throw(std::string_view source, std::string segment_id) {
    auto result = parse(source, segment_id);
    if (!result) throw std::invalid_argument("CPL parse failed for " + segment_id + ":\n" + render(result.errors()));
    return std::move(result).program();
}

}  // namespace cprofile::dsl
