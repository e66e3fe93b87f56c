#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cprofile/dsl/ast.hpp"
#include "cprofile/dsl/diagnostic.hpp"

namespace cprofile::dsl::detail {

enum class Tok {
    When, Scene, If, Elif, Else, Trigger, Let, And, Or, Not, True, False, Check, Chance, ChoiceKw,
    Colon, LParen, RParen, LBracket, RBracket, Comma, Assign,
    String, Number, Ident,
    Newline, Indent, Dedent, End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier name, resolved string value, or number spelling
    double number = 0.0;
    SourcePos pos{};
};

std::string_view describe(Tok kind);

struct LexResult {
    std::vector<Token> tokens;
    std::vector<Diagnostic> errors;
};

LexResult lex(std::string_view source);

}  // namespace cprofile::dsl::detail
