#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cprofile/dsl/ast.hpp"

namespace cprofile::dsl {

enum class Severity { Error, Warn };

/// Message class of a diagnostic. Parse errors and validation warnings are disjoint.
enum class DiagCode {
    LexicalError,
    IndentationError,
    GrammarError,
    UnboundIdentifier,
    EmptyBlock,
    DuplicateQuestion,
    DegenerateProbability,
    UnreachableElse,
    DuplicateChoiceOption,
};

struct Diagnostic {
    Severity severity = Severity::Error;
    SourcePos position{};
    DiagCode code = DiagCode::GrammarError;
    std::string message;
};

std::string_view to_string(DiagCode code);
std::string_view to_string(Severity severity);

/// `line:col: error[grammar]: message`
std::string render(const Diagnostic& d);
std::string render(const std::vector<Diagnostic>& ds);

bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace cprofile::dsl
