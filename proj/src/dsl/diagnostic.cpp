#include "cprofile/dsl/diagnostic.hpp"

#include <algorithm>

namespace cprofile::dsl {

std::string_view to_string(DiagCode code) {
    switch (code) {
        case DiagCode::LexicalError: return "lexical";
        case DiagCode::IndentationError: return "indentation";
        case DiagCode::GrammarError: return "grammar";
        case DiagCode::UnboundIdentifier: return "unbound-identifier";
        case DiagCode::EmptyBlock: return "empty-block";
        case DiagCode::DuplicateQuestion: return "duplicate-question";
        case DiagCode::DegenerateProbability: return "degenerate-probability";
        case DiagCode::UnreachableElse: return "unreachable-else";
        case DiagCode::DuplicateChoiceOption: return "duplicate-choice-option";
    }
    return "unknown";
}

std::string_view to_string(Severity severity) { return severity == Severity::Error ? "error" : "warning"; }

std::string render(const Diagnostic& d) {
    return std::to_string(d.position.line) + ":" + std::to_string(d.position.column) + ": " +
           std::string(to_string(d.severity)) + "[" + std::string(to_string(d.code)) + "]: " + d.message;
}

std::string render(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds) {
        out += render(d);
        out += '\n';
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace cprofile::dsl
