#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cprofile/dsl/ast.hpp"
#include "cprofile/dsl/diagnostic.hpp"

namespace cprofile::dsl {

/// Either a valid Program or at least one ERROR diagnostic.
class ParseResult {
public:
    explicit ParseResult(Program program) : value_(std::move(program)) {}
    explicit ParseResult(std::vector<Diagnostic> errors) : value_(std::move(errors)) {}

    bool ok() const { return std::holds_alternative<Program>(value_); }
    explicit operator bool() const { return ok(); }

    const Program& program() const& { return std::get<Program>(value_); }
    Program&& program() && { return std::get<Program>(std::move(value_)); }
    const std::vector<Diagnostic>& errors() const { return std::get<std::vector<Diagnostic>>(value_); }

private:
    std::variant<Program, std::vector<Diagnostic>> value_;
};

/**
 * Parse CPL source.
 *
 * Lexical and indentation errors are collected for the whole source; grammar
 * errors stop at the first offending token; unbound identifiers are all reported.
 */
ParseResult parse(std::string_view source, std::string segment_id);

/// Parse and throw std::invalid_argument with rendered diagnostics on failure.
Program parse_or_throw(std::string_view source, std::string segment_id);

}  // namespace cprofile::dsl
