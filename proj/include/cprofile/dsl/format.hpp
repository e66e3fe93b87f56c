#pragma once

#include <string>
#include <string_view>

#include "cprofile/dsl/ast.hpp"

namespace cprofile::dsl {

/// Canonical text: 2-space indents, one statement per line, minimal parentheses.
std::string format(const Program& program);

std::string format_expr(const Expr& expr);
std::string format_str_expr(const StrExpr& expr);

/// Double-quoted literal, escaping only `"` and `\`.
std::string quote(std::string_view text);

/// Shortest fixed-notation decimal that parses back to the same double.
std::string format_number(double value);

}  // namespace cprofile::dsl
