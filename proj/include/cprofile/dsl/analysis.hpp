#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cprofile/dsl/ast.hpp"
#include "cprofile/dsl/diagnostic.hpp"

namespace cprofile::dsl {

struct CodeMetrics {
    std::size_t if_depth = 0;
    bool has_branch = false;
    bool has_random = false;
    std::size_t check_count = 0;

    bool operator==(const CodeMetrics&) const = default;
};

CodeMetrics metrics(const Program& program);

/// Warnings only: duplicate questions, degenerate chance, unreachable arms, duplicate choice options.
std::vector<Diagnostic> validate(const Program& program);

/// Every check question in source order (duplicates kept).
std::vector<std::string> questions(const Program& program);

}  // namespace cprofile::dsl
