#include "cprofile/dsl/analysis.hpp"
#include "cprofile/util/overloaded.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace cprofile::dsl {

namespace {

struct ExprStats {
    std::size_t checks = 0;
    bool random = false;
};

void scan_expr(const Expr& e, ExprStats& stats) {
    std::visit(overloaded{
                   [&](const Check&) { ++stats.checks; },
                   [&](const Chance&) { stats.random = true; },
                   [](const Const&) {},
                   [&](const Not& n) { scan_expr(*n.inner, stats); },
                   [&](const And& a) {
                       scan_expr(*a.left, stats);
                       scan_expr(*a.right, stats);
                   },
                   [&](const Or& o) {
                       scan_expr(*o.left, stats);
                       scan_expr(*o.right, stats);
                   },
               },
               e.node);
}

std::size_t walk(const Block& block, CodeMetrics& m, ExprStats& stats) {
    std::size_t depth = 0;
    for (const auto& s : block) {
        std::visit(overloaded{
                       [&](const If& node) {
                           if (!node.elifs.empty() || node.else_) m.has_branch = true;
                           scan_expr(node.guard, stats);
                           std::size_t inner = walk(node.then, m, stats);
                           for (const auto& arm : node.elifs) {
                               scan_expr(arm.guard, stats);
                               inner = std::max(inner, walk(arm.body, m, stats));
                           }
                           if (node.else_) inner = std::max(inner, walk(*node.else_, m, stats));
                           depth = std::max(depth, inner + 1);
                       },
                       [&](const Trigger& t) {
                           if (std::holds_alternative<Choice>(t.value.node)) stats.random = true;
                       },
                       [&](const Let& l) {
                           if (std::holds_alternative<Choice>(l.value.node)) stats.random = true;
                       },
                   },
                   s.node);
    }
    return depth;
}

void collect_questions(const Expr& e, std::vector<std::pair<std::string, SourcePos>>& out) {
    std::visit(overloaded{
                   [&](const Check& c) { out.emplace_back(c.question, e.pos); },
                   [](const Chance&) {},
                   [](const Const&) {},
                   [&](const Not& n) { collect_questions(*n.inner, out); },
                   [&](const And& a) {
                       collect_questions(*a.left, out);
                       collect_questions(*a.right, out);
                   },
                   [&](const Or& o) {
                       collect_questions(*o.left, out);
                       collect_questions(*o.right, out);
                   },
               },
               e.node);
}

void collect_chances(const Expr& e, std::vector<std::pair<double, SourcePos>>& out) {
    std::visit(overloaded{
                   [&](const Chance& c) { out.emplace_back(c.p, e.pos); },
                   [&](const Not& n) { collect_chances(*n.inner, out); },
                   [&](const And& a) {
                       collect_chances(*a.left, out);
                       collect_chances(*a.right, out);
                   },
                   [&](const Or& o) {
                       collect_chances(*o.left, out);
                       collect_chances(*o.right, out);
                   },
                   [](const auto&) {},
               },
               e.node);
}

bool is_const_true(const Expr& e) {
    const auto* c = std::get_if<Const>(&e.node);
    return c != nullptr && c->value;
}

struct Validator {
    std::vector<Diagnostic> out;
    std::vector<std::pair<std::string, SourcePos>> questions;

    void warn(SourcePos pos, DiagCode code, std::string message) {
        out.push_back(Diagnostic{Severity::Warn, pos, code, std::move(message)});
    }

    void guard(const Expr& e) {
        collect_questions(e, questions);
        std::vector<std::pair<double, SourcePos>> chances;
        collect_chances(e, chances);
        for (const auto& [p, pos] : chances) {
            if (p == 0.0 || p == 1.0) warn(pos, DiagCode::DegenerateProbability, "chance(" + std::to_string(static_cast<int>(p)) + ") is deterministic");
        }
    }

    void str_expr(const StrExpr& e) {
        if (const auto* c = std::get_if<Choice>(&e.node)) {
            std::unordered_set<std::string> seen;
            for (const auto& o : c->options) {
                if (!seen.insert(o).second) warn(e.pos, DiagCode::DuplicateChoiceOption, "duplicate choice option \"" + o + "\"");
            }
        }
    }

    void block(const Block& b) {
        for (const auto& s : b) {
            std::visit(overloaded{
                           [&](const If& node) {
                               guard(node.guard);
                               block(node.then);
                               bool dead = is_const_true(node.guard);
                               for (const auto& arm : node.elifs) {
                                   if (dead) warn(arm.pos, DiagCode::UnreachableElse, "unreachable elif after an always-true guard");
                                   guard(arm.guard);
                                   block(arm.body);
                                   dead = dead || is_const_true(arm.guard);
                               }
                               if (node.else_) {
                                   if (dead) warn(node.else_pos, DiagCode::UnreachableElse, "unreachable else after an always-true guard");
                                   block(*node.else_);
                               }
                           },
                           [&](const Trigger& t) { str_expr(t.value); },
                           [&](const Let& l) { str_expr(l.value); },
                       },
                       s.node);
        }
    }
};

}  // namespace

CodeMetrics metrics(const Program& program) {
    CodeMetrics m;
    ExprStats stats;
    m.if_depth = walk(program.body, m, stats);
    m.has_random = stats.random;
    m.check_count = stats.checks;
    return m;
}

std::vector<Diagnostic> validate(const Program& program) {
    Validator v;
    v.block(program.body);
    std::set<std::string> seen;
    for (const auto& [q, pos] : v.questions) {
        if (!seen.insert(q).second) v.warn(pos, DiagCode::DuplicateQuestion, "duplicate question \"" + q + "\"");
    }
    std::stable_sort(v.out.begin(), v.out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return a.position.line != b.position.line ? a.position.line < b.position.line : a.position.column < b.position.column;
    });
    return std::move(v.out);
}

std::vector<std::string> questions(const Program& program) {
    Validator v;
    v.block(program.body);
    std::vector<std::string> out;
    out.reserve(v.questions.size());
    for (auto& q : v.questions) out.push_back(std::move(q.first));
    return out;
}

}  // namespace cprofile::dsl
