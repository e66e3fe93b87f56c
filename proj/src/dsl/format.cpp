#include "cprofile/dsl/format.hpp"
#include "cprofile/util/overloaded.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace cprofile::dsl {

namespace {

// Binding strength: or < and < not < atom.
int precedence(const Expr& e) {
    return std::visit(overloaded{
                          [](const Or&) { return 1; },
                          [](const And&) { return 2; },
                          [](const Not&) { return 3; },
                          [](const auto&) { return 4; },
                      },
                      e.node);
}

void write_expr(std::string& out, const Expr& e, int min_prec) {
    const bool parens = precedence(e) < min_prec;
    if (parens) out += '(';
    std::visit(overloaded{
                   [&](const Check& c) { out += "check(" + quote(c.question) + ")"; },
                   [&](const Chance& c) { out += "chance(" + format_number(c.p) + ")"; },
                   [&](const Const& c) { out += c.value ? "true" : "false"; },
                   [&](const Not& n) {
                       out += "not ";
                       write_expr(out, *n.inner, 3);
                   },
                   [&](const And& a) {
                       write_expr(out, *a.left, 2);
                       out += " and ";
                       write_expr(out, *a.right, 3);
                   },
                   [&](const Or& o) {
                       write_expr(out, *o.left, 1);
                       out += " or ";
                       write_expr(out, *o.right, 2);
                   },
               },
               e.node);
    if (parens) out += ')';
}

void write_block(std::string& out, const Block& block, int depth);

void write_stmt(std::string& out, const Stmt& s, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    std::visit(overloaded{
                   [&](const If& node) {
                       out += indent + "if " + format_expr(node.guard) + ":\n";
                       write_block(out, node.then, depth + 1);
                       for (const auto& arm : node.elifs) {
                           out += indent + "elif " + format_expr(arm.guard) + ":\n";
                           write_block(out, arm.body, depth + 1);
                       }
                       if (node.else_) {
                           out += indent + "else:\n";
                           write_block(out, *node.else_, depth + 1);
                       }
                   },
                   [&](const Trigger& t) { out += indent + "trigger " + format_str_expr(t.value) + "\n"; },
                   [&](const Let& l) { out += indent + "let " + l.name + " = " + format_str_expr(l.value) + "\n"; },
               },
               s.node);
}

void write_block(std::string& out, const Block& block, int depth) {
    for (const auto& s : block) write_stmt(out, s, depth);
}

}  // namespace

std::string quote(std::string_view text) {
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    std::string s(buf, ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
}

std::string format_expr(const Expr& expr) {
    std::string out;
    write_expr(out, expr, 1);
    return out;
}

std::string format_str_expr(const StrExpr& expr) {
    return std::visit(overloaded{
                          [](const Literal& l) { return quote(l.text); },
                          [](const Var& v) { return v.name; },
                          [](const Choice& c) {
                              std::string out = "choice([";
                              for (std::size_t i = 0; i < c.options.size(); ++i) {
                                  if (i != 0) out += ", ";
                                  out += quote(c.options[i]);
                              }
                              return out + "])";
                          },
                      },
                      expr.node);
}

std::string format(const Program& program) {
    std::string out = "when scene:\n";
    write_block(out, program.body, 1);
    return out;
}

}  // namespace cprofile::dsl
