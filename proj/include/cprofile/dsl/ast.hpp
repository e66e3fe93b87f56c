#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cprofile::dsl {

/// 1-based line/column (bytes). {0,0} marks a synthesized node.
struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;

    bool operator==(const SourcePos&) const = default;
};

/// Owning pointer with value semantics, used to close the recursion in Expr.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    const T& operator*() const { return *ptr_; }
    T& operator*() { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    T* operator->() { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

private:
    std::unique_ptr<T> ptr_;
};

struct Expr;

struct Check {
    std::string question;
    bool operator==(const Check&) const = default;
};

struct Chance {
    double p = 0.0;
    bool operator==(const Chance&) const = default;
};

struct Const {
    bool value = false;
    bool operator==(const Const&) const = default;
};

struct Not {
    Box<Expr> inner;
};

struct And {
    Box<Expr> left;
    Box<Expr> right;
};

struct Or {
    Box<Expr> left;
    Box<Expr> right;
};

/// Guard expression. Equality is structural and ignores source positions.
struct Expr {
    using Node = std::variant<Check, Chance, Const, Not, And, Or>;
    Node node;
    SourcePos pos{};

    friend bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }
};

inline bool operator==(const Not& a, const Not& b) { return a.inner == b.inner; }
inline bool operator==(const And& a, const And& b) { return a.left == b.left && a.right == b.right; }
inline bool operator==(const Or& a, const Or& b) { return a.left == b.left && a.right == b.right; }

struct Literal {
    std::string text;
    bool operator==(const Literal&) const = default;
};

struct Var {
    std::string name;
    bool operator==(const Var&) const = default;
};

struct Choice {
    std::vector<std::string> options;
    bool operator==(const Choice&) const = default;
};

struct StrExpr {
    using Node = std::variant<Literal, Var, Choice>;
    Node node;
    SourcePos pos{};

    friend bool operator==(const StrExpr& a, const StrExpr& b) { return a.node == b.node; }
};

struct Stmt;
using Block = std::vector<Stmt>;

struct ElifArm {
    Expr guard;
    Block body;
    SourcePos pos{};
};

struct If {
    Expr guard;
    Block then;
    std::vector<ElifArm> elifs;
    std::optional<Block> else_;
    SourcePos else_pos{};
};

struct Trigger {
    StrExpr value;
    bool operator==(const Trigger&) const = default;
};

struct Let {
    std::string name;
    StrExpr value;
    bool operator==(const Let&) const = default;
};

struct Stmt {
    using Node = std::variant<If, Trigger, Let>;
    Node node;
    SourcePos pos{};

    friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

inline bool operator==(const ElifArm& a, const ElifArm& b) { return a.guard == b.guard && a.body == b.body; }
inline bool operator==(const If& a, const If& b) {
    return a.guard == b.guard && a.then == b.then && a.elifs == b.elifs && a.else_ == b.else_;
}

/// One codified profile segment.
struct Program {
    std::string segment_id;
    Block body;
    std::string source_text;
};

/// Structural equality: segment id and body, ignoring positions and source text.
inline bool structurally_equal(const Program& a, const Program& b) {
    return a.segment_id == b.segment_id && a.body == b.body;
}

// Convenience constructors, mostly for tests and programmatic codification.
inline Expr make_check(std::string question) { return Expr{Check{std::move(question)}}; }
inline Expr make_chance(double p) { return Expr{Chance{p}}; }
inline Expr make_const(bool v) { return Expr{Const{v}}; }
inline Expr make_not(Expr inner) { return Expr{Not{std::move(inner)}}; }
inline Expr make_and(Expr l, Expr r) { return Expr{And{std::move(l), std::move(r)}}; }
inline Expr make_or(Expr l, Expr r) { return Expr{Or{std::move(l), std::move(r)}}; }

inline Stmt make_trigger(std::string text) { return Stmt{Trigger{StrExpr{Literal{std::move(text)}}}}; }
inline Stmt make_trigger_var(std::string name) { return Stmt{Trigger{StrExpr{Var{std::move(name)}}}}; }
inline Stmt make_trigger_choice(std::vector<std::string> options) {
    return Stmt{Trigger{StrExpr{Choice{std::move(options)}}}};
}
inline Stmt make_let(std::string name, StrExpr value) { return Stmt{Let{std::move(name), std::move(value)}}; }
inline Stmt make_if(Expr guard, Block then, std::vector<ElifArm> elifs = {},
                    std::optional<Block> else_ = std::nullopt) {
    return Stmt{If{std::move(guard), std::move(then), std::move(elifs), std::move(else_), {}}};
}

}  // namespace cprofile::dsl
