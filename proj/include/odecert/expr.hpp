#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace odecert {

// Symbolic arithmetic expressions over a scalar store. Values are immutable
// trees shared by pointer; every operation below is pure.

enum class ExprKind {
    Num,         // exact rational literal
    NamedConst,  // opaque numeric constant (pi, ...)
    Param,       // problem constant
    StateVar,    // mutable store variable
    TimeVar,     // the independent variable of the system
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // literal nonnegative integer exponent
    Sin,
    Cos,
    Tan,
    Exp,
    Sqrt,
    Ln,
};

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
public:
    ExprKind kind;
    Rat value;         // Num
    std::string name;  // NamedConst / Param / StateVar
    int exponent = 0;  // Pow
    Expr a, b;         // children (a for unary, a/b for binary)

    explicit ExprNode(ExprKind k) : kind(k) {}
};

inline Expr num(Rat r) {
    auto n = std::make_shared<ExprNode>(ExprKind::Num);
    n->value = std::move(r);
    return n;
}
inline Expr num(long long v) { return num(Rat(v)); }
inline Expr num(long long p, long long q) { return num(rat(p, q)); }

inline Expr named_const(std::string name) {
    auto n = std::make_shared<ExprNode>(ExprKind::NamedConst);
    n->name = std::move(name);
    return n;
}
inline Expr param(std::string name) {
    auto n = std::make_shared<ExprNode>(ExprKind::Param);
    n->name = std::move(name);
    return n;
}
inline Expr state_var(std::string name) {
    auto n = std::make_shared<ExprNode>(ExprKind::StateVar);
    n->name = std::move(name);
    return n;
}
inline Expr time_var() {
    static const Expr t = std::make_shared<ExprNode>(ExprKind::TimeVar);
    return t;
}

inline Expr unary(ExprKind k, Expr e) {
    auto n = std::make_shared<ExprNode>(k);
    n->a = std::move(e);
    return n;
}
inline Expr binary(ExprKind k, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>(k);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline Expr neg(Expr e) { return unary(ExprKind::Neg, std::move(e)); }
inline Expr add(Expr a, Expr b) { return binary(ExprKind::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return binary(ExprKind::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return binary(ExprKind::Mul, std::move(a), std::move(b)); }
inline Expr div(Expr a, Expr b) { return binary(ExprKind::Div, std::move(a), std::move(b)); }
inline Expr pow(Expr base, int n) {
    if (n < 0) throw Error(ErrKind::UnsupportedNode, "Pow exponent must be nonnegative");
    auto e = std::make_shared<ExprNode>(ExprKind::Pow);
    e->a = std::move(base);
    e->exponent = n;
    return e;
}
inline Expr sin(Expr e) { return unary(ExprKind::Sin, std::move(e)); }
inline Expr cos(Expr e) { return unary(ExprKind::Cos, std::move(e)); }
inline Expr tan(Expr e) { return unary(ExprKind::Tan, std::move(e)); }
inline Expr exp(Expr e) { return unary(ExprKind::Exp, std::move(e)); }
inline Expr sqrt(Expr e) { return unary(ExprKind::Sqrt, std::move(e)); }
inline Expr ln(Expr e) { return unary(ExprKind::Ln, std::move(e)); }

inline bool is_num(const Expr& e) { return e->kind == ExprKind::Num; }
inline bool is_num(const Expr& e, const Rat& v) { return is_num(e) && e->value == v; }
inline bool is_zero(const Expr& e) { return is_num(e) && e->value == 0; }
inline bool is_one(const Expr& e) { return is_num(e) && e->value == 1; }

inline bool is_leaf(ExprKind k) {
    switch (k) {
        case ExprKind::Num:
        case ExprKind::NamedConst:
        case ExprKind::Param:
        case ExprKind::StateVar:
        case ExprKind::TimeVar:
            return true;
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------
// Structural order and equality

inline int expr_kind_rank(ExprKind k) {
    switch (k) {
        case ExprKind::Num: return 0;
        case ExprKind::NamedConst: return 1;
        case ExprKind::Param: return 2;
        case ExprKind::StateVar: return 3;
        case ExprKind::TimeVar: return 4;
        case ExprKind::Neg: return 5;
        case ExprKind::Add: return 6;
        case ExprKind::Sub: return 7;
        case ExprKind::Mul: return 8;
        case ExprKind::Div: return 9;
        case ExprKind::Pow: return 10;
        case ExprKind::Sin: return 11;
        case ExprKind::Cos: return 12;
        case ExprKind::Tan: return 13;
        case ExprKind::Exp: return 14;
        case ExprKind::Sqrt: return 15;
        case ExprKind::Ln: return 16;
    }
    return 99;
}

inline int expr_compare(const Expr& x, const Expr& y) {
    if (x.get() == y.get()) return 0;
    int rx = expr_kind_rank(x->kind), ry = expr_kind_rank(y->kind);
    if (rx != ry) return rx < ry ? -1 : 1;
    switch (x->kind) {
        case ExprKind::Num:
            if (x->value != y->value) return x->value < y->value ? -1 : 1;
            return 0;
        case ExprKind::NamedConst:
        case ExprKind::Param:
        case ExprKind::StateVar:
            return x->name.compare(y->name) < 0 ? -1 : (x->name == y->name ? 0 : 1);
        case ExprKind::TimeVar:
            return 0;
        case ExprKind::Pow: {
            int c = expr_compare(x->a, y->a);
            if (c != 0) return c;
            if (x->exponent != y->exponent) return x->exponent < y->exponent ? -1 : 1;
            return 0;
        }
        default: {
            int c = expr_compare(x->a, y->a);
            if (c != 0) return c;
            if (!x->b && !y->b) return 0;
            if (!x->b) return -1;
            if (!y->b) return 1;
            return expr_compare(x->b, y->b);
        }
    }
}

inline bool expr_equal(const Expr& x, const Expr& y) { return expr_compare(x, y) == 0; }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return expr_compare(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Free variables

struct FreeVars {
    std::set<std::string> state;
    std::set<std::string> params;
    std::set<std::string> consts;
    bool uses_time = false;
};

inline void collect_free_vars(const Expr& e, FreeVars& out) {
    switch (e->kind) {
        case ExprKind::Num: return;
        case ExprKind::NamedConst: out.consts.insert(e->name); return;
        case ExprKind::Param: out.params.insert(e->name); return;
        case ExprKind::StateVar: out.state.insert(e->name); return;
        case ExprKind::TimeVar: out.uses_time = true; return;
        default:
            if (e->a) collect_free_vars(e->a, out);
            if (e->b) collect_free_vars(e->b, out);
    }
}

inline FreeVars free_vars(const Expr& e) {
    FreeVars fv;
    collect_free_vars(e, fv);
    return fv;
}

inline bool mentions_state(const Expr& e, const std::string& name) {
    if (e->kind == ExprKind::StateVar) return e->name == name;
    if (e->a && mentions_state(e->a, name)) return true;
    if (e->b && mentions_state(e->b, name)) return true;
    return false;
}

inline bool mentions_time(const Expr& e) {
    if (e->kind == ExprKind::TimeVar) return true;
    if (e->a && mentions_time(e->a)) return true;
    if (e->b && mentions_time(e->b)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Substitution (state variables only; simultaneous, capture-free)

inline Expr rebuild(const Expr& e, Expr a, Expr b) {
    if (a.get() == e->a.get() && b.get() == e->b.get()) return e;
    auto n = std::make_shared<ExprNode>(e->kind);
    n->value = e->value;
    n->name = e->name;
    n->exponent = e->exponent;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& sigma) {
    switch (e->kind) {
        case ExprKind::StateVar: {
            auto it = sigma.find(e->name);
            return it == sigma.end() ? e : it->second;
        }
        case ExprKind::Num:
        case ExprKind::NamedConst:
        case ExprKind::Param:
        case ExprKind::TimeVar:
            return e;
        default:
            return rebuild(e, e->a ? substitute(e->a, sigma) : nullptr,
                           e->b ? substitute(e->b, sigma) : nullptr);
    }
}

/// Replaces every TimeVar occurrence with the given expression.
inline Expr subst_time(const Expr& e, const Expr& t) {
    if (e->kind == ExprKind::TimeVar) return t;
    if (is_leaf(e->kind)) return e;
    return rebuild(e, e->a ? subst_time(e->a, t) : nullptr, e->b ? subst_time(e->b, t) : nullptr);
}

/// Replaces Param occurrences by name (used for binder instantiation).
inline Expr subst_param(const Expr& e, const std::string& name, const Expr& v) {
    if (e->kind == ExprKind::Param && e->name == name) return v;
    if (is_leaf(e->kind)) return e;
    return rebuild(e, e->a ? subst_param(e->a, name, v) : nullptr,
                   e->b ? subst_param(e->b, name, v) : nullptr);
}

// ---------------------------------------------------------------------------
// Numeric evaluation

struct Env {
    std::map<std::string, Rat> vars;  // state and parameter values by name
    std::optional<Rat> time;

    void set(const std::string& name, Rat v) { vars[name] = std::move(v); }
};

/// Exact evaluation. Transcendental functions and named constants have no
/// exact value and are rejected.
inline Rat eval_exact(const Expr& e, const Env& env) {
    switch (e->kind) {
        case ExprKind::Num: return e->value;
        case ExprKind::NamedConst:
            throw Error(ErrKind::DomainError, "named constant '" + e->name + "' in exact mode");
        case ExprKind::Param:
        case ExprKind::StateVar: {
            auto it = env.vars.find(e->name);
            if (it == env.vars.end()) throw Error(ErrKind::UnboundVariable, e->name);
            return it->second;
        }
        case ExprKind::TimeVar:
            if (!env.time) throw Error(ErrKind::UnboundVariable, "t");
            return *env.time;
        case ExprKind::Neg: return -eval_exact(e->a, env);
        case ExprKind::Add: return eval_exact(e->a, env) + eval_exact(e->b, env);
        case ExprKind::Sub: return eval_exact(e->a, env) - eval_exact(e->b, env);
        case ExprKind::Mul: return eval_exact(e->a, env) * eval_exact(e->b, env);
        case ExprKind::Div: {
            Rat d = eval_exact(e->b, env);
            if (d == 0) throw Error(ErrKind::DivisionByZero, "division by zero");
            return eval_exact(e->a, env) / d;
        }
        case ExprKind::Pow: return rat_pow(eval_exact(e->a, env), e->exponent);
        default:
            throw Error(ErrKind::DomainError, "transcendental function in exact mode");
    }
}

struct DEnv {
    std::map<std::string, double> vars;
    std::optional<double> time;

    void set(const std::string& name, double v) { vars[name] = v; }

    static DEnv from(const Env& env) {
        DEnv d;
        for (const auto& [k, v] : env.vars) d.vars[k] = to_double(v);
        if (env.time) d.time = to_double(*env.time);
        return d;
    }
};

inline double eval_double(const Expr& e, const DEnv& env) {
    switch (e->kind) {
        case ExprKind::Num: return to_double(e->value);
        case ExprKind::NamedConst:
            if (e->name == "pi") return M_PI;
            if (e->name == "euler") return M_E;
            throw Error(ErrKind::UnboundVariable, "named constant '" + e->name + "'");
        case ExprKind::Param:
        case ExprKind::StateVar: {
            auto it = env.vars.find(e->name);
            if (it == env.vars.end()) throw Error(ErrKind::UnboundVariable, e->name);
            return it->second;
        }
        case ExprKind::TimeVar:
            if (!env.time) throw Error(ErrKind::UnboundVariable, "t");
            return *env.time;
        case ExprKind::Neg: return -eval_double(e->a, env);
        case ExprKind::Add: return eval_double(e->a, env) + eval_double(e->b, env);
        case ExprKind::Sub: return eval_double(e->a, env) - eval_double(e->b, env);
        case ExprKind::Mul: return eval_double(e->a, env) * eval_double(e->b, env);
        case ExprKind::Div: {
            double d = eval_double(e->b, env);
            if (d == 0.0) throw Error(ErrKind::DivisionByZero, "division by zero");
            return eval_double(e->a, env) / d;
        }
        case ExprKind::Pow: return std::pow(eval_double(e->a, env), e->exponent);
        case ExprKind::Sin: return std::sin(eval_double(e->a, env));
        case ExprKind::Cos: return std::cos(eval_double(e->a, env));
        case ExprKind::Tan: {
            double v = eval_double(e->a, env);
            return std::tan(v);
        }
        case ExprKind::Exp: return std::exp(eval_double(e->a, env));
        case ExprKind::Sqrt: {
            double v = eval_double(e->a, env);
            if (v < 0) throw Error(ErrKind::DomainError, "sqrt of negative value");
            return std::sqrt(v);
        }
        case ExprKind::Ln: {
            double v = eval_double(e->a, env);
            if (v <= 0) throw Error(ErrKind::DomainError, "ln of nonpositive value");
            return std::log(v);
        }
    }
    throw Error(ErrKind::Internal, "eval_double: bad node");
}

// ---------------------------------------------------------------------------
// Canonical text rendering: infix with `^` for Pow, `sin(e)` application,
// rationals as p/q. Round-trips through the DSL expression parser.

namespace detail {

// Printing precedence, matched exactly by the DSL expression parser:
//   1 add/sub and unary minus, 2 mul/div, 4 pow, 5 atoms.
// Unary minus parses below products (-a*b is -(a*b)), so simplified
// negative terms round-trip without parentheses.
inline void print_expr_rec(const Expr& e, std::string& out, int parent_prec, bool dollars) {
    auto paren = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    switch (e->kind) {
        case ExprKind::Num: {
            // p/q literals bind like division, negatives like unary minus
            int prec = 5;
            if (!is_integer(e->value)) prec = 2;
            if (e->value < 0) prec = 1;
            paren(prec, [&] { out += rat_to_string(e->value); });
            return;
        }
        case ExprKind::NamedConst: out += e->name; return;
        case ExprKind::Param: out += e->name; return;
        case ExprKind::StateVar:
            if (dollars) out += "$";
            out += e->name;
            return;
        case ExprKind::TimeVar: out += "t"; return;
        case ExprKind::Neg:
            paren(1, [&] {
                out += "-";
                print_expr_rec(e->a, out, 2, dollars);
            });
            return;
        case ExprKind::Add:
            paren(1, [&] {
                print_expr_rec(e->a, out, 1, dollars);
                out += " + ";
                print_expr_rec(e->b, out, 2, dollars);
            });
            return;
        case ExprKind::Sub:
            paren(1, [&] {
                print_expr_rec(e->a, out, 1, dollars);
                out += " - ";
                print_expr_rec(e->b, out, 2, dollars);
            });
            return;
        case ExprKind::Mul:
            paren(2, [&] {
                print_expr_rec(e->a, out, 2, dollars);
                out += "*";
                print_expr_rec(e->b, out, 3, dollars);
            });
            return;
        case ExprKind::Div:
            paren(2, [&] {
                print_expr_rec(e->a, out, 2, dollars);
                out += "/";
                print_expr_rec(e->b, out, 3, dollars);
            });
            return;
        case ExprKind::Pow:
            paren(4, [&] {
                print_expr_rec(e->a, out, 5, dollars);
                out += "^";
                out += std::to_string(e->exponent);
            });
            return;
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Tan:
        case ExprKind::Exp:
        case ExprKind::Sqrt:
        case ExprKind::Ln: {
            switch (e->kind) {
                case ExprKind::Sin: out += "sin"; break;
                case ExprKind::Cos: out += "cos"; break;
                case ExprKind::Tan: out += "tan"; break;
                case ExprKind::Exp: out += "exp"; break;
                case ExprKind::Sqrt: out += "sqrt"; break;
                default: out += "ln"; break;
            }
            out += "(";
            print_expr_rec(e->a, out, 0, dollars);
            out += ")";
            return;
        }
    }
}

}  // namespace detail

inline std::string to_string(const Expr& e, bool dollars = false) {
    std::string out;
    detail::print_expr_rec(e, out, 0, dollars);
    return out;
}

}  // namespace odecert
