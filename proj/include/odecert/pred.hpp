#pragma once

#include <map>
#include <memory>
#include <string>

#include "expr.hpp"
#include "simplify.hpp"

namespace odecert {

// Quantifier-free boolean formulas over expressions. Quantifiers live only
// in verification conditions.

enum class CmpOp { Eq, Le, Lt, Ge, Gt, Ne };

inline const char* cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Le: return "<=";
        case CmpOp::Lt: return "<";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ne: return "!=";
    }
    return "?";
}

enum class PredKind { True, False, Cmp, Not, And, Or, Implies };

class PredNode;
using Pred = std::shared_ptr<const PredNode>;

class PredNode {
public:
    PredKind kind;
    CmpOp op = CmpOp::Eq;
    Expr lhs, rhs;  // Cmp
    Pred a, b;      // children

    explicit PredNode(PredKind k) : kind(k) {}
};

inline Pred ptrue() {
    static const Pred p = std::make_shared<PredNode>(PredKind::True);
    return p;
}
inline Pred pfalse() {
    static const Pred p = std::make_shared<PredNode>(PredKind::False);
    return p;
}
inline Pred cmp(CmpOp op, Expr lhs, Expr rhs) {
    auto p = std::make_shared<PredNode>(PredKind::Cmp);
    p->op = op;
    p->lhs = std::move(lhs);
    p->rhs = std::move(rhs);
    return p;
}
inline Pred pnot(Pred a) {
    auto p = std::make_shared<PredNode>(PredKind::Not);
    p->a = std::move(a);
    return p;
}
inline Pred pbin(PredKind k, Pred a, Pred b) {
    auto p = std::make_shared<PredNode>(k);
    p->a = std::move(a);
    p->b = std::move(b);
    return p;
}
inline Pred pand(Pred a, Pred b) { return pbin(PredKind::And, std::move(a), std::move(b)); }
inline Pred por(Pred a, Pred b) { return pbin(PredKind::Or, std::move(a), std::move(b)); }
inline Pred pimplies(Pred a, Pred b) { return pbin(PredKind::Implies, std::move(a), std::move(b)); }

inline bool is_true(const Pred& p) { return p->kind == PredKind::True; }
inline bool is_false(const Pred& p) { return p->kind == PredKind::False; }

inline int pred_compare(const Pred& x, const Pred& y) {
    if (x.get() == y.get()) return 0;
    if (x->kind != y->kind) return static_cast<int>(x->kind) < static_cast<int>(y->kind) ? -1 : 1;
    switch (x->kind) {
        case PredKind::True:
        case PredKind::False:
            return 0;
        case PredKind::Cmp: {
            if (x->op != y->op) return static_cast<int>(x->op) < static_cast<int>(y->op) ? -1 : 1;
            int c = expr_compare(x->lhs, y->lhs);
            if (c != 0) return c;
            return expr_compare(x->rhs, y->rhs);
        }
        case PredKind::Not:
            return pred_compare(x->a, y->a);
        default: {
            int c = pred_compare(x->a, y->a);
            if (c != 0) return c;
            return pred_compare(x->b, y->b);
        }
    }
}

inline bool pred_equal(const Pred& x, const Pred& y) { return pred_compare(x, y) == 0; }

inline void collect_free_vars(const Pred& p, FreeVars& out) {
    switch (p->kind) {
        case PredKind::True:
        case PredKind::False:
            return;
        case PredKind::Cmp:
            collect_free_vars(p->lhs, out);
            collect_free_vars(p->rhs, out);
            return;
        case PredKind::Not:
            collect_free_vars(p->a, out);
            return;
        default:
            collect_free_vars(p->a, out);
            collect_free_vars(p->b, out);
    }
}

inline FreeVars free_vars(const Pred& p) {
    FreeVars fv;
    collect_free_vars(p, fv);
    return fv;
}

inline Pred substitute(const Pred& p, const std::map<std::string, Expr>& sigma) {
    switch (p->kind) {
        case PredKind::True:
        case PredKind::False:
            return p;
        case PredKind::Cmp:
            return cmp(p->op, substitute(p->lhs, sigma), substitute(p->rhs, sigma));
        case PredKind::Not:
            return pnot(substitute(p->a, sigma));
        default:
            return pbin(p->kind, substitute(p->a, sigma), substitute(p->b, sigma));
    }
}

inline Pred subst_param(const Pred& p, const std::string& name, const Expr& v) {
    switch (p->kind) {
        case PredKind::True:
        case PredKind::False:
            return p;
        case PredKind::Cmp:
            return cmp(p->op, subst_param(p->lhs, name, v), subst_param(p->rhs, name, v));
        case PredKind::Not:
            return pnot(subst_param(p->a, name, v));
        default:
            return pbin(p->kind, subst_param(p->a, name, v), subst_param(p->b, name, v));
    }
}

inline bool eval_pred(const Pred& p, const DEnv& env) {
    switch (p->kind) {
        case PredKind::True: return true;
        case PredKind::False: return false;
        case PredKind::Cmp: {
            double l = eval_double(p->lhs, env), r = eval_double(p->rhs, env);
            switch (p->op) {
                case CmpOp::Eq: return l == r;
                case CmpOp::Le: return l <= r;
                case CmpOp::Lt: return l < r;
                case CmpOp::Ge: return l >= r;
                case CmpOp::Gt: return l > r;
                case CmpOp::Ne: return l != r;
            }
            return false;
        }
        case PredKind::Not: return !eval_pred(p->a, env);
        case PredKind::And: return eval_pred(p->a, env) && eval_pred(p->b, env);
        case PredKind::Or: return eval_pred(p->a, env) || eval_pred(p->b, env);
        case PredKind::Implies: return !eval_pred(p->a, env) || eval_pred(p->b, env);
    }
    return false;
}

/// Simplifies the expressions inside a predicate and folds boolean units.
inline Pred simplify(const Pred& p) {
    switch (p->kind) {
        case PredKind::True:
        case PredKind::False:
            return p;
        case PredKind::Cmp: {
            Expr l = simplify(p->lhs), r = simplify(p->rhs);
            if (is_num(l) && is_num(r)) {
                bool v;
                switch (p->op) {
                    case CmpOp::Eq: v = l->value == r->value; break;
                    case CmpOp::Le: v = l->value <= r->value; break;
                    case CmpOp::Lt: v = l->value < r->value; break;
                    case CmpOp::Ge: v = l->value >= r->value; break;
                    case CmpOp::Gt: v = l->value > r->value; break;
                    default: v = l->value != r->value; break;
                }
                return v ? ptrue() : pfalse();
            }
            return cmp(p->op, l, r);
        }
        case PredKind::Not: {
            Pred a = simplify(p->a);
            if (is_true(a)) return pfalse();
            if (is_false(a)) return ptrue();
            return pnot(a);
        }
        case PredKind::And: {
            Pred a = simplify(p->a), b = simplify(p->b);
            if (is_false(a) || is_false(b)) return pfalse();
            if (is_true(a)) return b;
            if (is_true(b)) return a;
            return pand(a, b);
        }
        case PredKind::Or: {
            Pred a = simplify(p->a), b = simplify(p->b);
            if (is_true(a) || is_true(b)) return ptrue();
            if (is_false(a)) return b;
            if (is_false(b)) return a;
            return por(a, b);
        }
        case PredKind::Implies: {
            Pred a = simplify(p->a), b = simplify(p->b);
            if (is_false(a) || is_true(b)) return ptrue();
            if (is_true(a)) return b;
            return pimplies(a, b);
        }
    }
    return p;
}

// Canonical text: precedence 1 ->, 2 |, 3 &, 4 !, atoms/comparisons.
namespace detail {

inline void print_pred_rec(const Pred& p, std::string& out, int parent_prec) {
    auto paren = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    switch (p->kind) {
        case PredKind::True: out += "true"; return;
        case PredKind::False: out += "false"; return;
        case PredKind::Cmp:
            out += to_string(p->lhs);
            out += " ";
            out += cmp_op_text(p->op);
            out += " ";
            out += to_string(p->rhs);
            return;
        case PredKind::Not:
            paren(4, [&] {
                out += "!";
                print_pred_rec(p->a, out, 5);
            });
            return;
        case PredKind::And:
            paren(3, [&] {
                print_pred_rec(p->a, out, 3);
                out += " & ";
                print_pred_rec(p->b, out, 4);
            });
            return;
        case PredKind::Or:
            paren(2, [&] {
                print_pred_rec(p->a, out, 2);
                out += " | ";
                print_pred_rec(p->b, out, 3);
            });
            return;
        case PredKind::Implies:
            paren(1, [&] {
                print_pred_rec(p->a, out, 2);
                out += " -> ";
                print_pred_rec(p->b, out, 1);
            });
            return;
    }
}

}  // namespace detail

inline std::string to_string(const Pred& p) {
    std::string out;
    detail::print_pred_rec(p, out, 0);
    return out;
}

}  // namespace odecert
