#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "pred.hpp"

namespace odecert {

// Verification conditions: context assumptions, bounded time binders and a
// goal formula. Binder variables occur in expressions as Param atoms; their
// names are fresh with respect to the declared problem names.

enum class BoundKind { NonNeg, Interval, AllReal };

struct Binder {
    std::string name;
    BoundKind kind = BoundKind::NonNeg;
    Expr lo, hi;  // Interval bounds; may reference outer binder names
    bool forall = true;
};

// Goal formulas extend quantifier-free predicates with bounded quantifiers
// (the "forall t >= 0. (forall tau in [0,t]. G) -> Q" shape).
enum class QKind { Leaf, Not, And, Or, Implies, Forall, Exists };

class QNode;
using QPred = std::shared_ptr<const QNode>;

class QNode {
public:
    QKind kind;
    Pred leaf;
    QPred a, b;
    Binder binder;  // Forall / Exists

    explicit QNode(QKind k) : kind(k) {}
};

inline QPred qleaf(Pred p) {
    auto n = std::make_shared<QNode>(QKind::Leaf);
    n->leaf = std::move(p);
    return n;
}
inline QPred qnot(QPred a) {
    auto n = std::make_shared<QNode>(QKind::Not);
    n->a = std::move(a);
    return n;
}
inline QPred qbin(QKind k, QPred a, QPred b) {
    auto n = std::make_shared<QNode>(k);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline QPred qand(QPred a, QPred b) { return qbin(QKind::And, std::move(a), std::move(b)); }
inline QPred qor(QPred a, QPred b) { return qbin(QKind::Or, std::move(a), std::move(b)); }
inline QPred qimplies(QPred a, QPred b) { return qbin(QKind::Implies, std::move(a), std::move(b)); }
inline QPred qquant(QKind k, Binder binder, QPred body) {
    auto n = std::make_shared<QNode>(k);
    n->binder = std::move(binder);
    n->a = std::move(body);
    return n;
}

inline bool is_qleaf_true(const QPred& q) { return q->kind == QKind::Leaf && is_true(q->leaf); }
inline bool is_qleaf_false(const QPred& q) { return q->kind == QKind::Leaf && is_false(q->leaf); }

/// Lifts a quantifier-free predicate into a QPred; returns nullptr for
/// formulas that contain quantifiers.
inline Pred qpred_to_pred(const QPred& q) {
    switch (q->kind) {
        case QKind::Leaf: return q->leaf;
        case QKind::Not: {
            Pred a = qpred_to_pred(q->a);
            return a ? pnot(a) : nullptr;
        }
        case QKind::And:
        case QKind::Or:
        case QKind::Implies: {
            Pred a = qpred_to_pred(q->a), b = qpred_to_pred(q->b);
            if (!a || !b) return nullptr;
            return pbin(q->kind == QKind::And   ? PredKind::And
                        : q->kind == QKind::Or  ? PredKind::Or
                                                : PredKind::Implies,
                        a, b);
        }
        default:
            return nullptr;
    }
}

inline QPred qsimplify(const QPred& q) {
    switch (q->kind) {
        case QKind::Leaf: return qleaf(simplify(q->leaf));
        case QKind::Not: {
            QPred a = qsimplify(q->a);
            if (is_qleaf_true(a)) return qleaf(pfalse());
            if (is_qleaf_false(a)) return qleaf(ptrue());
            return qnot(a);
        }
        case QKind::And: {
            QPred a = qsimplify(q->a), b = qsimplify(q->b);
            if (is_qleaf_false(a) || is_qleaf_false(b)) return qleaf(pfalse());
            if (is_qleaf_true(a)) return b;
            if (is_qleaf_true(b)) return a;
            return qand(a, b);
        }
        case QKind::Or: {
            QPred a = qsimplify(q->a), b = qsimplify(q->b);
            if (is_qleaf_true(a) || is_qleaf_true(b)) return qleaf(ptrue());
            if (is_qleaf_false(a)) return b;
            if (is_qleaf_false(b)) return a;
            return qor(a, b);
        }
        case QKind::Implies: {
            QPred a = qsimplify(q->a), b = qsimplify(q->b);
            if (is_qleaf_false(a) || is_qleaf_true(b)) return qleaf(ptrue());
            if (is_qleaf_true(a)) return b;
            return qimplies(a, b);
        }
        case QKind::Forall:
        case QKind::Exists: {
            QPred a = qsimplify(q->a);
            // constant bodies keep their value, but only over domains that
            // are certainly nonempty
            bool nonempty = q->binder.kind != BoundKind::Interval;
            if (q->binder.kind == BoundKind::Interval && q->binder.lo && q->binder.hi) {
                Expr lo = simplify(q->binder.lo), hi = simplify(q->binder.hi);
                nonempty = (is_num(lo) && is_num(hi) && lo->value <= hi->value) ||
                           expr_equal(lo, hi);
            }
            if ((is_qleaf_true(a) || is_qleaf_false(a)) && nonempty) return a;
            return qquant(q->kind, q->binder, a);
        }
    }
    return q;
}

/// Substitutes an expression for a binder name throughout a goal.
inline QPred qsubst_param(const QPred& q, const std::string& name, const Expr& v) {
    switch (q->kind) {
        case QKind::Leaf: return qleaf(subst_param(q->leaf, name, v));
        case QKind::Not: return qnot(qsubst_param(q->a, name, v));
        case QKind::And:
        case QKind::Or:
        case QKind::Implies:
            return qbin(q->kind, qsubst_param(q->a, name, v), qsubst_param(q->b, name, v));
        case QKind::Forall:
        case QKind::Exists: {
            Binder b = q->binder;
            if (b.name == name) return q;  // shadowed (fresh names make this moot)
            if (b.lo) b.lo = subst_param(b.lo, name, v);
            if (b.hi) b.hi = subst_param(b.hi, name, v);
            return qquant(q->kind, b, qsubst_param(q->a, name, v));
        }
    }
    return q;
}

inline void collect_free_vars(const QPred& q, FreeVars& out) {
    switch (q->kind) {
        case QKind::Leaf: collect_free_vars(q->leaf, out); return;
        case QKind::Not: collect_free_vars(q->a, out); return;
        case QKind::Forall:
        case QKind::Exists:
            if (q->binder.lo) collect_free_vars(q->binder.lo, out);
            if (q->binder.hi) collect_free_vars(q->binder.hi, out);
            collect_free_vars(q->a, out);
            return;
        default:
            collect_free_vars(q->a, out);
            collect_free_vars(q->b, out);
            return;
    }
}

namespace detail {

inline std::string binder_text(const Binder& b) {
    std::string s = b.name;
    switch (b.kind) {
        case BoundKind::NonNeg: s += " >= 0"; break;
        case BoundKind::Interval:
            s += " in [" + to_string(b.lo) + ", " + to_string(b.hi) + "]";
            break;
        case BoundKind::AllReal: break;
    }
    return s;
}

inline void print_qpred_rec(const QPred& q, std::string& out, int parent_prec) {
    auto paren = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    switch (q->kind) {
        case QKind::Leaf: {
            std::string s = to_string(q->leaf);
            if (parent_prec >= 4 &&
                (q->leaf->kind == PredKind::And || q->leaf->kind == PredKind::Or ||
                 q->leaf->kind == PredKind::Implies)) {
                out += "(" + s + ")";
            } else {
                out += s;
            }
            return;
        }
        case QKind::Not:
            paren(4, [&] {
                out += "!";
                print_qpred_rec(q->a, out, 5);
            });
            return;
        case QKind::And:
            paren(3, [&] {
                print_qpred_rec(q->a, out, 3);
                out += " & ";
                print_qpred_rec(q->b, out, 4);
            });
            return;
        case QKind::Or:
            paren(2, [&] {
                print_qpred_rec(q->a, out, 2);
                out += " | ";
                print_qpred_rec(q->b, out, 3);
            });
            return;
        case QKind::Implies:
            paren(1, [&] {
                print_qpred_rec(q->a, out, 2);
                out += " -> ";
                print_qpred_rec(q->b, out, 1);
            });
            return;
        case QKind::Forall:
        case QKind::Exists:
            paren(1, [&] {
                out += q->kind == QKind::Forall ? "forall " : "exists ";
                out += binder_text(q->binder);
                out += ". ";
                print_qpred_rec(q->a, out, 1);
            });
            return;
    }
}

}  // namespace detail

inline std::string to_string(const QPred& q) {
    std::string out;
    detail::print_qpred_rec(q, out, 0);
    return out;
}

// ---------------------------------------------------------------------------

struct VC {
    std::string label;
    std::vector<Pred> context;
    std::vector<Binder> binders;  // outermost universal binders, in order
    QPred goal;
};

inline nlohmann::json vc_to_json(const VC& vc) {
    nlohmann::json j;
    j["label"] = vc.label;
    j["context"] = nlohmann::json::array();
    for (const auto& p : vc.context) j["context"].push_back(to_string(p));
    j["binders"] = nlohmann::json::array();
    for (const auto& b : vc.binders) {
        nlohmann::json jb;
        jb["name"] = b.name;
        jb["kind"] = b.forall ? "forall" : "exists";
        switch (b.kind) {
            case BoundKind::NonNeg: jb["lo"] = "0"; break;
            case BoundKind::Interval:
                jb["lo"] = to_string(b.lo);
                jb["hi"] = to_string(b.hi);
                break;
            case BoundKind::AllReal: break;
        }
        j["binders"].push_back(jb);
    }
    j["goal"] = to_string(vc.goal);
    return j;
}

}  // namespace odecert
