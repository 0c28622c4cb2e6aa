#pragma once

#include <set>
#include <string>

#include "vc.hpp"

namespace odecert {

// SMT-LIB 2 export (logic NRA). The goal is negated and asserted, so unsat
// means proved. Transcendental atoms are not expressible and are rejected.

namespace detail {

inline bool expr_polynomial(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Tan:
        case ExprKind::Exp:
        case ExprKind::Sqrt:
        case ExprKind::Ln:
        case ExprKind::NamedConst:
            return false;
        default:
            if (e->a && !expr_polynomial(e->a)) return false;
            if (e->b && !expr_polynomial(e->b)) return false;
            return true;
    }
}

inline bool pred_polynomial(const Pred& p) {
    switch (p->kind) {
        case PredKind::True:
        case PredKind::False:
            return true;
        case PredKind::Cmp: return expr_polynomial(p->lhs) && expr_polynomial(p->rhs);
        case PredKind::Not: return pred_polynomial(p->a);
        default: return pred_polynomial(p->a) && pred_polynomial(p->b);
    }
}

inline bool qpred_polynomial(const QPred& q) {
    switch (q->kind) {
        case QKind::Leaf: return pred_polynomial(q->leaf);
        case QKind::Not: return qpred_polynomial(q->a);
        case QKind::Forall:
        case QKind::Exists: {
            if (q->binder.lo && !expr_polynomial(q->binder.lo)) return false;
            if (q->binder.hi && !expr_polynomial(q->binder.hi)) return false;
            return qpred_polynomial(q->a);
        }
        default: return qpred_polynomial(q->a) && qpred_polynomial(q->b);
    }
}

inline std::string smt_num(const Rat& r) {
    BigInt n = numerator(r), d = denominator(r);
    bool negative = n < 0;
    if (negative) n = -n;
    std::string num = n.str() + ".0";
    std::string out = d == 1 ? num : "(/ " + num + " " + d.str() + ".0)";
    if (negative) out = "(- " + out + ")";
    return out;
}

inline std::string smt_expr(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Num: return smt_num(e->value);
        case ExprKind::Param:
        case ExprKind::StateVar:
            return e->name;
        case ExprKind::TimeVar: return "t";
        case ExprKind::Neg: return "(- " + smt_expr(e->a) + ")";
        case ExprKind::Add: return "(+ " + smt_expr(e->a) + " " + smt_expr(e->b) + ")";
        case ExprKind::Sub: return "(- " + smt_expr(e->a) + " " + smt_expr(e->b) + ")";
        case ExprKind::Mul: return "(* " + smt_expr(e->a) + " " + smt_expr(e->b) + ")";
        case ExprKind::Div: return "(/ " + smt_expr(e->a) + " " + smt_expr(e->b) + ")";
        case ExprKind::Pow: {
            if (e->exponent == 0) return "1.0";
            std::string base = smt_expr(e->a);
            if (e->exponent == 1) return base;
            std::string out = "(*";
            for (int i = 0; i < e->exponent; ++i) out += " " + base;
            return out + ")";
        }
        default:
            throw Error(ErrKind::UnsupportedAtom, "transcendental in SMT export");
    }
}

inline std::string smt_pred(const Pred& p) {
    switch (p->kind) {
        case PredKind::True: return "true";
        case PredKind::False: return "false";
        case PredKind::Cmp: {
            std::string l = smt_expr(p->lhs), r = smt_expr(p->rhs);
            switch (p->op) {
                case CmpOp::Eq: return "(= " + l + " " + r + ")";
                case CmpOp::Le: return "(<= " + l + " " + r + ")";
                case CmpOp::Lt: return "(< " + l + " " + r + ")";
                case CmpOp::Ge: return "(>= " + l + " " + r + ")";
                case CmpOp::Gt: return "(> " + l + " " + r + ")";
                case CmpOp::Ne: return "(not (= " + l + " " + r + "))";
            }
            return "false";
        }
        case PredKind::Not: return "(not " + smt_pred(p->a) + ")";
        case PredKind::And: return "(and " + smt_pred(p->a) + " " + smt_pred(p->b) + ")";
        case PredKind::Or: return "(or " + smt_pred(p->a) + " " + smt_pred(p->b) + ")";
        case PredKind::Implies: return "(=> " + smt_pred(p->a) + " " + smt_pred(p->b) + ")";
    }
    return "false";
}

inline std::string smt_binder_bound(const Binder& b) {
    switch (b.kind) {
        case BoundKind::NonNeg: return "(>= " + b.name + " 0.0)";
        case BoundKind::Interval:
            return "(and (>= " + b.name + " " + smt_expr(b.lo) + ") (<= " + b.name + " " +
                   smt_expr(b.hi) + "))";
        case BoundKind::AllReal: return "true";
    }
    return "true";
}

inline std::string smt_qpred(const QPred& q) {
    switch (q->kind) {
        case QKind::Leaf: return smt_pred(q->leaf);
        case QKind::Not: return "(not " + smt_qpred(q->a) + ")";
        case QKind::And: return "(and " + smt_qpred(q->a) + " " + smt_qpred(q->b) + ")";
        case QKind::Or: return "(or " + smt_qpred(q->a) + " " + smt_qpred(q->b) + ")";
        case QKind::Implies: return "(=> " + smt_qpred(q->a) + " " + smt_qpred(q->b) + ")";
        case QKind::Forall:
            return "(forall ((" + q->binder.name + " Real)) (=> " + smt_binder_bound(q->binder) +
                   " " + smt_qpred(q->a) + "))";
        case QKind::Exists:
            return "(exists ((" + q->binder.name + " Real)) (and " + smt_binder_bound(q->binder) +
                   " " + smt_qpred(q->a) + "))";
    }
    return "false";
}

}  // namespace detail

inline bool vc_polynomial(const VC& vc) {
    for (const auto& c : vc.context)
        if (!detail::pred_polynomial(c)) return false;
    for (const auto& b : vc.binders) {
        if (b.lo && !detail::expr_polynomial(b.lo)) return false;
        if (b.hi && !detail::expr_polynomial(b.hi)) return false;
    }
    return detail::qpred_polynomial(vc.goal);
}

/// Produces an SMT-LIB 2 script whose unsatisfiability proves the condition:
/// context and binder bounds asserted, goal negated.
inline std::string export_smtlib(const VC& vc) {
    if (!vc_polynomial(vc))
        throw Error(ErrKind::UnsupportedAtom, "transcendental atom in '" + vc.label + "'");

    FreeVars fv;
    for (const auto& c : vc.context) collect_free_vars(c, fv);
    collect_free_vars(vc.goal, fv);
    bool uses_time = fv.uses_time;
    std::set<std::string> names;
    for (const auto& v : fv.state) names.insert(v);
    for (const auto& v : fv.params) names.insert(v);
    for (const auto& b : vc.binders) {
        names.insert(b.name);
        if (b.lo) {
            auto bf = free_vars(b.lo);
            for (const auto& v : bf.params) names.insert(v);
            for (const auto& v : bf.state) names.insert(v);
        }
    }

    std::string out;
    out += "; " + vc.label + "\n";
    out += "(set-logic NRA)\n";
    for (const auto& n : names) out += "(declare-const " + n + " Real)\n";
    if (uses_time && !names.count("t")) out += "(declare-const t Real)\n";
    for (const auto& c : vc.context) out += "(assert " + detail::smt_pred(c) + ")\n";
    for (const auto& b : vc.binders) out += "(assert " + detail::smt_binder_bound(b) + ")\n";
    out += "(assert (not " + detail::smt_qpred(vc.goal) + "))\n";
    out += "(check-sat)\n";
    return out;
}

}  // namespace odecert
