#pragma once

#include <string>
#include <vector>

#include "hprog.hpp"
#include "poly.hpp"
#include "vc.hpp"

namespace odecert {

// Symbolic differentiation engines: time derivatives of solution candidates,
// framed Lie derivatives along a vector field, differential induction and the
// ghost/Darboux transformations.

enum class ProvisoOrigin { SqrtPositive, NonzeroDenominator, LnPositive, TanDefined };

struct Proviso {
    Pred condition;
    ProvisoOrigin origin;
    std::string location;  // subterm path, e.g. "a.b"

    /// True when the condition closes by rational-constant evaluation alone
    /// (e.g. the denominator 6 != 0).
    bool trivially_true() const {
        Pred s = simplify(condition);
        return is_true(s);
    }
};

namespace detail {

struct DerivCtx {
    std::vector<Proviso>* provisos = nullptr;
    std::string path;

    void add(Pred cond, ProvisoOrigin origin) const {
        if (provisos) provisos->push_back({std::move(cond), origin, path});
    }

    DerivCtx child(const char* step) const {
        DerivCtx c = *this;
        c.path = path.empty() ? step : path + "." + step;
        return c;
    }
};

// Shared derivative chain rules. `d` maps a subterm to its derivative.
template <typename F>
Expr derive_node(const Expr& e, const DerivCtx& ctx, F&& d) {
    switch (e->kind) {
        case ExprKind::Neg: return neg(d(e->a, ctx.child("a")));
        case ExprKind::Add: return add(d(e->a, ctx.child("a")), d(e->b, ctx.child("b")));
        case ExprKind::Sub: return sub(d(e->a, ctx.child("a")), d(e->b, ctx.child("b")));
        case ExprKind::Mul:
            // Leibniz: f*g' + f'*g
            return add(mul(e->a, d(e->b, ctx.child("b"))), mul(d(e->a, ctx.child("a")), e->b));
        case ExprKind::Div: {
            // -f*(1/g * g' * 1/g) + f'/g, defined when g != 0
            ctx.add(cmp(CmpOp::Ne, e->b, num(0)), ProvisoOrigin::NonzeroDenominator);
            Expr inv = div(num(1), e->b);
            return add(mul(neg(e->a), mul(mul(inv, d(e->b, ctx.child("b"))), inv)),
                       div(d(e->a, ctx.child("a")), e->b));
        }
        case ExprKind::Pow: {
            // n * e' * e^(n-1)
            if (e->exponent == 0) return num(0);
            return mul(mul(num(e->exponent), d(e->a, ctx.child("a"))), pow(e->a, e->exponent - 1));
        }
        case ExprKind::Sin: return mul(d(e->a, ctx.child("a")), cos(e->a));
        case ExprKind::Cos: return neg(mul(d(e->a, ctx.child("a")), sin(e->a)));
        case ExprKind::Tan:
            ctx.add(cmp(CmpOp::Ne, cos(e->a), num(0)), ProvisoOrigin::TanDefined);
            return div(d(e->a, ctx.child("a")), pow(cos(e->a), 2));
        case ExprKind::Exp: return mul(d(e->a, ctx.child("a")), exp(e->a));
        case ExprKind::Sqrt:
            ctx.add(cmp(CmpOp::Gt, e->a, num(0)), ProvisoOrigin::SqrtPositive);
            return mul(d(e->a, ctx.child("a")), div(num(1), mul(num(2), sqrt(e->a))));
        case ExprKind::Ln:
            ctx.add(cmp(CmpOp::Gt, e->a, num(0)), ProvisoOrigin::LnPositive);
            return div(d(e->a, ctx.child("a")), e->a);
        default:
            throw Error(ErrKind::Internal, "derive_node: unexpected leaf");
    }
}

inline Expr time_derivative_rec(const Expr& e, const DerivCtx& ctx) {
    switch (e->kind) {
        case ExprKind::Num:
        case ExprKind::NamedConst:
        case ExprKind::Param:
            return num(0);
        case ExprKind::TimeVar:
            return num(1);
        case ExprKind::StateVar:
            throw Error(ErrKind::UnsupportedNode,
                        "state variable '" + e->name + "' in a time-derivative argument");
        default:
            return derive_node(e, ctx, [](const Expr& s, const DerivCtx& c) {
                return time_derivative_rec(s, c);
            });
    }
}

inline Expr lie_derivative_rec(const Expr& e, const Subst& field,
                               const std::set<std::string>& frame, const DerivCtx& ctx) {
    switch (e->kind) {
        case ExprKind::Num:
        case ExprKind::NamedConst:
        case ExprKind::Param:
            return num(0);
        case ExprKind::TimeVar:
            throw Error(ErrKind::UnsupportedNode,
                        "time variable in a framed derivative argument");
        case ExprKind::StateVar:
            return frame.count(e->name) ? field.lookup(e->name) : num(0);
        default:
            return derive_node(e, ctx, [&](const Expr& s, const DerivCtx& c) {
                return lie_derivative_rec(s, field, frame, c);
            });
    }
}

}  // namespace detail

/// Derivative with respect to the independent time variable. The input ranges
/// over TimeVar, parameters and initial-value parameters; state variables are
/// rejected. Returns the raw rule-by-rule derivative (unsimplified) together
/// with the definedness provisos collected along the way.
inline std::pair<Expr, std::vector<Proviso>> time_derivative(const Expr& e) {
    std::vector<Proviso> provisos;
    detail::DerivCtx ctx;
    ctx.provisos = &provisos;
    Expr d = detail::time_derivative_rec(e, ctx);
    return {d, std::move(provisos)};
}

/// Framed Lie derivative of `e` along `field`, restricted to `frame`.
/// Variables inside the frame differentiate to their field entry, everything
/// else to zero. The result is simplified.
inline Expr lie_derivative(const Subst& field, const Expr& e, const std::set<std::string>& frame,
                           std::vector<Proviso>* provisos = nullptr) {
    detail::DerivCtx ctx;
    ctx.provisos = provisos;
    return simplify(detail::lie_derivative_rec(e, field, frame, ctx));
}

// ---------------------------------------------------------------------------
// Negation normal form with positive comparisons

inline Pred nnf_positive(const Pred& p, bool negated = false) {
    switch (p->kind) {
        case PredKind::True: return negated ? pfalse() : ptrue();
        case PredKind::False: return negated ? ptrue() : pfalse();
        case PredKind::Not: return nnf_positive(p->a, !negated);
        case PredKind::And: {
            Pred a = nnf_positive(p->a, negated), b = nnf_positive(p->b, negated);
            return negated ? por(a, b) : pand(a, b);
        }
        case PredKind::Or: {
            Pred a = nnf_positive(p->a, negated), b = nnf_positive(p->b, negated);
            return negated ? pand(a, b) : por(a, b);
        }
        case PredKind::Implies: {
            Pred a = nnf_positive(p->a, !negated), b = nnf_positive(p->b, negated);
            return negated ? pand(a, b) : por(a, b);
        }
        case PredKind::Cmp: {
            if (!negated) {
                if (p->op == CmpOp::Ne)  // x != y  expands to  y < x | x < y
                    return por(cmp(CmpOp::Lt, p->rhs, p->lhs), cmp(CmpOp::Lt, p->lhs, p->rhs));
                return p;
            }
            switch (p->op) {
                case CmpOp::Lt: return cmp(CmpOp::Le, p->rhs, p->lhs);  // !(x<y) <-> y<=x
                case CmpOp::Le: return cmp(CmpOp::Lt, p->rhs, p->lhs);  // !(x<=y) <-> y<x
                case CmpOp::Gt: return cmp(CmpOp::Le, p->lhs, p->rhs);
                case CmpOp::Ge: return cmp(CmpOp::Lt, p->lhs, p->rhs);
                case CmpOp::Eq:  // !(x=y) <-> y<x | x<y
                    return por(cmp(CmpOp::Lt, p->rhs, p->lhs), cmp(CmpOp::Lt, p->lhs, p->rhs));
                case CmpOp::Ne: return cmp(CmpOp::Eq, p->lhs, p->rhs);
            }
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Differential induction

namespace detail {

inline void diff_induct_literal(const Pred& lit, const EvolutionCmd& evo,
                                const std::set<std::string>& frame,
                                const std::vector<Pred>& context, const std::string& label,
                                int& counter, std::vector<VC>& out) {
    if (lit->kind == PredKind::True) return;
    if (lit->kind != PredKind::Cmp)
        throw Error(ErrKind::UnsupportedLiteral, "differential induction needs comparisons");

    // orient >=, > to <=, < so the rules apply left-to-right
    Expr lhs = lit->lhs, rhs = lit->rhs;
    CmpOp op = lit->op;
    if (op == CmpOp::Ge || op == CmpOp::Gt) {
        std::swap(lhs, rhs);
        op = op == CmpOp::Ge ? CmpOp::Le : CmpOp::Lt;
    }
    CmpOp goal_op;
    switch (op) {
        case CmpOp::Eq: goal_op = CmpOp::Eq; break;
        case CmpOp::Le:
        case CmpOp::Lt: goal_op = CmpOp::Le; break;
        default:
            throw Error(ErrKind::UnsupportedLiteral, "no induction rule for this literal");
    }

    std::vector<Proviso> provisos;
    Expr dl = lie_derivative(evo.field, lhs, frame, &provisos);
    Expr dr = lie_derivative(evo.field, rhs, frame, &provisos);

    VC vc;
    vc.label = label + "/dinv" + std::to_string(++counter);
    vc.context = context;
    if (!is_true(evo.guard)) vc.context.push_back(evo.guard);
    for (const auto& pv : provisos)
        if (!pv.trivially_true()) vc.context.push_back(pv.condition);
    vc.goal = qleaf(cmp(goal_op, dl, dr));
    out.push_back(std::move(vc));
}

inline void diff_induct_rec(const Pred& p, const EvolutionCmd& evo,
                            const std::set<std::string>& frame, const std::vector<Pred>& context,
                            const std::string& label, int& counter, std::vector<VC>& out) {
    // conjunctions and disjunctions split into independent obligations
    if (p->kind == PredKind::And || p->kind == PredKind::Or) {
        diff_induct_rec(p->a, evo, frame, context, label, counter, out);
        diff_induct_rec(p->b, evo, frame, context, label, counter, out);
        return;
    }
    diff_induct_literal(p, evo, frame, context, label, counter, out);
}

}  // namespace detail

/// Differential induction obligations for invariant I over an evolution
/// command. I is normalized to NNF with positive literals, conjunctions and
/// disjunctions split, and each comparison yields one framed-derivative VC.
inline std::vector<VC> diff_induct(const Pred& invariant, const EvolutionCmd& evo,
                                   const std::vector<Pred>& context = {},
                                   const std::string& label = "goal") {
    std::set<std::string> frame(evo.frame.begin(), evo.frame.end());
    Pred nnf = nnf_positive(invariant);
    std::vector<VC> out;
    int counter = 0;
    detail::diff_induct_rec(nnf, evo, frame, context, label, counter, out);
    return out;
}

// ---------------------------------------------------------------------------
// Differential ghosts and Darboux rules

/// Augments an evolution command with a fresh linear equation
/// fresh' = a*fresh + b. The fresh name must not collide with declared
/// variables and must not occur in the guard or the field.
inline EvolutionCmd ghost_augment(const EvolutionCmd& evo, const GhostSpec& spec,
                                  const std::vector<std::string>& declared) {
    for (const auto& d : declared)
        if (d == spec.fresh)
            throw Error(ErrKind::FreshnessViolation, "ghost '" + spec.fresh + "' is declared");
    for (const auto& x : evo.frame)
        if (x == spec.fresh)
            throw Error(ErrKind::FreshnessViolation, "ghost '" + spec.fresh + "' is in the frame");
    std::set<std::string> fresh_set{spec.fresh};
    if (!unrestricted_check(fresh_set, evo.guard))
        throw Error(ErrKind::FreshnessViolation, "ghost occurs in the guard");
    for (const auto& [k, v] : evo.field.entries())
        if (!unrestricted_check(fresh_set, v))
            throw Error(ErrKind::FreshnessViolation, "ghost occurs in the field");

    EvolutionCmd out = evo;
    out.frame.push_back(spec.fresh);
    out.field = out.field.update(spec.fresh,
                                 add(mul(spec.a, state_var(spec.fresh)), spec.b));
    return out;
}

/// Picks names not colliding with declared variables; two ghosts are
/// reserved because the underlying soundness argument consumes two.
inline std::vector<std::string> reserve_fresh_names(const std::vector<std::string>& declared,
                                                    int count, const std::string& stem = "y") {
    std::vector<std::string> out;
    int suffix = 0;
    while (static_cast<int>(out.size()) < count) {
        std::string cand = suffix == 0 ? stem : stem + std::to_string(suffix);
        ++suffix;
        bool taken = false;
        for (const auto& d : declared) taken = taken || d == cand;
        for (const auto& o : out) taken = taken || o == cand;
        if (!taken) out.push_back(cand);
    }
    return out;
}

/// Darboux rule premise: with ghost field f(y ~> -c*y), the framed derivative
/// of e over frame+y must compare against c*e (eq for dbx-eq, >= otherwise).
inline std::vector<VC> darboux_vcs(const Expr& e, const Expr& cofactor, CmpOp rel,
                                   const EvolutionCmd& evo,
                                   const std::vector<std::string>& declared,
                                   const std::vector<Pred>& context = {},
                                   const std::string& label = "goal") {
    if (rel != CmpOp::Eq && rel != CmpOp::Ge && rel != CmpOp::Gt)
        throw Error(ErrKind::UnsupportedLiteral, "darboux relation must be eq, ge or gt");

    auto fresh = reserve_fresh_names(declared, 2);
    GhostSpec spec{fresh[0], neg(cofactor), num(0)};
    EvolutionCmd ghosted = ghost_augment(evo, spec, declared);

    std::set<std::string> frame(ghosted.frame.begin(), ghosted.frame.end());
    std::vector<Proviso> provisos;
    Expr dl = lie_derivative(ghosted.field, e, frame, &provisos);
    Expr rhs = simplify(mul(cofactor, e));

    VC vc;
    vc.label = label + "/dbx(" + fresh[0] + "," + fresh[1] + ")";
    vc.context = context;
    if (!is_true(evo.guard)) vc.context.push_back(evo.guard);
    for (const auto& pv : provisos)
        if (!pv.trivially_true()) vc.context.push_back(pv.condition);
    vc.goal = qleaf(cmp(rel == CmpOp::Eq ? CmpOp::Eq : CmpOp::Ge, dl, rhs));
    return {vc};
}

}  // namespace odecert
