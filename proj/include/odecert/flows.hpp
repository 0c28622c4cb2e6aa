#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lie.hpp"

namespace odecert {

// Solution and flow certification. A candidate maps each frame variable to an
// expression over the time variable, parameters and initial-value references
// (state variables denote their value at time zero and render as $x).

struct FlowCandidate {
    std::vector<std::string> frame;
    Subst body;  // keys = frame
    TimeDomain domain = TimeDomain::AllReals;
};

inline std::string to_string(const FlowCandidate& c) { return to_string(c.body, true); }

// ---------------------------------------------------------------------------
// Entailment of side conditions by a guard context. This is a purely
// syntactic matcher: a condition holds when it is a rational-literal fact or
// when some context predicate pins the same polynomial with a relation at
// least as strong.

namespace detail {

enum class RelKind { EqZ, GeZ, GtZ, NeZ, LeZ, LtZ };

/// Moves a comparison onto the form (lhs - rhs) REL 0.
inline std::pair<Poly, RelKind> rel_poly(const Pred& p) {
    if (p->kind != PredKind::Cmp) throw Error(ErrKind::Internal, "rel_poly: not a comparison");
    Poly diff = poly_normalize(sub(p->lhs, p->rhs)).poly;
    switch (p->op) {
        case CmpOp::Eq: return {diff, RelKind::EqZ};
        case CmpOp::Ge: return {diff, RelKind::GeZ};
        case CmpOp::Gt: return {diff, RelKind::GtZ};
        case CmpOp::Ne: return {diff, RelKind::NeZ};
        case CmpOp::Le: return {diff, RelKind::LeZ};
        case CmpOp::Lt: return {diff, RelKind::LtZ};
    }
    throw Error(ErrKind::Internal, "rel_poly");
}

inline RelKind rel_negate_poly(RelKind r) {
    switch (r) {
        case RelKind::EqZ: return RelKind::EqZ;
        case RelKind::GeZ: return RelKind::LeZ;
        case RelKind::GtZ: return RelKind::LtZ;
        case RelKind::LeZ: return RelKind::GeZ;
        case RelKind::LtZ: return RelKind::GtZ;
        case RelKind::NeZ: return RelKind::NeZ;
    }
    return r;
}

inline bool rel_implies(RelKind have, RelKind want) {
    if (have == want) return true;
    switch (want) {
        case RelKind::GeZ: return have == RelKind::GtZ || have == RelKind::EqZ;
        case RelKind::LeZ: return have == RelKind::LtZ || have == RelKind::EqZ;
        case RelKind::NeZ: return have == RelKind::GtZ || have == RelKind::LtZ;
        default: return false;
    }
}

inline bool const_rel_holds(const Rat& v, RelKind r) {
    switch (r) {
        case RelKind::EqZ: return v == 0;
        case RelKind::GeZ: return v >= 0;
        case RelKind::GtZ: return v > 0;
        case RelKind::NeZ: return v != 0;
        case RelKind::LeZ: return v <= 0;
        case RelKind::LtZ: return v < 0;
    }
    return false;
}

}  // namespace detail

/// True when `cond` is a rational-literal fact or matches a context
/// predicate (up to polynomial normalization and sign flip).
inline bool entailed_by_context(const Pred& cond, const std::vector<Pred>& context) {
    if (cond->kind == PredKind::True) return true;
    if (cond->kind != PredKind::Cmp) return false;
    auto [p, want] = detail::rel_poly(cond);
    if (poly_is_const(p)) return detail::const_rel_holds(poly_const_value(p), want);
    for (const auto& c : context) {
        if (c->kind != PredKind::Cmp) continue;
        auto [q, have] = detail::rel_poly(c);
        if (poly_equal(p, q) && detail::rel_implies(have, want)) return true;
        if (poly_equal(p, poly_neg(q)) && detail::rel_implies(detail::rel_negate_poly(have), want))
            return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Certification of solutions and flows

struct ComponentCert {
    std::string var;
    Expr expected;             // field entry with the candidate substituted in
    Expr computed_derivative;  // raw time derivative of the candidate body
    EqStatus identity = EqStatus::Unknown;
    bool identity_conditional = false;   // equal wherever the open conditions hold
    std::vector<SideCond> open_conds;    // unresolved divisor conditions
    std::vector<Proviso> provisos;       // derivative-rule provisos
    std::vector<bool> proviso_entailed;  // parallel to provisos
    bool ok = false;

    bool identity_holds_conditionally() const {
        return identity == EqStatus::Equal || identity_conditional;
    }
};

struct LipschitzCert {
    bool certified = false;
    std::string reason;                 // offending subterm when NotC1
    std::vector<Pred> side_conds;       // discharged definedness conditions
    std::vector<std::vector<Expr>> jacobian;
};

struct CertReport {
    std::vector<ComponentCert> components;
    EqStatus initial_condition = EqStatus::Unknown;
    bool flow_mode = false;
    LipschitzCert lipschitz;

    bool solution_certified() const {
        for (const auto& c : components)
            if (!c.ok) return false;
        return !components.empty();
    }
    bool has_open_provisos() const {
        for (const auto& c : components)
            for (size_t i = 0; i < c.provisos.size(); ++i)
                if (!c.proviso_entailed[i]) return true;
        return false;
    }
    bool flow_certified() const {
        return solution_certified() && initial_condition == EqStatus::Equal &&
               lipschitz.certified;
    }
};

namespace detail {

/// Initial-value references are state variables in candidate bodies; for
/// differentiation they freeze into $-prefixed parameters.
inline std::map<std::string, Expr> freeze_map(const Expr& e) {
    std::map<std::string, Expr> sigma;
    for (const auto& v : free_vars(e).state) sigma[v] = param("$" + v);
    return sigma;
}

inline Expr freeze_initials(const Expr& e) { return substitute(e, freeze_map(e)); }

}  // namespace detail

/// Checks component-wise that d(X_i)/dt matches f_i(t, X(t)), that provisos
/// are entailed by the guard context, and (for flows) that X(0) is the
/// identity. Reports rather than throws on identity failures.
inline CertReport certify_solution(const FlowCandidate& candidate, const Subst& field,
                                   const std::vector<Pred>& guard_context = {},
                                   bool check_initial = true) {
    auto field_keys = field.keys();
    std::set<std::string> frame_set(candidate.frame.begin(), candidate.frame.end());
    if (field_keys != frame_set)
        throw Error(ErrKind::NonMatchingFrames, "candidate frame differs from field frame");
    for (const auto& x : candidate.frame)
        if (!candidate.body.contains(x))
            throw Error(ErrKind::NonMatchingFrames, "candidate misses component '" + x + "'");
    for (const auto& [x, e] : candidate.body.entries())
        if (!frame_set.count(x))
            throw Error(ErrKind::NonMatchingFrames, "'" + x + "' is not in the frame");

    CertReport report;
    report.flow_mode = check_initial;

    // substitution of the candidate into the field: frame variables become
    // their (frozen) bodies, other state variables freeze as constants
    std::map<std::string, Expr> into_field;
    for (const auto& x : candidate.frame)
        into_field[x] = detail::freeze_initials(candidate.body.lookup(x));

    bool ic_all = true;
    bool ic_unknown = false;
    for (const auto& x : candidate.frame) {
        ComponentCert cc;
        cc.var = x;
        Expr frozen = detail::freeze_initials(candidate.body.lookup(x));

        auto [deriv, provisos] = time_derivative(frozen);
        cc.computed_derivative = deriv;
        cc.provisos = std::move(provisos);

        Expr rhs = field.lookup(x);
        for (const auto& v : free_vars(rhs).state)
            if (!into_field.count(v)) into_field[v] = param("$" + v);
        cc.expected = substitute(rhs, into_field);

        EqResult eq = equal_poly(cc.computed_derivative, cc.expected);
        cc.identity = eq.status;
        cc.identity_conditional = eq.cond_equal;
        for (const auto& sc : eq.side_conds) {
            Pred cond = cmp(CmpOp::Ne, sc.divisor, num(0));
            if (!entailed_by_context(cond, guard_context)) cc.open_conds.push_back(sc);
        }
        for (const auto& pv : cc.provisos)
            cc.proviso_entailed.push_back(pv.trivially_true() ||
                                          entailed_by_context(pv.condition, guard_context));

        bool provisos_ok = true;
        for (bool b : cc.proviso_entailed) provisos_ok = provisos_ok && b;
        cc.ok = (cc.identity == EqStatus::Equal || (eq.cond_equal && cc.open_conds.empty())) &&
                cc.open_conds.empty() && provisos_ok;

        if (check_initial) {
            Expr at0 = simplify(subst_time(frozen, num(0)));
            EqResult ic = equal_poly(at0, param("$" + x));
            bool ok = ic.status == EqStatus::Equal;
            if (!ok && ic.cond_equal) {
                ok = true;
                for (const auto& sc : ic.side_conds)
                    ok = ok && entailed_by_context(cmp(CmpOp::Ne, sc.divisor, num(0)),
                                                   guard_context);
            }
            if (!ok) {
                ic_all = false;
                if (ic.status == EqStatus::Unknown) ic_unknown = true;
            }
        }
        report.components.push_back(std::move(cc));
    }
    if (check_initial)
        report.initial_condition =
            ic_all ? EqStatus::Equal : (ic_unknown ? EqStatus::Unknown : EqStatus::NotEqual);
    return report;
}

// ---------------------------------------------------------------------------
// C1 => Lipschitz certification

namespace detail {

/// Globally evident positivity: a polynomial whose constant term is positive
/// and whose remaining monomials are even powers with nonnegative
/// coefficients is positive everywhere.
inline bool globally_positive_poly(const Poly& p) {
    bool has_pos_const = false;
    for (const auto& [m, c] : p) {
        if (m.empty()) {
            if (c <= 0) return false;
            has_pos_const = true;
            continue;
        }
        if (c < 0) return false;
        for (const auto& [a, e] : m) {
            if (e % 2 != 0) return false;
            if (a->kind == AtomKind::Trans || a->kind == AtomKind::Quot) return false;
        }
    }
    return has_pos_const;
}

inline bool globally_nonzero(const Expr& e) {
    NormResult n = poly_normalize(e);
    if (!n.conds.empty()) return false;
    if (poly_is_const(n.poly)) return poly_const_value(n.poly) != 0;
    if (globally_positive_poly(n.poly)) return true;
    return globally_positive_poly(poly_neg(n.poly));
}

/// Scans a field entry for C1 smoothness; divisions need globally nonzero
/// denominators, sqrt/ln/tan are rejected with the offending subterm.
inline bool scan_c1(const Expr& e, LipschitzCert& out) {
    switch (e->kind) {
        case ExprKind::Sqrt:
        case ExprKind::Ln:
        case ExprKind::Tan:
            out.reason = to_string(e);
            return false;
        case ExprKind::Div:
            if (!globally_nonzero(e->b)) {
                out.reason = to_string(e);
                return false;
            }
            out.side_conds.push_back(cmp(CmpOp::Ne, e->b, num(0)));
            return scan_c1(e->a, out) && scan_c1(e->b, out);
        default:
            if (e->a && !scan_c1(e->a, out)) return false;
            if (e->b && !scan_c1(e->b, out)) return false;
            return true;
    }
}

}  // namespace detail

/// Certifies that a vector field is continuously differentiable (hence
/// locally Lipschitz) by checking its node classes and computing the
/// symbolic Jacobian through unit-direction framed derivatives.
inline LipschitzCert c1_lipschitz_check(const Subst& field, const std::set<std::string>& frame) {
    LipschitzCert out;
    for (const auto& [x, rhs] : field.entries()) {
        if (!detail::scan_c1(rhs, out)) {
            out.certified = false;
            out.reason = "entry " + x + ": " + out.reason;
            return out;
        }
    }
    // Jacobian entries d f_i / d x_j via unit directions; the independent
    // variable is a frozen coordinate for spatial differentiation
    std::vector<std::string> vars(frame.begin(), frame.end());
    for (const auto& [x, rhs] : field.entries()) {
        Expr spatial = subst_time(rhs, param("@time"));
        std::vector<Expr> row;
        for (const auto& j : vars) {
            Subst unit;
            for (const auto& v : vars) unit = unit.update(v, num(v == j ? 1 : 0));
            row.push_back(lie_derivative(unit, spatial, frame));
        }
        out.jacobian.push_back(std::move(row));
    }
    out.certified = true;
    return out;
}

/// Full flow certification: solves the ODE, starts at the identity, and the
/// field is C1 (unique solutions via Picard-Lindelof). This is the gate for
/// rewriting evolution commands with their flows.
inline CertReport certify_flow(const FlowCandidate& candidate, const Subst& field,
                               const std::vector<Pred>& guard_context = {}) {
    CertReport report = certify_solution(candidate, field, guard_context, /*check_initial=*/true);
    std::set<std::string> frame_set(candidate.frame.begin(), candidate.frame.end());
    report.lipschitz = c1_lipschitz_check(field, frame_set);
    return report;
}

}  // namespace odecert
