#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rk4.hpp"
#include "transformers.hpp"

namespace odecert {

// Discharging verification conditions: a syntactic prover for evidently
// nonnegative combinations, a sampling falsifier, and the operational
// simulator oracle.

struct SamplerConfig {
    int samples = 1000;
    long long range_lo = -10, range_hi = 10;  // parameter/state sampling range
    int max_denom = 16;
    int time_grid = 64;     // points per quantifier grid
    double time_max = 100.0;
    std::uint64_t seed = 0;
    int iter_cap = 8;       // simulator loop bound
    bool rewrite_pack = false;  // sin^2+cos^2 and exp-product rewrites
};

enum class DischargeStatus { Proved, Refuted, Unknown };
enum class ProofMethod { PolyIdentity, LiteralArith, IntervalFact };

inline const char* method_name(ProofMethod m) {
    switch (m) {
        case ProofMethod::PolyIdentity: return "poly-identity";
        case ProofMethod::LiteralArith: return "literal-arith";
        case ProofMethod::IntervalFact: return "interval-fact";
    }
    return "?";
}

struct DischargeResult {
    DischargeStatus status = DischargeStatus::Unknown;
    ProofMethod method = ProofMethod::LiteralArith;
    std::map<std::string, double> counterexample;  // includes binder values
    std::string reason;
};

// ---------------------------------------------------------------------------
// Arithmetic facts

namespace detail {

// Facts are normalized to p >= 0, p > 0, p = 0 or p != 0.
enum class FactRel { Ge, Gt, Eq, Ne };

struct Fact {
    Poly p;
    FactRel rel;
};

inline std::optional<Fact> fact_of_pred(const Pred& c) {
    if (c->kind != PredKind::Cmp) return std::nullopt;
    auto [p, rel] = rel_poly(c);
    switch (rel) {
        case RelKind::GeZ: return Fact{p, FactRel::Ge};
        case RelKind::GtZ: return Fact{p, FactRel::Gt};
        case RelKind::EqZ: return Fact{p, FactRel::Eq};
        case RelKind::NeZ: return Fact{p, FactRel::Ne};
        case RelKind::LeZ: return Fact{poly_neg(p), FactRel::Ge};
        case RelKind::LtZ: return Fact{poly_neg(p), FactRel::Gt};
    }
    return std::nullopt;
}

/// Replaces an atom by a polynomial throughout.
inline Poly poly_subst_atom(const Poly& p, const AtomPtr& atom, const Poly& value) {
    Poly out;
    for (const auto& [m, c] : p) {
        Monomial rest;
        int deg = 0;
        for (const auto& [a, e] : m) {
            if (atom_compare(a, atom) == 0) {
                deg = e;
            } else {
                rest.emplace_back(a, e);
            }
        }
        Poly piece;
        poly_add_term(piece, rest, c);
        if (deg > 0) piece = poly_mul(piece, poly_pow(value, deg));
        for (const auto& [mm, cc] : piece) poly_add_term(out, mm, cc);
    }
    return out;
}

/// Uses equality facts of shape atom = rest (rest free of the atom) as
/// substitutions across the whole fact set; bounded number of passes.
inline void apply_equality_substitutions(std::vector<Fact>& facts) {
    for (int pass = 0; pass < 8; ++pass) {
        int chosen = -1;
        AtomPtr atom;
        Poly value;
        for (size_t i = 0; i < facts.size() && chosen < 0; ++i) {
            if (facts[i].rel != FactRel::Eq) continue;
            for (const auto& [m, c] : facts[i].p) {
                if (m.size() != 1 || m[0].second != 1) continue;
                const AtomPtr& a = m[0].first;
                // candidate: c*a + rest = 0 with rest free of a
                Poly rest = facts[i].p;
                rest.erase(m);
                bool free_of = true;
                for (const auto& [mm, cc] : rest)
                    for (const auto& [aa, ee] : mm)
                        if (atom_compare(aa, a) == 0) free_of = false;
                if (!free_of) continue;
                // prefer eliminating state/time atoms (ground values flow in)
                atom = a;
                value = poly_scale(rest, Rat(-1) / c);
                chosen = static_cast<int>(i);
                break;
            }
        }
        if (chosen < 0) return;
        Fact eliminated = facts[chosen];
        facts.erase(facts.begin() + chosen);
        for (auto& f : facts) f.p = poly_subst_atom(f.p, atom, value);
    }
}

// ---------------------------------------------------------------------------
// Nonnegative-combination prover

struct ProveCtx {
    const std::vector<Fact>* facts = nullptr;
    int budget = 4000;
    bool used_interval = false;               // transcendental/even-power evidence
    std::set<const Atom*> atoms_in_progress;  // sign-recursion guard
};

enum class Sign { Pos, NonNeg, Unknown };

inline bool prove_nonneg(const Poly& q, std::vector<char>& used, bool strict, ProveCtx& ctx);

inline Sign atom_sign(const AtomPtr& a, std::vector<char>& used, ProveCtx& ctx) {
    switch (a->kind) {
        case AtomKind::Trans:
            if (a->name == "exp") {
                ctx.used_interval = true;
                return Sign::Pos;
            }
            if (a->name == "sqrt") {
                ctx.used_interval = true;
                return Sign::NonNeg;
            }
            return Sign::Unknown;
        case AtomKind::Const:
            if (a->name == "pi" || a->name == "euler") {
                ctx.used_interval = true;
                return Sign::Pos;
            }
            return Sign::Unknown;
        case AtomKind::Quot: {
            Sign n = Sign::Unknown, d = Sign::Unknown;
            {
                std::vector<char> u2(ctx.facts->size(), 0);
                if (prove_nonneg(*a->qnum, u2, true, ctx)) n = Sign::Pos;
            }
            if (n == Sign::Unknown) {
                std::vector<char> u2(ctx.facts->size(), 0);
                if (prove_nonneg(*a->qnum, u2, false, ctx)) n = Sign::NonNeg;
            }
            {
                std::vector<char> u2(ctx.facts->size(), 0);
                if (prove_nonneg(*a->qden, u2, true, ctx)) d = Sign::Pos;
            }
            if (n == Sign::Unknown || d != Sign::Pos) return Sign::Unknown;
            return n;
        }
        default: {
            if (ctx.atoms_in_progress.count(a.get())) return Sign::Unknown;
            ctx.atoms_in_progress.insert(a.get());
            Poly pa = poly_atom(a);
            Sign s = Sign::Unknown;
            {
                std::vector<char> u2 = used;
                if (prove_nonneg(pa, u2, true, ctx)) s = Sign::Pos;
            }
            if (s == Sign::Unknown) {
                std::vector<char> u2 = used;
                if (prove_nonneg(pa, u2, false, ctx)) s = Sign::NonNeg;
            }
            ctx.atoms_in_progress.erase(a.get());
            return s;
        }
    }
}

/// A monomial is evidently nonnegative when every factor has known sign
/// (even powers are always nonnegative). Returns Pos only when every factor
/// is strictly positive.
inline Sign monomial_sign(const Monomial& m, const Rat& coeff, std::vector<char>& used,
                          ProveCtx& ctx) {
    if (coeff < 0) return Sign::Unknown;
    Sign acc = coeff > 0 ? Sign::Pos : Sign::NonNeg;
    for (const auto& [a, e] : m) {
        if (e % 2 == 0) {
            ctx.used_interval = true;
            // even power: nonnegative; strictness is lost unless the atom is
            // strictly signed
            Sign s = atom_sign(a, used, ctx);
            if (s != Sign::Pos && acc == Sign::Pos) acc = Sign::NonNeg;
            continue;
        }
        Sign s = atom_sign(a, used, ctx);
        if (s == Sign::Unknown) return Sign::Unknown;
        if (s == Sign::NonNeg && acc == Sign::Pos) acc = Sign::NonNeg;
    }
    return acc;
}

/// Evident nonnegativity of a polynomial: all monomials nonnegative, and for
/// strict positivity at least one strictly positive monomial.
inline bool evident_nonneg(const Poly& q, std::vector<char>& used, bool strict, ProveCtx& ctx) {
    bool any_strict = false;
    for (const auto& [m, c] : q) {
        if (m.empty()) {
            if (c < 0) return false;
            if (c > 0) any_strict = true;
            continue;
        }
        Sign s = monomial_sign(m, c, used, ctx);
        if (s == Sign::Unknown) return false;
        if (s == Sign::Pos) any_strict = true;
    }
    return strict ? any_strict : true;
}

/// Core chain prover: q >= 0 (or > 0) follows when q minus a nonnegative
/// combination of context facts is evidently nonnegative.
inline bool prove_nonneg(const Poly& q, std::vector<char>& used, bool strict, ProveCtx& ctx) {
    if (ctx.budget-- <= 0) return false;
    if (q.empty()) return !strict;
    if (evident_nonneg(q, used, strict, ctx)) return true;

    const auto& facts = *ctx.facts;
    for (size_t i = 0; i < facts.size(); ++i) {
        if (used[i]) continue;
        const Fact& f = facts[i];
        if (f.rel == FactRel::Ne) continue;
        if (f.p.empty()) continue;
        // choose lambda so that one monomial of f.p cancels against q
        for (const auto& [m, pc] : f.p) {
            auto it = q.find(m);
            if (it == q.end()) continue;
            Rat lambda = it->second / pc;
            if (lambda == 0) continue;
            if (lambda < 0 && f.rel != FactRel::Eq) continue;
            bool next_strict = strict;
            if (f.rel == FactRel::Gt && lambda > 0) next_strict = false;
            Poly rest = poly_sub(q, poly_scale(f.p, lambda));
            used[i] = 1;
            if (prove_nonneg(rest, used, next_strict, ctx)) {
                used[i] = 0;
                return true;
            }
            used[i] = 0;
        }
    }
    return false;
}

/// Contradiction within a set of literal facts.
inline bool facts_contradict(std::vector<Fact> facts, ProveCtx& ctx) {
    apply_equality_substitutions(facts);
    ctx.facts = &facts;
    for (size_t i = 0; i < facts.size(); ++i) {
        const Fact& f = facts[i];
        if (poly_is_const(f.p)) {
            Rat v = poly_const_value(f.p);
            bool ok = true;
            switch (f.rel) {
                case FactRel::Ge: ok = v >= 0; break;
                case FactRel::Gt: ok = v > 0; break;
                case FactRel::Eq: ok = v == 0; break;
                case FactRel::Ne: ok = v != 0; break;
            }
            if (!ok) return true;
            continue;
        }
        std::vector<Fact> others;
        for (size_t j = 0; j < facts.size(); ++j)
            if (j != i) others.push_back(facts[j]);
        ProveCtx sub;
        sub.facts = &others;
        sub.budget = ctx.budget;
        std::vector<char> used(others.size(), 0);
        bool contra = false;
        switch (f.rel) {
            case FactRel::Ge: contra = prove_nonneg(poly_neg(f.p), used, true, sub); break;
            case FactRel::Gt: contra = prove_nonneg(poly_neg(f.p), used, false, sub); break;
            case FactRel::Eq: {
                contra = prove_nonneg(f.p, used, true, sub);
                if (!contra) {
                    std::fill(used.begin(), used.end(), 0);
                    contra = prove_nonneg(poly_neg(f.p), used, true, sub);
                }
                break;
            }
            case FactRel::Ne: {
                contra = prove_nonneg(f.p, used, false, sub);
                if (contra) {
                    std::fill(used.begin(), used.end(), 0);
                    contra = prove_nonneg(poly_neg(f.p), used, false, sub);
                }
                break;
            }
        }
        ctx.used_interval = ctx.used_interval || sub.used_interval;
        if (contra) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Refutation tableau over goals with bounded quantifiers

struct Tableau {
    int branch_budget = 512;
    bool used_interval = false;
    bool closed_all = true;

    std::vector<Expr> forall_candidates(const Binder& b) {
        std::vector<Expr> cands;
        switch (b.kind) {
            case BoundKind::NonNeg:
                cands.push_back(num(0));
                cands.push_back(num(1));
                break;
            case BoundKind::Interval:
                cands.push_back(b.lo);
                cands.push_back(b.hi);
                break;
            case BoundKind::AllReal:
                cands.push_back(num(0));
                break;
        }
        return cands;
    }

    /// items: formulas of the branch, in negation normal form. Returns true
    /// when every branch closes arithmetically.
    bool refute(std::vector<QPred> items, std::vector<Fact> facts) {
        if (branch_budget-- <= 0) {
            closed_all = false;
            return false;
        }
        while (!items.empty()) {
            QPred q = items.back();
            items.pop_back();
            switch (q->kind) {
                case QKind::Leaf: {
                    // instantiations leave foldable residue like exp(0)
                    Pred p = simplify(q->leaf);
                    if (is_false(p)) return true;  // branch closes
                    if (is_true(p)) break;
                    if (p->kind == PredKind::And) {
                        items.push_back(qleaf(p->a));
                        items.push_back(qleaf(p->b));
                        break;
                    }
                    if (p->kind == PredKind::Or) {
                        auto left = items;
                        left.push_back(qleaf(p->a));
                        if (!refute(left, facts)) return false;
                        items.push_back(qleaf(p->b));
                        break;
                    }
                    if (p->kind == PredKind::Implies) {
                        auto left = items;
                        left.push_back(qleaf(nnf_positive(pnot(p->a))));
                        if (!refute(left, facts)) return false;
                        items.push_back(qleaf(p->b));
                        break;
                    }
                    if (p->kind == PredKind::Not) {
                        items.push_back(qleaf(nnf_positive(p)));
                        break;
                    }
                    auto f = fact_of_pred(p);
                    if (f) facts.push_back(std::move(*f));
                    break;
                }
                case QKind::And:
                    items.push_back(q->a);
                    items.push_back(q->b);
                    break;
                case QKind::Or: {
                    auto left = items;
                    left.push_back(q->a);
                    if (!refute(left, facts)) return false;
                    items.push_back(q->b);
                    break;
                }
                case QKind::Implies: {
                    auto left = items;
                    left.push_back(qnnf(q->a, true));
                    if (!refute(left, facts)) return false;
                    items.push_back(q->b);
                    break;
                }
                case QKind::Not:
                    items.push_back(qnnf(q->a, true));
                    break;
                case QKind::Exists: {
                    // skolemize: the binder name is fresh by construction
                    add_binder_facts(q->binder, facts);
                    items.push_back(q->a);
                    break;
                }
                case QKind::Forall: {
                    // sound instantiation at finitely many candidates
                    for (const auto& cand : forall_candidates(q->binder))
                        items.push_back(qsubst_param(q->a, q->binder.name, cand));
                    break;
                }
            }
        }
        ProveCtx ctx;
        bool contra = facts_contradict(std::move(facts), ctx);
        used_interval = used_interval || ctx.used_interval;
        if (!contra) closed_all = false;
        return contra;
    }

    static void add_binder_facts(const Binder& b, std::vector<Fact>& facts) {
        Expr v = param(b.name);
        auto push = [&](const Pred& p) {
            auto f = fact_of_pred(p);
            if (f) facts.push_back(std::move(*f));
        };
        switch (b.kind) {
            case BoundKind::NonNeg: push(cmp(CmpOp::Ge, v, num(0))); break;
            case BoundKind::Interval:
                push(cmp(CmpOp::Ge, v, b.lo));
                push(cmp(CmpOp::Le, v, b.hi));
                break;
            case BoundKind::AllReal: break;
        }
    }

    /// negation normal form over goal formulas
    static QPred qnnf(const QPred& q, bool negated) {
        switch (q->kind) {
            case QKind::Leaf: return qleaf(negated ? nnf_positive(pnot(q->leaf)) : q->leaf);
            case QKind::Not: return qnnf(q->a, !negated);
            case QKind::And: {
                QPred a = qnnf(q->a, negated), b = qnnf(q->b, negated);
                return negated ? qor(a, b) : qand(a, b);
            }
            case QKind::Or: {
                QPred a = qnnf(q->a, negated), b = qnnf(q->b, negated);
                return negated ? qand(a, b) : qor(a, b);
            }
            case QKind::Implies: {
                QPred a = qnnf(q->a, !negated), b = qnnf(q->b, negated);
                return negated ? qand(a, b) : qor(a, b);
            }
            case QKind::Forall:
            case QKind::Exists: {
                QKind k = q->kind;
                if (negated) k = k == QKind::Forall ? QKind::Exists : QKind::Forall;
                return qquant(k, q->binder, qnnf(q->a, negated));
            }
        }
        return q;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Three-valued evaluation of goals (falsification oracle)

namespace detail {

enum class TV { T, F, U };

inline TV tv_not(TV v) { return v == TV::T ? TV::F : v == TV::F ? TV::T : TV::U; }

struct QuantGrids {
    const SamplerConfig* cfg;

    std::vector<double> nonneg_grid() const {
        std::vector<double> g{0.0};
        int n = std::max(2, cfg->time_grid - 1);
        double lo = 1e-3;
        for (int i = 0; i < n; ++i)
            g.push_back(lo * std::pow(cfg->time_max / lo, double(i) / (n - 1)));
        return g;
    }

    std::vector<double> interval_grid(double lo, double hi) const {
        std::vector<double> g;
        int n = std::max(2, cfg->time_grid);
        for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * double(i) / (n - 1));
        return g;
    }

    std::vector<double> allreal_grid() const {
        std::vector<double> g = nonneg_grid();
        std::vector<double> out;
        for (double v : g) {
            out.push_back(v);
            if (v != 0.0) out.push_back(-v);
        }
        return out;
    }
};

/// Evaluation that tracks the largest intermediate magnitude; float rounding
/// in a cancellation-heavy expression is proportional to it, not to the
/// (possibly tiny) final value.
inline double eval_peak(const Expr& e, const DEnv& env, double& peak) {
    double v;
    switch (e->kind) {
        case ExprKind::Neg: v = -eval_peak(e->a, env, peak); break;
        case ExprKind::Add: v = eval_peak(e->a, env, peak) + eval_peak(e->b, env, peak); break;
        case ExprKind::Sub: v = eval_peak(e->a, env, peak) - eval_peak(e->b, env, peak); break;
        case ExprKind::Mul: v = eval_peak(e->a, env, peak) * eval_peak(e->b, env, peak); break;
        case ExprKind::Div: {
            double d = eval_peak(e->b, env, peak);
            if (d == 0) throw Error(ErrKind::DivisionByZero, "division by zero");
            v = eval_peak(e->a, env, peak) / d;
            break;
        }
        case ExprKind::Pow: v = std::pow(eval_peak(e->a, env, peak), e->exponent); break;
        case ExprKind::Sin: v = std::sin(eval_peak(e->a, env, peak)); break;
        case ExprKind::Cos: v = std::cos(eval_peak(e->a, env, peak)); break;
        case ExprKind::Tan: v = std::tan(eval_peak(e->a, env, peak)); break;
        case ExprKind::Exp: v = std::exp(eval_peak(e->a, env, peak)); break;
        case ExprKind::Sqrt: {
            double s = eval_peak(e->a, env, peak);
            if (s < 0) throw Error(ErrKind::DomainError, "sqrt of negative value");
            v = std::sqrt(s);
            break;
        }
        case ExprKind::Ln: {
            double s = eval_peak(e->a, env, peak);
            if (s <= 0) throw Error(ErrKind::DomainError, "ln of nonpositive value");
            v = std::log(s);
            break;
        }
        default: v = eval_double(e, env); break;
    }
    peak = std::max(peak, std::fabs(v));
    return v;
}

inline TV eval_cmp_tv(const Pred& p, const DEnv& env) {
    double l, r, peak = 1.0;
    try {
        l = eval_peak(p->lhs, env, peak);
        r = eval_peak(p->rhs, env, peak);
    } catch (const Error&) {
        return TV::U;
    }
    if (!std::isfinite(l) || !std::isfinite(r) || !std::isfinite(peak)) return TV::U;
    double scale = peak;
    // strict comparisons carry an exclusion margin against float-boundary
    // false refutations; the others use the sampling tolerance
    double strict_margin = 1e-12 * scale;
    double loose_margin = 1e-9 * scale;
    double d = l - r;
    switch (p->op) {
        case CmpOp::Lt:
            return d < -strict_margin ? TV::T : (d > strict_margin ? TV::F : TV::U);
        case CmpOp::Gt:
            return d > strict_margin ? TV::T : (d < -strict_margin ? TV::F : TV::U);
        case CmpOp::Le:
            return d < -loose_margin ? TV::T : (d > loose_margin ? TV::F : (d <= 0 ? TV::T : TV::U));
        case CmpOp::Ge:
            return d > loose_margin ? TV::T : (d < -loose_margin ? TV::F : (d >= 0 ? TV::T : TV::U));
        case CmpOp::Eq: return std::fabs(d) > loose_margin ? TV::F : (d == 0 ? TV::T : TV::U);
        case CmpOp::Ne: return std::fabs(d) > loose_margin ? TV::T : (d == 0 ? TV::F : TV::U);
    }
    return TV::U;
}

inline TV eval_pred_tv(const Pred& p, const DEnv& env) {
    switch (p->kind) {
        case PredKind::True: return TV::T;
        case PredKind::False: return TV::F;
        case PredKind::Cmp: return eval_cmp_tv(p, env);
        case PredKind::Not: return tv_not(eval_pred_tv(p->a, env));
        case PredKind::And: {
            TV a = eval_pred_tv(p->a, env), b = eval_pred_tv(p->b, env);
            if (a == TV::F || b == TV::F) return TV::F;
            if (a == TV::T && b == TV::T) return TV::T;
            return TV::U;
        }
        case PredKind::Or: {
            TV a = eval_pred_tv(p->a, env), b = eval_pred_tv(p->b, env);
            if (a == TV::T || b == TV::T) return TV::T;
            if (a == TV::F && b == TV::F) return TV::F;
            return TV::U;
        }
        case PredKind::Implies: {
            TV a = eval_pred_tv(p->a, env), b = eval_pred_tv(p->b, env);
            if (a == TV::F || b == TV::T) return TV::T;
            if (a == TV::T && b == TV::F) return TV::F;
            return TV::U;
        }
    }
    return TV::U;
}

inline TV eval_qpred_tv(const QPred& q, DEnv& env, const QuantGrids& grids,
                        std::map<std::string, double>* witness) {
    switch (q->kind) {
        case QKind::Leaf: return eval_pred_tv(q->leaf, env);
        case QKind::Not: return tv_not(eval_qpred_tv(q->a, env, grids, witness));
        case QKind::And: {
            TV a = eval_qpred_tv(q->a, env, grids, witness);
            if (a == TV::F) return TV::F;
            TV b = eval_qpred_tv(q->b, env, grids, witness);
            if (b == TV::F) return TV::F;
            if (a == TV::T && b == TV::T) return TV::T;
            return TV::U;
        }
        case QKind::Or: {
            TV a = eval_qpred_tv(q->a, env, grids, witness);
            if (a == TV::T) return TV::T;
            TV b = eval_qpred_tv(q->b, env, grids, witness);
            if (b == TV::T) return TV::T;
            if (a == TV::F && b == TV::F) return TV::F;
            return TV::U;
        }
        case QKind::Implies: {
            TV a = eval_qpred_tv(q->a, env, grids, witness);
            if (a == TV::F) return TV::T;
            TV b = eval_qpred_tv(q->b, env, grids, witness);
            if (b == TV::T) return TV::T;
            if (a == TV::T && b == TV::F) return TV::F;
            return TV::U;
        }
        case QKind::Forall:
        case QKind::Exists: {
            std::vector<double> grid;
            try {
                switch (q->binder.kind) {
                    case BoundKind::NonNeg: grid = grids.nonneg_grid(); break;
                    case BoundKind::Interval: {
                        double lo = eval_double(q->binder.lo, env);
                        double hi = eval_double(q->binder.hi, env);
                        if (hi < lo) return q->kind == QKind::Forall ? TV::T : TV::F;
                        grid = grids.interval_grid(lo, hi);
                        break;
                    }
                    case BoundKind::AllReal: grid = grids.allreal_grid(); break;
                }
            } catch (const Error&) {
                return TV::U;
            }
            bool saw_u = false;
            for (double v : grid) {
                env.vars[q->binder.name] = v;
                TV b = eval_qpred_tv(q->a, env, grids, witness);
                env.vars.erase(q->binder.name);
                if (q->kind == QKind::Forall && b == TV::F) {
                    if (witness) (*witness)[q->binder.name] = v;
                    return TV::F;  // grid point falsifies the universal
                }
                if (q->kind == QKind::Exists && b == TV::T) {
                    if (witness) (*witness)[q->binder.name] = v;
                    return TV::T;
                }
                if (b == TV::U) saw_u = true;
            }
            // a grid cannot verify a universal nor refute an existential
            if (q->kind == QKind::Forall) return saw_u ? TV::U : TV::T;
            return TV::U;
        }
    }
    return TV::U;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Falsification by sampling

namespace detail {

inline std::uint64_t label_seed(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

struct EqualityPin {
    std::string var;
    Expr value;
};

/// Equality contexts over a single variable become deterministic assignments
/// so rejection sampling can meet them.
inline std::vector<EqualityPin> equality_pins(const std::vector<Pred>& context) {
    std::vector<EqualityPin> pins;
    for (const auto& c : context) {
        if (c->kind != PredKind::Cmp || c->op != CmpOp::Eq) continue;
        if (c->lhs->kind == ExprKind::StateVar || c->lhs->kind == ExprKind::Param) {
            pins.push_back({c->lhs->name, c->rhs});
        } else if (c->rhs->kind == ExprKind::StateVar || c->rhs->kind == ExprKind::Param) {
            pins.push_back({c->rhs->name, c->lhs});
        }
    }
    return pins;
}

}  // namespace detail

/// Samples parameter/state values satisfying the context (by rejection, with
/// single-variable equalities turned into assignments) and searches for an
/// assignment that definitely falsifies the goal. Existentials without a
/// witness are never refuted by search failure.
inline std::optional<std::map<std::string, double>> falsify(const VC& vc,
                                                            const SamplerConfig& cfg,
                                                            int* satisfied_out = nullptr) {
    FreeVars fv;
    for (const auto& c : vc.context) collect_free_vars(c, fv);
    collect_free_vars(vc.goal, fv);
    for (const auto& b : vc.binders) {
        if (b.lo) collect_free_vars(b.lo, fv);
        if (b.hi) collect_free_vars(b.hi, fv);
    }
    std::set<std::string> binder_names;
    for (const auto& b : vc.binders) binder_names.insert(b.name);

    std::vector<std::string> vars;
    for (const auto& v : fv.state) vars.push_back(v);
    for (const auto& v : fv.params)
        if (!binder_names.count(v)) vars.push_back(v);

    auto pins = detail::equality_pins(vc.context);
    std::set<std::string> pinned;
    for (const auto& p : pins) pinned.insert(p.var);

    std::mt19937_64 rng(detail::label_seed(cfg.seed, vc.label));
    std::uniform_int_distribution<int> denom_dist(1, cfg.max_denom);
    detail::QuantGrids grids{&cfg};

    // binder grids for the lifted universal binders
    auto binder_grid = [&](const Binder& b, const DEnv& env) -> std::vector<double> {
        switch (b.kind) {
            case BoundKind::NonNeg: return grids.nonneg_grid();
            case BoundKind::Interval: {
                double lo = eval_double(b.lo, env), hi = eval_double(b.hi, env);
                if (hi < lo) return {};
                return grids.interval_grid(lo, hi);
            }
            case BoundKind::AllReal: return grids.allreal_grid();
        }
        return {};
    };

    long long budget = static_cast<long long>(cfg.samples) * 50;
    int satisfied = 0;
    for (long long trial = 0; trial < budget && satisfied < cfg.samples; ++trial) {
        DEnv env;
        for (const auto& v : vars) {
            if (pinned.count(v)) continue;
            int den = denom_dist(rng);
            std::uniform_int_distribution<long long> num_dist(cfg.range_lo * den,
                                                              cfg.range_hi * den);
            env.vars[v] = double(num_dist(rng)) / den;
        }
        // resolve pins (a few passes allow pins referencing pinned vars)
        bool pins_ok = true;
        for (int pass = 0; pass < 3; ++pass) {
            for (const auto& pin : pins) {
                try {
                    env.vars[pin.var] = eval_double(pin.value, env);
                } catch (const Error&) {
                    if (pass == 2) pins_ok = false;
                }
            }
        }
        if (!pins_ok) continue;

        bool ctx_ok = true;
        for (const auto& c : vc.context) {
            if (detail::eval_pred_tv(c, env) != detail::TV::T) {
                ctx_ok = false;
                break;
            }
        }
        if (!ctx_ok) continue;
        ++satisfied;

        // outer universal binders: any falsifying grid assignment refutes
        std::map<std::string, double> witness;
        std::function<bool(size_t)> search = [&](size_t i) -> bool {
            if (i == vc.binders.size()) {
                auto r = detail::eval_qpred_tv(vc.goal, env, grids, &witness);
                return r == detail::TV::F;
            }
            const Binder& b = vc.binders[i];
            for (double v : binder_grid(b, env)) {
                env.vars[b.name] = v;
                if (search(i + 1)) {
                    witness[b.name] = v;
                    return true;
                }
            }
            env.vars.erase(b.name);
            return false;
        };
        if (search(0)) {
            std::map<std::string, double> cex = witness;
            for (const auto& [k, v] : env.vars)
                if (!witness.count(k)) cex[k] = v;
            if (satisfied_out) *satisfied_out = satisfied;
            return cex;
        }
    }
    if (satisfied_out) *satisfied_out = satisfied;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// The discharge pipeline

inline DischargeResult discharge_vc(const VC& vc0, const SamplerConfig& cfg = {}) {
    VC vc = vc0;
    for (auto& c : vc.context) c = simplify(c);
    vc.goal = qsimplify(vc.goal);

    DischargeResult res;
    if (is_qleaf_true(vc.goal)) {
        res.status = DischargeStatus::Proved;
        res.method = ProofMethod::LiteralArith;
        return res;
    }

    // equality goals route through the polynomial identity check first
    if (vc.goal->kind == QKind::Leaf && vc.goal->leaf->kind == PredKind::Cmp &&
        vc.goal->leaf->op == CmpOp::Eq) {
        EqResult eq = equal_poly_rw(vc.goal->leaf->lhs, vc.goal->leaf->rhs, cfg.rewrite_pack);
        if (eq.status == EqStatus::Equal) {
            res.status = DischargeStatus::Proved;
            res.method = ProofMethod::PolyIdentity;
            return res;
        }
        if (eq.status == EqStatus::Unknown && eq.cond_equal) {
            bool all = true;
            for (const auto& sc : eq.side_conds)
                all = all && entailed_by_context(cmp(CmpOp::Ne, sc.divisor, num(0)), vc.context);
            if (all) {
                res.status = DischargeStatus::Proved;
                res.method = ProofMethod::PolyIdentity;
                return res;
            }
        }
    }

    // refutation tableau with the syntactic inequality prover at the leaves
    {
        detail::Tableau tab;
        std::vector<QPred> items;
        std::vector<detail::Fact> facts;
        for (const auto& c : vc.context) items.push_back(detail::Tableau::qnnf(qleaf(c), false));
        for (const auto& b : vc.binders) detail::Tableau::add_binder_facts(b, facts);
        items.push_back(detail::Tableau::qnnf(vc.goal, true));
        if (tab.refute(std::move(items), std::move(facts)) && tab.closed_all) {
            res.status = DischargeStatus::Proved;
            res.method =
                tab.used_interval ? ProofMethod::IntervalFact : ProofMethod::LiteralArith;
            return res;
        }
    }

    int satisfied = 0;
    auto cex = falsify(vc, cfg, &satisfied);
    if (cex) {
        res.status = DischargeStatus::Refuted;
        res.counterexample = *cex;
        return res;
    }
    res.status = DischargeStatus::Unknown;
    FreeVars fv;
    for (const auto& c : vc.context) collect_free_vars(c, fv);
    if (satisfied == 0 && !(fv.state.empty() && fv.params.empty()) && !vc.context.empty())
        res.reason = "sampling exhausted: no context-satisfying sample found";
    else
        res.reason = "not syntactically provable; no counterexample found";
    return res;
}

/// Post-hoc soundness sampling: evaluates the goal at context-satisfying
/// samples; returns the number of samples that definitely falsified it
/// (0 for a sound Proved verdict).
inline int posthoc_violations(const VC& vc, const SamplerConfig& cfg, int samples) {
    SamplerConfig c2 = cfg;
    c2.samples = samples;
    auto cex = falsify(vc, c2);
    return cex ? 1 : 0;
}

}  // namespace odecert
