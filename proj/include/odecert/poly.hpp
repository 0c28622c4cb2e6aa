#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "simplify.hpp"

namespace odecert {

// Polynomial normal form with exact rational coefficients. Atoms are
// variables, named constants, or opaque applications (transcendental calls
// and divisions by non-constant divisors) whose arguments are themselves in
// normal form. Two values are structurally equal iff they denote the same
// polynomial over the atom alphabet.

class Atom;
using AtomPtr = std::shared_ptr<const Atom>;

// monomial: multiset of atoms as sorted (atom, exponent) pairs
using Monomial = std::vector<std::pair<AtomPtr, int>>;

inline int monomial_compare(const Monomial& x, const Monomial& y);

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return monomial_compare(a, b) < 0;
    }
};

using Poly = std::map<Monomial, Rat, MonoLess>;

enum class AtomKind { State, Par, Time, Const, Trans, Quot };

class Atom {
public:
    AtomKind kind;
    std::string name;  // variable/constant name, or function name for Trans
    std::shared_ptr<const Poly> arg;          // Trans argument
    std::shared_ptr<const Poly> qnum, qden;   // Quot components

    explicit Atom(AtomKind k) : kind(k) {}
};

inline int poly_compare(const Poly& a, const Poly& b);

// Global atom order: state < param < time < named-const < transcendental
// (recursively compared) < quotient atoms.
inline int atom_rank(AtomKind k) {
    switch (k) {
        case AtomKind::State: return 0;
        case AtomKind::Par: return 1;
        case AtomKind::Time: return 2;
        case AtomKind::Const: return 3;
        case AtomKind::Trans: return 4;
        case AtomKind::Quot: return 5;
    }
    return 9;
}

inline int atom_compare(const AtomPtr& a, const AtomPtr& b) {
    if (a.get() == b.get()) return 0;
    int ra = atom_rank(a->kind), rb = atom_rank(b->kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a->kind) {
        case AtomKind::State:
        case AtomKind::Par:
        case AtomKind::Const: {
            int c = a->name.compare(b->name);
            return c < 0 ? -1 : (c == 0 ? 0 : 1);
        }
        case AtomKind::Time:
            return 0;
        case AtomKind::Trans: {
            int c = a->name.compare(b->name);
            if (c != 0) return c < 0 ? -1 : 1;
            return poly_compare(*a->arg, *b->arg);
        }
        case AtomKind::Quot: {
            int c = poly_compare(*a->qnum, *b->qnum);
            if (c != 0) return c;
            return poly_compare(*a->qden, *b->qden);
        }
    }
    return 0;
}

inline int monomial_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [a, e] : m) d += e;
    return d;
}

// graded-lexicographic monomial order
inline int monomial_compare(const Monomial& x, const Monomial& y) {
    int dx = monomial_degree(x), dy = monomial_degree(y);
    if (dx != dy) return dx < dy ? -1 : 1;
    size_t n = std::min(x.size(), y.size());
    for (size_t i = 0; i < n; ++i) {
        int c = atom_compare(x[i].first, y[i].first);
        if (c != 0) return c;
        if (x[i].second != y[i].second) return x[i].second > y[i].second ? -1 : 1;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

inline int poly_compare(const Poly& a, const Poly& b) {
    auto ia = a.begin(), ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        int c = monomial_compare(ia->first, ib->first);
        if (c != 0) return c;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (ia != a.end()) return 1;
    if (ib != b.end()) return -1;
    return 0;
}

inline bool poly_equal(const Poly& a, const Poly& b) { return poly_compare(a, b) == 0; }

inline bool poly_is_zero(const Poly& p) { return p.empty(); }

inline bool poly_is_const(const Poly& p) {
    return p.empty() || (p.size() == 1 && p.begin()->first.empty());
}

inline Rat poly_const_value(const Poly& p) {
    if (p.empty()) return Rat(0);
    return p.begin()->second;
}

// ---------------------------------------------------------------------------
// Ring operations

inline void poly_add_term(Poly& p, const Monomial& m, const Rat& c) {
    if (c == 0) return;
    auto it = p.find(m);
    if (it == p.end()) {
        p.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

inline Poly poly_const(const Rat& c) {
    Poly p;
    if (c != 0) p.emplace(Monomial{}, c);
    return p;
}

inline Poly poly_atom(AtomPtr a) {
    Poly p;
    p.emplace(Monomial{{std::move(a), 1}}, Rat(1));
    return p;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b) poly_add_term(r, m, c);
    return r;
}

inline Poly poly_neg(const Poly& a) {
    Poly r;
    for (const auto& [m, c] : a) r.emplace(m, -c);
    return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

inline Monomial monomial_mul(const Monomial& x, const Monomial& y) {
    Monomial r;
    size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        int c = atom_compare(x[i].first, y[j].first);
        if (c < 0) {
            r.push_back(x[i++]);
        } else if (c > 0) {
            r.push_back(y[j++]);
        } else {
            r.emplace_back(x[i].first, x[i].second + y[j].second);
            ++i, ++j;
        }
    }
    for (; i < x.size(); ++i) r.push_back(x[i]);
    for (; j < y.size(); ++j) r.push_back(y[j]);
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) poly_add_term(r, monomial_mul(ma, mb), ca * cb);
    return r;
}

inline Poly poly_scale(const Poly& a, const Rat& c) {
    Poly r;
    if (c == 0) return r;
    for (const auto& [m, k] : a) r.emplace(m, k * c);
    return r;
}

inline Poly poly_pow(const Poly& a, int n) {
    Poly acc = poly_const(Rat(1));
    Poly base = a;
    while (n > 0) {
        if (n & 1) acc = poly_mul(acc, base);
        base = poly_mul(base, base);
        n >>= 1;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Normalization of expressions

/// Recorded "divisor must be nonzero" obligation from a Div node whose
/// divisor is not a nonzero rational constant.
struct SideCond {
    Expr divisor;
    std::shared_ptr<const Poly> divisor_poly;
};

struct NormResult {
    Poly poly;
    std::vector<SideCond> conds;
};

namespace detail {

inline void merge_conds(std::vector<SideCond>& into, const std::vector<SideCond>& from) {
    for (const auto& c : from) {
        bool dup = false;
        for (const auto& d : into) {
            if (poly_equal(*c.divisor_poly, *d.divisor_poly)) {
                dup = true;
                break;
            }
        }
        if (!dup) into.push_back(c);
    }
}

inline Poly normalize_rec(const Expr& e, std::vector<SideCond>& conds);

inline AtomPtr trans_atom(const char* fn, const Expr& arg, std::vector<SideCond>& conds) {
    auto a = std::make_shared<Atom>(AtomKind::Trans);
    a->name = fn;
    a->arg = std::make_shared<Poly>(normalize_rec(arg, conds));
    return a;
}

inline Poly normalize_rec(const Expr& e, std::vector<SideCond>& conds) {
    switch (e->kind) {
        case ExprKind::Num: return poly_const(e->value);
        case ExprKind::NamedConst: {
            auto a = std::make_shared<Atom>(AtomKind::Const);
            a->name = e->name;
            return poly_atom(a);
        }
        case ExprKind::Param: {
            auto a = std::make_shared<Atom>(AtomKind::Par);
            a->name = e->name;
            return poly_atom(a);
        }
        case ExprKind::StateVar: {
            auto a = std::make_shared<Atom>(AtomKind::State);
            a->name = e->name;
            return poly_atom(a);
        }
        case ExprKind::TimeVar: return poly_atom(std::make_shared<Atom>(AtomKind::Time));
        case ExprKind::Neg: return poly_neg(normalize_rec(e->a, conds));
        case ExprKind::Add: return poly_add(normalize_rec(e->a, conds), normalize_rec(e->b, conds));
        case ExprKind::Sub: return poly_sub(normalize_rec(e->a, conds), normalize_rec(e->b, conds));
        case ExprKind::Mul: return poly_mul(normalize_rec(e->a, conds), normalize_rec(e->b, conds));
        case ExprKind::Pow: return poly_pow(normalize_rec(e->a, conds), e->exponent);
        case ExprKind::Div: {
            Poly den = normalize_rec(e->b, conds);
            if (poly_is_const(den) && poly_const_value(den) != 0) {
                return poly_scale(normalize_rec(e->a, conds), Rat(1) / poly_const_value(den));
            }
            // opaque quotient atom; divisor != 0 becomes a side condition
            SideCond sc{e->b, std::make_shared<Poly>(den)};
            merge_conds(conds, {sc});
            auto a = std::make_shared<Atom>(AtomKind::Quot);
            a->qnum = std::make_shared<Poly>(normalize_rec(e->a, conds));
            a->qden = sc.divisor_poly;
            return poly_atom(a);
        }
        case ExprKind::Sin: return poly_atom(trans_atom("sin", e->a, conds));
        case ExprKind::Cos: return poly_atom(trans_atom("cos", e->a, conds));
        case ExprKind::Tan: return poly_atom(trans_atom("tan", e->a, conds));
        case ExprKind::Exp: return poly_atom(trans_atom("exp", e->a, conds));
        case ExprKind::Sqrt: return poly_atom(trans_atom("sqrt", e->a, conds));
        case ExprKind::Ln: return poly_atom(trans_atom("ln", e->a, conds));
    }
    throw Error(ErrKind::Internal, "normalize: bad node");
}

}  // namespace detail

inline NormResult poly_normalize(const Expr& e) {
    NormResult r;
    r.poly = detail::normalize_rec(e, r.conds);
    return r;
}

// ---------------------------------------------------------------------------
// Polynomial equality decision

enum class EqStatus { Equal, NotEqual, Unknown };

struct EqResult {
    EqStatus status;
    std::vector<SideCond> side_conds;  // unresolved divisor conditions
    // the difference vanishes after clearing denominators; equality holds
    // wherever the side conditions do
    bool cond_equal = false;

    bool equal() const { return status == EqStatus::Equal; }
};

inline bool poly_has_opaque_atoms(const Poly& p) {
    for (const auto& [m, c] : p)
        for (const auto& [a, e] : m)
            if (a->kind == AtomKind::Trans || a->kind == AtomKind::Quot ||
                a->kind == AtomKind::Const)
                return true;
    return false;
}

namespace detail {

// Rational-function normal form p/q used by the equality decision: divisions
// cross-multiply instead of opacifying, so field-law identities close.
struct Frac {
    Poly num, den;
};

inline Frac frac_rec(const Expr& e, std::vector<SideCond>& conds) {
    switch (e->kind) {
        case ExprKind::Neg: {
            Frac a = frac_rec(e->a, conds);
            return {poly_neg(a.num), a.den};
        }
        case ExprKind::Add:
        case ExprKind::Sub: {
            Frac a = frac_rec(e->a, conds), b = frac_rec(e->b, conds);
            Poly cross_b = poly_mul(b.num, a.den);
            if (e->kind == ExprKind::Sub) cross_b = poly_neg(cross_b);
            if (poly_equal(a.den, b.den))
                return {poly_add(a.num, e->kind == ExprKind::Sub ? poly_neg(b.num) : b.num),
                        a.den};
            return {poly_add(poly_mul(a.num, b.den), cross_b), poly_mul(a.den, b.den)};
        }
        case ExprKind::Mul: {
            Frac a = frac_rec(e->a, conds), b = frac_rec(e->b, conds);
            return {poly_mul(a.num, b.num), poly_mul(a.den, b.den)};
        }
        case ExprKind::Div: {
            Frac a = frac_rec(e->a, conds), b = frac_rec(e->b, conds);
            if (poly_is_const(b.num) && poly_const_value(b.num) != 0)
                return {poly_scale(poly_mul(a.num, b.den), Rat(1) / poly_const_value(b.num)),
                        a.den};
            SideCond sc{e->b, std::make_shared<Poly>(b.num)};
            merge_conds(conds, {sc});
            return {poly_mul(a.num, b.den), poly_mul(a.den, b.num)};
        }
        case ExprKind::Pow: {
            Frac a = frac_rec(e->a, conds);
            return {poly_pow(a.num, e->exponent), poly_pow(a.den, e->exponent)};
        }
        default:
            // leaves and transcendental applications share the PolyNF atoms
            return {normalize_rec(e, conds), poly_const(Rat(1))};
    }
}

}  // namespace detail

inline EqResult equal_poly(const Expr& lhs, const Expr& rhs) {
    std::vector<SideCond> conds;
    detail::Frac diff = detail::frac_rec(sub(lhs, rhs), conds);
    // conditions whose divisor normalizes to a nonzero rational are trivial
    std::vector<SideCond> open;
    for (auto& c : conds) {
        if (poly_is_const(*c.divisor_poly) && poly_const_value(*c.divisor_poly) != 0) continue;
        open.push_back(c);
    }
    if (poly_is_zero(diff.num)) {
        if (open.empty()) return {EqStatus::Equal, {}, false};
        EqResult r{EqStatus::Unknown, std::move(open), true};
        return r;
    }
    // A nonzero difference over free variable atoms is a genuine disproof;
    // opaque atoms may hide algebraic relations, so stay agnostic there.
    if (!poly_has_opaque_atoms(diff.num) && open.empty())
        return {EqStatus::NotEqual, {}, false};
    return {EqStatus::Unknown, std::move(open), false};
}

// ---------------------------------------------------------------------------
// Optional transcendental rewrite pack: sin(a)^2 -> 1 - cos(a)^2 and
// exp(a)*exp(b) -> exp(a+b) (with exp(a)^k -> exp(k*a), exp(0) -> 1).
// Off by default so the decision procedure stays predictable; enabled per
// discharge attempt.

namespace detail {

inline bool rewrite_monomial(const Monomial& m, const Rat& coeff, Poly& out) {
    // merge exponentials first
    Poly exp_arg;
    Monomial rest;
    int exp_atoms = 0;
    bool exp_power = false;
    for (const auto& [a, e] : m) {
        if (a->kind == AtomKind::Trans && a->name == "exp") {
            ++exp_atoms;
            if (e > 1) exp_power = true;
            exp_arg = poly_add(exp_arg, poly_scale(*a->arg, Rat(e)));
        } else {
            rest.emplace_back(a, e);
        }
    }
    if (exp_atoms > 1 || exp_power || (exp_atoms == 1 && poly_is_zero(exp_arg))) {
        Monomial merged = rest;
        if (!poly_is_zero(exp_arg)) {
            auto a = std::make_shared<Atom>(AtomKind::Trans);
            a->name = "exp";
            a->arg = std::make_shared<Poly>(exp_arg);
            Monomial one{{a, 1}};
            merged = monomial_mul(merged, one);
        }
        poly_add_term(out, merged, coeff);
        return true;
    }

    // lower one squared sine
    for (size_t i = 0; i < m.size(); ++i) {
        const auto& [a, e] = m[i];
        if (a->kind != AtomKind::Trans || a->name != "sin" || e < 2) continue;
        Monomial lowered;
        for (size_t j = 0; j < m.size(); ++j) {
            if (j == i) {
                if (e > 2) lowered.emplace_back(a, e - 2);
            } else {
                lowered.push_back(m[j]);
            }
        }
        auto cosa = std::make_shared<Atom>(AtomKind::Trans);
        cosa->name = "cos";
        cosa->arg = a->arg;
        Monomial with_cos = monomial_mul(lowered, Monomial{{cosa, 2}});
        poly_add_term(out, lowered, coeff);
        poly_add_term(out, with_cos, -coeff);
        return true;
    }
    poly_add_term(out, m, coeff);
    return false;
}

}  // namespace detail

inline Poly poly_apply_rewrite_pack(Poly p) {
    for (int pass = 0; pass < 64; ++pass) {
        Poly next;
        bool changed = false;
        for (const auto& [m, c] : p) changed = detail::rewrite_monomial(m, c, next) || changed;
        p = std::move(next);
        if (!changed) break;
    }
    return p;
}

/// Equality with the rewrite pack applied when the plain decision is
/// inconclusive.
inline EqResult equal_poly_rw(const Expr& lhs, const Expr& rhs, bool rewrite_pack) {
    EqResult base = equal_poly(lhs, rhs);
    if (!rewrite_pack || base.status == EqStatus::Equal || base.cond_equal) return base;
    std::vector<SideCond> conds;
    detail::Frac diff = detail::frac_rec(sub(lhs, rhs), conds);
    Poly rewritten = poly_apply_rewrite_pack(diff.num);
    if (!poly_is_zero(rewritten)) return base;
    std::vector<SideCond> open;
    for (auto& c : conds) {
        if (poly_is_const(*c.divisor_poly) && poly_const_value(*c.divisor_poly) != 0) continue;
        open.push_back(c);
    }
    if (open.empty()) return {EqStatus::Equal, {}, false};
    return {EqStatus::Unknown, std::move(open), true};
}

// ---------------------------------------------------------------------------
// Conversion back to expressions (coefficient extraction for the solver)

inline Expr atom_to_expr(const AtomPtr& a);

inline Expr poly_to_expr(const Poly& p) {
    if (p.empty()) return num(0);
    Expr acc;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        Expr term;
        for (const auto& [a, e] : it->first) {
            Expr f = e == 1 ? atom_to_expr(a) : pow(atom_to_expr(a), e);
            term = term ? mul(term, f) : f;
        }
        Expr piece;
        if (!term) {
            piece = num(it->second);
        } else if (it->second == 1) {
            piece = term;
        } else {
            piece = mul(num(it->second), term);
        }
        acc = acc ? add(acc, piece) : piece;
    }
    return simplify(acc);
}

inline Expr atom_to_expr(const AtomPtr& a) {
    switch (a->kind) {
        case AtomKind::State: return state_var(a->name);
        case AtomKind::Par: return param(a->name);
        case AtomKind::Time: return time_var();
        case AtomKind::Const: return named_const(a->name);
        case AtomKind::Trans: {
            Expr arg = poly_to_expr(*a->arg);
            if (a->name == "sin") return sin(arg);
            if (a->name == "cos") return cos(arg);
            if (a->name == "tan") return tan(arg);
            if (a->name == "exp") return exp(arg);
            if (a->name == "sqrt") return sqrt(arg);
            return ln(arg);
        }
        case AtomKind::Quot: return div(poly_to_expr(*a->qnum), poly_to_expr(*a->qden));
    }
    throw Error(ErrKind::Internal, "atom_to_expr: bad atom");
}

}  // namespace odecert
