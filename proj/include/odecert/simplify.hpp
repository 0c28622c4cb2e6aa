#pragma once

#include <utility>
#include <vector>

#include "expr.hpp"

namespace odecert {

// Bounded-pass bottom-up simplifier. Folds rational constants, removes
// additive/multiplicative units and zeros, flattens nested sums and products
// and rebuilds them in a fixed deterministic order. Products are never
// distributed over sums, so the result stays close to the input shape.

namespace detail {

inline Expr simplify_node(const Expr& e);

// A flattened product: rational coefficient times base^exp factors.
// Exponents may be negative during flattening; negatives are rebuilt as Div.
struct Factor {
    Expr base;
    int exp;
};

struct Term {
    Rat coeff{1};
    std::vector<Factor> factors;  // sorted by expr_compare of base
};

inline void push_factor(std::vector<Factor>& fs, const Expr& base, int exp) {
    if (exp == 0) return;
    for (auto& f : fs) {
        if (expr_equal(f.base, base)) {
            f.exp += exp;
            return;
        }
    }
    fs.push_back({base, exp});
}

// Decomposes a (simplified) expression into coefficient and factors.
inline void flatten_product(const Expr& e, int sign_exp, Term& t, bool& div_by_zero) {
    switch (e->kind) {
        case ExprKind::Num:
            if (e->value == 0 && sign_exp < 0) {
                div_by_zero = true;
                push_factor(t.factors, e, sign_exp);
            } else if (sign_exp > 0) {
                t.coeff *= rat_pow(e->value, sign_exp);
            } else {
                t.coeff /= rat_pow(e->value, -sign_exp);
            }
            return;
        case ExprKind::Neg:
            // the sign contributes (-1)^sign_exp
            if (sign_exp % 2 != 0) t.coeff = -t.coeff;
            flatten_product(e->a, sign_exp, t, div_by_zero);
            return;
        case ExprKind::Mul:
            flatten_product(e->a, sign_exp, t, div_by_zero);
            flatten_product(e->b, sign_exp, t, div_by_zero);
            return;
        case ExprKind::Div:
            flatten_product(e->a, sign_exp, t, div_by_zero);
            flatten_product(e->b, -sign_exp, t, div_by_zero);
            return;
        case ExprKind::Pow:
            flatten_product(e->a, sign_exp * e->exponent, t, div_by_zero);
            return;
        default:
            push_factor(t.factors, e, sign_exp);
            return;
    }
}

inline Expr build_factor(const Factor& f) {
    if (f.exp == 1) return f.base;
    return pow(f.base, f.exp);
}

// Multiplies the positive-exponent factors together (coefficient first).
inline Expr build_product(const Rat& coeff, const std::vector<Factor>& fs) {
    Expr acc;
    if (coeff != 1 || fs.empty()) acc = num(coeff);
    for (const auto& f : fs) acc = acc ? mul(acc, build_factor(f)) : build_factor(f);
    return acc;
}

inline Expr build_term(Term t) {
    bool negative = t.coeff < 0;
    Rat c = negative ? Rat(-t.coeff) : t.coeff;

    std::sort(t.factors.begin(), t.factors.end(),
              [](const Factor& x, const Factor& y) { return expr_compare(x.base, y.base) < 0; });
    std::vector<Factor> numf, denf;
    for (auto& f : t.factors) {
        if (f.exp > 0)
            numf.push_back(f);
        else
            denf.push_back({f.base, -f.exp});
    }
    Expr result;
    if (denf.empty()) {
        result = build_product(c, numf);
    } else {
        // p/q coefficient splits across numerator and denominator
        result = div(build_product(Rat(numerator(c)), numf),
                     build_product(Rat(denominator(c)), denf));
    }
    return negative ? neg(result) : result;
}

// Term sort key: TimeVar degree descending, then structural order.
inline int time_degree(const Term& t) {
    int d = 0;
    for (const auto& f : t.factors)
        if (f.base->kind == ExprKind::TimeVar) d += f.exp;
    return d;
}

inline bool term_key_equal(const Term& a, const Term& b) {
    if (a.factors.size() != b.factors.size()) return false;
    for (size_t i = 0; i < a.factors.size(); ++i) {
        if (a.factors[i].exp != b.factors[i].exp) return false;
        if (!expr_equal(a.factors[i].base, b.factors[i].base)) return false;
    }
    return true;
}

inline int term_key_compare(const Term& a, const Term& b) {
    int ta = time_degree(a), tb = time_degree(b);
    if (ta != tb) return ta > tb ? -1 : 1;
    size_t n = std::min(a.factors.size(), b.factors.size());
    for (size_t i = 0; i < n; ++i) {
        int c = expr_compare(a.factors[i].base, b.factors[i].base);
        if (c != 0) return c;
        if (a.factors[i].exp != b.factors[i].exp) return a.factors[i].exp > b.factors[i].exp ? -1 : 1;
    }
    if (a.factors.size() != b.factors.size())
        return a.factors.size() > b.factors.size() ? -1 : 1;
    return 0;
}

inline void flatten_sum(const Expr& e, bool negate, std::vector<Term>& terms) {
    switch (e->kind) {
        case ExprKind::Add:
            flatten_sum(e->a, negate, terms);
            flatten_sum(e->b, negate, terms);
            return;
        case ExprKind::Sub:
            flatten_sum(e->a, negate, terms);
            flatten_sum(e->b, !negate, terms);
            return;
        case ExprKind::Neg:
            flatten_sum(e->a, !negate, terms);
            return;
        default: {
            Term t;
            bool div_by_zero = false;
            flatten_product(e, 1, t, div_by_zero);
            if (negate) t.coeff = -t.coeff;
            std::sort(t.factors.begin(), t.factors.end(), [](const Factor& x, const Factor& y) {
                return expr_compare(x.base, y.base) < 0;
            });
            // x^0 factors vanish unless they guard a division by zero
            if (!div_by_zero) {
                std::erase_if(t.factors, [](const Factor& f) { return f.exp == 0; });
                if (t.coeff == 0) t.factors.clear();
            }
            terms.push_back(std::move(t));
            return;
        }
    }
}

inline Expr rebuild_sum(std::vector<Term>& terms) {
    // combine terms with identical factor keys
    std::vector<Term> combined;
    for (auto& t : terms) {
        bool merged = false;
        for (auto& c : combined) {
            if (term_key_equal(c, t)) {
                c.coeff += t.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) combined.push_back(std::move(t));
    }
    std::erase_if(combined, [](const Term& t) { return t.coeff == 0 && !t.factors.empty(); });
    std::erase_if(combined, [](const Term& t) { return t.coeff == 0 && t.factors.empty(); });
    if (combined.empty()) return num(0);
    std::stable_sort(combined.begin(), combined.end(),
                     [](const Term& a, const Term& b) { return term_key_compare(a, b) < 0; });

    Expr acc;
    for (auto& t : combined) {
        Expr piece = build_term(std::move(t));
        if (!acc) {
            acc = piece;
        } else if (piece->kind == ExprKind::Neg) {
            acc = sub(acc, piece->a);
        } else {
            acc = add(acc, piece);
        }
    }
    return acc;
}

inline Expr simplify_children(const Expr& e) {
    if (is_leaf(e->kind)) return e;
    return rebuild(e, e->a ? simplify_node(e->a) : nullptr, e->b ? simplify_node(e->b) : nullptr);
}

inline Expr simplify_node(const Expr& e0) {
    Expr e = simplify_children(e0);
    switch (e->kind) {
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Neg:
        case ExprKind::Mul:
        case ExprKind::Div:
        case ExprKind::Pow: {
            if (e->kind == ExprKind::Pow) {
                if (e->exponent == 0) return num(1);
                if (e->exponent == 1) return e->a;
            }
            std::vector<Term> terms;
            flatten_sum(e, false, terms);
            return rebuild_sum(terms);
        }
        case ExprKind::Sin:
            if (is_zero(e->a)) return num(0);
            return e;
        case ExprKind::Cos:
            if (is_zero(e->a)) return num(1);
            return e;
        case ExprKind::Tan:
            if (is_zero(e->a)) return num(0);
            return e;
        case ExprKind::Exp:
            if (is_zero(e->a)) return num(1);
            return e;
        case ExprKind::Sqrt:
            if (is_zero(e->a)) return num(0);
            if (is_one(e->a)) return num(1);
            return e;
        case ExprKind::Ln:
            if (is_one(e->a)) return num(0);
            return e;
        default:
            return e;
    }
}

inline int expr_depth(const Expr& e) {
    int d = 0;
    if (e->a) d = std::max(d, expr_depth(e->a));
    if (e->b) d = std::max(d, expr_depth(e->b));
    return d + 1;
}

}  // namespace detail

inline Expr simplify(const Expr& e) {
    int max_passes = std::max(2, detail::expr_depth(e) * 4);
    Expr cur = e;
    for (int i = 0; i < max_passes; ++i) {
        Expr next = detail::simplify_node(cur);
        if (expr_equal(next, cur)) return next;
        cur = next;
    }
    return cur;
}

}  // namespace odecert
