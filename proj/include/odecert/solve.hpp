#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "flows.hpp"

namespace odecert {

// Closed-form solving for restricted SODE classes: integrator chains over
// time, scalar affine equations and 2x2 rotation blocks, glued together along
// the dependency decomposition. Every produced candidate is re-certified
// before it is returned.

struct SolveTrace {
    std::vector<std::string> lines;

    void note(std::string s) { lines.push_back(std::move(s)); }

    std::string text() const {
        std::string out;
        for (const auto& l : lines) out += l + "\n";
        return out;
    }
};

struct SolveResult {
    std::optional<FlowCandidate> flow;
    SolveTrace trace;
    CertReport cert;  // meaningful when flow is set
};

// ---------------------------------------------------------------------------
// Dependency decomposition

struct SubSystem {
    std::vector<std::string> vars;  // in frame order
    Subst field;
};

/// Strongly connected components of the variable dependency graph, in
/// topological order: later components may reference earlier ones.
inline std::vector<SubSystem> decompose_independent(const Subst& field,
                                                    const std::vector<std::string>& frame) {
    const size_t n = frame.size();
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) index[frame[i]] = i;

    std::vector<std::vector<size_t>> adj(n);
    for (size_t i = 0; i < n; ++i) {
        auto fv = free_vars(field.lookup(frame[i]));
        for (const auto& v : fv.state) {
            auto it = index.find(v);
            if (it != index.end()) adj[i].push_back(it->second);
        }
    }

    // Tarjan's algorithm (iterative): emits SCCs in reverse topological order
    // of the dependency edges u -> v (u depends on v), so emitted components
    // come dependencies-first.
    std::vector<int> low(n, -1), num(n, -1), comp(n, -1);
    std::vector<size_t> stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0, ncomp = 0;
    std::vector<std::vector<size_t>> comps;

    struct Frame {
        size_t v;
        size_t edge = 0;
    };
    for (size_t root = 0; root < n; ++root) {
        if (num[root] != -1) continue;
        std::vector<Frame> call{{root}};
        num[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < adj[f.v].size()) {
                size_t w = adj[f.v][f.edge++];
                if (num[w] == -1) {
                    num[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                if (low[f.v] == num[f.v]) {
                    std::vector<size_t> scc;
                    while (true) {
                        size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        scc.push_back(w);
                        if (w == f.v) break;
                    }
                    std::sort(scc.begin(), scc.end());
                    comps.push_back(std::move(scc));
                    ++ncomp;
                }
                size_t done = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[done]);
            }
        }
    }

    std::vector<SubSystem> out;
    for (const auto& scc : comps) {
        SubSystem s;
        for (size_t i : scc) {
            s.vars.push_back(frame[i]);
            s.field = s.field.update(frame[i], field.lookup(frame[i]));
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Symbolic integration over the time variable

namespace detail {

inline bool poly_mentions_time(const Poly& p);

inline bool atom_mentions_time(const AtomPtr& a) {
    switch (a->kind) {
        case AtomKind::Time: return true;
        case AtomKind::Trans: return poly_mentions_time(*a->arg);
        case AtomKind::Quot: return poly_mentions_time(*a->qnum) || poly_mentions_time(*a->qden);
        default: return false;
    }
}

inline bool poly_mentions_time(const Poly& p) {
    for (const auto& [m, c] : p)
        for (const auto& [a, e] : m)
            if (atom_mentions_time(a)) return true;
    return false;
}

/// Matches arg = w * t with w free of time; returns w.
inline std::optional<Expr> linear_time_factor(const Poly& arg) {
    Poly w;
    for (const auto& [m, c] : arg) {
        Monomial rest;
        int texp = 0;
        for (const auto& [a, e] : m) {
            if (a->kind == AtomKind::Time) {
                texp = e;
            } else {
                if (atom_mentions_time(a)) return std::nullopt;
                rest.emplace_back(a, e);
            }
        }
        if (texp != 1) return std::nullopt;
        poly_add_term(w, rest, c);
    }
    if (w.empty()) return std::nullopt;
    return poly_to_expr(w);
}

/// Definite integral from 0 to t of a single monomial; nullopt when the
/// monomial falls outside the supported classes.
inline std::optional<Expr> integrate_monomial(const Monomial& m, const Rat& coeff) {
    int tdeg = 0;
    AtomPtr trans;
    Monomial rest;
    for (const auto& [a, e] : m) {
        if (a->kind == AtomKind::Time) {
            tdeg = e;
        } else if (a->kind == AtomKind::Trans &&
                   (a->name == "sin" || a->name == "cos" || a->name == "exp") &&
                   atom_mentions_time(a)) {
            if (trans || e != 1) return std::nullopt;
            trans = a;
        } else {
            if (atom_mentions_time(a)) return std::nullopt;
            rest.emplace_back(a, e);
        }
    }
    Poly rest_poly;
    poly_add_term(rest_poly, rest, coeff);
    Expr mult = poly_to_expr(rest_poly);

    if (!trans) {
        // c * t^k  ->  c * t^(k+1) / (k+1)
        return simplify(div(mul(mult, pow(time_var(), tdeg + 1)), num(tdeg + 1)));
    }
    if (tdeg != 0) return std::nullopt;
    auto w = linear_time_factor(*trans->arg);
    if (!w) return std::nullopt;
    Expr wt = mul(*w, time_var());
    if (trans->name == "sin")  // int c*sin(wt) = c/w * (1 - cos(wt))
        return simplify(mul(div(mult, *w), sub(num(1), cos(wt))));
    if (trans->name == "cos")  // int c*cos(wt) = c/w * sin(wt)
        return simplify(mul(div(mult, *w), sin(wt)));
    // int c*exp(wt) = c/w * (exp(wt) - 1)
    return simplify(mul(div(mult, *w), sub(exp(wt), num(1))));
}

/// Definite integral from 0 to t of an expression that is polynomial in t
/// with sin/cos/exp terms of linear arguments.
inline std::optional<Expr> integrate_in_time(const Expr& e) {
    NormResult n = poly_normalize(e);
    if (!n.conds.empty()) return std::nullopt;
    Expr acc = num(0);
    for (const auto& [m, c] : n.poly) {
        auto piece = integrate_monomial(m, c);
        if (!piece) return std::nullopt;
        acc = add(acc, *piece);
    }
    return simplify(acc);
}

inline bool mentions_any_state(const Expr& e, const std::vector<std::string>& vars) {
    for (const auto& v : vars)
        if (mentions_state(e, v)) return true;
    return false;
}

// --- class (b): scalar affine x' = a*x + b -------------------------------

struct AffineParts {
    Expr a, b;
};

inline std::optional<AffineParts> match_affine(const Expr& rhs, const std::string& x,
                                               const std::vector<std::string>& frame) {
    NormResult n = poly_normalize(rhs);
    if (!n.conds.empty()) return std::nullopt;
    Poly pa, pb;
    for (const auto& [m, c] : n.poly) {
        int xexp = 0;
        Monomial rest;
        for (const auto& [a, e] : m) {
            if (a->kind == AtomKind::State && a->name == x) {
                xexp = e;
            } else {
                rest.emplace_back(a, e);
            }
        }
        if (xexp > 1) return std::nullopt;
        poly_add_term(xexp == 1 ? pa : pb, rest, c);
    }
    if (pa.empty()) return std::nullopt;  // not affine with a != 0 shape
    Expr a = poly_to_expr(pa), b = poly_to_expr(pb);
    if (mentions_time(a) || mentions_time(b) || mentions_any_state(a, frame) ||
        mentions_any_state(b, frame))
        return std::nullopt;
    return AffineParts{a, b};
}

// --- class (c): 2x2 rotation u' = -w*v, v' = w*u --------------------------

/// rhs must be (coefficient) * other with the coefficient free of both
/// component variables and time.
inline std::optional<Expr> linear_coupling(const Expr& rhs, const std::string& self,
                                           const std::string& other) {
    NormResult n = poly_normalize(rhs);
    if (!n.conds.empty()) return std::nullopt;
    Poly w;
    for (const auto& [m, c] : n.poly) {
        int oexp = 0;
        Monomial rest;
        for (const auto& [a, e] : m) {
            if (a->kind == AtomKind::State && a->name == other) {
                oexp = e;
            } else {
                if (atom_mentions_time(a)) return std::nullopt;
                if (a->kind == AtomKind::State && (a->name == self || a->name == other))
                    return std::nullopt;
                rest.emplace_back(a, e);
            }
        }
        if (oexp != 1) return std::nullopt;
        poly_add_term(w, rest, c);
    }
    if (w.empty()) return std::nullopt;
    return poly_to_expr(w);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The solver

inline SolveResult solve_sode(const Subst& field, const std::vector<std::string>& frame,
                              const std::vector<Pred>& guard_context = {}) {
    SolveResult result;
    auto systems = decompose_independent(field, frame);
    result.trace.note("decomposed into " + std::to_string(systems.size()) + " component(s)");

    Subst solved;                    // var -> body over t and $-initials
    std::map<std::string, Expr> solved_map;
    std::vector<std::string> unsolved(frame.begin(), frame.end());

    auto mark_solved = [&](const std::string& v, const Expr& body) {
        solved = solved.update(v, body);
        solved_map[v] = body;
        unsolved.erase(std::remove(unsolved.begin(), unsolved.end(), v), unsolved.end());
    };

    for (const auto& sys : systems) {
        std::string comp_name;
        for (const auto& v : sys.vars) comp_name += (comp_name.empty() ? "" : ",") + v;

        if (sys.vars.size() == 1) {
            const std::string& x = sys.vars[0];
            Expr rhs = substitute(field.lookup(x), solved_map);

            // (a) integrator chain: polynomial in t and already-solved parts
            if (!detail::mentions_any_state(rhs, unsolved)) {
                auto integral = detail::integrate_in_time(rhs);
                if (integral) {
                    Expr body = simplify(add(state_var(x), *integral));
                    mark_solved(x, body);
                    result.trace.note(comp_name + ": integrator chain");
                    continue;
                }
                result.trace.note(comp_name + ": integrator class failed (non-polynomial in t)");
            } else {
                result.trace.note(comp_name + ": integrator class failed (self-dependence)");
            }

            // (b) scalar affine x' = a*x + b with a != 0
            auto affine = detail::match_affine(field.lookup(x), x, frame);
            if (affine) {
                // b/a*e^(a*t) + $x*e^(a*t) - b/a, with side condition a != 0
                Expr eat = exp(mul(affine->a, time_var()));
                Expr body = add(add(mul(div(affine->b, affine->a), eat), mul(state_var(x), eat)),
                                neg(div(affine->b, affine->a)));
                mark_solved(x, simplify(body));
                result.trace.note(comp_name + ": scalar affine (side condition " +
                                  to_string(affine->a) + " != 0)");
                continue;
            }
            result.trace.note(comp_name + ": affine class failed");
            result.trace.note(comp_name + ": unsolved");
            return result;
        }

        if (sys.vars.size() == 2) {
            const std::string &u = sys.vars[0], &v = sys.vars[1];
            auto cu = detail::linear_coupling(field.lookup(u), u, v);  // u' = cu * v
            auto cv = detail::linear_coupling(field.lookup(v), v, u);  // v' = cv * u
            if (cu && cv && equal_poly(*cu, neg(*cv)).equal()) {
                Expr w = *cv;  // u' = -w*v, v' = w*u
                Expr wt = mul(w, time_var());
                Expr ub = sub(mul(state_var(u), cos(wt)), mul(state_var(v), sin(wt)));
                Expr vb = add(mul(state_var(v), cos(wt)), mul(state_var(u), sin(wt)));
                mark_solved(u, simplify(ub));
                mark_solved(v, simplify(vb));
                result.trace.note(comp_name + ": rotation block (w = " + to_string(w) + ")");
                continue;
            }
            result.trace.note(comp_name + ": rotation class failed");
            result.trace.note(comp_name + ": unsolved");
            return result;
        }

        result.trace.note(comp_name + ": no solver class for components of size " +
                          std::to_string(sys.vars.size()));
        return result;
    }

    FlowCandidate candidate;
    candidate.frame = frame;
    candidate.body = solved;
    result.cert = certify_flow(candidate, field, guard_context);
    if (result.cert.flow_certified()) {
        result.trace.note("certified");
        result.flow = std::move(candidate);
    } else {
        result.trace.note("candidate found but certification failed");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Higher-order recasting (decoration for CAS requests only)

struct Recast {
    std::string var;
    int order = 2;
    Expr rhs;  // over the variable and its primed derivatives
};

namespace detail {

inline std::string primed(const std::string& v, int order) {
    std::string s = v;
    for (int i = 0; i < order; ++i) s += "'";
    return s;
}

}  // namespace detail

/// Detects derivative chains (x' = y, y' = rhs) and linearly-coupled pairs
/// and reports the equivalent higher-order form for each orientation.
inline std::vector<Recast> recast_higher_order(const Subst& field,
                                               const std::vector<std::string>& frame) {
    std::set<std::string> frame_set(frame.begin(), frame.end());
    std::vector<Recast> out;

    for (const auto& v0 : frame) {
        // follow pure chains v0' = v1, v1' = v2, ...
        std::vector<std::string> chain{v0};
        std::string cur = v0;
        while (true) {
            Expr rhs = field.lookup(cur);
            if (rhs->kind == ExprKind::StateVar && frame_set.count(rhs->name) &&
                std::find(chain.begin(), chain.end(), rhs->name) == chain.end()) {
                chain.push_back(rhs->name);
                cur = rhs->name;
                continue;
            }
            break;
        }
        if (chain.size() >= 2) {
            Expr rhs = field.lookup(chain.back());
            // rhs may only mention chain variables (plus params/time)
            bool ok = true;
            for (const auto& s : free_vars(rhs).state)
                if (frame_set.count(s) &&
                    std::find(chain.begin(), chain.end(), s) == chain.end())
                    ok = false;
            if (ok) {
                std::map<std::string, Expr> rename;
                for (size_t j = 0; j < chain.size(); ++j)
                    rename[chain[j]] = state_var(detail::primed(v0, static_cast<int>(j)));
                out.push_back({v0, static_cast<int>(chain.size()),
                               simplify(substitute(rhs, rename))});
                continue;
            }
        }

        // two-variable elimination: u'' = d/dt(f_u) with the partner removed
        for (const auto& v1 : frame) {
            if (v1 == v0) continue;
            if (!mentions_state(field.lookup(v0), v1)) continue;
            Expr second = lie_derivative(field, field.lookup(v0), frame_set);
            if (mentions_state(second, v1)) {
                // solve f_u = a*v1 + r for v1 when it occurs linearly
                NormResult n = poly_normalize(field.lookup(v0));
                if (!n.conds.empty()) continue;
                Poly pa, pr;
                bool linear = true;
                for (const auto& [m, c] : n.poly) {
                    int e1 = 0;
                    Monomial rest;
                    for (const auto& [a, e] : m) {
                        if (a->kind == AtomKind::State && a->name == v1) {
                            e1 = e;
                        } else {
                            rest.emplace_back(a, e);
                        }
                    }
                    if (e1 > 1) linear = false;
                    poly_add_term(e1 == 1 ? pa : pr, rest, c);
                }
                if (!linear || pa.empty()) continue;
                Expr vsol = div(sub(state_var(detail::primed(v0, 1)), poly_to_expr(pr)),
                                poly_to_expr(pa));
                std::map<std::string, Expr> sigma{{v1, vsol}};
                second = substitute(second, sigma);
            }
            Expr rhs = simplify(second);
            bool ok = true;
            for (const auto& s : free_vars(rhs).state)
                if (frame_set.count(s) && s != v0) ok = false;
            if (ok) {
                out.push_back({v0, 2, rhs});
                break;
            }
        }
    }
    return out;
}

}  // namespace odecert
