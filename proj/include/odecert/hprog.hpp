#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pred.hpp"

namespace odecert {

// ---------------------------------------------------------------------------
// Substitutions: finite maps from state-variable names to expressions with
// identity default. Iteration and rendering order is alphabetical.

class Subst {
public:
    Subst() = default;

    /// Later updates to the same key overwrite earlier ones.
    Subst update(const std::string& x, Expr e) const {
        Subst s = *this;
        s.map_[x] = std::move(e);
        return s;
    }

    /// sigma(x) if present, else the variable itself.
    Expr lookup(const std::string& x) const {
        auto it = map_.find(x);
        return it == map_.end() ? state_var(x) : it->second;
    }

    bool contains(const std::string& x) const { return map_.count(x) != 0; }
    bool empty() const { return map_.empty(); }
    size_t size() const { return map_.size(); }

    const std::map<std::string, Expr>& entries() const { return map_; }

    std::set<std::string> keys() const {
        std::set<std::string> ks;
        for (const auto& [k, v] : map_) ks.insert(k);
        return ks;
    }

    /// Sequential composition: (this ; rho) applied pointwise, i.e. each
    /// rho entry sees this substitution's values.
    Subst compose(const Subst& rho) const {
        Subst out = *this;
        for (const auto& [x, e] : rho.map_) out.map_[x] = substitute(e, map_);
        // keys of this not updated by rho keep their values (already copied)
        return out;
    }

    Expr apply(const Expr& e) const { return substitute(e, map_); }
    Pred apply(const Pred& p) const { return substitute(p, map_); }

    bool operator==(const Subst& o) const {
        if (map_.size() != o.map_.size()) return false;
        auto it = o.map_.begin();
        for (const auto& [k, v] : map_) {
            if (k != it->first || !expr_equal(v, it->second)) return false;
            ++it;
        }
        return true;
    }

private:
    std::map<std::string, Expr> map_;
};

inline std::string to_string(const Subst& s, bool dollars = false) {
    std::string out = "[";
    bool first = true;
    for (const auto& [k, v] : s.entries()) {
        if (!first) out += ", ";
        first = false;
        out += k + " ~> " + to_string(v, dollars);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Evolution commands and hybrid programs

enum class TimeDomain { NonnegReals, Interval, AllReals };

struct EvolutionCmd {
    std::vector<std::string> frame;  // ordered; field assigns each exactly once
    Subst field;                     // keys = frame
    Pred guard = ptrue();
    Expr t0 = num(0);
    TimeDomain domain = TimeDomain::NonnegReals;
    Expr dom_lo, dom_hi;  // Interval bounds
};

struct GhostSpec {
    std::string fresh;
    Expr a, b;  // fresh' = a * fresh + b
};

enum class HintKind { Auto, Flow, SolveFlow, DInduct, Darboux, Ghost };

struct ProofHint;
using HintPtr = std::shared_ptr<const ProofHint>;

struct ProofHint {
    HintKind kind = HintKind::Auto;
    Subst flow;                         // Flow: candidate parametric in t
    Expr darboux_e, darboux_cofactor;   // Darboux
    CmpOp darboux_rel = CmpOp::Ge;      // eq / ge / gt
    GhostSpec ghost;                    // Ghost
    HintPtr inner;                      // Ghost's inner hint
};

inline HintPtr hint_auto() {
    auto h = std::make_shared<ProofHint>();
    h->kind = HintKind::Auto;
    return h;
}
inline HintPtr hint_flow(Subst flow) {
    auto h = std::make_shared<ProofHint>();
    h->kind = HintKind::Flow;
    h->flow = std::move(flow);
    return h;
}
inline HintPtr hint_solve() {
    auto h = std::make_shared<ProofHint>();
    h->kind = HintKind::SolveFlow;
    return h;
}
inline HintPtr hint_dinduct() {
    auto h = std::make_shared<ProofHint>();
    h->kind = HintKind::DInduct;
    return h;
}
inline HintPtr hint_darboux(Expr e, Expr cofactor, CmpOp rel) {
    auto h = std::make_shared<ProofHint>();
    h->kind = HintKind::Darboux;
    h->darboux_e = std::move(e);
    h->darboux_cofactor = std::move(cofactor);
    h->darboux_rel = rel;
    return h;
}
inline HintPtr hint_ghost(GhostSpec spec, HintPtr inner) {
    auto h = std::make_shared<ProofHint>();
    h->kind = HintKind::Ghost;
    h->ghost = std::move(spec);
    h->inner = std::move(inner);
    return h;
}

enum class ProgKind { Skip, Abort, Test, Assign, Seq, Choice, Star, If, While, Evolve, EvolFlow };

class ProgNode;
using HProg = std::shared_ptr<const ProgNode>;

class ProgNode {
public:
    ProgKind kind;
    Pred test;                       // Test / If / While condition
    Subst assign;                    // Assign
    HProg a, b;                      // children
    std::optional<Pred> invariant;   // Star / While annotation
    EvolutionCmd evo;                // Evolve
    HintPtr hint;                    // Evolve strategy annotation
    Subst flow;                      // EvolFlow body (parametric in t)
    Pred flow_guard = ptrue();       // EvolFlow guard

    explicit ProgNode(ProgKind k) : kind(k) {}
};

inline HProg prog_skip() { return std::make_shared<ProgNode>(ProgKind::Skip); }
inline HProg prog_abort() { return std::make_shared<ProgNode>(ProgKind::Abort); }
inline HProg prog_test(Pred p) {
    auto n = std::make_shared<ProgNode>(ProgKind::Test);
    n->test = std::move(p);
    return n;
}
inline HProg prog_assign(Subst s) {
    auto n = std::make_shared<ProgNode>(ProgKind::Assign);
    n->assign = std::move(s);
    return n;
}
inline HProg prog_assign(const std::string& x, Expr e) {
    return prog_assign(Subst().update(x, std::move(e)));
}
inline HProg prog_seq(HProg a, HProg b) {
    auto n = std::make_shared<ProgNode>(ProgKind::Seq);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline HProg prog_choice(HProg a, HProg b) {
    auto n = std::make_shared<ProgNode>(ProgKind::Choice);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline HProg prog_star(HProg a, std::optional<Pred> inv = std::nullopt) {
    auto n = std::make_shared<ProgNode>(ProgKind::Star);
    n->a = std::move(a);
    n->invariant = std::move(inv);
    return n;
}
inline HProg prog_if(Pred c, HProg a, HProg b) {
    auto n = std::make_shared<ProgNode>(ProgKind::If);
    n->test = std::move(c);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline HProg prog_while(Pred c, HProg body, std::optional<Pred> inv = std::nullopt) {
    auto n = std::make_shared<ProgNode>(ProgKind::While);
    n->test = std::move(c);
    n->a = std::move(body);
    n->invariant = std::move(inv);
    return n;
}
inline HProg prog_evolve(EvolutionCmd evo, HintPtr hint = nullptr) {
    auto n = std::make_shared<ProgNode>(ProgKind::Evolve);
    n->evo = std::move(evo);
    n->hint = std::move(hint);
    return n;
}
inline HProg prog_evol_flow(Subst flow, Pred guard) {
    auto n = std::make_shared<ProgNode>(ProgKind::EvolFlow);
    n->flow = std::move(flow);
    n->flow_guard = std::move(guard);
    return n;
}

// ---------------------------------------------------------------------------
// Frame and non-modification analysis (syntactic over-approximation)

/// The set of state variables the program is permitted to change.
inline void collect_mutated(const HProg& p, std::set<std::string>& out) {
    switch (p->kind) {
        case ProgKind::Skip:
        case ProgKind::Abort:
        case ProgKind::Test:
            return;
        case ProgKind::Assign:
            for (const auto& [k, v] : p->assign.entries()) out.insert(k);
            return;
        case ProgKind::Seq:
        case ProgKind::Choice:
        case ProgKind::If:
            collect_mutated(p->a, out);
            collect_mutated(p->b, out);
            return;
        case ProgKind::Star:
        case ProgKind::While:
            collect_mutated(p->a, out);
            return;
        case ProgKind::Evolve:
            for (const auto& x : p->evo.frame) out.insert(x);
            return;
        case ProgKind::EvolFlow:
            for (const auto& [k, v] : p->flow.entries()) out.insert(k);
            return;
    }
}

inline std::set<std::string> mutated_frame(const HProg& p) {
    std::set<std::string> out;
    collect_mutated(p, out);
    return out;
}

/// True iff none of the given variables can be modified by the program.
inline bool nmods_check(const HProg& p, const std::set<std::string>& vars) {
    auto m = mutated_frame(p);
    for (const auto& v : vars)
        if (m.count(v)) return false;
    return true;
}

/// True iff the expression does not (syntactically) depend on any of the
/// given state variables.
inline bool unrestricted_check(const std::set<std::string>& vars, const Expr& e) {
    auto fv = free_vars(e);
    for (const auto& v : vars)
        if (fv.state.count(v)) return false;
    return true;
}

inline bool unrestricted_check(const std::set<std::string>& vars, const Pred& p) {
    auto fv = free_vars(p);
    for (const auto& v : vars)
        if (fv.state.count(v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Problems and goals

enum class GoalKind { Hoare, Diamond };

struct Goal {
    std::string name;
    GoalKind kind = GoalKind::Hoare;
    Pred pre;
    HProg prog;
    Pred post;
    Expr witness;  // Diamond only, optional
    HintPtr strategy;
};

struct Problem {
    std::string name;
    std::vector<std::string> param_names;           // declaration order
    std::vector<std::pair<std::string, Pred>> assumptions;  // named or anonymous
    std::vector<std::string> state_vars;            // declaration order
    std::map<std::string, HProg> prog_defs;
    std::map<std::string, Subst> flow_defs;
    std::vector<Goal> goals;

    bool is_param(const std::string& n) const {
        for (const auto& p : param_names)
            if (p == n) return true;
        return false;
    }
    bool is_state(const std::string& n) const {
        for (const auto& s : state_vars)
            if (s == n) return true;
        return false;
    }
    bool is_declared(const std::string& n) const { return is_param(n) || is_state(n); }

    std::vector<Pred> assumption_preds() const {
        std::vector<Pred> out;
        for (const auto& [n, p] : assumptions) out.push_back(p);
        return out;
    }
};

}  // namespace odecert
