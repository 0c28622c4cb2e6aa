#pragma once

#include <string>

#include "hprog.hpp"

namespace odecert {

// Canonical pretty-printer for programs and problem files. Printing a parsed
// problem and reparsing yields the same structure (printer fixpoint).

namespace detail {

inline void print_hint(const HintPtr& h, std::string& out);

// program precedence: 0 choice, 1 seq, 2 atom
inline void print_prog_rec(const HProg& p, std::string& out, int parent_prec) {
    auto paren = [&](int prec, auto&& body) {
        bool need = prec < parent_prec;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    switch (p->kind) {
        case ProgKind::Skip: out += "skip"; return;
        case ProgKind::Abort: out += "abort"; return;
        case ProgKind::Test:
            out += "? ";
            out += to_string(p->test);
            return;
        case ProgKind::Assign: {
            bool multi = p->assign.size() > 1;
            if (multi) out += "(";
            bool first = true;
            for (const auto& [k, v] : p->assign.entries()) {
                if (!first) out += "; ";
                first = false;
                out += k + " := " + to_string(v);
            }
            if (multi) out += ")";
            return;
        }
        case ProgKind::Seq:
            paren(1, [&] {
                print_prog_rec(p->a, out, 1);
                out += "; ";
                print_prog_rec(p->b, out, 2);
            });
            return;
        case ProgKind::Choice:
            paren(0, [&] {
                print_prog_rec(p->a, out, 0);
                out += " |_| ";
                print_prog_rec(p->b, out, 1);
            });
            return;
        case ProgKind::Star:
            out += "loop (";
            print_prog_rec(p->a, out, 0);
            out += ")";
            if (p->invariant) out += " inv (" + to_string(*p->invariant) + ")";
            return;
        case ProgKind::If:
            out += "if " + to_string(p->test) + " { ";
            print_prog_rec(p->a, out, 0);
            out += " } else { ";
            print_prog_rec(p->b, out, 0);
            out += " }";
            return;
        case ProgKind::While:
            out += "while " + to_string(p->test);
            if (p->invariant) out += " inv (" + to_string(*p->invariant) + ")";
            out += " { ";
            print_prog_rec(p->a, out, 0);
            out += " }";
            return;
        case ProgKind::Evolve: {
            out += "{";
            bool first = true;
            for (const auto& x : p->evo.frame) {
                if (!first) out += ", ";
                first = false;
                out += x + "' = " + to_string(p->evo.field.lookup(x));
            }
            if (!is_true(p->evo.guard)) out += " | " + to_string(p->evo.guard);
            out += "}";
            if (p->hint) {
                out += " using ";
                print_hint(p->hint, out);
            }
            return;
        }
        case ProgKind::EvolFlow:
            // printed through its named definition by print_problem; inline
            // occurrences render the flow body directly
            out += "evol " + to_string(p->flow, true);
            if (!is_true(p->flow_guard)) out += " | " + to_string(p->flow_guard);
            return;
    }
}

inline void print_hint(const HintPtr& h, std::string& out) {
    switch (h->kind) {
        case HintKind::Auto: out += "auto"; return;
        case HintKind::Flow:
            out += "flow " + to_string(h->flow, true);
            return;
        case HintKind::SolveFlow: out += "solve"; return;
        case HintKind::DInduct: out += "dinduct"; return;
        case HintKind::Darboux: {
            const char* rel = h->darboux_rel == CmpOp::Eq ? "eq"
                              : h->darboux_rel == CmpOp::Ge ? "ge"
                                                            : "gt";
            out += "darboux(" + to_string(h->darboux_e) + ", " + to_string(h->darboux_cofactor) +
                   ", " + rel + ")";
            return;
        }
        case HintKind::Ghost:
            out += "ghost(" + h->ghost.fresh + ", " + to_string(h->ghost.a) + ", " +
                   to_string(h->ghost.b) + ") ";
            print_hint(h->inner, out);
            return;
    }
}

}  // namespace detail

inline std::string to_string(const HProg& p) {
    std::string out;
    detail::print_prog_rec(p, out, 0);
    return out;
}

inline std::string print_problem(const Problem& prob) {
    std::string out = "problem " + prob.name + " {\n";
    if (!prob.param_names.empty()) {
        out += "  constants {\n";
        for (const auto& c : prob.param_names) out += "    " + c + ": real;\n";
        out += "  }\n";
    }
    if (!prob.assumptions.empty()) {
        out += "  assumes {\n";
        for (const auto& [n, p] : prob.assumptions) out += "    " + to_string(p) + ";\n";
        out += "  }\n";
    }
    if (!prob.state_vars.empty()) {
        out += "  variables {\n";
        for (const auto& v : prob.state_vars) out += "    " + v + ";\n";
        out += "  }\n";
    }
    for (const auto& [n, s] : prob.flow_defs) out += "  def " + n + " = " + to_string(s, true) + ";\n";
    for (const auto& [n, p] : prob.prog_defs) out += "  def " + n + " = " + to_string(p) + ";\n";
    for (const auto& g : prob.goals) {
        out += "  goal " + g.name + ": ";
        out += g.kind == GoalKind::Hoare ? "hoare" : "diamond";
        out += " {" + to_string(g.pre) + "} " + to_string(g.prog) + " {" + to_string(g.post) + "}";
        if (g.witness) out += " witness (" + to_string(g.witness) + ")";
        if (g.strategy && g.strategy->kind != HintKind::Auto) {
            out += " using ";
            detail::print_hint(g.strategy, out);
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace odecert
