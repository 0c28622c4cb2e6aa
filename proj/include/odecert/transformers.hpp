#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flows.hpp"
#include "printer.hpp"
#include "solve.hpp"
#include "vc.hpp"

namespace odecert {

// Weakest-liberal-precondition and forward-diamond transformers, Hoare-style
// verification condition generation with loop invariants, and dispatch of
// evolution-command proof strategies.

// ---------------------------------------------------------------------------
// Certified flows, keyed by the structure of (frame, field, guard) so each
// evolution command is certified once and reused.

class FlowTable {
public:
    static std::string key(const EvolutionCmd& evo) {
        std::string k;
        for (const auto& x : evo.frame) k += x + "'=" + to_string(evo.field.lookup(x)) + ";";
        k += "|" + to_string(evo.guard);
        return k;
    }

    void add(const EvolutionCmd& evo, FlowCandidate flow) { table_[key(evo)] = std::move(flow); }

    const FlowCandidate* find(const EvolutionCmd& evo) const {
        auto it = table_.find(key(evo));
        return it == table_.end() ? nullptr : &it->second;
    }

    bool empty() const { return table_.empty(); }

private:
    std::map<std::string, FlowCandidate> table_;
};

struct NameGen {
    std::set<std::string> used;

    explicit NameGen(const std::vector<std::string>& declared = {}) {
        for (const auto& d : declared) used.insert(d);
    }

    std::string fresh(const std::string& stem) {
        if (!used.count(stem)) {
            used.insert(stem);
            return stem;
        }
        for (int i = 0;; ++i) {
            std::string cand = stem + std::to_string(i);
            if (!used.count(cand)) {
                used.insert(cand);
                return cand;
            }
        }
    }
};

// ---------------------------------------------------------------------------
// State substitution over goals

namespace detail {

inline QPred qsubst_state(const QPred& q, const std::map<std::string, Expr>& sigma) {
    switch (q->kind) {
        case QKind::Leaf: return qleaf(substitute(q->leaf, sigma));
        case QKind::Not: return qnot(qsubst_state(q->a, sigma));
        case QKind::And:
        case QKind::Or:
        case QKind::Implies:
            return qbin(q->kind, qsubst_state(q->a, sigma), qsubst_state(q->b, sigma));
        case QKind::Forall:
        case QKind::Exists:
            return qquant(q->kind, q->binder, qsubst_state(q->a, sigma));
    }
    return q;
}

inline Binder evolve_binder(const EvolutionCmd& evo, const std::string& name) {
    Binder b;
    b.name = name;
    switch (evo.domain) {
        case TimeDomain::NonnegReals: b.kind = BoundKind::NonNeg; break;
        case TimeDomain::Interval:
            b.kind = BoundKind::Interval;
            b.lo = evo.dom_lo;
            b.hi = evo.dom_hi;
            break;
        case TimeDomain::AllReals: b.kind = BoundKind::AllReal; break;
    }
    return b;
}

inline QPred wlp_fdia_evolve(const FlowCandidate& flow, const EvolutionCmd& evo,
                             const QPred& post, NameGen& names, bool diamond);

}  // namespace detail

// ---------------------------------------------------------------------------
// wlp / fdia

/// Weakest liberal precondition. Evolution commands must have a certified
/// flow in the table; loops are handled only through hoare_vcs.
inline QPred wlp(const HProg& p, const QPred& post, const FlowTable& flows, NameGen& names) {
    switch (p->kind) {
        case ProgKind::Skip: return post;
        case ProgKind::Abort: return qleaf(ptrue());
        case ProgKind::Test: return qimplies(qleaf(p->test), post);
        case ProgKind::Assign: return detail::qsubst_state(post, p->assign.entries());
        case ProgKind::Seq: return wlp(p->a, wlp(p->b, post, flows, names), flows, names);
        case ProgKind::Choice:
            return qand(wlp(p->a, post, flows, names), wlp(p->b, post, flows, names));
        case ProgKind::If: {
            QPred wa = wlp(p->a, post, flows, names), wb = wlp(p->b, post, flows, names);
            return qand(qimplies(qleaf(p->test), wa), qimplies(qleaf(pnot(p->test)), wb));
        }
        case ProgKind::Star:
        case ProgKind::While:
            throw Error(ErrKind::LoopReached, "loops need invariant reasoning");
        case ProgKind::Evolve: {
            const FlowCandidate* flow = flows.find(p->evo);
            if (!flow)
                throw Error(ErrKind::MissingFlow,
                            "no certified flow for {" + FlowTable::key(p->evo) + "}");
            if (!is_zero(simplify(p->evo.t0)))
                throw Error(ErrKind::UnsupportedNode, "nonzero initial time");
            return detail::wlp_fdia_evolve(*flow, p->evo, post, names, /*diamond=*/false);
        }
        case ProgKind::EvolFlow: {
            EvolutionCmd evo;
            for (const auto& [k, v] : p->flow.entries()) evo.frame.push_back(k);
            evo.guard = p->flow_guard;
            FlowCandidate fc{evo.frame, p->flow, TimeDomain::AllReals};
            return detail::wlp_fdia_evolve(fc, evo, post, names, /*diamond=*/false);
        }
    }
    throw Error(ErrKind::Internal, "wlp: bad node");
}

/// Forward diamond: some run reaches the postcondition.
inline QPred fdia(const HProg& p, const QPred& post, const FlowTable& flows, NameGen& names) {
    switch (p->kind) {
        case ProgKind::Skip: return post;
        case ProgKind::Abort: return qleaf(pfalse());
        case ProgKind::Test: return qand(qleaf(p->test), post);
        case ProgKind::Assign: return detail::qsubst_state(post, p->assign.entries());
        case ProgKind::Seq: return fdia(p->a, fdia(p->b, post, flows, names), flows, names);
        case ProgKind::Choice:
            return qor(fdia(p->a, post, flows, names), fdia(p->b, post, flows, names));
        case ProgKind::If: {
            QPred da = fdia(p->a, post, flows, names), db = fdia(p->b, post, flows, names);
            return qor(qand(qleaf(p->test), da), qand(qleaf(pnot(p->test)), db));
        }
        case ProgKind::Star:
        case ProgKind::While:
            throw Error(ErrKind::LoopReached, "loops need invariant reasoning");
        case ProgKind::Evolve: {
            const FlowCandidate* flow = flows.find(p->evo);
            if (!flow)
                throw Error(ErrKind::MissingFlow,
                            "no certified flow for {" + FlowTable::key(p->evo) + "}");
            if (!is_zero(simplify(p->evo.t0)))
                throw Error(ErrKind::UnsupportedNode, "nonzero initial time");
            return detail::wlp_fdia_evolve(*flow, p->evo, post, names, /*diamond=*/true);
        }
        case ProgKind::EvolFlow: {
            EvolutionCmd evo;
            for (const auto& [k, v] : p->flow.entries()) evo.frame.push_back(k);
            evo.guard = p->flow_guard;
            FlowCandidate fc{evo.frame, p->flow, TimeDomain::AllReals};
            return detail::wlp_fdia_evolve(fc, evo, post, names, /*diamond=*/true);
        }
    }
    throw Error(ErrKind::Internal, "fdia: bad node");
}

namespace detail {

/// Shared evolution case. Box: forall t. (forall tau in [0,t]. G[phi(tau)])
/// -> Q[phi(t)]. Diamond: exists t. (forall tau in [0,t]. G[phi(tau)]) and
/// Q[phi(t)] (guard conjoined).
inline QPred wlp_fdia_evolve(const FlowCandidate& flow, const EvolutionCmd& evo,
                             const QPred& post, NameGen& names, bool diamond) {
    std::string tname = names.fresh("t");
    Binder tb = evolve_binder(evo, tname);
    tb.forall = !diamond;

    std::map<std::string, Expr> phi_t;
    for (const auto& [x, body] : flow.body.entries())
        phi_t[x] = simplify(subst_time(body, param(tname)));
    QPred post_t = qsimplify(qsubst_state(post, phi_t));

    QPred body;
    if (is_true(evo.guard)) {
        body = post_t;
    } else {
        std::string tau = names.fresh("tau");
        std::map<std::string, Expr> phi_tau;
        for (const auto& [x, be] : flow.body.entries())
            phi_tau[x] = simplify(subst_time(be, param(tau)));
        Pred guard_tau = simplify(substitute(evo.guard, phi_tau));
        Binder taub;
        taub.name = tau;
        taub.kind = BoundKind::Interval;
        taub.lo = num(0);
        taub.hi = param(tname);
        taub.forall = true;
        QPred guard_all = qquant(QKind::Forall, taub, qleaf(guard_tau));
        body = diamond ? qand(guard_all, post_t) : qimplies(guard_all, post_t);
    }
    return qquant(diamond ? QKind::Exists : QKind::Forall, tb, body);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Frame rule

/// Adds I as an invariant around a triple when the program cannot modify any
/// variable I depends on. Returns the strengthened pre/post, or nothing when
/// the side condition fails.
inline std::optional<std::pair<Pred, Pred>> frame_rule_apply(const HProg& p, const Pred& inv,
                                                             const Pred& pre, const Pred& post) {
    if (!nmods_check(p, free_vars(inv).state)) return std::nullopt;
    return std::make_pair(pand(pre, inv), pand(post, inv));
}

// ---------------------------------------------------------------------------
// Hoare-triple VC generation

namespace detail {

inline void decompose_conj(const Pred& p, std::vector<Pred>& out) {
    if (p->kind == PredKind::And) {
        decompose_conj(p->a, out);
        decompose_conj(p->b, out);
        return;
    }
    if (!is_true(p)) out.push_back(p);
}

struct VcgState {
    const Problem* problem = nullptr;
    FlowTable* flows = nullptr;
    NameGen* names = nullptr;
    HintPtr goal_strategy;
    std::vector<VC>* out = nullptr;

    HintPtr effective(const HProg& evolve_node) const {
        if (evolve_node->hint) return evolve_node->hint;
        if (goal_strategy) return goal_strategy;
        return hint_auto();
    }
};

inline void push_vc(VcgState& st, const std::string& label, const std::vector<Pred>& context,
                    const Pred& antecedent, QPred goal) {
    VC vc;
    vc.label = label;
    vc.context = context;
    decompose_conj(antecedent, vc.context);
    goal = qsimplify(goal);
    // lift outermost universal binders
    while (goal->kind == QKind::Forall) {
        vc.binders.push_back(goal->binder);
        goal = goal->a;
    }
    vc.goal = goal;
    st.out->push_back(std::move(vc));
}

inline void push_implication(VcgState& st, const std::string& label,
                             const std::vector<Pred>& context, const Pred& from, const Pred& to) {
    push_vc(st, label, context, from, qleaf(to));
}

/// Certifies and registers the flow needed by an evolve node, following its
/// effective strategy (explicit flow, builtin solver, or auto = solver).
inline void ensure_flow(VcgState& st, const HProg& node, const std::vector<Pred>& context) {
    const EvolutionCmd& evo = node->evo;
    if (st.flows->find(evo)) return;
    HintPtr hint = st.effective(node);

    std::vector<Pred> guard_ctx = context;
    if (!is_true(evo.guard)) guard_ctx.push_back(evo.guard);

    if (hint->kind == HintKind::Flow) {
        FlowCandidate cand{evo.frame, hint->flow, TimeDomain::AllReals};
        // flows may omit the ordering; frame order comes from the command
        for (const auto& x : evo.frame)
            if (!cand.body.contains(x))
                throw Error(ErrKind::NonMatchingFrames,
                            "flow hint misses variable '" + x + "'");
        CertReport report = certify_flow(cand, evo.field, guard_ctx);
        if (!report.flow_certified())
            throw Error(ErrKind::MissingFlow, "flow hint failed certification for {" +
                                                  FlowTable::key(evo) + "}");
        st.flows->add(evo, std::move(cand));
        return;
    }
    // SolveFlow and Auto go through the builtin solver
    SolveResult res = solve_sode(evo.field, evo.frame, guard_ctx);
    if (!res.flow)
        throw Error(ErrKind::NoSolutionFound,
                    "no closed-form flow found:\n" + res.trace.text());
    st.flows->add(evo, std::move(*res.flow));
}

enum class ProgClass { WlpReady, NeedsRules };

/// Loops and invariant-style evolution hints route through Hoare rules; all
/// other programs reduce purely equationally.
inline ProgClass classify(const VcgState& st, const HProg& p) {
    switch (p->kind) {
        case ProgKind::Star:
        case ProgKind::While:
            return ProgClass::NeedsRules;
        case ProgKind::Evolve: {
            HintPtr h = st.effective(p);
            if (h->kind == HintKind::DInduct || h->kind == HintKind::Darboux ||
                h->kind == HintKind::Ghost)
                return ProgClass::NeedsRules;
            return ProgClass::WlpReady;
        }
        case ProgKind::Seq:
        case ProgKind::Choice:
        case ProgKind::If: {
            if (classify(st, p->a) == ProgClass::NeedsRules) return ProgClass::NeedsRules;
            if (classify(st, p->b) == ProgClass::NeedsRules) return ProgClass::NeedsRules;
            return ProgClass::WlpReady;
        }
        default:
            return ProgClass::WlpReady;
    }
}

inline void ensure_flows_rec(VcgState& st, const HProg& p, const std::vector<Pred>& context) {
    switch (p->kind) {
        case ProgKind::Evolve: ensure_flow(st, p, context); return;
        case ProgKind::Seq:
        case ProgKind::Choice:
        case ProgKind::If:
            ensure_flows_rec(st, p->a, context);
            ensure_flows_rec(st, p->b, context);
            return;
        case ProgKind::Star:
        case ProgKind::While:
            ensure_flows_rec(st, p->a, context);
            return;
        default:
            return;
    }
}

inline void hoare_rec(VcgState& st, const Pred& pre, const HProg& prog, const Pred& post,
                      const std::vector<Pred>& context, const std::string& label);

inline void evolve_rules(VcgState& st, const Pred& pre, const HProg& node, const Pred& post,
                         const std::vector<Pred>& context, const std::string& label) {
    const EvolutionCmd& evo = node->evo;
    HintPtr hint = st.effective(node);

    switch (hint->kind) {
        case HintKind::DInduct: {
            // the precondition doubles as the differential invariant
            const Pred& inv = pre;
            if (!pred_equal(inv, post)) {
                std::vector<Pred> c2 = context;
                if (!is_true(evo.guard)) c2.push_back(evo.guard);
                push_implication(st, label + "/use", c2, inv, post);
            }
            auto vcs = diff_induct(inv, evo, context, label);
            for (auto& vc : vcs) st.out->push_back(std::move(vc));
            return;
        }
        case HintKind::Darboux: {
            CmpOp rel = hint->darboux_rel;
            Pred inv = cmp(rel, hint->darboux_e, num(0));
            if (!pred_equal(pre, inv)) push_implication(st, label + "/pre", context, pre, inv);
            if (!pred_equal(inv, post)) {
                std::vector<Pred> c2 = context;
                if (!is_true(evo.guard)) c2.push_back(evo.guard);
                push_implication(st, label + "/use", c2, inv, post);
            }
            std::vector<std::string> declared;
            for (const auto& v : st.problem->state_vars) declared.push_back(v);
            for (const auto& v : st.problem->param_names) declared.push_back(v);
            auto vcs = darboux_vcs(hint->darboux_e, hint->darboux_cofactor, rel, evo, declared,
                                   context, label);
            for (auto& vc : vcs) st.out->push_back(std::move(vc));
            return;
        }
        case HintKind::Ghost: {
            std::vector<std::string> declared;
            for (const auto& v : st.problem->state_vars) declared.push_back(v);
            for (const auto& v : st.problem->param_names) declared.push_back(v);
            EvolutionCmd ghosted = ghost_augment(evo, hint->ghost, declared);
            std::set<std::string> fresh{hint->ghost.fresh};
            if (!unrestricted_check(fresh, pre) || !unrestricted_check(fresh, post))
                throw Error(ErrKind::FreshnessViolation,
                            "ghost variable occurs in the specification");
            HProg inner = prog_evolve(ghosted, hint->inner ? hint->inner : hint_auto());
            hoare_rec(st, pre, inner, post, context, label + "/ghost");
            return;
        }
        default: {
            ensure_flow(st, node, context);
            NameGen& names = *st.names;
            QPred goal = wlp(node, qleaf(post), *st.flows, names);
            push_vc(st, label + "/flow", context, pre, goal);
            return;
        }
    }
}

inline void hoare_rec(VcgState& st, const Pred& pre, const HProg& prog, const Pred& post,
                      const std::vector<Pred>& context, const std::string& label) {
    if (classify(st, prog) == ProgClass::WlpReady) {
        ensure_flows_rec(st, prog, context);
        QPred goal = wlp(prog, qleaf(post), *st.flows, *st.names);
        push_vc(st, label, context, pre, goal);
        return;
    }
    switch (prog->kind) {
        case ProgKind::Star: {
            if (!prog->invariant)
                throw Error(ErrKind::MissingLoopInvariant,
                            "loop in goal '" + label + "' carries no invariant");
            const Pred& inv = *prog->invariant;
            push_implication(st, label + "/init", context, pre, inv);
            push_implication(st, label + "/post", context, inv, post);
            hoare_rec(st, inv, prog->a, inv, context, label + "/body");
            return;
        }
        case ProgKind::While: {
            if (!prog->invariant)
                throw Error(ErrKind::MissingLoopInvariant,
                            "while in goal '" + label + "' carries no invariant");
            const Pred& inv = *prog->invariant;
            push_implication(st, label + "/init", context, pre, inv);
            push_implication(st, label + "/post", context, pand(inv, pnot(prog->test)), post);
            hoare_rec(st, pand(inv, prog->test), prog->a, inv, context, label + "/body");
            return;
        }
        case ProgKind::Evolve:
            evolve_rules(st, pre, prog, post, context, label);
            return;
        case ProgKind::Choice:
            hoare_rec(st, pre, prog->a, post, context, label + "/left");
            hoare_rec(st, pre, prog->b, post, context, label + "/right");
            return;
        case ProgKind::If:
            hoare_rec(st, pand(pre, prog->test), prog->a, post, context, label + "/then");
            hoare_rec(st, pand(pre, pnot(prog->test)), prog->b, post, context, label + "/else");
            return;
        case ProgKind::Seq: {
            // sequential split around the rule-bound part
            if (classify(st, prog->b) == ProgClass::WlpReady) {
                ensure_flows_rec(st, prog->b, context);
                QPred wb = wlp(prog->b, qleaf(post), *st.flows, *st.names);
                Pred mid = qpred_to_pred(qsimplify(wb));
                if (mid) {
                    hoare_rec(st, pre, prog->a, mid, context, label);
                    return;
                }
            }
            if (pred_equal(pre, post)) {
                // invariant triples chain the invariant through the sequence
                hoare_rec(st, pre, prog->a, pre, context, label + "/1");
                hoare_rec(st, pre, prog->b, post, context, label + "/2");
                return;
            }
            throw Error(ErrKind::Internal,
                        "no intermediate assertion for sequential composition in '" + label + "'");
        }
        default:
            throw Error(ErrKind::Internal, "hoare_rec: unexpected program");
    }
}

/// Instantiates the leftmost existential binder with the witness; the bound
/// constraint is kept as a conjunct.
inline QPred instantiate_witness(const QPred& q, const Expr& witness, bool& done) {
    if (done) return q;
    switch (q->kind) {
        case QKind::Exists: {
            done = true;
            const Binder& b = q->binder;
            QPred body = qsubst_param(q->a, b.name, witness);
            Pred bound = ptrue();
            switch (b.kind) {
                case BoundKind::NonNeg: bound = cmp(CmpOp::Ge, witness, num(0)); break;
                case BoundKind::Interval:
                    bound = pand(cmp(CmpOp::Ge, witness, b.lo), cmp(CmpOp::Le, witness, b.hi));
                    break;
                case BoundKind::AllReal: break;
            }
            return qand(qleaf(bound), body);
        }
        case QKind::Leaf: return q;
        case QKind::Not: return qnot(instantiate_witness(q->a, witness, done));
        case QKind::Forall: {
            QPred body = instantiate_witness(q->a, witness, done);
            return qquant(QKind::Forall, q->binder, body);
        }
        default: {
            QPred a = instantiate_witness(q->a, witness, done);
            QPred b = instantiate_witness(q->b, witness, done);
            return qbin(q->kind, a, b);
        }
    }
}

inline void diamond_rec(VcgState& st, const Pred& pre, const HProg& prog, const Pred& post,
                        const std::vector<Pred>& context, const std::string& label,
                        const Expr& witness) {
    if (prog->kind == ProgKind::Star) {
        if (!prog->invariant)
            throw Error(ErrKind::MissingLoopInvariant,
                        "loop in goal '" + label + "' carries no invariant");
        const Pred& inv = *prog->invariant;
        push_implication(st, label + "/init", context, pre, inv);
        push_implication(st, label + "/post", context, inv, post);
        diamond_rec(st, inv, prog->a, inv, context, label + "/body", witness);
        return;
    }
    ensure_flows_rec(st, prog, context);
    QPred goal = fdia(prog, qleaf(post), *st.flows, *st.names);
    if (witness) {
        bool done = false;
        goal = instantiate_witness(goal, witness, done);
    }
    push_vc(st, label, context, pre, goal);
}

}  // namespace detail

/// Generates the verification conditions for one goal. Star/While recurse via
/// the invariant rules, evolution commands dispatch on their strategy hint,
/// everything else reduces through wlp (or fdia for diamond goals).
inline std::vector<VC> hoare_vcs(const Goal& goal, const Problem& problem,
                                 FlowTable* table = nullptr) {
    std::vector<VC> out;
    FlowTable local;
    FlowTable& flows = table ? *table : local;

    std::vector<std::string> declared;
    for (const auto& v : problem.state_vars) declared.push_back(v);
    for (const auto& p : problem.param_names) declared.push_back(p);
    NameGen names(declared);

    detail::VcgState st;
    st.problem = &problem;
    st.flows = &flows;
    st.names = &names;
    st.goal_strategy = goal.strategy;
    st.out = &out;

    std::vector<Pred> context = problem.assumption_preds();
    if (goal.kind == GoalKind::Hoare) {
        detail::hoare_rec(st, goal.pre, goal.prog, goal.post, context, goal.name);
    } else {
        detail::diamond_rec(st, goal.pre, goal.prog, goal.post, context, goal.name, goal.witness);
    }
    return out;
}

}  // namespace odecert
