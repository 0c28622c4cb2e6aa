#pragma once

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "simulate.hpp"
#include "smt.hpp"

namespace odecert {

// End-to-end driver: VC generation per goal, a parallel discharge pool, and
// report rendering. Exit codes: 0 all proved, 1 some goal refuted, 2 some
// goal unknown (none refuted), 3 usage/parse/internal error.

struct VcOutcome {
    VC vc;
    DischargeResult result;
};

struct GoalReport {
    std::string name;
    std::vector<VcOutcome> vcs;
    DischargeStatus status = DischargeStatus::Unknown;
    std::string error;  // VC generation failure (empty otherwise)
    bool generation_failed = false;
    bool hard_error = false;  // counts as exit 3
};

struct ProblemReport {
    std::string problem;
    std::vector<GoalReport> goals;
    int exit_code = 0;
};

struct VerifyOptions {
    SamplerConfig sampler;
    int parallel = 1;
    std::string strategy_override;  // "", "dinduct" or "solve"
};

namespace detail {

inline void discharge_pool(std::vector<VcOutcome>& outcomes, const SamplerConfig& cfg,
                           int parallel) {
    if (parallel < 2 || outcomes.size() < 2) {
        for (auto& o : outcomes) o.result = discharge_vc(o.vc, cfg);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= outcomes.size()) return;
            outcomes[i].result = discharge_vc(outcomes[i].vc, cfg);
        }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < parallel; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

}  // namespace detail

inline ProblemReport verify_problem(const Problem& problem, const VerifyOptions& opts = {}) {
    ProblemReport report;
    report.problem = problem.name;

    for (const auto& goal0 : problem.goals) {
        Goal goal = goal0;
        if (opts.strategy_override == "dinduct") goal.strategy = hint_dinduct();
        if (opts.strategy_override == "solve") goal.strategy = hint_solve();

        GoalReport gr;
        gr.name = goal.name;
        try {
            auto vcs = hoare_vcs(goal, problem);
            for (auto& vc : vcs) gr.vcs.push_back({std::move(vc), {}});
        } catch (const Error& err) {
            gr.generation_failed = true;
            gr.error = err.what();
            gr.status = DischargeStatus::Unknown;
            // a solver coming up empty leaves the goal unknown; structural
            // problems (missing invariants, bad hints) are hard errors
            gr.hard_error = err.kind() != ErrKind::NoSolutionFound;
            report.goals.push_back(std::move(gr));
            continue;
        }

        detail::discharge_pool(gr.vcs, opts.sampler, opts.parallel);

        bool any_refuted = false, any_unknown = false;
        for (const auto& o : gr.vcs) {
            any_refuted = any_refuted || o.result.status == DischargeStatus::Refuted;
            any_unknown = any_unknown || o.result.status == DischargeStatus::Unknown;
        }
        gr.status = any_refuted   ? DischargeStatus::Refuted
                    : any_unknown ? DischargeStatus::Unknown
                                  : DischargeStatus::Proved;
        report.goals.push_back(std::move(gr));
    }

    int code = 0;
    for (const auto& g : report.goals) {
        if (g.hard_error) code = std::max(code, 3);
        else if (g.status == DischargeStatus::Refuted) code = std::max(code, 1);
        else if (g.status == DischargeStatus::Unknown) code = std::max(code, 2);
    }
    report.exit_code = code;
    return report;
}

// ---------------------------------------------------------------------------
// Rendering

inline const char* status_name(DischargeStatus s) {
    switch (s) {
        case DischargeStatus::Proved: return "proved";
        case DischargeStatus::Refuted: return "refuted";
        case DischargeStatus::Unknown: return "unknown";
    }
    return "?";
}

inline nlohmann::json result_to_json(const DischargeResult& r) {
    nlohmann::json j;
    j["status"] = status_name(r.status);
    if (r.status == DischargeStatus::Proved) j["method"] = method_name(r.method);
    if (r.status == DischargeStatus::Refuted) {
        nlohmann::json cex;
        for (const auto& [k, v] : r.counterexample) cex[k] = v;
        j["counterexample"] = cex;
    }
    if (r.status == DischargeStatus::Unknown && !r.reason.empty()) j["reason"] = r.reason;
    return j;
}

inline nlohmann::json report_to_json(const ProblemReport& report) {
    nlohmann::json j;
    j["problem"] = report.problem;
    j["exit"] = report.exit_code;
    j["goals"] = nlohmann::json::array();
    for (const auto& g : report.goals) {
        nlohmann::json jg;
        jg["name"] = g.name;
        jg["status"] = status_name(g.status);
        if (!g.error.empty()) jg["error"] = g.error;
        jg["vcs"] = nlohmann::json::array();
        for (const auto& o : g.vcs) {
            nlohmann::json jo;
            jo["vc"] = vc_to_json(o.vc);
            jo["label"] = o.vc.label;
            jo["result"] = result_to_json(o.result);
            jg["vcs"].push_back(jo);
        }
        j["goals"].push_back(jg);
    }
    return j;
}

inline std::string report_to_text(const ProblemReport& report) {
    std::string out = "problem " + report.problem + "\n";
    for (const auto& g : report.goals) {
        out += "  goal " + g.name + ": " + status_name(g.status);
        if (!g.error.empty()) out += " (" + g.error + ")";
        out += "\n";
        for (const auto& o : g.vcs) {
            out += "    [" + std::string(status_name(o.result.status)) + "] " + o.vc.label;
            if (o.result.status == DischargeStatus::Proved)
                out += " via " + std::string(method_name(o.result.method));
            if (o.result.status == DischargeStatus::Refuted) {
                out += " at";
                for (const auto& [k, v] : o.result.counterexample)
                    out += " " + k + "=" + std::to_string(v);
            }
            out += "\n      |- " + to_string(o.vc.goal) + "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Simulation cross-checks

/// Samples precondition states and checks that simulated runs end in the
/// postcondition; returns the number of violating final states.
inline int hoare_simulation_check(const Goal& goal, const Problem& problem,
                                  const FlowTable& flows, const SamplerConfig& cfg, int runs) {
    std::mt19937_64 rng(detail::label_seed(cfg.seed, goal.name + "/sim"));
    std::uniform_int_distribution<int> denom_dist(1, cfg.max_denom);

    std::vector<Pred> ctx = problem.assumption_preds();
    FreeVars fv;
    collect_free_vars(goal.pre, fv);
    collect_free_vars(goal.post, fv);
    for (const auto& a : ctx) collect_free_vars(a, fv);
    std::set<std::string> vars = fv.state;
    for (const auto& v : problem.state_vars) vars.insert(v);
    for (const auto& p : fv.params) vars.insert(p);

    auto pins = detail::equality_pins({goal.pre});

    int violations = 0;
    int accepted = 0;
    for (int trial = 0; trial < runs * 50 && accepted < runs; ++trial) {
        DEnv env;
        for (const auto& v : vars) {
            int den = denom_dist(rng);
            std::uniform_int_distribution<long long> num_dist(cfg.range_lo * den,
                                                              cfg.range_hi * den);
            env.vars[v] = double(num_dist(rng)) / den;
        }
        for (int pass = 0; pass < 3; ++pass)
            for (const auto& pin : pins) {
                try {
                    env.vars[pin.var] = eval_double(pin.value, env);
                } catch (const Error&) {
                }
            }
        bool ok = detail::eval_pred_tv(goal.pre, env) == detail::TV::T;
        for (const auto& a : ctx) ok = ok && detail::eval_pred_tv(a, env) == detail::TV::T;
        if (!ok) continue;
        ++accepted;

        SamplerConfig scfg = cfg;
        scfg.samples = 1;
        scfg.seed = cfg.seed + trial;
        auto finals = simulate(goal.prog, env, flows, scfg);
        for (const auto& f : finals)
            if (detail::eval_pred_tv(goal.post, f) == detail::TV::F) ++violations;
    }
    return violations;
}

}  // namespace odecert
