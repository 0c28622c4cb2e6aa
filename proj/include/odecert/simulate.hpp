#pragma once

#include <optional>
#include <random>
#include <vector>

#include "discharge.hpp"

namespace odecert {

// Operational simulator: a seeded random interpreter resolving choice and
// iteration, with evolution commands driven by certified flows (or an RK4
// fallback). The oracle behind Hoare-triple and invariant soundness checks.

namespace detail {

struct SimCtx {
    const FlowTable* flows;
    const SamplerConfig* cfg;
    std::mt19937_64* rng;
    std::vector<double> time_grid;
};

inline std::optional<DEnv> sim_run(const HProg& p, DEnv env, SimCtx& ctx);

inline std::optional<DEnv> sim_evolve(const EvolutionCmd& evo, const Subst* flow_body, DEnv env,
                                      SimCtx& ctx) {
    std::uniform_int_distribution<size_t> pick(0, ctx.time_grid.size() - 1);
    size_t stop = pick(*ctx.rng);

    if (flow_body) {
        // guard must hold at every checked time up to the stop time
        for (size_t i = 0; i <= stop; ++i) {
            DEnv at = env;
            at.time = ctx.time_grid[i];
            DEnv probe = env;
            for (const auto& [x, body] : flow_body->entries())
                probe.vars[x] = eval_double(body, at);
            probe.time = env.time;
            if (!eval_pred(evo.guard, probe)) return std::nullopt;
            if (i == stop) return probe;
        }
        return std::nullopt;
    }

    // RK4 fallback with guard checks along the trajectory
    double t_end = ctx.time_grid[stop];
    if (t_end <= 0) {
        if (!eval_pred(evo.guard, env)) return std::nullopt;
        return env;
    }
    int steps = 256;
    Trajectory traj = rk4_integrate(evo.field, evo.frame, env, t_end, steps);
    for (const auto& s : traj.states) {
        DEnv probe = s;
        probe.time = env.time;
        if (!eval_pred(evo.guard, probe)) return std::nullopt;
    }
    DEnv out = traj.states.back();
    out.time = env.time;
    return out;
}

inline std::optional<DEnv> sim_run(const HProg& p, DEnv env, SimCtx& ctx) {
    switch (p->kind) {
        case ProgKind::Skip: return env;
        case ProgKind::Abort: return std::nullopt;
        case ProgKind::Test:
            if (!eval_pred(p->test, env)) return std::nullopt;
            return env;
        case ProgKind::Assign: {
            DEnv out = env;
            for (const auto& [x, e] : p->assign.entries()) out.vars[x] = eval_double(e, env);
            return out;
        }
        case ProgKind::Seq: {
            auto mid = sim_run(p->a, std::move(env), ctx);
            if (!mid) return std::nullopt;
            return sim_run(p->b, std::move(*mid), ctx);
        }
        case ProgKind::Choice: {
            std::uniform_int_distribution<int> coin(0, 1);
            return sim_run(coin(*ctx.rng) ? p->a : p->b, std::move(env), ctx);
        }
        case ProgKind::If: {
            bool cond = eval_pred(p->test, env);  // before env is moved from
            return sim_run(cond ? p->a : p->b, std::move(env), ctx);
        }
        case ProgKind::While: {
            for (int i = 0; i < ctx.cfg->iter_cap; ++i) {
                if (!eval_pred(p->test, env)) return env;
                auto next = sim_run(p->a, std::move(env), ctx);
                if (!next) return std::nullopt;
                env = std::move(*next);
            }
            // still running at the iteration cap: discard the run
            return eval_pred(p->test, env) ? std::nullopt : std::optional<DEnv>(env);
        }
        case ProgKind::Star: {
            std::uniform_int_distribution<int> rounds(0, ctx.cfg->iter_cap);
            int k = rounds(*ctx.rng);
            for (int i = 0; i < k; ++i) {
                auto next = sim_run(p->a, std::move(env), ctx);
                if (!next) return std::nullopt;
                env = std::move(*next);
            }
            return env;
        }
        case ProgKind::Evolve: {
            const FlowCandidate* flow = ctx.flows ? ctx.flows->find(p->evo) : nullptr;
            return sim_evolve(p->evo, flow ? &flow->body : nullptr, std::move(env), ctx);
        }
        case ProgKind::EvolFlow: {
            EvolutionCmd evo;
            for (const auto& [k, v] : p->flow.entries()) evo.frame.push_back(k);
            evo.guard = p->flow_guard;
            return sim_evolve(evo, &p->flow, std::move(env), ctx);
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Runs the program cfg.samples times from the given state and collects the
/// final states of the runs that complete (failed tests yield no state).
inline std::vector<DEnv> simulate(const HProg& p, const DEnv& init, const FlowTable& flows,
                                  const SamplerConfig& cfg) {
    std::mt19937_64 rng(cfg.seed ^ 0x5317c0deULL);
    detail::QuantGrids grids{&cfg};
    detail::SimCtx ctx{&flows, &cfg, &rng, grids.nonneg_grid()};
    std::vector<DEnv> finals;
    for (int i = 0; i < cfg.samples; ++i) {
        auto out = detail::sim_run(p, init, ctx);
        if (out) finals.push_back(std::move(*out));
    }
    return finals;
}

}  // namespace odecert
