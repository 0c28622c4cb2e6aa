#pragma once

#include <string>
#include <vector>

#include "hprog.hpp"

namespace odecert {

// Classical 4th-order Runge-Kutta with a fixed step. The numeric oracle for
// solution checks and invariant soundness tests.

struct Trajectory {
    std::vector<double> times;
    std::vector<DEnv> states;  // full environments (frame vars updated)
};

namespace detail {

inline std::vector<double> eval_field(const Subst& field, const std::vector<std::string>& frame,
                                      const DEnv& base, double t,
                                      const std::vector<double>& y) {
    DEnv env = base;
    env.time = t;
    for (size_t i = 0; i < frame.size(); ++i) env.vars[frame[i]] = y[i];
    std::vector<double> out(frame.size());
    for (size_t i = 0; i < frame.size(); ++i) out[i] = eval_double(field.lookup(frame[i]), env);
    return out;
}

}  // namespace detail

inline Trajectory rk4_integrate(const Subst& field, const std::vector<std::string>& frame,
                                const DEnv& init, double t_end, int steps) {
    if (steps < 1) throw Error(ErrKind::DomainError, "rk4 needs at least one step");
    double h = t_end / steps;
    std::vector<double> y(frame.size());
    double t0 = init.time.value_or(0.0);
    for (size_t i = 0; i < frame.size(); ++i) {
        auto it = init.vars.find(frame[i]);
        if (it == init.vars.end()) throw Error(ErrKind::UnboundVariable, frame[i]);
        y[i] = it->second;
    }

    Trajectory traj;
    auto record = [&](double t) {
        DEnv env = init;
        env.time = t;
        for (size_t i = 0; i < frame.size(); ++i) env.vars[frame[i]] = y[i];
        traj.times.push_back(t);
        traj.states.push_back(std::move(env));
    };
    record(t0);

    for (int k = 0; k < steps; ++k) {
        double t = t0 + k * h;
        try {
            auto k1 = detail::eval_field(field, frame, init, t, y);
            auto yk = y;
            for (size_t i = 0; i < y.size(); ++i) yk[i] = y[i] + h / 2 * k1[i];
            auto k2 = detail::eval_field(field, frame, init, t + h / 2, yk);
            for (size_t i = 0; i < y.size(); ++i) yk[i] = y[i] + h / 2 * k2[i];
            auto k3 = detail::eval_field(field, frame, init, t + h / 2, yk);
            for (size_t i = 0; i < y.size(); ++i) yk[i] = y[i] + h * k3[i];
            auto k4 = detail::eval_field(field, frame, init, t + h, yk);
            for (size_t i = 0; i < y.size(); ++i)
                y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        } catch (const Error& err) {
            throw Error(err.kind(), std::string(err.what()) + " at step " + std::to_string(k));
        }
        record(t0 + (k + 1) * h);
    }
    return traj;
}

/// Final state only.
inline DEnv rk4_final(const Subst& field, const std::vector<std::string>& frame, const DEnv& init,
                      double t_end, int steps) {
    return rk4_integrate(field, frame, init, t_end, steps).states.back();
}

}  // namespace odecert
