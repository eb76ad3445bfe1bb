#include "pendkit/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pendkit {

double acceleration(const PendulumParams& params, const State& s, double u) {
    params.validate();
    if (!s.finite() || !std::isfinite(u))
        throw Error(ErrorCode::invalid_argument,
                    "acceleration: non-finite state or torque");
    return (u - params.b_c * s.omega - params.g_c * std::sin(s.theta)) / params.m_c;
}

Energy energy(const PendulumParams& params, const State& s) {
    params.validate();
    if (!s.finite())
        throw Error(ErrorCode::invalid_argument, "energy: non-finite state");
    return {0.5 * params.m_c * s.omega * s.omega,
            -params.g_c * std::cos(s.theta)};
}

std::vector<FixedPoint> fixed_points(const PendulumParams& params) {
    params.validate();
    if (params.g_c == 0.0)
        throw Error(ErrorCode::invalid_argument,
                    "fixed_points: g_c = 0 makes every state with omega = 0 an "
                    "equilibrium (continuum); no discrete list exists");
    return {
        {{0.0, 0.0}, Stability::locally_stable_isl},
        {{std::numbers::pi, 0.0}, Stability::unstable},
    };
}

State step_euler(const PendulumParams& params, const State& s, double u, double dt) {
    if (!(dt > 0.0))
        throw Error(ErrorCode::invalid_argument, "step_euler: dt must be > 0");
    double a = acceleration(params, s, u);
    State next{s.theta + dt * s.omega, s.omega + dt * a};
    if (!next.finite())
        throw Error(ErrorCode::diverged, "step_euler: integration overflow");
    return next;
}

std::size_t step_count(double duration, double dt) {
    return static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
}

Trajectory simulate(const PendulumParams& params, const State& s0,
                    const Policy& policy, double dt, double duration) {
    params.validate();
    if (!(dt > 0.0))
        throw Error(ErrorCode::invalid_argument, "simulate: dt must be > 0");
    if (!(duration >= dt))
        throw Error(ErrorCode::invalid_argument, "simulate: duration must be >= dt");
    if (!s0.finite())
        throw Error(ErrorCode::invalid_argument, "simulate: non-finite initial state");

    const std::size_t steps = step_count(duration, dt);
    Trajectory traj;
    traj.dt_nominal = dt;
    traj.source = "simulate";
    traj.samples.reserve(steps + 1);

    State s = s0;
    double u = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        u = policy(t, s);
        if (!std::isfinite(u))
            throw Error(ErrorCode::invalid_argument,
                        "simulate: policy returned non-finite torque at step " +
                            std::to_string(k));
        traj.samples.push_back({t, s, u, 0.0});
        s = step_euler(params, s, u, dt);
    }
    // Terminal sample: final state, last applied torque held.
    traj.samples.push_back({static_cast<double>(steps) * dt, s, u, 0.0});
    return traj;
}

} // namespace pendkit
