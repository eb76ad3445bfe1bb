#pragma once

#include <functional>
#include <vector>

#include "pendkit/state.hpp"
#include "pendkit/trajectory.hpp"

namespace pendkit {

/// Angular acceleration of the pendulum:
///     (u - b_c * omega - g_c * sin(theta)) / m_c
/// Throws ErrorCode::invalid_argument on invalid params or non-finite input.
double acceleration(const PendulumParams& params, const State& s, double u);

struct Energy {
    double kinetic = 0.0;   ///< J, 0.5 * m_c * omega^2
    double potential = 0.0; ///< J, -g_c * cos(theta)

    double total() const { return kinetic + potential; }
};

Energy energy(const PendulumParams& params, const State& s);

/// Equilibria of the unforced pendulum: (0,0) stable i.s.L and (pi,0)
/// unstable, angles reported in [0, 2*pi). With g_c = 0 every state with
/// omega = 0 is an equilibrium, so the function refuses with a distinct
/// "continuum" error instead of returning a misleading list.
std::vector<FixedPoint> fixed_points(const PendulumParams& params);

/// One explicit Euler step: theta' = theta + dt*omega,
/// omega' = omega + dt*acceleration(params, s, u). The velocity update uses
/// the pre-step state. Throws on dt <= 0 and on non-finite results.
State step_euler(const PendulumParams& params, const State& s, double u, double dt);

/// Control law evaluated at the start of each step; the returned torque is
/// held constant over the step (zero-order hold).
using Policy = std::function<double(double t, const State& s)>;

/// Fixed-step rollout of floor(duration/dt) steps. The trajectory has
/// floor(duration/dt) + 1 samples, sample k at t = k*dt; the control channel
/// records the torque actually applied at each step. A policy returning a
/// non-finite torque aborts with the step index in the error message.
Trajectory simulate(const PendulumParams& params, const State& s0,
                    const Policy& policy, double dt, double duration);

/// Step count shared by every fixed-step loop: floor(duration/dt) with a
/// small relative guard so near-integer quotients (5 / 0.002) do not lose a
/// step to representation error.
std::size_t step_count(double duration, double dt);

} // namespace pendkit
