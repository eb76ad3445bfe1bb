#pragma once

#include <cmath>
#include <string>

#include "pendkit/error.hpp"

namespace pendkit {

/// Aggregated dynamics constants of the rigid pendulum,
///
///     m_c * theta_dd + b_c * theta_d + g_c * sin(theta) = u
///
/// m_c subsumes m*l_c^2 + I_c, g_c subsumes m*g*l_c; the underlying mass,
/// length and inertia never appear elsewhere in the library.
struct PendulumParams {
    double m_c = 0.0; ///< inertial constant, kg*m^2
    double b_c = 0.0; ///< damping constant, N*m*s/rad
    double g_c = 0.0; ///< gravitational torque coefficient, N*m

    bool valid() const {
        return std::isfinite(m_c) && std::isfinite(b_c) && std::isfinite(g_c) &&
               m_c > 0.0 && b_c >= 0.0 && g_c >= 0.0;
    }

    void validate() const {
        if (!valid())
            throw Error(ErrorCode::invalid_argument,
                        "invalid pendulum parameters: require m_c > 0, b_c >= 0, "
                        "g_c >= 0, all finite");
    }
};

/// Pendulum state. theta = 0 is hanging down, theta = pi upright; the angle
/// is kept unwrapped (any real value) so control laws and finite differences
/// never see a jump. Reporting operations normalize to [0, 2*pi) themselves.
struct State {
    double theta = 0.0; ///< angle, rad
    double omega = 0.0; ///< angular velocity, rad/s

    bool finite() const { return std::isfinite(theta) && std::isfinite(omega); }
};

enum class Stability {
    locally_stable_isl, ///< stable in the sense of Lyapunov
    unstable,
};

struct FixedPoint {
    State state;
    Stability stability = Stability::unstable;
};

inline const char* to_string(Stability s) {
    return s == Stability::locally_stable_isl ? "locally-stable-isL" : "unstable";
}

} // namespace pendkit
