#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pendkit/error.hpp"
#include "pendkit/mat2.hpp"
#include "pendkit/state.hpp"
#include "pendkit/trajectory.hpp"

namespace pendkit {

/// Bounded uniform torque disturbance, SplitMix64-seeded.
struct NoiseConfig {
    double lo = -2.5;      ///< N*m
    double hi = 2.5;       ///< N*m
    std::uint64_t seed = 1;
};

/// n uniform draws in [lo, hi]; identical seeds give identical sequences.
std::vector<double> uniform_noise(const NoiseConfig& cfg, std::size_t n);

struct CommandSample {
    double t = 0.0;            ///< s
    double position_cmd = 0.0; ///< rad
    double velocity_cmd = 0.0; ///< rad/s
};

struct CommandTrajectory {
    double rate = 0.0; ///< Hz
    std::vector<CommandSample> samples;
};

/// Linear position ramp from start to end in steps of +/- pos_increment with
/// the final step shortened so the last sample is exactly `end`; the velocity
/// channel is a half-cycle sinusoid peak * sin(pi*k/(N-1)) of the same
/// length. start == end yields a single zero-velocity sample.
CommandTrajectory generate_trajectory(double start, double end,
                                      double pos_increment, double peak_velocity,
                                      double rate);

/// CSV `t,position_cmd,velocity_cmd`.
void write_command_csv(const CommandTrajectory& traj, std::ostream& out);
void write_command_csv(const CommandTrajectory& traj, const std::string& path);

/// Raised when a closed-loop run leaves |theta - setpoint| > pi/2, past which
/// the linearization premise is void. Carries whatever was recorded.
class DivergenceError : public Error {
public:
    DivergenceError(std::string what, Trajectory partial, std::size_t step)
        : Error(ErrorCode::diverged, what), partial_(std::move(partial)), step_(step) {}

    const Trajectory& partial() const { return partial_; }
    std::size_t step() const { return step_; }

private:
    Trajectory partial_;
    std::size_t step_;
};

/// Closed-loop regulation under bounded uniform torque noise: at every step
/// u_control = -k (x - setpoint), u_noise is drawn from the stream, and the
/// sum is applied through step_euler. Both channels are recorded. The
/// setpoint must be an equilibrium.
Trajectory run_lqr_noise_sim(const PendulumParams& params, const Vec2& k,
                             const NoiseConfig& noise, double dt, double duration,
                             const State& setpoint);

/// Software stand-in for the hardware pendulum.
struct PlantConfig {
    PendulumParams true_params;
    double control_rate = 100.0;          ///< Hz; must divide the 500 Hz physics
    double sensor_quantization = 0.0;     ///< rad, 0 = off
    double effort_hysteresis_offset = 0.0;///< N*m added to recorded effort by motion direction
    struct Perturbation {
        double m_c = 0.0, b_c = 0.0, g_c = 0.0; ///< relative fractions, > -1
    } perturbation;
};

/// Runs the plant: physics integrates the (perturbed) true parameters at
/// dt = 0.002 s while the controller and the noise stream are sampled and
/// held at control_rate; samples are recorded at control_rate. The
/// controller acts on the sensed feedback, so a configured position
/// quantization shows up both in the record and in the loop; the hysteresis
/// offset biases only the recorded effort. With no mismatch configured and
/// control_rate = 1/dt this reproduces run_lqr_noise_sim bit for bit.
Trajectory run_virtual_plant(const PlantConfig& cfg, const Vec2& k,
                             const NoiseConfig& noise, double duration,
                             const State& setpoint);

/// Natural cubic resampling of every channel at the target times, which must
/// lie within the source time range. Needs at least 4 samples; source
/// timestamps reproduce source values exactly.
Trajectory resample_cubic(const Trajectory& traj, std::span<const double> target_times);

struct ComparisonStats {
    double mean_dpos = 0.0; ///< rad
    double std_dpos = 0.0;  ///< rad, population
    double mean_dvel = 0.0; ///< rad/s
    double std_dvel = 0.0;  ///< rad/s, population
    std::size_t n = 0;
};

/// Per-sample differences a - b in position and velocity; mean and population
/// standard deviation of each. Timestamps must agree within 1e-12 s.
ComparisonStats compare(const Trajectory& a, const Trajectory& b);

} // namespace pendkit
