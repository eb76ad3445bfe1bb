#include "pendkit/harness.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>

#include "pendkit/dynamics.hpp"
#include "pendkit/rng.hpp"
#include "pendkit/spline.hpp"

namespace pendkit {

namespace {

void validate_noise(const NoiseConfig& cfg) {
    if (!std::isfinite(cfg.lo) || !std::isfinite(cfg.hi) || cfg.lo > cfg.hi)
        throw Error(ErrorCode::invalid_argument,
                    "noise config: require finite lo <= hi");
}

void validate_setpoint(const PendulumParams& params, const State& setpoint) {
    const double resid = acceleration(params, setpoint, 0.0);
    if (std::abs(setpoint.omega) > 1e-9 || std::abs(resid) > 1e-9)
        throw Error(ErrorCode::invalid_argument,
                    "setpoint is not an unforced equilibrium (residual "
                    "acceleration " +
                        format_double(resid) + " rad/s^2)");
}

} // namespace

std::vector<double> uniform_noise(const NoiseConfig& cfg, std::size_t n) {
    validate_noise(cfg);
    SplitMix64 rng(cfg.seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rng.next_uniform(cfg.lo, cfg.hi));
    return out;
}

CommandTrajectory generate_trajectory(double start, double end, double pos_increment,
                                      double peak_velocity, double rate) {
    if (!std::isfinite(start) || !std::isfinite(end))
        throw Error(ErrorCode::invalid_argument, "generate_trajectory: non-finite angle");
    if (!(pos_increment > 0.0) || !(rate > 0.0))
        throw Error(ErrorCode::invalid_argument,
                    "generate_trajectory: increment and rate must be > 0");

    CommandTrajectory traj;
    traj.rate = rate;
    if (start == end) {
        traj.samples.push_back({0.0, start, 0.0});
        return traj;
    }

    const double span = std::abs(end - start);
    const double direction = end > start ? 1.0 : -1.0;
    std::size_t full_steps = static_cast<std::size_t>(
        std::floor(span / pos_increment * (1.0 + 1e-12)));
    const bool exact = std::abs(span - static_cast<double>(full_steps) * pos_increment) <=
                       1e-12 * std::max(span, pos_increment);
    // The final step is shortened so the last sample lands exactly on `end`.
    const std::size_t n = full_steps + (exact ? 1 : 2);

    traj.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        CommandSample s;
        s.t = static_cast<double>(k) / rate;
        s.position_cmd = (k + 1 == n)
                             ? end
                             : start + direction * static_cast<double>(k) * pos_increment;
        s.velocity_cmd = direction * std::abs(peak_velocity) *
                         std::sin(std::numbers::pi * static_cast<double>(k) /
                                  static_cast<double>(n - 1));
        traj.samples.push_back(s);
    }
    return traj;
}

void write_command_csv(const CommandTrajectory& traj, std::ostream& out) {
    out << "t,position_cmd,velocity_cmd\n";
    for (const auto& s : traj.samples)
        out << format_double(s.t) << ',' << format_double(s.position_cmd) << ','
            << format_double(s.velocity_cmd) << '\n';
}

void write_command_csv(const CommandTrajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::io, "cannot open for writing: " + path);
    write_command_csv(traj, out);
    if (!out)
        throw Error(ErrorCode::io, "write failed: " + path);
}

namespace {

struct ClosedLoopSpec {
    PendulumParams physics;
    double dt = 0.0;
    std::size_t total_steps = 0;
    std::size_t control_period = 1; ///< physics steps per controller tick
    double quantization = 0.0;
    double hysteresis = 0.0;
    Vec2 gain;
    State setpoint;
    NoiseConfig noise;
    std::string source;
};

double quantize(double value, double q) {
    return q == 0.0 ? value : std::round(value / q) * q;
}

Trajectory run_closed_loop(const ClosedLoopSpec& spec) {
    SplitMix64 rng(spec.noise.seed);
    Trajectory traj;
    traj.dt_nominal = spec.dt * static_cast<double>(spec.control_period);
    traj.source = spec.source;
    traj.samples.reserve(spec.total_steps / spec.control_period + 1);

    State s = spec.setpoint;
    double u_control = 0.0;
    double u_noise = 0.0;
    double u_recorded = 0.0;

    auto controller_tick = [&](const State& state) {
        const State sensed{quantize(state.theta, spec.quantization), state.omega};
        u_control = -(spec.gain.v0 * (sensed.theta - spec.setpoint.theta) +
                      spec.gain.v1 * (sensed.omega - spec.setpoint.omega));
        u_noise = rng.next_uniform(spec.noise.lo, spec.noise.hi);
        u_recorded = spec.hysteresis == 0.0
                         ? u_control
                         : u_control + spec.hysteresis * (sensed.omega >= 0.0 ? 1.0 : -1.0);
        return sensed;
    };

    for (std::size_t k = 0; k < spec.total_steps; ++k) {
        if (k % spec.control_period == 0) {
            const State sensed = controller_tick(s);
            traj.samples.push_back(
                {static_cast<double>(k) * spec.dt, sensed, u_recorded, u_noise});
        }
        s = step_euler(spec.physics, s, u_control + u_noise, spec.dt);
        if (std::abs(s.theta - spec.setpoint.theta) > std::numbers::pi / 2.0)
            throw DivergenceError(
                "closed-loop run diverged at step " + std::to_string(k + 1) + " (t = " +
                    format_double(static_cast<double>(k + 1) * spec.dt) + " s, theta = " +
                    format_double(s.theta) + " rad); linearized control is void past "
                    "|theta - setpoint| = pi/2",
                std::move(traj), k + 1);
    }
    if (spec.total_steps % spec.control_period == 0) {
        const State sensed{quantize(s.theta, spec.quantization), s.omega};
        traj.samples.push_back({static_cast<double>(spec.total_steps) * spec.dt, sensed,
                                u_recorded, u_noise});
    }
    return traj;
}

} // namespace

Trajectory run_lqr_noise_sim(const PendulumParams& params, const Vec2& k,
                             const NoiseConfig& noise, double dt, double duration,
                             const State& setpoint) {
    params.validate();
    validate_noise(noise);
    if (!(dt > 0.0) || !(duration >= dt))
        throw Error(ErrorCode::invalid_argument,
                    "run_lqr_noise_sim: require dt > 0 and duration >= dt");
    if (!std::isfinite(k.v0) || !std::isfinite(k.v1))
        throw Error(ErrorCode::invalid_argument, "run_lqr_noise_sim: non-finite gain");
    validate_setpoint(params, setpoint);

    ClosedLoopSpec spec;
    spec.physics = params;
    spec.dt = dt;
    spec.total_steps = step_count(duration, dt);
    spec.control_period = 1;
    spec.gain = k;
    spec.setpoint = setpoint;
    spec.noise = noise;
    spec.source = "lqr-noise-sim";
    return run_closed_loop(spec);
}

Trajectory run_virtual_plant(const PlantConfig& cfg, const Vec2& k,
                             const NoiseConfig& noise, double duration,
                             const State& setpoint) {
    cfg.true_params.validate();
    validate_noise(noise);
    if (!std::isfinite(k.v0) || !std::isfinite(k.v1))
        throw Error(ErrorCode::invalid_argument, "run_virtual_plant: non-finite gain");
    if (!(cfg.control_rate > 0.0))
        throw Error(ErrorCode::invalid_argument,
                    "run_virtual_plant: control_rate must be > 0");
    if (cfg.perturbation.m_c <= -1.0 || cfg.perturbation.b_c <= -1.0 ||
        cfg.perturbation.g_c <= -1.0)
        throw Error(ErrorCode::invalid_argument,
                    "run_virtual_plant: perturbation fractions must be > -1");
    if (cfg.sensor_quantization < 0.0)
        throw Error(ErrorCode::invalid_argument,
                    "run_virtual_plant: sensor_quantization must be >= 0");

    constexpr double kPhysicsDt = 0.002; // fixed 500 Hz physics
    const double period = 1.0 / (cfg.control_rate * kPhysicsDt);
    const auto control_period = static_cast<std::size_t>(std::llround(period));
    if (control_period < 1 || std::abs(period - static_cast<double>(control_period)) > 1e-9)
        throw Error(ErrorCode::invalid_argument,
                    "run_virtual_plant: control_rate must divide the 500 Hz "
                    "physics rate evenly");
    if (!(duration >= kPhysicsDt))
        throw Error(ErrorCode::invalid_argument,
                    "run_virtual_plant: duration must cover at least one physics step");

    ClosedLoopSpec spec;
    spec.physics = {cfg.true_params.m_c * (1.0 + cfg.perturbation.m_c),
                    cfg.true_params.b_c * (1.0 + cfg.perturbation.b_c),
                    cfg.true_params.g_c * (1.0 + cfg.perturbation.g_c)};
    spec.physics.validate();
    validate_setpoint(spec.physics, setpoint);
    spec.dt = kPhysicsDt;
    spec.total_steps = step_count(duration, kPhysicsDt);
    spec.control_period = control_period;
    spec.quantization = cfg.sensor_quantization;
    spec.hysteresis = cfg.effort_hysteresis_offset;
    spec.gain = k;
    spec.setpoint = setpoint;
    spec.noise = noise;
    spec.source = "virtual-plant";
    return run_closed_loop(spec);
}

Trajectory resample_cubic(const Trajectory& traj, std::span<const double> target_times) {
    if (traj.size() < 4)
        throw Error(ErrorCode::invalid_argument,
                    "resample_cubic: need at least 4 source samples");
    for (std::size_t i = 0; i + 1 < target_times.size(); ++i)
        if (!(target_times[i] < target_times[i + 1]))
            throw Error(ErrorCode::invalid_argument,
                        "resample_cubic: target times must be strictly increasing");

    const auto times = traj.times();
    auto channel_spline = [&](auto&& get) {
        std::vector<double> values;
        values.reserve(traj.size());
        for (const auto& s : traj.samples) values.push_back(get(s));
        return CubicSpline(times, values);
    };
    const CubicSpline theta = channel_spline([](const TrajectorySample& s) { return s.state.theta; });
    const CubicSpline omega = channel_spline([](const TrajectorySample& s) { return s.state.omega; });
    const CubicSpline u_ctl = channel_spline([](const TrajectorySample& s) { return s.u_control; });
    const CubicSpline u_noi = channel_spline([](const TrajectorySample& s) { return s.u_noise; });

    Trajectory out;
    out.source = traj.source + ":resampled";
    out.samples.reserve(target_times.size());
    for (double t : target_times)
        out.samples.push_back({t, {theta(t), omega(t)}, u_ctl(t), u_noi(t)});
    if (out.samples.size() >= 2)
        out.dt_nominal = out.samples[1].t - out.samples[0].t;
    return out;
}

ComparisonStats compare(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::range,
                    "compare: length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + "); resample first");
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(a.samples[i].t - b.samples[i].t) > 1e-12)
            throw Error(ErrorCode::range,
                        "compare: timestamps diverge at sample " + std::to_string(i) +
                            " (" + format_double(a.samples[i].t) + " vs " +
                            format_double(b.samples[i].t) + "); resample first");

    ComparisonStats stats;
    stats.n = n;
    if (n == 0) return stats;
    for (std::size_t i = 0; i < n; ++i) {
        stats.mean_dpos += a.samples[i].state.theta - b.samples[i].state.theta;
        stats.mean_dvel += a.samples[i].state.omega - b.samples[i].state.omega;
    }
    stats.mean_dpos /= static_cast<double>(n);
    stats.mean_dvel /= static_cast<double>(n);
    double var_pos = 0.0, var_vel = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = a.samples[i].state.theta - b.samples[i].state.theta - stats.mean_dpos;
        const double dv = a.samples[i].state.omega - b.samples[i].state.omega - stats.mean_dvel;
        var_pos += dp * dp;
        var_vel += dv * dv;
    }
    stats.std_dpos = std::sqrt(var_pos / static_cast<double>(n));
    stats.std_dvel = std::sqrt(var_vel / static_cast<double>(n));
    return stats;
}

} // namespace pendkit
