#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pendkit/state.hpp"

namespace pendkit {

struct TrajectorySample {
    double t = 0.0;         ///< s
    State state;            ///< (theta, omega)
    double u_control = 0.0; ///< N*m, controller torque applied over the step
    double u_noise = 0.0;   ///< N*m, disturbance torque applied over the step
};

/// A timestamped rollout. Timestamps are strictly increasing; the terminal
/// sample repeats the last applied torques (zero-order-hold convention).
struct Trajectory {
    std::vector<TrajectorySample> samples;
    double dt_nominal = 0.0;
    std::string source;

    std::size_t size() const { return samples.size(); }

    std::vector<double> times() const;
    std::vector<double> thetas() const;
    std::vector<double> omegas() const;
};

/// Writes CSV with header `t,theta,omega,u_control,u_noise`, one row per
/// sample, 17 significant digits, '.' decimal separator, LF line endings.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Parses the CSV produced by write_trajectory_csv. Throws ErrorCode::parse
/// with the offending row number on malformed input or non-increasing time.
Trajectory read_trajectory_csv(std::istream& in, const std::string& source_label);
Trajectory read_trajectory_csv_file(const std::string& path);

/// Locale-independent float formatting used by every CSV writer: scientific,
/// 17 significant digits, round-trip exact.
std::string format_double(double v);

/// Strict locale-independent double parse of a whole field.
/// Returns false if the field is not a single finite-or-inf/nan float.
bool parse_double(const std::string& field, double& out);

} // namespace pendkit
