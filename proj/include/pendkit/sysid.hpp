#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pendkit/state.hpp"

namespace pendkit {

/// One actuator log row. Feedback channels are mandatory, command and
/// current channels may be missing from a log entirely.
struct LogRecord {
    double t = 0.0;            ///< s
    double position_fbk = 0.0; ///< rad
    double velocity_fbk = 0.0; ///< rad/s
    double effort_fbk = 0.0;   ///< N*m
    std::optional<double> position_cmd;
    std::optional<double> velocity_cmd;
    std::optional<double> effort_cmd;
    std::optional<double> pwm_cmd;        ///< dimensionless, [-1, 1]
    std::optional<double> motor_current;  ///< A
    std::optional<double> winding_current;///< A
};

struct RegressionResult {
    std::vector<std::pair<std::string, double>> coefficients; ///< term -> value
    double r_squared = 0.0;
    std::size_t n_samples = 0;
    double residual_std = 0.0; ///< units of the dependent variable

    std::optional<double> coefficient(const std::string& term) const;
};

/// A maximal run of samples where the pendulum is held still.
struct StaticSegment {
    enum class Cycle { positive, negative };
    double commanded_angle = 0.0; ///< rad, median position over the run
    Cycle cycle = Cycle::positive;
    std::vector<LogRecord> records;
};

/// Parses a log CSV. The header row is mandatory and names columns from
/// `t,position_fbk,velocity_fbk,effort_fbk,position_cmd,velocity_cmd,
/// effort_cmd,pwm_cmd,motor_current,winding_current`; optional columns may be
/// omitted entirely. Errors (missing mandatory column, non-numeric cell,
/// decreasing time) carry the offending row number.
std::vector<LogRecord> parse_log(const std::string& csv_text);
std::vector<LogRecord> parse_log_file(const std::string& path);

/// Forward differences of velocity_fbk: a_k = (v_{k+1} - v_k)/(t_{k+1} - t_k),
/// timestamped at the left endpoint, length n-1. Repeated timestamps are an
/// error.
std::vector<std::pair<double, double>>
finite_difference_acceleration(const std::vector<LogRecord>& records);

/// Horizontal-run regression: effort_fbk on {velocity_fbk, acceleration},
/// no intercept unless asked for one. Coefficient "velocity" estimates
/// (sign-flipped) b_c, "acceleration" estimates m_c. Needs >= 10 samples.
RegressionResult regress_inertia_damping(const std::vector<LogRecord>& records,
                                         bool with_intercept = false);

/// Maximal runs with |velocity_fbk| <= velocity_threshold spanning at least
/// min_duration; a run also ends at a sampling gap of more than five nominal
/// periods, which keeps re-segmentation of extracted holds idempotent. The
/// commanded angle is the median position of the run; the cycle is the sign
/// of the net displacement since the previous hold (a hold with no preceding
/// motion counts as positive).
std::vector<StaticSegment>
extract_static_segments(const std::vector<LogRecord>& records,
                        double velocity_threshold, double min_duration);

/// Static-hold regression: per-segment mean effort_fbk on sin(angle), single
/// coefficient "sine_pos" estimating g_c, no intercept unless asked for one.
/// Pooling both cycles cancels a balanced hysteresis offset. Needs >= 3
/// segments over >= 2 distinct angles.
RegressionResult regress_gravity(const std::vector<StaticSegment>& segments,
                                 bool with_intercept = false);

struct OlsResult {
    std::vector<double> beta;
    double r_squared = 0.0;
    std::size_t n_samples = 0;
    double residual_std = 0.0;
};

/// Least squares via Householder QR with column pivoting. `design` is
/// row-major n x p. Rank deficiency (smallest pivot < 1e-12 x largest) is a
/// singularity error. r_squared uses SS_tot about the mean of y with the
/// zero-variance convention: SS_tot = 0 reports 1 when SS_res = 0, else 0.
OlsResult ols(const std::vector<double>& design, std::size_t n, std::size_t p,
              const std::vector<double>& y);

enum class TrialKind { inertia_damping, gravity };

/// Identified constants; only the fields matching the trial kind are set.
struct ParamEstimate {
    std::optional<double> m_c;
    std::optional<double> b_c;
    std::optional<double> g_c;
};

/// Arithmetic mean per coefficient across trials after sign normalization
/// (absolute values; the sensor reports external torque negated). Results of
/// the wrong kind or with inconsistent coefficient signs are an error.
ParamEstimate average_trials(const std::vector<RegressionResult>& results,
                             TrialKind kind);

/// Regression report as JSON text with keys `coefficients`, `r_squared`,
/// `n_samples`, `residual_std`.
std::string regression_report_json(const RegressionResult& result);

} // namespace pendkit
