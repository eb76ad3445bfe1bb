#include "pendkit.h"

#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "pendkit/dynamics.hpp"
#include "pendkit/harness.hpp"
#include "pendkit/linear_control.hpp"
#include "pendkit/sysid.hpp"
#include "pendkit/trajectory.hpp"

struct pk_trajectory {
    pendkit::Trajectory impl;
};

struct pk_log {
    std::vector<pendkit::LogRecord> records;
};

struct pk_command_trajectory {
    pendkit::CommandTrajectory impl;
};

namespace {

thread_local std::string g_last_error;

pk_status to_status(pendkit::ErrorCode code) {
    using pendkit::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument: return PK_ERR_INVALID_ARGUMENT;
        case ErrorCode::parse: return PK_ERR_PARSE;
        case ErrorCode::singular: return PK_ERR_SINGULAR;
        case ErrorCode::not_stabilizable: return PK_ERR_NOT_STABILIZABLE;
        case ErrorCode::no_convergence: return PK_ERR_NO_CONVERGENCE;
        case ErrorCode::diverged: return PK_ERR_DIVERGED;
        case ErrorCode::range: return PK_ERR_RANGE;
        case ErrorCode::unstable: return PK_ERR_UNSTABLE;
        case ErrorCode::io: return PK_ERR_IO;
    }
    return PK_ERR_INTERNAL;
}

pk_status fail(const pendkit::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
}

pk_status fail_message(pk_status status, const char* message) {
    g_last_error = message;
    return status;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
pk_status guarded(Fn&& fn) {
    try {
        fn();
        return PK_OK;
    } catch (const pendkit::Error& e) {
        return fail(e);
    } catch (const std::bad_alloc&) {
        return fail_message(PK_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PK_ERR_INTERNAL;
    }
}

pendkit::PendulumParams from_c(pk_params p) { return {p.m_c, p.b_c, p.g_c}; }
pendkit::State from_c(pk_state s) { return {s.theta, s.omega}; }
pk_state to_c(const pendkit::State& s) { return {s.theta, s.omega}; }

pendkit::StateSpace from_c(const pk_state_space& ss) {
    pendkit::StateSpace out;
    out.a = {ss.a[0][0], ss.a[0][1], ss.a[1][0], ss.a[1][1]};
    out.b = {ss.b[0], ss.b[1]};
    out.x_star = from_c(ss.x_star);
    out.u_star = ss.u_star;
    return out;
}

pendkit::CostMatrices from_c(const pk_cost& c) {
    return {{c.q[0][0], c.q[0][1], c.q[1][0], c.q[1][1]}, c.r};
}

pendkit::NoiseConfig from_c(pk_noise_config c) { return {c.lo, c.hi, c.seed}; }

void to_c(const pendkit::ComplexPair& eigs, pk_complex out[2]) {
    out[0] = {eigs[0].real(), eigs[0].imag()};
    out[1] = {eigs[1].real(), eigs[1].imag()};
}

void to_c(const pendkit::Mat2& m, double out[2][2]) {
    out[0][0] = m.m00;
    out[0][1] = m.m01;
    out[1][0] = m.m10;
    out[1][1] = m.m11;
}

pk_status require(bool ok, const char* message) {
    return ok ? PK_OK : fail_message(PK_ERR_INVALID_ARGUMENT, message);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void copy_label(char (&dst)[32], const std::string& src) {
    std::snprintf(dst, sizeof dst, "%s", src.c_str());
}

pk_regression to_c(const pendkit::RegressionResult& r) {
    pk_regression out{};
    out.n_terms = r.coefficients.size() < PK_REGRESSION_MAX_TERMS
                      ? r.coefficients.size()
                      : PK_REGRESSION_MAX_TERMS;
    for (size_t i = 0; i < out.n_terms; ++i) {
        std::snprintf(out.terms[i], sizeof out.terms[i], "%s",
                      r.coefficients[i].first.c_str());
        out.coefficients[i] = r.coefficients[i].second;
    }
    out.r_squared = r.r_squared;
    out.n_samples = r.n_samples;
    out.residual_std = r.residual_std;
    return out;
}

pendkit::RegressionResult from_c(const pk_regression& r) {
    pendkit::RegressionResult out;
    for (size_t i = 0; i < r.n_terms && i < PK_REGRESSION_MAX_TERMS; ++i)
        out.coefficients.emplace_back(r.terms[i], r.coefficients[i]);
    out.r_squared = r.r_squared;
    out.n_samples = r.n_samples;
    out.residual_std = r.residual_std;
    return out;
}

} // namespace

extern "C" {

const char* pk_status_name(pk_status status) {
    switch (status) {
        case PK_OK: return "ok";
        case PK_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PK_ERR_PARSE: return "parse error";
        case PK_ERR_SINGULAR: return "singular system";
        case PK_ERR_NOT_STABILIZABLE: return "not stabilizable";
        case PK_ERR_NO_CONVERGENCE: return "no convergence";
        case PK_ERR_DIVERGED: return "diverged";
        case PK_ERR_RANGE: return "out of range";
        case PK_ERR_UNSTABLE: return "unstable system";
        case PK_ERR_IO: return "io error";
        case PK_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* pk_last_error(void) { return g_last_error.c_str(); }

const char* pk_version(void) { return "0.1.0"; }

void pk_string_free(char* s) { delete[] s; }

/* ---------------- dynamics ---------------- */

pk_status pk_acceleration(pk_params params, pk_state s, double torque, double* out) {
    if (auto st = require(out != nullptr, "pk_acceleration: out is null")) return st;
    return guarded([&] { *out = pendkit::acceleration(from_c(params), from_c(s), torque); });
}

pk_status pk_energy(pk_params params, pk_state s, double* kinetic, double* potential) {
    if (auto st = require(kinetic && potential, "pk_energy: output is null")) return st;
    return guarded([&] {
        const auto e = pendkit::energy(from_c(params), from_c(s));
        *kinetic = e.kinetic;
        *potential = e.potential;
    });
}

pk_status pk_fixed_points(pk_params params, pk_fixed_point out[2]) {
    if (auto st = require(out != nullptr, "pk_fixed_points: out is null")) return st;
    return guarded([&] {
        const auto points = pendkit::fixed_points(from_c(params));
        for (size_t i = 0; i < 2; ++i) {
            out[i].state = to_c(points[i].state);
            out[i].stable =
                points[i].stability == pendkit::Stability::locally_stable_isl ? 1 : 0;
        }
    });
}

pk_status pk_step_euler(pk_params params, pk_state s, double torque, double dt,
                        pk_state* out) {
    if (auto st = require(out != nullptr, "pk_step_euler: out is null")) return st;
    return guarded([&] {
        *out = to_c(pendkit::step_euler(from_c(params), from_c(s), torque, dt));
    });
}

pk_status pk_simulate(pk_params params, pk_state s0, pk_policy_fn policy, void* user,
                      double dt, double duration, pk_trajectory** out) {
    if (auto st = require(out && policy, "pk_simulate: out or policy is null")) return st;
    *out = nullptr;
    return guarded([&] {
        auto traj = pendkit::simulate(
            from_c(params), from_c(s0),
            [&](double t, const pendkit::State& s) { return policy(user, t, to_c(s)); },
            dt, duration);
        *out = new pk_trajectory{std::move(traj)};
    });
}

/* ---------------- trajectory handles ---------------- */

size_t pk_trajectory_size(const pk_trajectory* traj) {
    return traj ? traj->impl.size() : 0;
}

pk_status pk_trajectory_sample(const pk_trajectory* traj, size_t index, pk_sample* out) {
    if (auto st = require(traj && out, "pk_trajectory_sample: null argument")) return st;
    if (index >= traj->impl.size())
        return fail_message(PK_ERR_RANGE, "pk_trajectory_sample: index out of range");
    const auto& s = traj->impl.samples[index];
    *out = {s.t, s.state.theta, s.state.omega, s.u_control, s.u_noise};
    return PK_OK;
}

pk_status pk_trajectory_times(const pk_trajectory* traj, double* times) {
    if (auto st = require(traj && times, "pk_trajectory_times: null argument")) return st;
    for (size_t i = 0; i < traj->impl.size(); ++i) times[i] = traj->impl.samples[i].t;
    return PK_OK;
}

pk_status pk_trajectory_write_csv(const pk_trajectory* traj, const char* path) {
    if (auto st = require(traj && path, "pk_trajectory_write_csv: null argument"))
        return st;
    return guarded([&] { pendkit::write_trajectory_csv(traj->impl, std::string(path)); });
}

pk_status pk_trajectory_to_csv(const pk_trajectory* traj, char** out) {
    if (auto st = require(traj && out, "pk_trajectory_to_csv: null argument")) return st;
    *out = nullptr;
    return guarded([&] {
        std::ostringstream buf;
        pendkit::write_trajectory_csv(traj->impl, buf);
        *out = dup_string(buf.str());
    });
}

pk_status pk_trajectory_read_csv(const char* path, pk_trajectory** out) {
    if (auto st = require(path && out, "pk_trajectory_read_csv: null argument")) return st;
    *out = nullptr;
    return guarded([&] {
        *out = new pk_trajectory{pendkit::read_trajectory_csv_file(path)};
    });
}

void pk_trajectory_free(pk_trajectory* traj) { delete traj; }

/* ---------------- linear control ---------------- */

pk_status pk_linearize(pk_params params, pk_state fixed_point, double u_star,
                       pk_state_space* out) {
    if (auto st = require(out != nullptr, "pk_linearize: out is null")) return st;
    return guarded([&] {
        const auto ss = pendkit::linearize(from_c(params), from_c(fixed_point), u_star);
        to_c(ss.a, out->a);
        out->b[0] = ss.b.v0;
        out->b[1] = ss.b.v1;
        out->x_star = to_c(ss.x_star);
        out->u_star = ss.u_star;
    });
}

pk_status pk_eigenvalues_2x2(const double m[2][2], pk_complex out[2]) {
    if (auto st = require(m && out, "pk_eigenvalues_2x2: null argument")) return st;
    return guarded([&] {
        const pendkit::Mat2 mat{m[0][0], m[0][1], m[1][0], m[1][1]};
        to_c(pendkit::eigenvalues_2x2(mat), out);
    });
}

pk_status pk_solve_care(const pk_state_space* ss, const pk_cost* cost,
                        double x_out[2][2]) {
    if (auto st = require(ss && cost && x_out, "pk_solve_care: null argument")) return st;
    return guarded([&] { to_c(pendkit::solve_care(from_c(*ss), from_c(*cost)), x_out); });
}

pk_status pk_lqr_gain(const pk_state_space* ss, const pk_cost* cost,
                      pk_lqr_solution* out) {
    if (auto st = require(ss && cost && out, "pk_lqr_gain: null argument")) return st;
    return guarded([&] {
        const auto sol = pendkit::lqr_gain(from_c(*ss), from_c(*cost));
        to_c(sol.x, out->x);
        out->k[0] = sol.k.v0;
        out->k[1] = sol.k.v1;
        to_c(sol.closed_loop_eigs, out->closed_loop_eigs);
        out->residual = sol.residual;
    });
}

pk_status pk_closed_loop(const pk_state_space* ss, const double k[2],
                         double out[2][2]) {
    if (auto st = require(ss && k && out, "pk_closed_loop: null argument")) return st;
    return guarded([&] {
        to_c(pendkit::closed_loop(from_c(*ss), {k[0], k[1]}), out);
    });
}

pk_status pk_time_constant(const pk_complex eigs[2], double* out) {
    if (auto st = require(eigs && out, "pk_time_constant: null argument")) return st;
    return guarded([&] {
        const pendkit::ComplexPair pair{std::complex<double>(eigs[0].re, eigs[0].im),
                                        std::complex<double>(eigs[1].re, eigs[1].im)};
        *out = pendkit::time_constant(pair);
    });
}

pk_status pk_stability_report(const pk_state_space* ss, const pk_cost* combos,
                              const char* const* labels, size_t n_combos,
                              pk_stability_row* rows) {
    if (auto st = require(ss && rows && (combos || n_combos == 0),
                          "pk_stability_report: null argument"))
        return st;
    return guarded([&] {
        std::vector<pendkit::LabeledCost> labeled;
        labeled.reserve(n_combos);
        for (size_t i = 0; i < n_combos; ++i) {
            const std::string label =
                labels && labels[i] ? labels[i] : std::to_string(i + 1);
            labeled.emplace_back(label, from_c(combos[i]));
        }
        const auto report = pendkit::stability_report(from_c(*ss), labeled);
        for (size_t i = 0; i < report.size(); ++i) {
            pk_stability_row& row = rows[i];
            row = pk_stability_row{};
            copy_label(row.label, report[i].label);
            row.has_feedback = report[i].feedback == pendkit::FeedbackKind::lqr ? 1 : 0;
            if (report[i].cost) {
                to_c(report[i].cost->q, row.cost.q);
                row.cost.r = report[i].cost->r;
            }
            if (report[i].error.empty()) {
                to_c(report[i].eigs, row.eigs);
                row.row_status = PK_OK;
            } else {
                row.row_status = PK_ERR_NO_CONVERGENCE;
            }
        }
    });
}

pk_status pk_stability_report_to_csv(const pk_stability_row* rows, size_t n_rows,
                                     char** out) {
    if (auto st = require(rows && out, "pk_stability_report_to_csv: null argument"))
        return st;
    *out = nullptr;
    return guarded([&] {
        std::vector<pendkit::StabilityRow> report;
        report.reserve(n_rows);
        for (size_t i = 0; i < n_rows; ++i) {
            pendkit::StabilityRow row;
            row.label = rows[i].label;
            row.feedback = rows[i].has_feedback ? pendkit::FeedbackKind::lqr
                                                : pendkit::FeedbackKind::open_loop;
            if (rows[i].has_feedback) row.cost = from_c(rows[i].cost);
            if (rows[i].row_status == PK_OK) {
                row.eigs = {std::complex<double>(rows[i].eigs[0].re, rows[i].eigs[0].im),
                            std::complex<double>(rows[i].eigs[1].re, rows[i].eigs[1].im)};
            } else {
                row.error = pk_status_name(rows[i].row_status);
            }
            report.push_back(std::move(row));
        }
        std::ostringstream buf;
        pendkit::write_stability_csv(report, buf);
        *out = dup_string(buf.str());
    });
}

/* ---------------- system identification ---------------- */

pk_status pk_log_parse_file(const char* path, pk_log** out) {
    if (auto st = require(path && out, "pk_log_parse_file: null argument")) return st;
    *out = nullptr;
    return guarded([&] { *out = new pk_log{pendkit::parse_log_file(path)}; });
}

pk_status pk_log_parse_string(const char* csv_text, pk_log** out) {
    if (auto st = require(csv_text && out, "pk_log_parse_string: null argument"))
        return st;
    *out = nullptr;
    return guarded([&] { *out = new pk_log{pendkit::parse_log(csv_text)}; });
}

size_t pk_log_size(const pk_log* log) { return log ? log->records.size() : 0; }

void pk_log_free(pk_log* log) { delete log; }

pk_status pk_regress_inertia_damping(const pk_log* log, int with_intercept,
                                     pk_regression* out) {
    if (auto st = require(log && out, "pk_regress_inertia_damping: null argument"))
        return st;
    return guarded([&] {
        *out = to_c(pendkit::regress_inertia_damping(log->records, with_intercept != 0));
    });
}

pk_status pk_regress_gravity(const pk_log* log, double velocity_threshold,
                             double min_duration, int with_intercept,
                             pk_regression* out) {
    if (auto st = require(log && out, "pk_regress_gravity: null argument")) return st;
    return guarded([&] {
        const auto segments = pendkit::extract_static_segments(
            log->records, velocity_threshold, min_duration);
        *out = to_c(pendkit::regress_gravity(segments, with_intercept != 0));
    });
}

pk_status pk_regression_to_json(const pk_regression* regression, char** out) {
    if (auto st = require(regression && out, "pk_regression_to_json: null argument"))
        return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(pendkit::regression_report_json(from_c(*regression)));
    });
}

pk_status pk_average_trials(const pk_regression* results, size_t n, pk_trial_kind kind,
                            pk_param_estimate* out) {
    if (auto st = require(results && out && n > 0, "pk_average_trials: null or empty"))
        return st;
    return guarded([&] {
        std::vector<pendkit::RegressionResult> trials;
        trials.reserve(n);
        for (size_t i = 0; i < n; ++i) trials.push_back(from_c(results[i]));
        const auto est = pendkit::average_trials(
            trials, kind == PK_TRIAL_GRAVITY ? pendkit::TrialKind::gravity
                                             : pendkit::TrialKind::inertia_damping);
        *out = pk_param_estimate{};
        if (est.m_c) { out->m_c = *est.m_c; out->has_m_c = 1; }
        if (est.b_c) { out->b_c = *est.b_c; out->has_b_c = 1; }
        if (est.g_c) { out->g_c = *est.g_c; out->has_g_c = 1; }
    });
}

/* ---------------- harness ---------------- */

pk_status pk_uniform_noise(pk_noise_config cfg, double* out, size_t n) {
    if (auto st = require(out != nullptr || n == 0, "pk_uniform_noise: out is null"))
        return st;
    return guarded([&] {
        const auto values = pendkit::uniform_noise(from_c(cfg), n);
        for (size_t i = 0; i < n; ++i) out[i] = values[i];
    });
}

pk_status pk_generate_trajectory(double start, double end, double pos_increment,
                                 double peak_velocity, double rate,
                                 pk_command_trajectory** out) {
    if (auto st = require(out != nullptr, "pk_generate_trajectory: out is null"))
        return st;
    *out = nullptr;
    return guarded([&] {
        *out = new pk_command_trajectory{
            pendkit::generate_trajectory(start, end, pos_increment, peak_velocity, rate)};
    });
}

size_t pk_command_trajectory_size(const pk_command_trajectory* traj) {
    return traj ? traj->impl.samples.size() : 0;
}

pk_status pk_command_trajectory_sample(const pk_command_trajectory* traj, size_t index,
                                       double* t, double* position_cmd,
                                       double* velocity_cmd) {
    if (auto st = require(traj && t && position_cmd && velocity_cmd,
                          "pk_command_trajectory_sample: null argument"))
        return st;
    if (index >= traj->impl.samples.size())
        return fail_message(PK_ERR_RANGE, "pk_command_trajectory_sample: index out of range");
    const auto& s = traj->impl.samples[index];
    *t = s.t;
    *position_cmd = s.position_cmd;
    *velocity_cmd = s.velocity_cmd;
    return PK_OK;
}

pk_status pk_command_trajectory_write_csv(const pk_command_trajectory* traj,
                                          const char* path) {
    if (auto st = require(traj && path, "pk_command_trajectory_write_csv: null argument"))
        return st;
    return guarded([&] { pendkit::write_command_csv(traj->impl, std::string(path)); });
}

pk_status pk_command_trajectory_to_csv(const pk_command_trajectory* traj, char** out) {
    if (auto st = require(traj && out, "pk_command_trajectory_to_csv: null argument"))
        return st;
    *out = nullptr;
    return guarded([&] {
        std::ostringstream buf;
        pendkit::write_command_csv(traj->impl, buf);
        *out = dup_string(buf.str());
    });
}

void pk_command_trajectory_free(pk_command_trajectory* traj) { delete traj; }

pk_status pk_run_lqr_noise_sim(pk_params params, const double k[2],
                               pk_noise_config noise, double dt, double duration,
                               pk_state setpoint, pk_trajectory** out) {
    if (auto st = require(k && out, "pk_run_lqr_noise_sim: null argument")) return st;
    *out = nullptr;
    try {
        *out = new pk_trajectory{pendkit::run_lqr_noise_sim(
            from_c(params), {k[0], k[1]}, from_c(noise), dt, duration, from_c(setpoint))};
        return PK_OK;
    } catch (const pendkit::DivergenceError& e) {
        *out = new pk_trajectory{e.partial()};
        return fail(e);
    } catch (const pendkit::Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PK_ERR_INTERNAL;
    }
}

pk_status pk_run_virtual_plant(const pk_plant_config* cfg, const double k[2],
                               pk_noise_config noise, double duration,
                               pk_state setpoint, pk_trajectory** out) {
    if (auto st = require(cfg && k && out, "pk_run_virtual_plant: null argument"))
        return st;
    *out = nullptr;
    pendkit::PlantConfig plant;
    plant.true_params = from_c(cfg->true_params);
    plant.control_rate = cfg->control_rate;
    plant.sensor_quantization = cfg->sensor_quantization;
    plant.effort_hysteresis_offset = cfg->effort_hysteresis_offset;
    plant.perturbation = {cfg->perturb_m_c, cfg->perturb_b_c, cfg->perturb_g_c};
    try {
        *out = new pk_trajectory{pendkit::run_virtual_plant(
            plant, {k[0], k[1]}, from_c(noise), duration, from_c(setpoint))};
        return PK_OK;
    } catch (const pendkit::DivergenceError& e) {
        *out = new pk_trajectory{e.partial()};
        return fail(e);
    } catch (const pendkit::Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PK_ERR_INTERNAL;
    }
}

pk_status pk_resample_cubic(const pk_trajectory* traj, const double* times, size_t n,
                            pk_trajectory** out) {
    if (auto st = require(traj && out && (times || n == 0),
                          "pk_resample_cubic: null argument"))
        return st;
    *out = nullptr;
    return guarded([&] {
        *out = new pk_trajectory{
            pendkit::resample_cubic(traj->impl, std::span<const double>(times, n))};
    });
}

pk_status pk_compare(const pk_trajectory* a, const pk_trajectory* b,
                     pk_comparison_stats* out) {
    if (auto st = require(a && b && out, "pk_compare: null argument")) return st;
    return guarded([&] {
        const auto stats = pendkit::compare(a->impl, b->impl);
        *out = {stats.mean_dpos, stats.std_dpos, stats.mean_dvel, stats.std_dvel,
                stats.n};
    });
}

} // extern "C"
