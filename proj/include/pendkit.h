/*
 * pendkit C API: pendulum control-engineering toolkit.
 *
 * Thin extern-C layer over the C++ core. Fixed-size results (states,
 * 2x2 matrices, gains, statistics) are plain structs; variable-size data
 * (trajectories, actuator logs) are opaque handles with explicit free
 * functions. Every fallible call returns a pk_status; on failure
 * pk_last_error() describes what went wrong for the calling thread.
 */

#ifndef PENDKIT_H
#define PENDKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PK_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PK_API __attribute__((visibility("default")))
#else
#define PK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pk_status {
    PK_OK = 0,
    PK_ERR_INVALID_ARGUMENT = 1, /* bad value or violated precondition */
    PK_ERR_PARSE = 2,            /* malformed CSV input */
    PK_ERR_SINGULAR = 3,         /* rank-deficient regression */
    PK_ERR_NOT_STABILIZABLE = 4, /* uncontrollable unstable mode */
    PK_ERR_NO_CONVERGENCE = 5,   /* iterative solver hit its cap */
    PK_ERR_DIVERGED = 6,         /* simulation left the validity region */
    PK_ERR_RANGE = 7,            /* out-of-range interpolation / misalignment */
    PK_ERR_UNSTABLE = 8,         /* stable system required */
    PK_ERR_IO = 9,               /* file open/write failure */
    PK_ERR_INTERNAL = 10
} pk_status;

PK_API const char* pk_status_name(pk_status status);

/* Message from the most recent failing call on this thread. */
PK_API const char* pk_last_error(void);

PK_API const char* pk_version(void);

/* Frees strings returned by pk_*_to_csv / pk_*_to_json. */
PK_API void pk_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Dynamics                                                            */
/* ------------------------------------------------------------------ */

typedef struct pk_params {
    double m_c; /* inertial constant, kg*m^2 */
    double b_c; /* damping constant, N*m*s/rad */
    double g_c; /* gravitational torque coefficient, N*m */
} pk_params;

typedef struct pk_state {
    double theta; /* rad, 0 = hanging down */
    double omega; /* rad/s */
} pk_state;

typedef struct pk_complex {
    double re;
    double im;
} pk_complex;

PK_API pk_status pk_acceleration(pk_params params, pk_state s, double torque,
                                 double* out);

PK_API pk_status pk_energy(pk_params params, pk_state s, double* kinetic,
                           double* potential);

typedef struct pk_fixed_point {
    pk_state state;
    int stable; /* 1 = locally stable i.s.L, 0 = unstable */
} pk_fixed_point;

/* Fills out[0..1] with the stable and unstable equilibria. */
PK_API pk_status pk_fixed_points(pk_params params, pk_fixed_point out[2]);

PK_API pk_status pk_step_euler(pk_params params, pk_state s, double torque,
                               double dt, pk_state* out);

/* Control law callback: torque applied from state s at time t. */
typedef double (*pk_policy_fn)(void* user, double t, pk_state s);

typedef struct pk_trajectory pk_trajectory; /* opaque */

PK_API pk_status pk_simulate(pk_params params, pk_state s0, pk_policy_fn policy,
                             void* user, double dt, double duration,
                             pk_trajectory** out);

/* ------------------------------------------------------------------ */
/* Trajectory handles                                                  */
/* ------------------------------------------------------------------ */

typedef struct pk_sample {
    double t;
    double theta;
    double omega;
    double u_control;
    double u_noise;
} pk_sample;

PK_API size_t pk_trajectory_size(const pk_trajectory* traj);
PK_API pk_status pk_trajectory_sample(const pk_trajectory* traj, size_t index,
                                      pk_sample* out);
/* Fills times[0 .. pk_trajectory_size-1]. */
PK_API pk_status pk_trajectory_times(const pk_trajectory* traj, double* times);
/* CSV `t,theta,omega,u_control,u_noise`, 17 significant digits, LF endings. */
PK_API pk_status pk_trajectory_write_csv(const pk_trajectory* traj, const char* path);
/* Same CSV as a string; free with pk_string_free. */
PK_API pk_status pk_trajectory_to_csv(const pk_trajectory* traj, char** out);
PK_API pk_status pk_trajectory_read_csv(const char* path, pk_trajectory** out);
PK_API void pk_trajectory_free(pk_trajectory* traj);

/* ------------------------------------------------------------------ */
/* Linearization and LQR                                               */
/* ------------------------------------------------------------------ */

typedef struct pk_state_space {
    double a[2][2];
    double b[2];
    pk_state x_star;
    double u_star;
} pk_state_space;

typedef struct pk_cost {
    double q[2][2]; /* symmetric positive semi-definite */
    double r;       /* > 0 */
} pk_cost;

typedef struct pk_lqr_solution {
    double x[2][2];              /* stabilizing Riccati solution */
    double k[2];                 /* gain, u = -k (x - x*) */
    pk_complex closed_loop_eigs[2];
    double residual;             /* Frobenius norm of the Riccati residual */
} pk_lqr_solution;

PK_API pk_status pk_linearize(pk_params params, pk_state fixed_point, double u_star,
                              pk_state_space* out);

/* Sorted by descending real part, ties by descending imaginary part. */
PK_API pk_status pk_eigenvalues_2x2(const double m[2][2], pk_complex out[2]);

PK_API pk_status pk_solve_care(const pk_state_space* ss, const pk_cost* cost,
                               double x_out[2][2]);

PK_API pk_status pk_lqr_gain(const pk_state_space* ss, const pk_cost* cost,
                             pk_lqr_solution* out);

PK_API pk_status pk_closed_loop(const pk_state_space* ss, const double k[2],
                                double out[2][2]);

PK_API pk_status pk_time_constant(const pk_complex eigs[2], double* out);

typedef struct pk_stability_row {
    char label[32];
    int has_feedback; /* 0 = open loop, 1 = LQR */
    pk_cost cost;     /* meaningful when has_feedback */
    pk_complex eigs[2];
    pk_status row_status; /* per-row solver failures land here */
} pk_stability_row;

/*
 * rows[0] receives the open-loop eigenvalues, rows[1 .. n_combos] one entry
 * per cost combination (labels optional; defaults to 1-based indices).
 * Per-row solver failures set row_status without failing the call.
 */
PK_API pk_status pk_stability_report(const pk_state_space* ss, const pk_cost* combos,
                                     const char* const* labels, size_t n_combos,
                                     pk_stability_row* rows);

/* CSV `label,feedback,q11,q12,q21,q22,r11,eig1_re,eig1_im,eig2_re,eig2_im`.
 * Free the returned string with pk_string_free. */
PK_API pk_status pk_stability_report_to_csv(const pk_stability_row* rows,
                                            size_t n_rows, char** out);

/* ------------------------------------------------------------------ */
/* System identification                                               */
/* ------------------------------------------------------------------ */

typedef struct pk_log pk_log; /* opaque list of actuator log records */

/* Header row `t,position_fbk,velocity_fbk,effort_fbk,...`; optional columns
 * may be omitted entirely. Parse errors carry the offending line number. */
PK_API pk_status pk_log_parse_file(const char* path, pk_log** out);
PK_API pk_status pk_log_parse_string(const char* csv_text, pk_log** out);
PK_API size_t pk_log_size(const pk_log* log);
PK_API void pk_log_free(pk_log* log);

#define PK_REGRESSION_MAX_TERMS 4

typedef struct pk_regression {
    char terms[PK_REGRESSION_MAX_TERMS][16];
    double coefficients[PK_REGRESSION_MAX_TERMS];
    size_t n_terms;
    double r_squared;
    size_t n_samples;
    double residual_std;
} pk_regression;

/* Horizontal-run fit of effort on {velocity, acceleration}; the velocity
 * coefficient estimates (sign-flipped) b_c, the acceleration one m_c. */
PK_API pk_status pk_regress_inertia_damping(const pk_log* log, int with_intercept,
                                            pk_regression* out);

/* Static-hold fit of mean effort on sin(angle); `sine_pos` estimates g_c. */
PK_API pk_status pk_regress_gravity(const pk_log* log, double velocity_threshold,
                                    double min_duration, int with_intercept,
                                    pk_regression* out);

/* JSON report with keys coefficients, r_squared, n_samples, residual_std.
 * Free with pk_string_free. */
PK_API pk_status pk_regression_to_json(const pk_regression* regression, char** out);

typedef enum pk_trial_kind {
    PK_TRIAL_INERTIA_DAMPING = 0,
    PK_TRIAL_GRAVITY = 1
} pk_trial_kind;

typedef struct pk_param_estimate {
    double m_c, b_c, g_c;
    int has_m_c, has_b_c, has_g_c;
} pk_param_estimate;

/* Mean of |coefficients| across trials; trials disagreeing in sign or of the
 * wrong kind are rejected. */
PK_API pk_status pk_average_trials(const pk_regression* results, size_t n,
                                   pk_trial_kind kind, pk_param_estimate* out);

/* ------------------------------------------------------------------ */
/* Experiment harness                                                  */
/* ------------------------------------------------------------------ */

typedef struct pk_noise_config {
    double lo;  /* N*m */
    double hi;  /* N*m */
    uint64_t seed;
} pk_noise_config;

/* n uniform draws in [lo, hi]; SplitMix64, identical seed => identical
 * sequence. */
PK_API pk_status pk_uniform_noise(pk_noise_config cfg, double* out, size_t n);

typedef struct pk_command_trajectory pk_command_trajectory; /* opaque */

PK_API pk_status pk_generate_trajectory(double start, double end, double pos_increment,
                                        double peak_velocity, double rate,
                                        pk_command_trajectory** out);
PK_API size_t pk_command_trajectory_size(const pk_command_trajectory* traj);
PK_API pk_status pk_command_trajectory_sample(const pk_command_trajectory* traj,
                                              size_t index, double* t,
                                              double* position_cmd,
                                              double* velocity_cmd);
/* CSV `t,position_cmd,velocity_cmd`. */
PK_API pk_status pk_command_trajectory_write_csv(const pk_command_trajectory* traj,
                                                 const char* path);
/* Same CSV as a string; free with pk_string_free. */
PK_API pk_status pk_command_trajectory_to_csv(const pk_command_trajectory* traj,
                                              char** out);
PK_API void pk_command_trajectory_free(pk_command_trajectory* traj);

/* Closed-loop regulation under bounded uniform torque noise. On
 * PK_ERR_DIVERGED *out still receives the partial trajectory. */
PK_API pk_status pk_run_lqr_noise_sim(pk_params params, const double k[2],
                                      pk_noise_config noise, double dt,
                                      double duration, pk_state setpoint,
                                      pk_trajectory** out);

typedef struct pk_plant_config {
    pk_params true_params;
    double control_rate;            /* Hz, must divide the 500 Hz physics */
    double sensor_quantization;     /* rad, 0 = off */
    double effort_hysteresis_offset;/* N*m, 0 = off */
    double perturb_m_c, perturb_b_c, perturb_g_c; /* relative fractions > -1 */
} pk_plant_config;

/* Virtual hardware stand-in: physics at 0.002 s, control and noise held at
 * control_rate, samples recorded at control_rate. Divergence behaves as in
 * pk_run_lqr_noise_sim. */
PK_API pk_status pk_run_virtual_plant(const pk_plant_config* cfg, const double k[2],
                                      pk_noise_config noise, double duration,
                                      pk_state setpoint, pk_trajectory** out);

/* Natural cubic resampling at the given times (within the source range). */
PK_API pk_status pk_resample_cubic(const pk_trajectory* traj, const double* times,
                                   size_t n, pk_trajectory** out);

typedef struct pk_comparison_stats {
    double mean_dpos; /* rad */
    double std_dpos;  /* rad, population */
    double mean_dvel; /* rad/s */
    double std_dvel;  /* rad/s, population */
    size_t n;
} pk_comparison_stats;

/* Per-sample a - b statistics; timestamps must agree within 1e-12 s. */
PK_API pk_status pk_compare(const pk_trajectory* a, const pk_trajectory* b,
                            pk_comparison_stats* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PENDKIT_H */
