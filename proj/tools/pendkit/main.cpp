// pendkit CLI: identify -> design -> simulate -> compare -> trajgen, built on
// the pendkit C API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pendkit.h"

namespace {

constexpr double kPi = 3.14159265358979323846;

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNumerical = 3,
};

int exit_code_for(pk_status status) {
    switch (status) {
        case PK_OK: return kExitOk;
        case PK_ERR_INVALID_ARGUMENT: return kExitUsage;
        case PK_ERR_PARSE:
        case PK_ERR_IO:
        case PK_ERR_RANGE: return kExitData;
        default: return kExitNumerical;
    }
}

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail_usage(const std::string& message) {
    throw CliError{kExitUsage, message};
}

[[noreturn]] void fail_status(pk_status status, const std::string& context) {
    throw CliError{exit_code_for(status),
                   context + ": " + pk_status_name(status) + ": " + pk_last_error()};
}

void check(pk_status status, const std::string& context) {
    if (status != PK_OK) fail_status(status, context);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Angles are radians unless the value carries a `deg` suffix.
double parse_angle(const std::string& text) {
    std::string s = text;
    double scale = 1.0;
    if (s.size() > 3 && s.substr(s.size() - 3) == "deg") {
        s = s.substr(0, s.size() - 3);
        scale = kPi / 180.0;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v * scale;
    } catch (const std::exception&) {
        fail_usage("bad angle '" + text + "' (radians, or degrees with a deg suffix)");
    }
}

/// Defaults describe the reference experiment on the identified rig: 0.002 s
/// integration, 5 s horizon, upright setpoint, Q = diag(100, 0.01), R = 0.1,
/// +/-2.5 N*m noise, 100 Hz plant control rate.
struct RunConfig {
    double m_c = 0.055;
    double b_c = 11.77;
    double g_c = 1.678;
    double dt = 0.002;
    double duration = 5.0;
    double setpoint_theta = kPi;
    double q11 = 100.0;
    double q22 = 0.01;
    double r11 = 0.1;
    double noise_lo = -2.5;
    double noise_hi = 2.5;
    std::uint64_t seed = 1;
    double control_rate = 100.0;
};

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&](double& slot) {
        try {
            std::size_t used = 0;
            slot = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            fail_usage("config: bad numeric value '" + value + "' for " + key);
        }
    };
    if (key == "m_c") as_double(cfg.m_c);
    else if (key == "b_c") as_double(cfg.b_c);
    else if (key == "g_c") as_double(cfg.g_c);
    else if (key == "dt") as_double(cfg.dt);
    else if (key == "duration") as_double(cfg.duration);
    else if (key == "setpoint_theta") cfg.setpoint_theta = parse_angle(value);
    else if (key == "q11") as_double(cfg.q11);
    else if (key == "q22") as_double(cfg.q22);
    else if (key == "r11") as_double(cfg.r11);
    else if (key == "noise_lo") as_double(cfg.noise_lo);
    else if (key == "noise_hi") as_double(cfg.noise_hi);
    else if (key == "control_rate") as_double(cfg.control_rate);
    else if (key == "seed") {
        try {
            std::size_t used = 0;
            cfg.seed = std::stoull(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            fail_usage("config: bad seed '" + value + "'");
        }
    } else {
        fail_usage("config: unknown key '" + key + "'");
    }
}

/// Flat `key = value` file, `#` comments, one pair per line.
void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_usage("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail_usage("config: line " + std::to_string(lineno) +
                       ": expected 'key = value'");
        apply_config_entry(cfg, trim(stripped.substr(0, eq)),
                           trim(stripped.substr(eq + 1)));
    }
}

/// Flag > config file > default: string-valued flags so unset flags are
/// distinguishable from defaults.
struct ConfigFlags {
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd) {
        static const char* keys[] = {"m_c",       "b_c",      "g_c",     "dt",
                                     "duration",  "setpoint_theta", "q11", "q22",
                                     "r11",       "noise_lo", "noise_hi", "seed",
                                     "control_rate"};
        for (const char* key : keys)
            cmd->add_option_function<std::string>(
                std::string("--") + key,
                [this, key](const std::string& v) { values[key] = v; });
    }

    RunConfig resolve(const std::string& config_path) const {
        RunConfig cfg;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        for (const auto& [key, value] : values) apply_config_entry(cfg, key, value);
        return cfg;
    }
};

void echo_config(std::ostream& out, const std::string& command, const RunConfig& cfg) {
    out << "# pendkit " << command << '\n';
    out << "# m_c = " << fmt(cfg.m_c) << '\n';
    out << "# b_c = " << fmt(cfg.b_c) << '\n';
    out << "# g_c = " << fmt(cfg.g_c) << '\n';
    out << "# dt = " << fmt(cfg.dt) << '\n';
    out << "# duration = " << fmt(cfg.duration) << '\n';
    out << "# setpoint_theta = " << fmt(cfg.setpoint_theta) << '\n';
    out << "# q11 = " << fmt(cfg.q11) << '\n';
    out << "# q22 = " << fmt(cfg.q22) << '\n';
    out << "# r11 = " << fmt(cfg.r11) << '\n';
    out << "# noise_lo = " << fmt(cfg.noise_lo) << '\n';
    out << "# noise_hi = " << fmt(cfg.noise_hi) << '\n';
    out << "# seed = " << cfg.seed << '\n';
    out << "# control_rate = " << fmt(cfg.control_rate) << '\n';
}

void validate_config(const RunConfig& cfg) {
    if (!(cfg.m_c > 0.0) || cfg.b_c < 0.0 || cfg.g_c < 0.0)
        fail_usage("require m_c > 0, b_c >= 0, g_c >= 0");
    if (!(cfg.dt > 0.0)) fail_usage("dt must be > 0");
    if (!(cfg.duration >= cfg.dt)) fail_usage("duration must be >= dt");
    if (cfg.q11 < 0.0 || cfg.q22 < 0.0)
        fail_usage("q11 and q22 must be >= 0 (Q positive semi-definite)");
    if (!(cfg.r11 > 0.0)) fail_usage("r11 must be > 0");
    if (cfg.noise_lo > cfg.noise_hi) fail_usage("noise_lo must be <= noise_hi");
    if (!(cfg.control_rate > 0.0)) fail_usage("control_rate must be > 0");
}

pk_params params_of(const RunConfig& cfg) { return {cfg.m_c, cfg.b_c, cfg.g_c}; }

pk_cost cost_of(const RunConfig& cfg) {
    return {{{cfg.q11, 0.0}, {0.0, cfg.q22}}, cfg.r11};
}

/// Linearization + gain for the configured setpoint and cost.
struct Design {
    pk_state_space ss;
    pk_complex open_loop[2];
    pk_lqr_solution lqr;
};

Design design_from(const RunConfig& cfg) {
    Design d;
    check(pk_linearize(params_of(cfg), {cfg.setpoint_theta, 0.0}, 0.0, &d.ss),
          "linearize");
    check(pk_eigenvalues_2x2(d.ss.a, d.open_loop), "open-loop eigenvalues");
    const pk_cost cost = cost_of(cfg);
    check(pk_lqr_gain(&d.ss, &cost, &d.lqr), "lqr");
    return d;
}

/* ---------------- identify ---------------- */

struct IdentifyOptions {
    std::string kind;
    std::vector<std::string> logs;
    bool intercept = false;
    double velocity_threshold = 0.005;
    double min_duration = 0.5;
    std::string out_path;
};

int run_identify(const IdentifyOptions& opt) {
    if (opt.logs.empty()) fail_usage("identify: no log files given");
    const bool gravity = opt.kind == "gravity";

    std::cout << "# pendkit identify " << opt.kind << '\n';
    std::cout << "# logs = " << opt.logs.size() << '\n';
    std::cout << "# intercept = " << (opt.intercept ? "true" : "false") << '\n';
    if (gravity) {
        std::cout << "# velocity_threshold = " << fmt(opt.velocity_threshold) << '\n';
        std::cout << "# min_duration = " << fmt(opt.min_duration) << '\n';
    }

    std::vector<pk_regression> trials;
    for (const std::string& path : opt.logs) {
        pk_log* log = nullptr;
        check(pk_log_parse_file(path.c_str(), &log), path);
        pk_regression reg{};
        pk_status status =
            gravity ? pk_regress_gravity(log, opt.velocity_threshold, opt.min_duration,
                                         opt.intercept ? 1 : 0, &reg)
                    : pk_regress_inertia_damping(log, opt.intercept ? 1 : 0, &reg);
        pk_log_free(log);
        if (status != PK_OK) fail_status(status, path);
        char* json = nullptr;
        check(pk_regression_to_json(&reg, &json), path);
        std::cout << path << ": " << json << '\n';
        pk_string_free(json);
        trials.push_back(reg);
    }

    pk_param_estimate est{};
    check(pk_average_trials(trials.data(), trials.size(),
                            gravity ? PK_TRIAL_GRAVITY : PK_TRIAL_INERTIA_DAMPING, &est),
          "average_trials");

    std::ostringstream params_text;
    if (est.has_m_c) params_text << "m_c = " << fmt(est.m_c) << '\n';
    if (est.has_b_c) params_text << "b_c = " << fmt(est.b_c) << '\n';
    if (est.has_g_c) params_text << "g_c = " << fmt(est.g_c) << '\n';
    std::cout << params_text.str();

    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw CliError{kExitData, "cannot write " + opt.out_path};
        out << params_text.str();
        std::cout << "# params written to " << opt.out_path << '\n';
    }
    return kExitOk;
}

/* ---------------- design ---------------- */

int run_design(const RunConfig& cfg, bool table, const std::string& out_path) {
    validate_config(cfg);
    const Design d = design_from(cfg);

    if (table) {
        // The four standard cost combinations against this linearization.
        const pk_cost combos[4] = {
            {{{1.0, 0.0}, {0.0, 0.01}}, 0.1},
            {{{1.0, 0.0}, {0.0, 0.1}}, 0.1},
            {{{100.0, 0.0}, {0.0, 0.01}}, 0.1},
            {{{100.0, 0.0}, {0.0, 0.1}}, 0.1},
        };
        const char* labels[4] = {"1", "2", "3", "4"};
        pk_stability_row rows[5];
        check(pk_stability_report(&d.ss, combos, labels, 4, rows), "stability report");
        char* csv = nullptr;
        check(pk_stability_report_to_csv(rows, 5, &csv), "stability report");
        if (out_path.empty()) {
            echo_config(std::cerr, "design --table", cfg);
            std::cout << csv;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw CliError{kExitData, "cannot write " + out_path};
            out << csv;
            echo_config(std::cout, "design --table", cfg);
            std::cout << "# table written to " << out_path << '\n';
        }
        pk_string_free(csv);
        return kExitOk;
    }

    echo_config(std::cout, "design", cfg);
    std::cout << "A = [[" << fmt(d.ss.a[0][0]) << ", " << fmt(d.ss.a[0][1]) << "], ["
              << fmt(d.ss.a[1][0]) << ", " << fmt(d.ss.a[1][1]) << "]]\n";
    std::cout << "B = [" << fmt(d.ss.b[0]) << ", " << fmt(d.ss.b[1]) << "]\n";
    std::cout << "open_loop_eigenvalues = " << fmt(d.open_loop[0].re) << "+"
              << fmt(d.open_loop[0].im) << "j, " << fmt(d.open_loop[1].re) << "+"
              << fmt(d.open_loop[1].im) << "j\n";
    std::cout << "K = [" << fmt(d.lqr.k[0]) << ", " << fmt(d.lqr.k[1]) << "]\n";
    std::cout << "closed_loop_eigenvalues = " << fmt(d.lqr.closed_loop_eigs[0].re) << "+"
              << fmt(d.lqr.closed_loop_eigs[0].im) << "j, "
              << fmt(d.lqr.closed_loop_eigs[1].re) << "+"
              << fmt(d.lqr.closed_loop_eigs[1].im) << "j\n";
    std::cout << "care_residual = " << fmt(d.lqr.residual) << '\n';
    double tau = 0.0;
    check(pk_time_constant(d.lqr.closed_loop_eigs, &tau), "time constant");
    std::cout << "time_constant = " << fmt(tau) << '\n';
    return kExitOk;
}

/* ---------------- simulate ---------------- */

struct SimulateOptions {
    std::string mode = "ideal";
    std::string out_path;
    std::vector<std::uint64_t> seeds;
    double quantization = 0.0;
    double hysteresis = 0.0;
    double perturb_m_c = 0.0;
    double perturb_b_c = 0.0;
    double perturb_g_c = 0.0;
};

struct SimOutcome {
    pk_status status = PK_OK;
    std::string error;
    double max_u_control = 0.0;
    double max_theta_dev = 0.0;
    std::size_t samples = 0;
    std::string written_path;
};

SimOutcome simulate_one(const RunConfig& cfg, const SimulateOptions& opt,
                        std::uint64_t seed, const std::string& out_path) {
    const Design d = design_from(cfg);
    const pk_noise_config noise{cfg.noise_lo, cfg.noise_hi, seed};
    const pk_state setpoint{cfg.setpoint_theta, 0.0};

    pk_trajectory* traj = nullptr;
    pk_status status;
    if (opt.mode == "plant") {
        pk_plant_config plant{};
        plant.true_params = params_of(cfg);
        plant.control_rate = cfg.control_rate;
        plant.sensor_quantization = opt.quantization;
        plant.effort_hysteresis_offset = opt.hysteresis;
        plant.perturb_m_c = opt.perturb_m_c;
        plant.perturb_b_c = opt.perturb_b_c;
        plant.perturb_g_c = opt.perturb_g_c;
        status = pk_run_virtual_plant(&plant, d.lqr.k, noise, cfg.duration, setpoint,
                                      &traj);
    } else {
        status = pk_run_lqr_noise_sim(params_of(cfg), d.lqr.k, noise, cfg.dt,
                                      cfg.duration, setpoint, &traj);
    }

    SimOutcome outcome;
    outcome.status = status;
    if (status != PK_OK) outcome.error = pk_last_error();

    if (traj != nullptr) {
        outcome.samples = pk_trajectory_size(traj);
        for (std::size_t i = 0; i < outcome.samples; ++i) {
            pk_sample s{};
            pk_trajectory_sample(traj, i, &s);
            outcome.max_u_control = std::max(outcome.max_u_control, std::abs(s.u_control));
            outcome.max_theta_dev =
                std::max(outcome.max_theta_dev, std::abs(s.theta - cfg.setpoint_theta));
        }
        if (status == PK_OK) {
            if (out_path.empty()) {
                char* csv = nullptr;
                if (pk_trajectory_to_csv(traj, &csv) == PK_OK) {
                    std::cout << csv;
                    pk_string_free(csv);
                }
            } else {
                const pk_status ws = pk_trajectory_write_csv(traj, out_path.c_str());
                if (ws != PK_OK) {
                    pk_trajectory_free(traj);
                    fail_status(ws, out_path);
                }
                outcome.written_path = out_path;
            }
        } else if (status == PK_ERR_DIVERGED && !out_path.empty()) {
            const std::string partial_path = out_path + ".partial";
            if (pk_trajectory_write_csv(traj, partial_path.c_str()) == PK_OK)
                outcome.written_path = partial_path;
        }
        pk_trajectory_free(traj);
    }
    return outcome;
}

std::string seeded_path(const std::string& path, std::uint64_t seed) {
    const std::filesystem::path p(path);
    const std::string name =
        p.stem().string() + ".seed" + std::to_string(seed) + p.extension().string();
    return (p.parent_path() / name).string();
}

int run_simulate(const RunConfig& cfg, const SimulateOptions& opt) {
    validate_config(cfg);
    if (opt.mode != "ideal" && opt.mode != "plant")
        fail_usage("simulate: mode must be 'ideal' or 'plant'");

    std::ostream& report = opt.out_path.empty() ? std::cerr : std::cout;
    echo_config(report, "simulate --mode " + opt.mode, cfg);

    std::vector<std::uint64_t> seeds = opt.seeds;
    if (seeds.empty()) seeds.push_back(cfg.seed);
    if (seeds.size() > 1 && opt.out_path.empty())
        fail_usage("simulate: --seeds needs --out to name one file per seed");

    // Seeds are independent runs; launch them concurrently.
    std::vector<std::future<SimOutcome>> futures;
    std::vector<std::string> paths;
    for (std::uint64_t seed : seeds) {
        const std::string path = seeds.size() == 1
                                     ? opt.out_path
                                     : seeded_path(opt.out_path, seed);
        paths.push_back(path);
        futures.push_back(std::async(std::launch::async, [=, &cfg, &opt] {
            return simulate_one(cfg, opt, seed, path);
        }));
    }

    int exit = kExitOk;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const SimOutcome outcome = futures[i].get();
        report << "# seed " << seeds[i] << '\n';
        if (outcome.status != PK_OK) {
            report << "error = " << outcome.error << '\n';
            if (!outcome.written_path.empty())
                report << "partial_csv = " << outcome.written_path << '\n';
            exit = std::max(exit, exit_code_for(outcome.status));
        } else if (!outcome.written_path.empty()) {
            report << "csv = " << outcome.written_path << '\n';
        }
        report << "samples = " << outcome.samples << '\n';
        report << "max_abs_u_control = " << fmt(outcome.max_u_control) << '\n';
        report << "max_abs_theta_error = " << fmt(outcome.max_theta_dev) << '\n';
    }
    return exit;
}

/* ---------------- compare ---------------- */

int run_compare(const std::string& sim_path, const std::string& plant_path) {
    pk_trajectory* sim = nullptr;
    check(pk_trajectory_read_csv(sim_path.c_str(), &sim), sim_path);
    pk_trajectory* plant = nullptr;
    pk_status status = pk_trajectory_read_csv(plant_path.c_str(), &plant);
    if (status != PK_OK) {
        pk_trajectory_free(sim);
        fail_status(status, plant_path);
    }

    std::vector<double> times(pk_trajectory_size(sim));
    pk_trajectory_times(sim, times.data());

    pk_trajectory* resampled = nullptr;
    status = pk_resample_cubic(plant, times.data(), times.size(), &resampled);
    pk_comparison_stats stats{};
    if (status == PK_OK) status = pk_compare(sim, resampled, &stats);
    pk_trajectory_free(resampled);
    pk_trajectory_free(plant);
    pk_trajectory_free(sim);
    if (status != PK_OK) fail_status(status, "compare");

    std::cout << "# pendkit compare\n";
    std::cout << "# sim = " << sim_path << '\n';
    std::cout << "# plant = " << plant_path << " (cubic-resampled to sim timestamps)\n";
    std::cout << "mean_dpos = " << fmt(stats.mean_dpos) << '\n';
    std::cout << "std_dpos = " << fmt(stats.std_dpos) << '\n';
    std::cout << "mean_dvel = " << fmt(stats.mean_dvel) << '\n';
    std::cout << "std_dvel = " << fmt(stats.std_dvel) << '\n';
    std::cout << "n = " << stats.n << '\n';
    return kExitOk;
}

/* ---------------- trajgen ---------------- */

struct TrajgenOptions {
    std::string start;
    std::string end;
    double increment = 0.002;
    double peak_velocity = 0.3;
    double rate = 100.0;
    std::string out_path;
};

int run_trajgen(const TrajgenOptions& opt) {
    const double start = parse_angle(opt.start);
    const double end = parse_angle(opt.end);

    pk_command_trajectory* traj = nullptr;
    check(pk_generate_trajectory(start, end, opt.increment, opt.peak_velocity, opt.rate,
                                 &traj),
          "trajgen");

    std::ostream& report = opt.out_path.empty() ? std::cerr : std::cout;
    report << "# pendkit trajgen\n";
    report << "# start = " << fmt(start) << '\n';
    report << "# end = " << fmt(end) << '\n';
    report << "# increment = " << fmt(opt.increment) << '\n';
    report << "# peak_velocity = " << fmt(opt.peak_velocity) << '\n';
    report << "# rate = " << fmt(opt.rate) << '\n';
    report << "# samples = " << pk_command_trajectory_size(traj) << '\n';

    if (opt.out_path.empty()) {
        char* csv = nullptr;
        if (pk_command_trajectory_to_csv(traj, &csv) == PK_OK) {
            std::cout << csv;
            pk_string_free(csv);
        }
    } else {
        const pk_status ws = pk_command_trajectory_write_csv(traj, opt.out_path.c_str());
        if (ws != PK_OK) {
            pk_command_trajectory_free(traj);
            fail_status(ws, opt.out_path);
        }
        report << "# csv written to " << opt.out_path << '\n';
    }
    pk_command_trajectory_free(traj);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pendkit: pendulum parameter identification, LQR design, "
                 "noise-disturbed simulation and trajectory comparison"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "flat key = value configuration file");
    std::string global_seed;
    app.add_option("--seed", global_seed, "noise seed (64-bit unsigned)");

    // identify
    IdentifyOptions identify;
    CLI::App* cmd_identify =
        app.add_subcommand("identify", "recover dynamics constants from actuator logs");
    cmd_identify
        ->add_option("kind", identify.kind, "inertia-damping or gravity")
        ->required()
        ->check(CLI::IsMember({"inertia-damping", "gravity"}));
    cmd_identify->add_option("logs", identify.logs, "log CSV paths");
    cmd_identify->add_flag("--intercept", identify.intercept,
                           "fit a diagnostic intercept term");
    cmd_identify->add_option("--velocity-threshold", identify.velocity_threshold,
                             "static-hold |velocity| bound, rad/s");
    cmd_identify->add_option("--min-duration", identify.min_duration,
                             "minimum hold length, s");
    cmd_identify->add_option("--out", identify.out_path, "write averaged constants here");

    // design
    ConfigFlags design_flags;
    bool design_table = false;
    std::string design_out;
    CLI::App* cmd_design =
        app.add_subcommand("design", "linearize and synthesize the LQR gain");
    design_flags.attach(cmd_design);
    cmd_design->add_flag("--table", design_table,
                         "emit the four-combination stability table as CSV");
    cmd_design->add_option("--out", design_out, "write the table CSV here");

    // simulate
    ConfigFlags sim_flags;
    SimulateOptions simulate;
    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "closed-loop simulation under torque noise");
    sim_flags.attach(cmd_simulate);
    cmd_simulate->add_option("--mode", simulate.mode, "ideal or plant")
        ->check(CLI::IsMember({"ideal", "plant"}));
    cmd_simulate->add_option("--out", simulate.out_path, "trajectory CSV path");
    cmd_simulate->add_option("--seeds", simulate.seeds, "run once per seed")
        ->delimiter(',');
    cmd_simulate->add_option("--quantization", simulate.quantization,
                             "plant position quantization, rad");
    cmd_simulate->add_option("--hysteresis", simulate.hysteresis,
                             "plant recorded-effort hysteresis offset, N*m");
    cmd_simulate->add_option("--perturb-m_c", simulate.perturb_m_c,
                             "plant relative m_c perturbation");
    cmd_simulate->add_option("--perturb-b_c", simulate.perturb_b_c,
                             "plant relative b_c perturbation");
    cmd_simulate->add_option("--perturb-g_c", simulate.perturb_g_c,
                             "plant relative g_c perturbation");

    // compare
    std::string compare_sim, compare_plant;
    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "difference statistics between two trajectory CSVs");
    cmd_compare->add_option("sim", compare_sim, "simulation trajectory CSV")->required();
    cmd_compare->add_option("plant", compare_plant, "plant trajectory CSV")->required();

    // trajgen
    TrajgenOptions trajgen;
    CLI::App* cmd_trajgen =
        app.add_subcommand("trajgen", "commanded position/velocity trajectory");
    cmd_trajgen->add_option("start", trajgen.start, "start angle (rad or e.g. 10deg)")
        ->required();
    cmd_trajgen->add_option("end", trajgen.end, "end angle (rad or e.g. 10deg)")
        ->required();
    cmd_trajgen->add_option("--increment", trajgen.increment, "position step, rad");
    cmd_trajgen->add_option("--peak-velocity", trajgen.peak_velocity,
                            "velocity amplitude, rad/s");
    cmd_trajgen->add_option("--rate", trajgen.rate, "command rate, Hz");
    cmd_trajgen->add_option("--out", trajgen.out_path, "command CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!global_seed.empty()) {
            // --seed participates in config precedence as a flag.
            if (*cmd_design) design_flags.values["seed"] = global_seed;
            if (*cmd_simulate) sim_flags.values["seed"] = global_seed;
        }
        if (*cmd_identify) return run_identify(identify);
        if (*cmd_design)
            return run_design(design_flags.resolve(config_path), design_table, design_out);
        if (*cmd_simulate) return run_simulate(sim_flags.resolve(config_path), simulate);
        if (*cmd_compare) return run_compare(compare_sim, compare_plant);
        if (*cmd_trajgen) return run_trajgen(trajgen);
        fail_usage("no subcommand given");
    } catch (const CliError& e) {
        std::cerr << "pendkit: " << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "pendkit: " << e.what() << '\n';
        return kExitNumerical;
    }
}
