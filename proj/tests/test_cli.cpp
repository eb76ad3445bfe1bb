// End-to-end CLI runs: subcommand behavior, exit codes, file outputs and
// determinism, all through the installed binary.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "support/synthetic_logs.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "pendkit_cli_tests";
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path dir = scratch_dir();
    static int counter = 0;
    const fs::path out = dir / ("stdout" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("stderr" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(PENDKIT_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

/// First numeric value on the line starting with `key = `.
double report_value(const std::string& text, const std::string& key) {
    const std::string prefix = key + " = ";
    const auto pos = text.find(prefix);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + prefix.size()));
}

} // namespace

TEST_CASE("cli usage errors exit with code 1") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("unknown-subcommand").exit_code == 1);
    CHECK(run_cli("design --q11 -5").exit_code == 1);
    CHECK(run_cli("design --r11 0").exit_code == 1);
    CHECK(run_cli("simulate --noise_lo 2 --noise_hi 1").exit_code == 1);
    CHECK(run_cli("identify inertia-damping").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli design prints the reference linearization and gain") {
    const RunResult r = run_cli("design");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "# pendkit design"));
    CHECK(contains(r.out, "# m_c = 0.055"));
    CHECK(contains(r.out, "A = [[0, 1], [30.509090909090908, -214]]"));
    CHECK(contains(r.out, "B = [0, 18.181818181818183]"));

    // Pull K entries from the bracketed list.
    const auto pos = r.out.find("K = [");
    REQUIRE(pos != std::string::npos);
    double k0 = 0.0, k1 = 0.0;
    REQUIRE(std::sscanf(r.out.c_str() + pos, "K = [%lf, %lf]", &k0, &k1) == 2);
    CHECK(std::abs(k0 - 33.345) <= 0.05);
    CHECK(std::abs(k1 - 0.159) <= 0.05);
    CHECK(std::abs(report_value(r.out, "time_constant") - 0.3717) <= 0.001);
}

TEST_CASE("cli design --table reproduces the four combinations") {
    const RunResult r = run_cli("design --table");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "label,feedback,q11,q12,q21,q22,r11,"
                          "eig1_re,eig1_im,eig2_re,eig2_im"));
    CHECK(count_lines(r.out) == 6); // header + open loop + 4 combinations
    CHECK(contains(r.out, "open-loop"));
    // Effective config echo goes to stderr when stdout carries CSV.
    CHECK(contains(r.err, "# q11 = 100"));

    const fs::path table = scratch_dir() / "table.csv";
    const RunResult filed = run_cli("design --table --out " + table.string());
    REQUIRE(filed.exit_code == 0);
    CHECK(slurp(table) == r.out);
}

TEST_CASE("cli design respects config precedence: flag over file over default") {
    const fs::path cfg = scratch_dir() / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "# tuned constants\n";
        out << "m_c = 0.06\n";
        out << "q11 = 50\n";
    }
    const RunResult from_file = run_cli("design --config " + cfg.string());
    REQUIRE(from_file.exit_code == 0);
    CHECK(contains(from_file.out, "# m_c = 0.059999999999999998"));
    CHECK(contains(from_file.out, "# q11 = 50"));

    const RunResult overridden =
        run_cli("design --config " + cfg.string() + " --q11 75");
    REQUIRE(overridden.exit_code == 0);
    CHECK(contains(overridden.out, "# q11 = 75"));
    CHECK(contains(overridden.out, "# m_c = 0.059999999999999998"));

    CHECK(run_cli("design --config /nonexistent.cfg").exit_code == 1);
    const fs::path bad = scratch_dir() / "bad.cfg";
    std::ofstream(bad) << "nonsense_key = 1\n";
    CHECK(run_cli("design --config " + bad.string()).exit_code == 1);
}

TEST_CASE("cli simulate writes the trajectory csv with a summary") {
    const fs::path out = scratch_dir() / "sim.csv";
    const RunResult r = run_cli("simulate --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(count_lines(csv) == 2502); // header + 2501 samples
    CHECK(csv.rfind("t,theta,omega,u_control,u_noise\n", 0) == 0);
    CHECK(report_value(r.out, "samples") == 2501);
    CHECK(report_value(r.out, "max_abs_u_control") <= 0.5);

    SUBCASE("plant mode records at 100 Hz") {
        const fs::path plant_out = scratch_dir() / "plant.csv";
        const RunResult p = run_cli("simulate --mode plant --out " + plant_out.string());
        REQUIRE(p.exit_code == 0);
        CHECK(count_lines(slurp(plant_out)) == 502);
    }

    SUBCASE("identical config and seed give byte-identical files") {
        const fs::path again = scratch_dir() / "sim2.csv";
        REQUIRE(run_cli("simulate --out " + again.string()).exit_code == 0);
        CHECK(slurp(out) == slurp(again));
    }

    SUBCASE("a different seed changes the bytes") {
        const fs::path other = scratch_dir() / "sim3.csv";
        REQUIRE(run_cli("simulate --seed 9 --out " + other.string()).exit_code == 0);
        CHECK(slurp(out) != slurp(other));
    }
}

TEST_CASE("cli simulate multi-seed runs write one file per seed") {
    const fs::path out = scratch_dir() / "multi.csv";
    const RunResult r = run_cli("simulate --seeds 1,2 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const fs::path seed1 = scratch_dir() / "multi.seed1.csv";
    const fs::path seed2 = scratch_dir() / "multi.seed2.csv";
    CHECK(fs::exists(seed1));
    CHECK(fs::exists(seed2));
    CHECK(slurp(seed1) != slurp(seed2));
    CHECK(contains(r.out, "# seed 1"));
    CHECK(contains(r.out, "# seed 2"));
}

TEST_CASE("cli simulate divergence exits 3 and leaves a partial file") {
    // A constant 60 N*m shove moves the equilibrium past the pi/2 guard.
    const fs::path out = scratch_dir() / "diverge.csv";
    const RunResult r =
        run_cli("simulate --noise_lo 60 --noise_hi 60 --out " + out.string());
    CHECK(r.exit_code == 3);
    CHECK(fs::exists(out.string() + ".partial"));
    CHECK(!fs::exists(out));
    CHECK(contains(r.out, "error"));
}

TEST_CASE("cli compare pipeline") {
    const fs::path sim = scratch_dir() / "cmp_sim.csv";
    const fs::path plant = scratch_dir() / "cmp_plant.csv";
    REQUIRE(run_cli("simulate --out " + sim.string()).exit_code == 0);

    SUBCASE("identical files compare to zero") {
        const RunResult r = run_cli("compare " + sim.string() + " " + sim.string());
        REQUIRE(r.exit_code == 0);
        CHECK(report_value(r.out, "mean_dpos") == 0.0);
        CHECK(report_value(r.out, "std_dpos") == 0.0);
        CHECK(report_value(r.out, "mean_dvel") == 0.0);
        CHECK(report_value(r.out, "std_dvel") == 0.0);
        CHECK(report_value(r.out, "n") == 2501);
    }

    SUBCASE("zero-mismatch plant at the physics rate compares to zero") {
        REQUIRE(run_cli("simulate --mode plant --control_rate 500 --out " +
                        plant.string())
                    .exit_code == 0);
        const RunResult r = run_cli("compare " + sim.string() + " " + plant.string());
        REQUIRE(r.exit_code == 0);
        CHECK(std::abs(report_value(r.out, "mean_dpos")) <= 1e-9);
        CHECK(std::abs(report_value(r.out, "std_dpos")) <= 1e-9);
        CHECK(std::abs(report_value(r.out, "mean_dvel")) <= 1e-9);
        CHECK(std::abs(report_value(r.out, "std_dvel")) <= 1e-9);
    }

    SUBCASE("a perturbed plant yields nonzero statistics but still exits 0") {
        REQUIRE(run_cli("simulate --mode plant --perturb-m_c 0.05 --out " +
                        plant.string())
                    .exit_code == 0);
        const RunResult r = run_cli("compare " + sim.string() + " " + plant.string());
        REQUIRE(r.exit_code == 0);
        CHECK(report_value(r.out, "std_dpos") > 0.0);
        CHECK(report_value(r.out, "std_dvel") > 0.0);
    }

    SUBCASE("unreadable and malformed inputs exit 2") {
        CHECK(run_cli("compare /nonexistent.csv " + sim.string()).exit_code == 2);
        const fs::path garbage = scratch_dir() / "garbage.csv";
        std::ofstream(garbage) << "not,a,trajectory\n";
        CHECK(run_cli("compare " + garbage.string() + " " + sim.string()).exit_code == 2);
    }
}

TEST_CASE("cli identify recovers the constants from synthetic logs") {
    const pendkit::PendulumParams truth{0.055, 11.77, 1.678};
    const fs::path dir = scratch_dir();

    SUBCASE("six horizontal trials average to the reference constants") {
        std::string args = "identify inertia-damping";
        for (int trial = 0; trial < 6; ++trial) {
            const auto records =
                pendkit::testsupport::make_horizontal_log(truth, 100 + trial, 0.0, 2.0);
            const fs::path log = dir / ("horizontal" + std::to_string(trial) + ".csv");
            std::ofstream(log, std::ios::binary)
                << pendkit::testsupport::log_to_csv(records);
            args += " " + log.string();
        }
        const fs::path params_out = dir / "identified.cfg";
        const RunResult r = run_cli(args + " --out " + params_out.string());
        REQUIRE(r.exit_code == 0);
        CHECK(std::abs(report_value(r.out, "b_c") - 11.77) <= 0.01);
        CHECK(std::abs(report_value(r.out, "m_c") - 0.055) <= 0.001);
        CHECK(count_lines(r.out) >= 6);
        CHECK(contains(r.out, "\"coefficients\""));

        // The params file feeds straight back into --config.
        const RunResult reuse = run_cli("design --config " + params_out.string());
        CHECK(reuse.exit_code == 0);

        SUBCASE("a corrupt log among the trials exits 2 and names the file") {
            const fs::path broken = dir / "broken.csv";
            std::ofstream(broken) << "t,position_fbk\n";
            const RunResult bad = run_cli(args + " " + broken.string());
            CHECK(bad.exit_code == 2);
            CHECK(contains(bad.err, "broken.csv"));
        }
    }

    SUBCASE("gravity holds recover g_c") {
        const auto records =
            pendkit::testsupport::make_gravity_log(truth, 9, 0.0, 0.0, 1.0);
        const fs::path log = dir / "gravity.csv";
        std::ofstream(log, std::ios::binary) << pendkit::testsupport::log_to_csv(records);
        const RunResult r = run_cli("identify gravity " + log.string());
        REQUIRE(r.exit_code == 0);
        CHECK(std::abs(report_value(r.out, "g_c") - 1.678) <= 0.01);
    }

    SUBCASE("a log with no variation exits 3") {
        std::string csv = "t,position_fbk,velocity_fbk,effort_fbk\n";
        for (int i = 0; i < 100; ++i)
            csv += pendkit::format_double(0.01 * i) + ",0,1,0\n";
        const fs::path log = dir / "degenerate.csv";
        std::ofstream(log, std::ios::binary) << csv;
        CHECK(run_cli("identify inertia-damping " + log.string()).exit_code == 3);
    }
}

TEST_CASE("cli trajgen") {
    const RunResult r = run_cli("trajgen 0 10deg");
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.out) == 90); // header + 89 samples
    CHECK(r.out.rfind("t,position_cmd,velocity_cmd\n", 0) == 0);
    CHECK(contains(r.err, "# samples = 89"));

    const RunResult single = run_cli("trajgen 0.2 0.2");
    CHECK(count_lines(single.out) == 2);

    const fs::path out = scratch_dir() / "cmd.csv";
    const RunResult filed =
        run_cli("trajgen 0 10deg --peak-velocity 0.25 --out " + out.string());
    REQUIRE(filed.exit_code == 0);
    const std::string csv = slurp(out);
    double max_vel = 0.0;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line); // header
    while (std::getline(lines, line)) {
        const auto last_comma = line.rfind(',');
        max_vel = std::max(max_vel, std::stod(line.substr(last_comma + 1)));
    }
    CHECK(max_vel == doctest::Approx(0.25).epsilon(1e-2));

    CHECK(run_cli("trajgen 0 bogus").exit_code == 1);
}
