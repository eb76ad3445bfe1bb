#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pendkit/dynamics.hpp"
#include "pendkit/linear_control.hpp"
#include "pendkit/rng.hpp"

using namespace pendkit;

namespace {

const PendulumParams kRig{0.055, 11.77, 1.678};
constexpr double kPi = std::numbers::pi;

StateSpace rig_upright() { return linearize(kRig, {kPi, 0.0}, 0.0); }

CostMatrices diag_cost(double q11, double q22, double r) {
    return {{q11, 0.0, 0.0, q22}, r};
}

} // namespace

TEST_CASE("linearize reproduces the upright Jacobians") {
    const StateSpace ss = rig_upright();
    CHECK(ss.a.m00 == 0.0);
    CHECK(ss.a.m01 == 1.0);
    CHECK(ss.a.m10 == doctest::Approx(30.51).epsilon(0.0004));
    CHECK(ss.a.m11 == doctest::Approx(-214.0).epsilon(1e-12));
    CHECK(ss.b.v0 == 0.0);
    CHECK(ss.b.v1 == doctest::Approx(18.18).epsilon(0.0002));
    CHECK(ss.b.v1 == 1.0 / kRig.m_c);
}

TEST_CASE("linearize at the hanging point flips the gravity entry") {
    const StateSpace ss = linearize(kRig, {0.0, 0.0}, 0.0);
    CHECK(ss.a.m10 == doctest::Approx(-30.509090909090908).epsilon(1e-12));
}

TEST_CASE("linearize accepts forced equilibria and rejects everything else") {
    // theta* = asin(u*/g_c) balances a constant torque.
    const double u_star = 0.5;
    const double theta_star = std::asin(u_star / kRig.g_c);
    const StateSpace ss = linearize(kRig, {theta_star, 0.0}, u_star);
    CHECK(ss.u_star == u_star);

    CHECK_THROWS_WITH_AS(static_cast<void>(linearize(kRig, {1.0, 0.0}, 0.0)),
                         doctest::Contains("residual acceleration"), Error);
    CHECK_THROWS_AS(static_cast<void>(linearize(kRig, {kPi, 0.5}, 0.0)), Error);
}

TEST_CASE("finite differences confirm the analytic Jacobians at both fixed points") {
    const double h = 1e-6;
    for (const double theta_star : {0.0, kPi}) {
        const StateSpace ss = linearize(kRig, {theta_star, 0.0}, 0.0);
        const auto accel = [&](double theta, double omega, double u) {
            return acceleration(kRig, {theta, omega}, u);
        };
        const double da_dtheta =
            (accel(theta_star + h, 0.0, 0.0) - accel(theta_star - h, 0.0, 0.0)) / (2 * h);
        const double da_domega =
            (accel(theta_star, h, 0.0) - accel(theta_star, -h, 0.0)) / (2 * h);
        const double da_du = (accel(theta_star, 0.0, h) - accel(theta_star, 0.0, -h)) / (2 * h);
        CHECK(da_dtheta == doctest::Approx(ss.a.m10).epsilon(1e-5));
        CHECK(da_domega == doctest::Approx(ss.a.m11).epsilon(1e-5));
        CHECK(da_du == doctest::Approx(ss.b.v1).epsilon(1e-5));
    }
}

TEST_CASE("eigenvalues_2x2 closed forms") {
    const auto open = eigenvalues_2x2({0.0, 1.0, 30.51, -214.0});
    CHECK(open[0].real() == doctest::Approx(0.14).epsilon(0.05));
    CHECK(open[0].real() == doctest::Approx(0.142475).epsilon(1e-4));
    CHECK(open[1].real() == doctest::Approx(-214.14).epsilon(1e-4));
    CHECK(open[0].imag() == 0.0);

    const auto ident = eigenvalues_2x2(Mat2::identity());
    CHECK(ident[0] == std::complex<double>(1.0, 0.0));
    CHECK(ident[1] == std::complex<double>(1.0, 0.0));

    const auto rot = eigenvalues_2x2({0.0, -1.0, 1.0, 0.0});
    CHECK(rot[0] == std::complex<double>(0.0, 1.0));
    CHECK(rot[1] == std::complex<double>(0.0, -1.0));
}

TEST_CASE("eigenvalues satisfy their characteristic polynomial") {
    SplitMix64 rng(2024);
    for (int i = 0; i < 500; ++i) {
        Mat2 m{rng.next_uniform(-50, 50), rng.next_uniform(-50, 50),
               rng.next_uniform(-50, 50), rng.next_uniform(-50, 50)};
        const auto eigs = eigenvalues_2x2(m);
        CHECK(eigs[0].real() >= eigs[1].real());
        for (const auto& lambda : eigs) {
            const auto residual = lambda * lambda - m.trace() * lambda + m.det();
            CHECK(std::abs(residual) <= 1e-9);
        }
    }
}

TEST_CASE("solve_care reproduces the analytic double-integrator solution") {
    StateSpace dint;
    dint.a = {0.0, 1.0, 0.0, 0.0};
    dint.b = {0.0, 1.0};
    const Mat2 x = solve_care(dint, diag_cost(1.0, 1.0, 1.0));
    const double s3 = std::sqrt(3.0);
    CHECK(x.m00 == doctest::Approx(s3).epsilon(1e-12));
    CHECK(x.m01 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x.m10 == x.m01);
    CHECK(x.m11 == doctest::Approx(s3).epsilon(1e-12));

    const LqrSolution sol = lqr_gain(dint, diag_cost(1.0, 1.0, 1.0));
    CHECK(sol.k.v0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.k.v1 == doctest::Approx(s3).epsilon(1e-10));
}

TEST_CASE("solve_care handles the pure Lyapunov case") {
    StateSpace stable;
    stable.a = {-1.0, 0.0, 0.0, -1.0};
    stable.b = {0.0, 0.0};
    const Mat2 x = solve_care(stable, diag_cost(1.0, 1.0, 1.0));
    CHECK(x.m00 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(x.m11 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(x.m01 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solve_care rejects an uncontrollable unstable mode") {
    StateSpace bad;
    bad.a = {1.0, 0.0, 0.0, -1.0};
    bad.b = {0.0, 1.0};
    CHECK_THROWS_AS(static_cast<void>(solve_care(bad, diag_cost(1.0, 1.0, 1.0))), Error);

    StateSpace no_input;
    no_input.a = {0.0, 1.0, 30.5, -214.0};
    no_input.b = {0.0, 0.0};
    CHECK_THROWS_AS(static_cast<void>(solve_care(no_input, diag_cost(1.0, 1.0, 1.0))),
                    Error);
}

TEST_CASE("solve_care validates the cost matrices") {
    const StateSpace ss = rig_upright();
    CHECK_THROWS_AS(static_cast<void>(solve_care(ss, diag_cost(-1.0, 1.0, 1.0))), Error);
    CHECK_THROWS_AS(static_cast<void>(solve_care(ss, diag_cost(1.0, 1.0, 0.0))), Error);
    CHECK_THROWS_AS(static_cast<void>(solve_care(ss, {{1.0, 0.5, -0.5, 1.0}, 1.0})),
                    Error);
}

TEST_CASE("combination 3 gain, eigenvalues and residual") {
    const StateSpace ss = rig_upright();
    const CostMatrices cost = diag_cost(100.0, 0.01, 0.1);

    const Mat2 x = solve_care(ss, cost);
    // R^-1 B' X reproduces the reference gain.
    const double k0 = (ss.b.v0 * x.m00 + ss.b.v1 * x.m10) / cost.r;
    const double k1 = (ss.b.v0 * x.m01 + ss.b.v1 * x.m11) / cost.r;
    CHECK(k0 == doctest::Approx(33.345).epsilon(0.0015));
    CHECK(k1 == doctest::Approx(0.159).epsilon(0.003));

    const LqrSolution sol = lqr_gain(ss, cost);
    CHECK(sol.residual <= 1e-9);
    CHECK(sol.closed_loop_eigs[0].real() == doctest::Approx(-2.69).epsilon(0.0075));
    CHECK(sol.closed_loop_eigs[1].real() == doctest::Approx(-214.20).epsilon(1e-4));
    CHECK(sol.x.m01 == sol.x.m10);

    // Closed-loop matrix entries derived from the gain arithmetic.
    const Mat2 acl = closed_loop(ss, sol.k);
    CHECK(acl.m00 == 0.0);
    CHECK(acl.m01 == 1.0);
    CHECK(acl.m10 == doctest::Approx(-575.7).epsilon(0.001));
    CHECK(acl.m11 == doctest::Approx(-216.89).epsilon(0.0005));
}

TEST_CASE("closed_loop with zero gain returns A") {
    const StateSpace ss = rig_upright();
    const Mat2 acl = closed_loop(ss, {0.0, 0.0});
    CHECK(acl.m00 == ss.a.m00);
    CHECK(acl.m01 == ss.a.m01);
    CHECK(acl.m10 == ss.a.m10);
    CHECK(acl.m11 == ss.a.m11);
}

TEST_CASE("time constant of the dominant mode") {
    CHECK(time_constant({std::complex<double>(-2.69, 0.0),
                         std::complex<double>(-214.20, 0.0)}) ==
          doctest::Approx(0.3717).epsilon(0.0027));
    CHECK(time_constant({std::complex<double>(-1.0, 0.0),
                         std::complex<double>(-1.0, 0.0)}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(static_cast<void>(time_constant({std::complex<double>(0.14, 0.0),
                                                     std::complex<double>(-214.14, 0.0)})),
                    Error);
}

TEST_CASE("newton iteration keeps X symmetric and residual small across a grid") {
    const StateSpace ss = rig_upright();
    SplitMix64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const double q11 = std::pow(10.0, rng.next_uniform(-2.0, 3.0));
        const double q22 = std::pow(10.0, rng.next_uniform(-2.0, 3.0));
        const double r = std::pow(10.0, rng.next_uniform(-2.0, 1.0));
        const LqrSolution sol = lqr_gain(ss, diag_cost(q11, q22, r));
        CHECK(sol.x.m01 == sol.x.m10); // built from the symmetric unknowns
        CHECK(sol.residual <= 1e-9);
        CHECK(sol.closed_loop_eigs[0].real() < 0.0);
        CHECK(sol.closed_loop_eigs[1].real() < 0.0);
        CHECK(sol.x.m00 >= 0.0);
        CHECK(sol.x.det() >= -1e-12 * sol.x.max_abs() * sol.x.max_abs());
    }
}

TEST_CASE("scaling Q and R together leaves the gain unchanged") {
    const StateSpace ss = rig_upright();
    const LqrSolution base = lqr_gain(ss, diag_cost(100.0, 0.01, 0.1));
    for (const double s : {10.0, 1e3, 1e-2}) {
        const LqrSolution scaled = lqr_gain(ss, diag_cost(100.0 * s, 0.01 * s, 0.1 * s));
        CHECK(scaled.k.v0 == doctest::Approx(base.k.v0).epsilon(1e-8));
        CHECK(scaled.k.v1 == doctest::Approx(base.k.v1).epsilon(1e-8));
    }
}

TEST_CASE("stability report reproduces the reference eigenvalue table") {
    const StateSpace ss = rig_upright();
    const std::vector<LabeledCost> combos = {
        {"1", diag_cost(1.0, 0.01, 0.1)},
        {"2", diag_cost(1.0, 0.1, 0.1)},
        {"3", diag_cost(100.0, 0.01, 0.1)},
        {"4", diag_cost(100.0, 0.1, 0.1)},
    };
    const auto rows = stability_report(ss, combos);
    REQUIRE(rows.size() == 5);

    CHECK(rows[0].feedback == FeedbackKind::open_loop);
    CHECK(rows[0].eigs[0].real() == doctest::Approx(0.14).epsilon(0.05));
    CHECK(rows[0].eigs[1].real() == doctest::Approx(-214.14).epsilon(1e-4));

    const double expected[4][2] = {
        {-0.30, -214.22}, {-0.30, -214.91}, {-2.69, -214.20}, {-2.68, -214.90}};
    for (int i = 0; i < 4; ++i) {
        CHECK(rows[i + 1].error.empty());
        CHECK(std::abs(rows[i + 1].eigs[0].real() - expected[i][0]) <= 0.02);
        CHECK(std::abs(rows[i + 1].eigs[1].real() - expected[i][1]) <= 0.02);
    }
}

TEST_CASE("stability report edge cases") {
    const StateSpace ss = rig_upright();
    CHECK(stability_report(ss, {}).size() == 1);

    const std::vector<LabeledCost> dup = {
        {"a", diag_cost(100.0, 0.01, 0.1)},
        {"b", diag_cost(100.0, 0.01, 0.1)},
    };
    const auto rows = stability_report(ss, dup);
    CHECK(rows[1].eigs[0] == rows[2].eigs[0]);
    CHECK(rows[1].eigs[1] == rows[2].eigs[1]);

    // A combo that cannot be solved lands in-row, not as an exception.
    const std::vector<LabeledCost> bad = {{"bad", {{-1.0, 0.0, 0.0, 1.0}, 1.0}}};
    const auto with_error = stability_report(ss, bad);
    REQUIRE(with_error.size() == 2);
    CHECK(!with_error[1].error.empty());
}

TEST_CASE("stability CSV schema") {
    const StateSpace ss = rig_upright();
    const auto rows = stability_report(ss, {{"3", diag_cost(100.0, 0.01, 0.1)}});
    std::ostringstream buf;
    write_stability_csv(rows, buf);
    const std::string csv = buf.str();
    CHECK(csv.rfind("label,feedback,q11,q12,q21,q22,r11,eig1_re,eig1_im,eig2_re,eig2_im\n",
                    0) == 0);
    CHECK(csv.find("open-loop,open-loop,,,,,,") != std::string::npos);
    CHECK(csv.find("3,lqr,1.0000000000000000e+02") != std::string::npos);
}
