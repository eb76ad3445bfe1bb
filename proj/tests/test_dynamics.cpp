#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pendkit/dynamics.hpp"
#include "pendkit/rng.hpp"
#include "pendkit/trajectory.hpp"

using namespace pendkit;

namespace {
const PendulumParams kRig{0.055, 11.77, 1.678};
constexpr double kPi = std::numbers::pi;
} // namespace

TEST_CASE("acceleration matches the aggregated-constant form") {
    // Upright equilibrium: sin(pi) vanishes.
    CHECK(acceleration(kRig, {kPi, 0.0}, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    // Hand evaluation of -g_c/m_c at theta = pi/2.
    CHECK(acceleration(kRig, {kPi / 2.0, 0.0}, 0.0) ==
          doctest::Approx(-1.678 / 0.055).epsilon(1e-12));
    CHECK(acceleration(kRig, {kPi / 2.0, 0.0}, 0.0) ==
          doctest::Approx(-30.509090909090908).epsilon(1e-12));
    // Control exactly cancels damping at the hanging point.
    CHECK(acceleration(kRig, {0.0, 1.0}, 11.77) == 0.0);
}

TEST_CASE("acceleration rejects bad input") {
    CHECK_THROWS_AS(acceleration(kRig, {std::nan(""), 0.0}, 0.0), Error);
    CHECK_THROWS_AS(acceleration(kRig, {0.0, 0.0}, INFINITY), Error);
    CHECK_THROWS_AS(acceleration({-1.0, 0.0, 1.0}, {0.0, 0.0}, 0.0), Error);
    CHECK_THROWS_AS(acceleration({0.0, 0.0, 1.0}, {0.0, 0.0}, 0.0), Error);
}

TEST_CASE("acceleration is affine in omega and torque at fixed theta") {
    // At theta = 0 the relation is exact in floating point too.
    const double lhs = acceleration(kRig, {0.0, 0.7, }, 2.5) -
                       acceleration(kRig, {0.0, 0.0}, 0.0);
    CHECK(lhs == (-kRig.b_c * 0.7 + 2.5) / kRig.m_c);

    SplitMix64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const double theta = rng.next_uniform(-6.0, 6.0);
        const double omega = rng.next_uniform(-20.0, 20.0);
        const double u = rng.next_uniform(-5.0, 5.0);
        const double diff =
            acceleration(kRig, {theta, omega}, u) - acceleration(kRig, {theta, 0.0}, 0.0);
        const double expected = (-kRig.b_c * omega + u) / kRig.m_c;
        CHECK(diff == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("energy components") {
    const auto rest = energy(kRig, {0.0, 0.0});
    CHECK(rest.kinetic == 0.0);
    CHECK(rest.potential == -kRig.g_c);

    const auto mid = energy(kRig, {kPi / 2.0, 2.0});
    CHECK(mid.kinetic == doctest::Approx(0.11).epsilon(1e-12));
    CHECK(mid.potential == doctest::Approx(0.0).epsilon(1e-15));

    const auto top = energy(kRig, {kPi, 0.0});
    CHECK(top.kinetic == 0.0);
    CHECK(top.potential == doctest::Approx(1.678).epsilon(1e-12));
}

TEST_CASE("fixed points of the unforced pendulum") {
    const auto points = fixed_points(kRig);
    REQUIRE(points.size() == 2);
    CHECK(points[0].state.theta == 0.0);
    CHECK(points[0].state.omega == 0.0);
    CHECK(points[0].stability == Stability::locally_stable_isl);
    CHECK(points[1].state.theta == doctest::Approx(kPi));
    CHECK(points[1].state.omega == 0.0);
    CHECK(points[1].stability == Stability::unstable);

    for (const auto& fp : points) {
        CHECK(std::abs(acceleration(kRig, fp.state, 0.0)) <= 1e-9);
        CHECK(fp.state.theta >= 0.0);
        CHECK(fp.state.theta < 2.0 * kPi);
    }
}

TEST_CASE("fixed points degenerate to a continuum without gravity") {
    CHECK_THROWS_WITH_AS(static_cast<void>(fixed_points({0.055, 11.77, 0.0})),
                         doctest::Contains("continuum"), Error);
}

TEST_CASE("explicit Euler step") {
    // Equilibrium is a fixed point of the map.
    const State top = step_euler(kRig, {kPi, 0.0}, 0.0, 0.002);
    CHECK(top.theta == kPi);
    CHECK(top.omega == doctest::Approx(0.0).epsilon(1e-15));

    // Hand evaluation of both update lines.
    const State s = step_euler(kRig, {0.0, 1.0}, 0.0, 0.002);
    CHECK(s.theta == doctest::Approx(0.002).epsilon(1e-15));
    CHECK(s.omega == doctest::Approx(1.0 + 0.002 * (-11.77 / 0.055)).epsilon(1e-15));
    CHECK(s.omega == doctest::Approx(0.572).epsilon(1e-12));

    CHECK_THROWS_AS(step_euler(kRig, {0.0, 1.0}, 0.0, 0.0), Error);
    CHECK_THROWS_AS(step_euler(kRig, {0.0, 1.0}, 0.0, -0.002), Error);
}

TEST_CASE("two half steps differ from one full step at second order") {
    const State s0{1.0, 2.0};
    auto discrepancy = [&](double dt) {
        const State full = step_euler(kRig, s0, 0.3, dt);
        const State half = step_euler(kRig, step_euler(kRig, s0, 0.3, dt / 2.0), 0.3,
                                      dt / 2.0);
        return std::hypot(full.theta - half.theta, full.omega - half.omega);
    };
    const double e1 = discrepancy(0.002);
    const double e2 = discrepancy(0.001);
    CHECK(e1 > 0.0);
    // First-order method: halving dt shrinks the defect roughly 4x.
    CHECK(e2 < 0.3 * e1);
}

TEST_CASE("simulate sample count and time base") {
    const Trajectory traj =
        simulate(kRig, {kPi, 0.0}, [](double, const State&) { return 0.0; }, 0.002, 5.0);
    CHECK(traj.size() == 2501);
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples[1].t == 0.002);
    CHECK(traj.samples.back().t == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("simulate holds both equilibria under zero control") {
    // The hanging point is exact in floating point (sin 0 == 0), so the
    // rollout is bit-identical.
    const Trajectory bottom =
        simulate(kRig, {0.0, 0.0}, [](double, const State&) { return 0.0; }, 0.002, 2.0);
    for (const auto& s : bottom.samples) {
        CHECK(s.state.theta == 0.0);
        CHECK(s.state.omega == 0.0);
        CHECK(s.u_control == 0.0);
    }

    // sin of the double nearest pi is ~1.2e-16, so the upright hold is exact
    // only to roundoff; the residual must stay at that scale, not grow.
    const Trajectory top =
        simulate(kRig, {kPi, 0.0}, [](double, const State&) { return 0.0; }, 0.002, 2.0);
    for (const auto& s : top.samples) {
        CHECK(std::abs(s.state.theta - kPi) <= 1e-9);
        CHECK(std::abs(s.state.omega) <= 1e-9);
    }
}

TEST_CASE("simulate leaves the unstable point when nudged") {
    const Trajectory traj = simulate(
        kRig, {kPi - 0.01, 0.0}, [](double, const State&) { return 0.0; }, 0.002, 1.0);
    // Acceleration points away from pi below the upright point.
    CHECK(traj.samples.back().state.theta < kPi - 0.01);
    double max_dev = 0.0;
    for (const auto& s : traj.samples)
        max_dev = std::max(max_dev, std::abs(s.state.theta - kPi));
    CHECK(max_dev > 0.01);
}

TEST_CASE("simulate aborts on a non-finite policy with the step index") {
    auto bad = [](double t, const State&) {
        return t > 0.01 ? std::nan("") : 0.0;
    };
    CHECK_THROWS_WITH_AS(static_cast<void>(simulate(kRig, {0.0, 0.0}, bad, 0.002, 1.0)),
                         doctest::Contains("step 6"), Error);
}

TEST_CASE("damped unforced energy is non-increasing per step") {
    const double dt = 1e-5;
    State s{2.0, 0.0};
    double prev = energy(kRig, s).total();
    double worst_increase = 0.0;
    for (int k = 0; k < 20000; ++k) {
        s = step_euler(kRig, s, 0.0, dt);
        const double e = energy(kRig, s).total();
        worst_increase = std::max(worst_increase, e - prev);
        prev = e;
    }
    CHECK(worst_increase <= 1e-6);
}

TEST_CASE("undamped unforced energy drift stays within the Euler bound") {
    const PendulumParams frictionless{kRig.m_c, 0.0, kRig.g_c};
    const double dt = 1e-5;
    State s{2.0, 0.0};
    const double e0 = energy(frictionless, s).total();
    double worst = 0.0;
    for (int k = 0; k < 20000; ++k) {
        s = step_euler(frictionless, s, 0.0, dt);
        worst = std::max(worst, std::abs(energy(frictionless, s).total() - e0));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("trajectory CSV round trip is exact") {
    const Trajectory traj = simulate(
        kRig, {kPi - 0.05, 0.1},
        [](double t, const State& s) { return 0.2 * std::sin(t) - 0.1 * s.omega; }, 0.002,
        0.5);
    std::ostringstream buf;
    write_trajectory_csv(traj, buf);
    std::istringstream in(buf.str());
    const Trajectory back = read_trajectory_csv(in, "roundtrip");
    REQUIRE(back.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(back.samples[i].t == traj.samples[i].t);
        CHECK(back.samples[i].state.theta == traj.samples[i].state.theta);
        CHECK(back.samples[i].state.omega == traj.samples[i].state.omega);
        CHECK(back.samples[i].u_control == traj.samples[i].u_control);
        CHECK(back.samples[i].u_noise == traj.samples[i].u_noise);
    }

    SUBCASE("header is the pinned schema") {
        CHECK(buf.str().substr(0, 33) == "t,theta,omega,u_control,u_noise\n0");
    }
}

TEST_CASE("trajectory CSV parse errors carry context") {
    std::istringstream bad_header("time,theta\n");
    CHECK_THROWS_AS(static_cast<void>(read_trajectory_csv(bad_header, "x")), Error);

    std::istringstream bad_field("t,theta,omega,u_control,u_noise\n0,0,0,0,zero\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(read_trajectory_csv(bad_field, "x")),
                         doctest::Contains("row 2"), Error);

    std::istringstream backwards(
        "t,theta,omega,u_control,u_noise\n0,0,0,0,0\n0.1,0,0,0,0\n0.05,0,0,0,0\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(read_trajectory_csv(backwards, "x")),
                         doctest::Contains("row 4"), Error);
}
