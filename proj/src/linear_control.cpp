#include "pendkit/linear_control.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pendkit/dynamics.hpp"
#include "pendkit/trajectory.hpp"

namespace pendkit {

void CostMatrices::validate() const {
    if (!q.finite() || !std::isfinite(r))
        throw Error(ErrorCode::invalid_argument, "cost matrices: non-finite entry");
    const double scale = std::max(1.0, q.max_abs());
    if (std::abs(q.m01 - q.m10) > 1e-12 * scale)
        throw Error(ErrorCode::invalid_argument, "cost matrices: q must be symmetric");
    if (q.m00 < 0.0 || q.m11 < 0.0 || q.det() < -1e-12 * scale * scale)
        throw Error(ErrorCode::invalid_argument,
                    "cost matrices: q must be positive semi-definite");
    if (!(r > 0.0))
        throw Error(ErrorCode::invalid_argument, "cost matrices: r must be > 0");
}

StateSpace linearize(const PendulumParams& params, const State& fp, double u_star) {
    params.validate();
    if (!fp.finite() || !std::isfinite(u_star))
        throw Error(ErrorCode::invalid_argument, "linearize: non-finite input");
    const double resid = acceleration(params, fp, u_star);
    if (std::abs(fp.omega) > 1e-9 || std::abs(resid) > 1e-9)
        throw Error(ErrorCode::invalid_argument,
                    "linearize: (" + format_double(fp.theta) + ", " +
                        format_double(fp.omega) + ") is not an equilibrium for u* = " +
                        format_double(u_star) + "; residual acceleration " +
                        format_double(resid) + " rad/s^2");

    StateSpace ss;
    ss.a = {0.0, 1.0,
            -params.g_c * std::cos(fp.theta) / params.m_c, -params.b_c / params.m_c};
    ss.b = {0.0, 1.0 / params.m_c};
    ss.x_star = fp;
    ss.u_star = u_star;
    return ss;
}

ComplexPair eigenvalues_2x2(const Mat2& m) {
    if (!m.finite())
        throw Error(ErrorCode::invalid_argument, "eigenvalues_2x2: non-finite matrix");
    const double tr = m.trace();
    const double det = m.det();
    const double disc = tr * tr - 4.0 * det;
    ComplexPair eigs;
    if (disc >= 0.0) {
        // Vieta: compute the large-magnitude root first, the other from the
        // product, avoiding cancellation.
        const double s = std::sqrt(disc);
        double r1 = 0.5 * (tr >= 0.0 ? tr + s : tr - s);
        double r2 = (r1 != 0.0) ? det / r1 : 0.5 * (tr >= 0.0 ? tr - s : tr + s);
        if (r1 < r2) std::swap(r1, r2);
        eigs = {std::complex<double>(r1, 0.0), std::complex<double>(r2, 0.0)};
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        eigs = {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
    }
    return eigs;
}

namespace {

/// Solves Acl' X + X Acl = -W for symmetric X by Gaussian elimination on the
/// 3 unique unknowns (x00, x01, x11).
Mat2 solve_lyapunov_2x2(const Mat2& acl, const Mat2& w) {
    const double a = acl.m00, b = acl.m01, c = acl.m10, d = acl.m11;
    double m[3][4] = {
        {2.0 * a, 2.0 * c, 0.0, -w.m00},
        {b, a + d, c, -w.m01},
        {0.0, 2.0 * b, 2.0 * d, -w.m11},
    };
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        if (m[piv][k] == 0.0)
            throw Error(ErrorCode::no_convergence,
                        "solve_care: singular Lyapunov step (closed loop has "
                        "mirrored eigenvalues)");
        if (piv != k) std::swap(m[piv], m[k]);
        for (int i = k + 1; i < 3; ++i) {
            const double f = m[i][k] / m[k][k];
            for (int j = k; j < 4; ++j) m[i][j] -= f * m[k][j];
        }
    }
    double x[3];
    for (int k = 2; k >= 0; --k) {
        double acc = m[k][3];
        for (int j = k + 1; j < 3; ++j) acc -= m[k][j] * x[j];
        x[k] = acc / m[k][k];
    }
    return {x[0], x[1], x[1], x[2]};
}

/// Gain placing the closed-loop characteristic polynomial at {-1, -220};
/// returns the zero gain when A is already Hurwitz. Throws when an unstable
/// mode is uncontrollable.
Vec2 stabilizing_initial_gain(const Mat2& a, const Vec2& b) {
    const ComplexPair open = eigenvalues_2x2(a);
    if (open[0].real() < 0.0) return {0.0, 0.0};

    const Vec2 ab = a * b;
    const double det_ctrb = b.v0 * ab.v1 - b.v1 * ab.v0;
    const double scale = std::max(1.0, std::max(std::abs(b.v0), std::abs(b.v1)) *
                                           std::max(std::abs(ab.v0), std::abs(ab.v1)));
    // Desired polynomial (s + 1)(s + 220) = s^2 + 221 s + 220.
    if (std::abs(det_ctrb) > 1e-10 * scale) {
        // Ackermann: K = [0 1] C^-1 p(A).
        const Mat2 pa = a * a + 221.0 * a + 220.0 * Mat2::identity();
        const Vec2 row{(-b.v1 * pa.m00 + b.v0 * pa.m10) / det_ctrb,
                       (-b.v1 * pa.m01 + b.v0 * pa.m11) / det_ctrb};
        return row;
    }

    // Rank-deficient controllability: either B = 0, or B is an eigenvector of
    // A and only that mode is controllable.
    const double bb = dot(b, b);
    if (bb == 0.0)
        throw Error(ErrorCode::not_stabilizable,
                    "solve_care: B = 0 with unstable A; (A, B) is not stabilizable");
    const double lambda_c = dot(b, ab) / bb;
    const double lambda_u = a.trace() - lambda_c;
    if (lambda_u >= 0.0)
        throw Error(ErrorCode::not_stabilizable,
                    "solve_care: uncontrollable unstable mode (PBH test failed); "
                    "(A, B) is not stabilizable");
    // Move the controllable eigenvalue to -1, leaving the other untouched.
    const double shift = (lambda_c + 1.0) / bb;
    return {shift * b.v0, shift * b.v1};
}

Mat2 gain_to_closed_loop(const Mat2& a, const Vec2& b, const Vec2& k) {
    return a - outer(b, k);
}

} // namespace

double care_residual(const StateSpace& ss, const CostMatrices& cost, const Mat2& x) {
    const Mat2& a = ss.a;
    const Vec2 xb{x.m00 * ss.b.v0 + x.m01 * ss.b.v1, x.m10 * ss.b.v0 + x.m11 * ss.b.v1};
    const Mat2 quad = (1.0 / cost.r) * outer(xb, xb);
    const Mat2 res = a.transpose() * x + x * a - quad + cost.q;
    return res.frobenius_norm();
}

Mat2 solve_care(const StateSpace& ss, const CostMatrices& cost) {
    cost.validate();
    if (!ss.a.finite() || !std::isfinite(ss.b.v0) || !std::isfinite(ss.b.v1))
        throw Error(ErrorCode::invalid_argument, "solve_care: non-finite system");

    Vec2 k = stabilizing_initial_gain(ss.a, ss.b);
    Mat2 x{};
    bool have_x = false;
    for (int iter = 0; iter < 100; ++iter) {
        const Mat2 acl = gain_to_closed_loop(ss.a, ss.b, k);
        const Mat2 w = cost.q + cost.r * outer(k, k);
        const Mat2 x_next = solve_lyapunov_2x2(acl, w);
        if (have_x && (x_next - x).max_abs() <= 1e-12)
            return x_next;
        x = x_next;
        have_x = true;
        const double inv_r = 1.0 / cost.r;
        k = {inv_r * (ss.b.v0 * x.m00 + ss.b.v1 * x.m10),
             inv_r * (ss.b.v0 * x.m01 + ss.b.v1 * x.m11)};
    }
    throw Error(ErrorCode::no_convergence,
                "solve_care: Newton iteration did not converge in 100 steps; "
                "final residual " +
                    format_double(care_residual(ss, cost, x)));
}

LqrSolution lqr_gain(const StateSpace& ss, const CostMatrices& cost) {
    LqrSolution sol;
    sol.x = solve_care(ss, cost);
    const double inv_r = 1.0 / cost.r;
    sol.k = {inv_r * (ss.b.v0 * sol.x.m00 + ss.b.v1 * sol.x.m10),
             inv_r * (ss.b.v0 * sol.x.m01 + ss.b.v1 * sol.x.m11)};
    sol.closed_loop_eigs = eigenvalues_2x2(closed_loop(ss, sol.k));
    sol.residual = care_residual(ss, cost, sol.x);
    if (sol.closed_loop_eigs[0].real() >= 0.0)
        throw Error(ErrorCode::unstable,
                    "lqr_gain: closed loop is not strictly stable; is (A, Q^1/2) "
                    "detectable?");
    return sol;
}

Mat2 closed_loop(const StateSpace& ss, const Vec2& k) {
    if (!ss.a.finite() || !std::isfinite(k.v0) || !std::isfinite(k.v1))
        throw Error(ErrorCode::invalid_argument, "closed_loop: non-finite input");
    return gain_to_closed_loop(ss.a, ss.b, k);
}

double time_constant(const ComplexPair& eigs) {
    const double re0 = eigs[0].real();
    const double re1 = eigs[1].real();
    const double dominant = std::max(re0, re1);
    if (!std::isfinite(dominant))
        throw Error(ErrorCode::invalid_argument, "time_constant: non-finite eigenvalue");
    if (dominant >= 0.0)
        throw Error(ErrorCode::unstable,
                    "time_constant: dominant eigenvalue has real part " +
                        format_double(dominant) + " >= 0; system is not stable");
    return 1.0 / std::abs(dominant);
}

std::vector<StabilityRow> stability_report(const StateSpace& ss,
                                           const std::vector<LabeledCost>& combos) {
    std::vector<StabilityRow> rows;
    rows.reserve(combos.size() + 1);

    StabilityRow open;
    open.label = "open-loop";
    open.feedback = FeedbackKind::open_loop;
    open.eigs = eigenvalues_2x2(ss.a);
    rows.push_back(std::move(open));

    for (const auto& [label, cost] : combos) {
        StabilityRow row;
        row.label = label;
        row.feedback = FeedbackKind::lqr;
        row.cost = cost;
        try {
            row.eigs = lqr_gain(ss, cost).closed_loop_eigs;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_stability_csv(const std::vector<StabilityRow>& rows, std::ostream& out) {
    out << "label,feedback,q11,q12,q21,q22,r11,eig1_re,eig1_im,eig2_re,eig2_im\n";
    for (const auto& row : rows) {
        out << row.label << ','
            << (row.feedback == FeedbackKind::open_loop ? "open-loop" : "lqr") << ',';
        if (row.cost) {
            const Mat2& q = row.cost->q;
            out << format_double(q.m00) << ',' << format_double(q.m01) << ','
                << format_double(q.m10) << ',' << format_double(q.m11) << ','
                << format_double(row.cost->r) << ',';
        } else {
            out << ",,,,,";
        }
        if (row.error.empty()) {
            out << format_double(row.eigs[0].real()) << ','
                << format_double(row.eigs[0].imag()) << ','
                << format_double(row.eigs[1].real()) << ','
                << format_double(row.eigs[1].imag()) << '\n';
        } else {
            out << ",,,\n";
        }
    }
}

} // namespace pendkit
