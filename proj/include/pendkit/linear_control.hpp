#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pendkit/mat2.hpp"
#include "pendkit/state.hpp"

namespace pendkit {

/// Linearized pendulum x_dot = A (x - x*) + B (u - u*) about a fixed point.
/// Every pendulum linearization has a(0,0)=0, a(0,1)=1, b(0)=0.
struct StateSpace {
    Mat2 a;
    Vec2 b;
    State x_star;
    double u_star = 0.0;
};

/// LQR cost weights: q symmetric positive semi-definite, r > 0 (scalar input).
struct CostMatrices {
    Mat2 q;
    double r = 1.0;

    /// Throws ErrorCode::invalid_argument when q is asymmetric/indefinite or
    /// r is not strictly positive.
    void validate() const;
};

struct LqrSolution {
    Mat2 x;                      ///< stabilizing Riccati solution, symmetric PSD
    Vec2 k;                      ///< gain, u = -k * (x - x*)
    ComplexPair closed_loop_eigs; ///< eigenvalues of A - B*k
    double residual = 0.0;       ///< Frobenius norm of the CARE residual
};

/// Jacobians of the nonlinear dynamics at an equilibrium:
///     A = [[0, 1], [-g_c cos(theta*)/m_c, -b_c/m_c]],  B = [0; 1/m_c].
/// The point must satisfy |omega*| <= 1e-9 and
/// |acceleration(params, fp, u_star)| <= 1e-9; otherwise the error names the
/// residual acceleration.
StateSpace linearize(const PendulumParams& params, const State& fp, double u_star);

/// Roots of lambda^2 - tr(m) lambda + det(m), sorted by descending real part,
/// ties by descending imaginary part.
ComplexPair eigenvalues_2x2(const Mat2& m);

/// Stabilizing solution of A'X + XA - XBR^-1B'X + Q = 0 by Newton-Kleinman
/// iteration. Each step solves a 2x2 Lyapunov equation exactly through the
/// 3x3 linear system on the symmetric unknowns; the iteration starts from a
/// stabilizing gain placed at {-1, -220} (or zero when A is already stable)
/// and stops when successive iterates agree to 1e-12 max-abs, cap 100.
Mat2 solve_care(const StateSpace& ss, const CostMatrices& cost);

/// Frobenius norm of A'X + XA - XBR^-1B'X + Q.
double care_residual(const StateSpace& ss, const CostMatrices& cost, const Mat2& x);

/// k = R^-1 B' X plus the closed-loop eigenvalues of A - B k. Fails if any
/// closed-loop eigenvalue is not strictly in the left half plane.
LqrSolution lqr_gain(const StateSpace& ss, const CostMatrices& cost);

/// A - B*k.
Mat2 closed_loop(const StateSpace& ss, const Vec2& k);

/// tau = 1 / |Re(dominant eigenvalue)| where dominant = largest real part.
/// Throws ErrorCode::unstable when the dominant real part is >= 0.
double time_constant(const ComplexPair& eigs);

enum class FeedbackKind { open_loop, lqr };

struct StabilityRow {
    std::string label;
    FeedbackKind feedback = FeedbackKind::open_loop;
    std::optional<CostMatrices> cost; ///< absent for the open-loop row
    ComplexPair eigs{};
    std::string error; ///< per-row solver failure; empty on success
};

using LabeledCost = std::pair<std::string, CostMatrices>;

/// Open-loop eigenvalues first, then one row per cost combination with the
/// closed-loop eigenvalues. Solver failures are reported in-row and do not
/// abort the report.
std::vector<StabilityRow> stability_report(const StateSpace& ss,
                                           const std::vector<LabeledCost>& combos);

/// CSV `label,feedback,q11,q12,q21,q22,r11,eig1_re,eig1_im,eig2_re,eig2_im`.
/// The open-loop row leaves the cost cells empty; failed rows leave the
/// eigenvalue cells empty.
void write_stability_csv(const std::vector<StabilityRow>& rows, std::ostream& out);

} // namespace pendkit
