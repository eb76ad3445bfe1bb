#include "pendkit/spline.hpp"

#include <algorithm>
#include <cmath>

#include "pendkit/error.hpp"
#include "pendkit/trajectory.hpp"

namespace pendkit {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw Error(ErrorCode::invalid_argument,
                    "cubic spline: need matching x/y with at least 2 knots");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i] < x_[i + 1]))
            throw Error(ErrorCode::invalid_argument,
                        "cubic spline: knots must be strictly increasing");

    // Second derivatives from the tridiagonal system; natural conditions pin
    // both ends to zero. Thomas algorithm, diagonally dominant by
    // construction.
    second_.assign(n, 0.0);
    if (n == 2) return;
    const std::size_t m = n - 2;
    std::vector<double> diag(m), upper(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double h0 = x_[i + 1] - x_[i];
        const double h1 = x_[i + 2] - x_[i + 1];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 2] - y_[i + 1]) / h1 - (y_[i + 1] - y_[i]) / h0);
    }
    for (std::size_t i = 1; i < m; ++i) {
        const double lower = x_[i + 1] - x_[i];
        const double f = lower / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    second_[m] = rhs[m - 1] / diag[m - 1];
    for (std::size_t i = m - 1; i >= 1; --i)
        second_[i] = (rhs[i - 1] - upper[i - 1] * second_[i + 1]) / diag[i - 1];
}

double CubicSpline::operator()(double x) const {
    if (!std::isfinite(x) || x < x_.front() || x > x_.back())
        throw Error(ErrorCode::range,
                    "cubic spline: " + format_double(x) + " outside [" +
                        format_double(x_.front()) + ", " + format_double(x_.back()) +
                        "]");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    i = std::min(std::max<std::size_t>(i, 1), x_.size() - 1) - 1;

    // Exact knot hits return the knot value untouched.
    if (x == x_[i]) return y_[i];
    if (x == x_[i + 1]) return y_[i + 1];

    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) *
               (h * h) / 6.0;
}

} // namespace pendkit
