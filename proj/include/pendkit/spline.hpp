#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pendkit {

/// Natural cubic spline through (x_i, y_i): C2 piecewise cubic with zero
/// second derivative at both ends. Evaluation at a knot returns the knot
/// value exactly; evaluation outside [x_front, x_back] is a range error.
class CubicSpline {
public:
    /// Knots must be strictly increasing, at least 2 of them.
    CubicSpline(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> second_; ///< second derivatives at the knots
};

} // namespace pendkit
