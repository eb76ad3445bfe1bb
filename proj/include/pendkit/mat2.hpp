#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace pendkit {

struct Vec2 {
    double v0 = 0.0;
    double v1 = 0.0;

    double& operator[](int i) { return i == 0 ? v0 : v1; }
    double operator[](int i) const { return i == 0 ? v0 : v1; }
};

/// Dense 2x2 real matrix, row-major.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double operator()(int r, int c) const {
        return r == 0 ? (c == 0 ? m00 : m01) : (c == 0 ? m10 : m11);
    }
    double& operator()(int r, int c) {
        return r == 0 ? (c == 0 ? m00 : m01) : (c == 0 ? m10 : m11);
    }

    double trace() const { return m00 + m11; }
    double det() const { return m00 * m11 - m01 * m10; }

    Mat2 transpose() const { return {m00, m10, m01, m11}; }

    double frobenius_norm() const {
        return std::sqrt(m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11);
    }

    double max_abs() const {
        return std::max(std::max(std::abs(m00), std::abs(m01)),
                        std::max(std::abs(m10), std::abs(m11)));
    }

    bool finite() const {
        return std::isfinite(m00) && std::isfinite(m01) && std::isfinite(m10) &&
               std::isfinite(m11);
    }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}
inline Mat2 operator*(double s, const Mat2& a) {
    return {s * a.m00, s * a.m01, s * a.m10, s * a.m11};
}
inline Vec2 operator*(const Mat2& a, const Vec2& x) {
    return {a.m00 * x.v0 + a.m01 * x.v1, a.m10 * x.v0 + a.m11 * x.v1};
}

/// Outer product column * row.
inline Mat2 outer(const Vec2& col, const Vec2& row) {
    return {col.v0 * row.v0, col.v0 * row.v1, col.v1 * row.v0, col.v1 * row.v1};
}

inline double dot(const Vec2& a, const Vec2& b) {
    return a.v0 * b.v0 + a.v1 * b.v1;
}

using ComplexPair = std::array<std::complex<double>, 2>;

} // namespace pendkit
