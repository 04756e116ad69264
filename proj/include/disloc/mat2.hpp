#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace disloc {

// Row-major 2x2 matrix: [[a, b], [c, d]].
template <class T>
struct Mat2 {
    T a{}, b{}, c{}, d{};

    static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
    static Mat2 zero() { return {T(0), T(0), T(0), T(0)}; }

    T trace() const { return a + d; }
    T det() const { return a * d - b * c; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(T s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2& operator+=(const Mat2& o) { return *this = *this + o; }

    // Inverse of a unimodular matrix (adjugate).
    Mat2 adjugate() const { return {d, -b, -c, a}; }

    std::array<T, 2> apply(const std::array<T, 2>& v) const {
        return {a * v[0] + b * v[1], c * v[0] + d * v[1]};
    }
};

using RMat2 = Mat2<double>;
using CMat2 = Mat2<std::complex<double>>;

// sqrt(Tr A^* A)
template <class T>
double frobenius(const Mat2<T>& m) {
    return std::sqrt(std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d));
}

// Largest singular value.
template <class T>
double spectral_norm(const Mat2<T>& m) {
    double f2 = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
    double d2 = std::norm(m.det());
    return std::sqrt(0.5 * (f2 + std::sqrt(std::max(0.0, f2 * f2 - 4 * d2))));
}

template <class T>
double max_abs_diff(const Mat2<T>& x, const Mat2<T>& y) {
    using std::abs;
    double r = abs(x.a - y.a);
    r = std::max(r, double(abs(x.b - y.b)));
    r = std::max(r, double(abs(x.c - y.c)));
    r = std::max(r, double(abs(x.d - y.d)));
    return r;
}

} // namespace disloc
