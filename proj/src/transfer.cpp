#include "disloc/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace disloc {

namespace {

// Entire functions of u = omega^2 for a piece of length h:
//   C = cos(omega h), S = sin(omega h) / omega, D = (h C - S) / u.
template <class T>
struct Trig {
    T c, s, d;
};

constexpr double kSeriesCutoff = 1e-2;

Trig<double> trig(double u, double h) {
    if (std::abs(u) * h * h < kSeriesCutoff) {
        // Taylor series in x = u h^2
        double x = u * h * h;
        double c = 0, s = 0, d = 0, p = 1, f2k = 1;
        for (int k = 0; k < 9; ++k) {
            double f2k1 = f2k * (2 * k + 1);
            double sg = (k % 2) ? -1.0 : 1.0;
            c += sg * p / f2k;
            s += sg * p / f2k1;
            double f2k3 = f2k1 * (2 * k + 2) * (2 * k + 3);  // (2(k+1)+1)!
            d += -sg * 2.0 * (k + 1) * p / f2k3;
            p *= x;
            f2k = f2k1 * (2 * k + 2);
        }
        return {c, s * h, d * h * h * h};
    }
    double c, s;
    if (u > 0) {
        double w = std::sqrt(u);
        c = std::cos(w * h);
        s = std::sin(w * h) / w;
    } else {
        double w = std::sqrt(-u);
        c = std::cosh(w * h);
        s = std::sinh(w * h) / w;
    }
    return {c, s, (h * c - s) / u};
}

Trig<std::complex<double>> trig(std::complex<double> u, double h) {
    using C = std::complex<double>;
    if (std::abs(u) * h * h < kSeriesCutoff) {
        C x = u * (h * h);
        C c(0), s(0), p(1);
        double f2k = 1;
        for (int k = 0; k < 9; ++k) {
            double f2k1 = f2k * (2 * k + 1);
            double sg = (k % 2) ? -1.0 : 1.0;
            c += sg * p / f2k;
            s += sg * p / f2k1;
            p *= x;
            f2k = f2k1 * (2 * k + 2);
        }
        return {c, s * h, C(0)};
    }
    C w = std::sqrt(u);
    C c = std::cos(w * h);
    C s = std::sin(w * h) / w;
    return {c, s, C(0)};
}

// A = -J (lambda - V)
template <class T>
Mat2<T> generator(double q1, double q2, T lambda) {
    return {T(q2), -(lambda + q1), lambda - q1, T(-q2)};
}

} // namespace

SegmentStep<double> segment_step(double q1, double q2, double lambda, double h) {
    double u = lambda * lambda - q1 * q1 - q2 * q2;
    auto [c, s, d] = trig(u, h);
    RMat2 a = generator(q1, q2, lambda);
    RMat2 k{0.0, -1.0, 1.0, 0.0};
    RMat2 e = RMat2::identity() * c + a * s;
    RMat2 de = RMat2::identity() * (-h * lambda * s) + a * (lambda * d) + k * s;
    return {e, de};
}

CMat2 segment_exp(double q1, double q2, std::complex<double> lambda, double h) {
    std::complex<double> u = lambda * lambda - q1 * q1 - q2 * q2;
    auto tr = trig(u, h);
    CMat2 a = generator<std::complex<double>>(q1, q2, lambda);
    return CMat2::identity() * tr.c + a * tr.s;
}

namespace {

template <class T, class Step>
Mat2<T> propagate(const Potential& v, double x, Step step) {
    Mat2<T> psi = Mat2<T>::identity();
    if (x <= 0) return psi;
    double pos = 0;
    std::size_t i = 0;
    while (pos < x) {
        double h = std::min(v.length(i), x - pos);
        psi = step(i, h) * psi;
        pos += v.length(i);
        i = (i + 1) % v.size();
    }
    return psi;
}

} // namespace

RMat2 fundamental(const Potential& v, double x, double lambda, double t) {
    Potential s = t == 0.0 ? v : v.shift(t);
    return propagate<double>(s, x, [&](std::size_t i, double h) {
        return segment_step(s.q1(i), s.q2(i), lambda, h).e;
    });
}

CMat2 fundamental(const Potential& v, double x, std::complex<double> lambda, double t) {
    Potential s = t == 0.0 ? v : v.shift(t);
    return propagate<std::complex<double>>(s, x, [&](std::size_t i, double h) {
        return segment_exp(s.q1(i), s.q2(i), lambda, h);
    });
}

Monodromy monodromy(const Potential& s, double lambda) {
    RMat2 p = RMat2::identity(), dp = RMat2::zero();
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto st = segment_step(s.q1(i), s.q2(i), lambda, s.length(i));
        dp = st.de * p + st.e * dp;
        p = st.e * p;
    }
    return {p, dp};
}

Monodromy monodromy(const Potential& v, double lambda, double t) {
    return t == 0.0 ? monodromy(v, lambda) : monodromy(v.shift(t), lambda);
}

RMat2 t_derivative(const Potential& v, double lambda, double t) {
    auto [q1, q2] = v.value_at(t);
    RMat2 b{q2, -(q1 + lambda), -(q1 - lambda), -q2};
    RMat2 psi = monodromy(v, lambda, t).psi;
    return b * psi - psi * b;
}

double phi_norm_sq(const Potential& v, double lambda, double t) {
    using boost::math::quadrature::gauss;
    Potential s = t == 0.0 ? v : v.shift(t);
    std::array<double, 2> y{0.0, 1.0};
    double total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double q1 = s.q1(i), q2 = s.q2(i), len = s.length(i);
        double rate = std::abs(lambda) + std::hypot(q1, q2);
        int pieces = std::max(1, int(std::ceil(len * rate / 4.0)));
        double h = len / pieces;
        for (int k = 0; k < pieces; ++k) {
            auto f = [&](double x) {
                auto z = segment_step(q1, q2, lambda, x).e.apply(y);
                return z[0] * z[0] + z[1] * z[1];
            };
            total += gauss<double, 16>::integrate(f, 0.0, h);
            y = segment_step(q1, q2, lambda, h).e.apply(y);
        }
    }
    return total;
}

double prufer_angle(const Potential& v, double lambda, double t, double x) {
    Potential s = t == 0.0 ? v : v.shift(t);
    std::array<double, 2> y{0.0, 1.0};
    double beta = 0;
    double pos = 0;
    std::size_t i = 0;
    while (pos < x) {
        double q1 = s.q1(i), q2 = s.q2(i);
        double len = std::min(s.length(i), x - pos);
        double rate = std::abs(lambda) + std::hypot(q1, q2);
        int pieces = std::max(1, int(std::ceil(len * rate)));
        double h = len / pieces;
        RMat2 e = segment_step(q1, q2, lambda, h).e;
        for (int k = 0; k < pieces; ++k) {
            auto z = e.apply(y);
            double step = std::atan2(z[0], z[1]) - std::atan2(y[0], y[1]);
            step -= 2 * std::numbers::pi * std::round(step / (2 * std::numbers::pi));
            beta += step;
            double r = std::hypot(z[0], z[1]);
            y = {z[0] / r, z[1] / r};
        }
        pos += s.length(i);
        i = (i + 1) % s.size();
    }
    return beta;
}

} // namespace disloc
