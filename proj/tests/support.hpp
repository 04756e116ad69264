#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "disloc/potential.hpp"
#include "disloc/mat2.hpp"
#include "disloc/spectrum.hpp"
#include "disloc/transfer.hpp"

namespace testing {

using disloc::Potential;
using disloc::RMat2;

inline Potential random_potential(std::mt19937_64& rng, int max_segments = 8, double amp = 3.0) {
    std::uniform_int_distribution<int> count(1, max_segments);
    std::uniform_real_distribution<double> u(0.0, 1.0), val(-amp, amp);
    int n = count(rng);
    std::vector<double> b{0.0};
    while (int(b.size()) < n) {
        double x = u(rng);
        bool ok = x > 0.02 && x < 0.98;
        for (double y : b) ok = ok && std::abs(x - y) > 0.02;
        if (ok) b.push_back(x);
    }
    std::sort(b.begin(), b.end());
    std::vector<double> q1(n), q2(n);
    for (int i = 0; i < n; ++i) {
        q1[i] = val(rng);
        q2[i] = val(rng);
    }
    return Potential(b, q1, q2);
}

// Classical RK4 for J y' + V y = lambda y written out with explicit J and V.
inline RMat2 rk4_fundamental(const Potential& v, double x, double lambda, double t, int steps_per_unit = 4000) {
    auto rhs = [&](double q1, double q2, const std::array<double, 4>& y) {
        // y' = J^{-1} (lambda - V) y with J^{-1} = [[0, -1], [1, 0]]
        double m00 = lambda - q1, m01 = -q2, m10 = -q2, m11 = lambda + q1;
        std::array<double, 4> out{};
        for (int c = 0; c < 2; ++c) {
            double y0 = y[c], y1 = y[2 + c];
            double r0 = m00 * y0 + m01 * y1, r1 = m10 * y0 + m11 * y1;
            out[c] = -r1;
            out[2 + c] = r0;
        }
        return out;
    };
    std::array<double, 4> y{1, 0, 0, 1};
    Potential s = v.shift(t);
    double pos = 0;
    std::size_t i = 0;
    while (pos < x) {
        double len = std::min(s.length(i), x - pos);
        int n = std::max(4, int(std::ceil(len * steps_per_unit)));
        double h = len / n;
        for (int k = 0; k < n; ++k) {
            auto k1 = rhs(s.q1(i), s.q2(i), y);
            std::array<double, 4> tmp;
            for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
            auto k2 = rhs(s.q1(i), s.q2(i), tmp);
            for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
            auto k3 = rhs(s.q1(i), s.q2(i), tmp);
            for (int j = 0; j < 4; ++j) tmp[j] = y[j] + h * k3[j];
            auto k4 = rhs(s.q1(i), s.q2(i), tmp);
            for (int j = 0; j < 4; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        }
        pos += s.length(i);
        i = (i + 1) % s.size();
    }
    return {y[0], y[1], y[2], y[3]};
}

// Open gaps of [lo, hi] after pushing each end of the window out onto a band.
inline std::vector<disloc::GapInfo> open_gaps_in(const Potential& v, double lo, double hi) {
    while (std::abs(disloc::monodromy(v, lo).delta()) > 1) lo -= 0.01;
    while (std::abs(disloc::monodromy(v, hi).delta()) > 1) hi += 0.01;
    std::vector<disloc::GapInfo> out;
    for (const auto& g : disloc::band_edges(v, lo, hi))
        if (!g.closed) out.push_back(g);
    return out;
}

// Fourth-order central difference.
template <class F>
double central_diff(F&& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

} // namespace testing
