#include "disloc/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include "disloc/error.hpp"
#include "disloc/roots.hpp"
#include "disloc/transfer.hpp"

namespace disloc {

namespace {

RMat2 normalized(const RMat2& m) { return m * (1.0 / frobenius(m)); }

// m^n up to a positive factor
RMat2 power_direction(RMat2 m, std::uint64_t n) {
    RMat2 acc = RMat2::identity();
    m = normalized(m);
    while (n > 0) {
        if (n & 1) acc = normalized(m * acc);
        n >>= 1;
        if (n) m = normalized(m * m);
    }
    return acc;
}

std::array<double, 2> unit(const std::array<double, 2>& y) {
    double r = std::hypot(y[0], y[1]);
    return {y[0] / r, y[1] / r};
}

} // namespace

double decaying_match(const Potential& v, double t, double lambda, const OracleConfig& cfg) {
    require(cfg.periods >= 10, "invalid_argument", "oracle needs at least 10 periods");
    require(cfg.match_point >= 0 && cfg.match_point < 1, "invalid_argument", "match point must lie in [0, 1)");
    auto n = static_cast<std::uint64_t>(std::llround(cfg.periods));
    std::array<double, 2> y0{std::cos(cfg.initial_angle), std::sin(cfg.initial_angle)};
    Potential s = v.shift(t);
    // left: V on [-L, 0], forward
    RMat2 left = power_direction(monodromy(v, lambda).psi, n);
    // right: V(. + t) on [0, L], backward
    RMat2 right = power_direction(monodromy(s, lambda).psi.adjugate(), n);
    auto yl = unit(left.apply(y0));
    auto yr = unit(right.apply(y0));
    if (cfg.match_point > 0) {
        RMat2 f = fundamental(s, cfg.match_point, lambda);
        yl = unit(f.apply(yl));
        yr = unit(f.apply(yr));
    }
    return yl[0] * yr[1] - yl[1] * yr[0];
}

std::vector<double> eigenvalue_oracle(const Potential& v, const GapInfo& gap, double t, const OracleConfig& cfg) {
    require(!gap.closed, "closed_gap", "oracle needs an open gap");
    std::vector<double> out;
    auto f = [&](double x) { return decaying_match(v, t, x, cfg); };
    double hw = 0.5 * gap.width();
    // cosine spacing resolves states close to the edges
    auto at = [&](int k) { return gap.mid() - hw * std::cos(std::numbers::pi * k / cfg.grid); };
    double xp = at(1), fp = f(xp);
    for (int k = 2; k < cfg.grid; ++k) {
        double x = at(k), fx = f(x);
        if (fp != 0 && (fx < 0) != (fp < 0)) {
            double r = bisect(f, xp, x, 1e-15 * std::max(1.0, std::abs(x)));
            if (std::abs(f(r)) < 1e-6) out.push_back(r);
        } else if (fx == 0) {
            out.push_back(x);
        }
        xp = x;
        fp = fx;
    }
    return out;
}

std::vector<double> resonance_oracle(const Potential& v, const GapInfo& gap, double t, const OracleConfig& cfg) {
    return eigenvalue_oracle(v.shift(t), gap, -t, cfg);
}

} // namespace disloc
