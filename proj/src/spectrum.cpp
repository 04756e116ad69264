#include "disloc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "disloc/error.hpp"
#include "disloc/roots.hpp"
#include "disloc/transfer.hpp"

namespace disloc {

namespace {

constexpr double kRootTol = 1e-12;

double scale(double x) { return std::max(1.0, std::abs(x)); }

// Root of f in the closure of the gap, bracketed slightly beyond the edges.
template <class F>
double gap_root(F&& f, const GapInfo& gap, const char* what) {
    double eta = 1e-7 * scale(gap.alpha_minus);
    double lo = gap.alpha_minus - eta, hi = gap.alpha_plus + eta;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    require((flo < 0) != (fhi < 0), "root_not_bracketed",
            fmt::format("no {} in gap {} [{}, {}]", what, gap.n, gap.alpha_minus, gap.alpha_plus));
    return bisect(f, lo, hi, kRootTol);
}

} // namespace

Discriminant discriminant(const Potential& v, double lambda) {
    auto m = monodromy(v, lambda);
    return {m.delta(), m.ddelta()};
}

int dirichlet_sheet(int n, double a) {
    double parity = (n % 2 == 0) ? 1.0 : -1.0;
    return parity * a < 0 ? 1 : 2;
}

int gap_index(const Potential& v, double mu, double t) {
    return int(std::lround(-prufer_angle(v, mu, t) / std::numbers::pi));
}

std::vector<GapInfo> band_edges(const Potential& v, double lo, double hi, int grid) {
    require(hi > lo, "invalid_argument", "window must satisfy lo < hi");
    require(grid >= 16, "invalid_argument", "grid too coarse");
    auto delta = [&](double x) { return monodromy(v, x).delta(); };
    require(std::abs(delta(lo)) <= 1.0 && std::abs(delta(hi)) <= 1.0, "window_cuts_gap",
            fmt::format("window [{}, {}] ends inside a gap", lo, hi));

    auto phi1 = [&](double x) { return monodromy(v, x).phi1(); };
    double h = (hi - lo) / grid;
    std::vector<double> mus;
    double xp = lo, fp = phi1(lo);
    if (fp == 0) mus.push_back(lo);
    for (int k = 1; k <= grid; ++k) {
        double x = lo + k * h, fx = phi1(x);
        if (fx == 0)
            mus.push_back(x);
        else if (fp != 0 && (fx < 0) != (fp < 0))
            mus.push_back(bisect(phi1, xp, x, kRootTol));
        xp = x;
        fp = fx;
    }

    std::vector<GapInfo> out;
    for (double mu : mus) {
        double sgn = delta(mu) >= 0 ? 1.0 : -1.0;
        auto g = [&](double x) { return sgn * delta(x) - 1.0; };
        double eps = 1e-6 * scale(mu);
        double g0 = g(mu);
        bool inside = g0 > 1e-10;
        bool left_open = inside || g(mu - eps) > 0;
        bool right_open = inside || g(mu + eps) > 0;

        auto walk = [&](double start, double dir) {
            double prev = start, x = start;
            for (;;) {
                x += dir * h;
                require(x >= lo - h && x <= hi + h, "window_cuts_gap",
                        fmt::format("gap around {} extends beyond the window", mu));
                if (g(x) <= 0) break;
                prev = x;
            }
            return dir < 0 ? bisect(g, x, prev, kRootTol) : bisect(g, prev, x, kRootTol);
        };

        GapInfo gap;
        if (!left_open && !right_open) {
            gap.alpha_minus = gap.alpha_plus = mu;
        } else {
            gap.alpha_minus = left_open ? walk(inside ? mu : mu - eps, -1.0) : bisect(g, mu - eps, mu + eps, kRootTol);
            gap.alpha_plus = right_open ? walk(inside ? mu : mu + eps, +1.0) : bisect(g, mu - eps, mu + eps, kRootTol);
        }
        gap.closed = gap.width() < 1e-9 * scale(gap.alpha_minus);
        gap.n = gap_index(v, mu);
        auto [mm, mp] = effective_masses(v, gap);
        gap.mass_minus = mm;
        gap.mass_plus = mp;

        auto m = monodromy(v, mu);
        double etol = 1e-10 * scale(mu);
        gap.mu.lambda = mu;
        if (gap.closed) {
            gap.mu = {mu, 0, -1};
        } else if (mu - gap.alpha_minus < etol) {
            gap.mu = {gap.alpha_minus, 0, -1};
        } else if (gap.alpha_plus - mu < etol) {
            gap.mu = {gap.alpha_plus, 0, +1};
        } else {
            double d = std::min(mu - gap.alpha_minus, gap.alpha_plus - mu);
            require(d > 1e-8 * scale(mu), "ambiguous_edge",
                    fmt::format("Dirichlet point {} of gap {} is {} away from an edge", mu, gap.n, d));
            gap.mu.sheet = dirichlet_sheet(gap.n, m.a());
        }
        gap.nu = gap.closed ? mu : neumann_point(v, gap, 0.0);
        out.push_back(gap);
    }
    return out;
}

GapInfo find_gap(const std::vector<GapInfo>& gaps, int n) {
    for (const auto& g : gaps)
        if (g.n == n) return g;
    throw Error("gap_not_found", fmt::format("gap {} is not in the window", n));
}

std::pair<double, double> effective_masses(const Potential& v, const GapInfo& gap) {
    auto lo = monodromy(v, gap.alpha_minus), hi = monodromy(v, gap.alpha_plus);
    return {-lo.delta() * lo.ddelta(), -hi.delta() * hi.ddelta()};
}

SurfacePoint dirichlet_point(const Potential& v, const GapInfo& gap, double t) {
    Potential s = v.shift(t);
    if (gap.closed) return {gap.alpha_minus, 0, -1};
    double mu = gap_root([&](double x) { return monodromy(s, x).phi1(); }, gap, "Dirichlet point");
    double etol = 1e-10 * scale(mu);
    if (mu - gap.alpha_minus < etol) return {gap.alpha_minus, 0, -1};
    if (gap.alpha_plus - mu < etol) return {gap.alpha_plus, 0, +1};
    return {mu, dirichlet_sheet(gap.n, monodromy(s, mu).a()), 0};
}

double neumann_point(const Potential& v, const GapInfo& gap, double t) {
    Potential s = v.shift(t);
    if (gap.closed) return gap.alpha_minus;
    double nu = gap_root([&](double x) { return monodromy(s, x).theta2(); }, gap, "Neumann point");
    return std::clamp(nu, gap.alpha_minus, gap.alpha_plus);
}

double quasimomentum(const Potential& v, double lambda) {
    double d = monodromy(v, lambda).delta();
    require(std::abs(d) <= 1.0 + 1e-10, "not_in_band", fmt::format("{} lies in a gap", lambda));
    d = std::clamp(d, -1.0, 1.0);
    // band sigma_n lies between mu_{n-1} and mu_n, where -beta/pi runs over (n-1, n)
    int n = int(std::floor(-prufer_angle(v, lambda) / std::numbers::pi)) + 1;
    double sgn = ((n - 1) % 2 == 0) ? 1.0 : -1.0;
    return std::numbers::pi * (n - 1) + std::acos(sgn * d);
}

} // namespace disloc
