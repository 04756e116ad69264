#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "disloc/spectrum.hpp"
#include "disloc/surface.hpp"
#include "support.hpp"

using namespace disloc;

namespace {

constexpr double kPi = std::numbers::pi;

// Arc membership by the case-by-case definition on the glued gap copies.
bool arc_by_cases(const GapInfo& g, const SurfacePoint& a, const SurfacePoint& b, const SurfacePoint& x) {
    SurfacePoint am{g.alpha_minus, 0, -1}, ap{g.alpha_plus, 0, +1};
    auto on1 = [](const SurfacePoint& p) { return p.is_edge() || p.sheet == 1; };
    auto on2 = [](const SurfacePoint& p) { return p.is_edge() || p.sheet == 2; };
    auto interior = [](const SurfacePoint& p, int j) { return !p.is_edge() && p.sheet == j; };
    auto same = [](const SurfacePoint& p, const SurfacePoint& q) {
        if (p.is_edge() || q.is_edge()) return p.edge == q.edge;
        return p.sheet == q.sheet && p.lambda == q.lambda;
    };
    std::function<bool(const SurfacePoint&, const SurfacePoint&)> arc = [&](const SurfacePoint& p,
                                                                            const SurfacePoint& q) {
        if (on1(p) && on1(q) && p.lambda <= q.lambda)
            return interior(x, 1) && x.lambda > p.lambda && x.lambda < q.lambda;
        if (on2(p) && on2(q) && q.lambda <= p.lambda)
            return interior(x, 2) && x.lambda > q.lambda && x.lambda < p.lambda;
        if ((p.edge < 0 || interior(p, 1)) && (q.edge < 0 || interior(q, 2)) && !same(p, q))
            return arc(p, ap) || same(x, ap) || arc(ap, q);
        if ((p.edge > 0 || interior(p, 2)) && (q.edge > 0 || interior(q, 1)) && !same(p, q))
            return arc(p, am) || same(x, am) || arc(am, q);
        // both interior on the same sheet, running against the sheet orientation
        SurfacePoint ps = star(p);
        return arc(p, ps) || same(x, ps) || arc(ps, q);
    };
    return arc(a, b);
}

GapInfo gap_of(const Potential& v, int n) { return find_gap(band_edges(v, -12, 12), n); }

} // namespace

TEST_CASE("star is an involution fixing the edges") {
    SurfacePoint p{1.5, 1, 0};
    CHECK(star(p).sheet == 2);
    CHECK(star(star(p)).sheet == 1);
    SurfacePoint e{2.0, 0, 1};
    CHECK(star(e).edge == 1);
    CHECK(star(e).lambda == 2.0);
}

TEST_CASE("circle angle round trip") {
    GapInfo g;
    g.alpha_minus = 2.0;
    g.alpha_plus = 4.5;
    CHECK(to_angle(g, {2.0, 0, -1}) == 0.0);
    CHECK(to_angle(g, {4.5, 0, 1}) == kPi);
    for (int i = 1; i < 1000; ++i) {
        double th = 2 * kPi * i / 1000.0;
        if (std::abs(th - kPi) < 1e-3) continue;
        auto p = from_angle(g, th);
        CHECK(p.sheet == (th < kPi ? 1 : 2));
        CHECK(std::abs(to_angle(g, p) - th) < 1e-12 / std::max(1e-3, std::abs(std::sin(th))));
    }
    CHECK(from_angle(g, 2 * kPi).edge == -1);
    CHECK(wrap_angle(-0.5) == doctest::Approx(2 * kPi - 0.5));
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - 2 * kPi));
}

TEST_CASE("arc membership agrees with the case definition") {
    GapInfo g;
    g.alpha_minus = -1.0;
    g.alpha_plus = 3.0;
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<int> slot(1, 7);
    // coarse lattice makes coincidences and reversed orders frequent
    auto draw = [&]() -> SurfacePoint {
        int k = kind(rng);
        if (k == 0) return {g.alpha_minus, 0, -1};
        if (k == 1) return {g.alpha_plus, 0, 1};
        return {g.alpha_minus + 0.5 * slot(rng), k - 1, 0};
    };
    int disagreements = 0;
    for (int i = 0; i < 1000; ++i) {
        auto a = draw(), b = draw(), x = draw();
        if (arc_contains(g, a, b, x) != arc_by_cases(g, a, b, x)) ++disagreements;
        bool same_ax = to_angle(g, a) == to_angle(g, x), same_bx = to_angle(g, b) == to_angle(g, x);
        if (!same_ax && !same_bx && to_angle(g, a) != to_angle(g, b))
            CHECK(arc_contains(g, a, b, x) != arc_contains(g, b, a, x));
    }
    CHECK(disagreements == 0);
    SurfacePoint mid{1.0, 1, 0};
    CHECK(arc_contains(g, {-1, 0, -1}, {3, 0, 1}, mid));
    CHECK_FALSE(arc_contains(g, mid, mid, {2.0, 1, 0}));
}

TEST_CASE("edge coordinate") {
    GapInfo g;
    g.alpha_minus = 1.0;
    g.alpha_plus = 2.0;
    for (double th : {0.1, 1.0, 2.0, 3.0, 3.5, 5.0, 6.2}) {
        double lam = g.mid() - 0.5 * g.width() * std::cos(th);
        double zp = edge_z(g, 1, th), zm = edge_z(g, -1, th);
        CHECK(lam == doctest::Approx(g.alpha_plus - zp * zp));
        CHECK(lam == doctest::Approx(g.alpha_minus + zm * zm));
        CHECK((zp > 0) == (th < kPi));
        CHECK((zm > 0) == (th < kPi));
        CHECK(edge_z_rate(g, 1, th) == doctest::Approx(testing::central_diff([&](double a) { return edge_z(g, 1, a); }, th, 1e-4)));
        CHECK(edge_z_rate(g, -1, th) == doctest::Approx(testing::central_diff([&](double a) { return edge_z(g, -1, a); }, th, 1e-4)));
    }
}

TEST_CASE("sheeted b: edges, sheet symmetry, algebraic identity") {
    auto v = Potential::two_step(2.0);
    for (int n : {-1, 1}) {
        auto g = gap_of(v, n);
        CHECK(b_sheeted(v, g, {g.alpha_minus, 0, -1}) == 0.0);
        CHECK(b_sheeted(v, g, {g.alpha_plus, 0, 1}) == 0.0);
        for (int i = 1; i < 50; ++i) {
            double lam = g.alpha_minus + g.width() * i / 50.0;
            SurfacePoint p{lam, 1, 0};
            double b1 = b_sheeted(v, g, p), b2 = b_sheeted(v, g, star(p));
            CHECK(std::abs(b1 + b2) < 1e-12);
            auto m = monodromy(v, lam);
            double expect = (n % 2 == 0 ? 1.0 : -1.0) * std::sqrt(m.delta() * m.delta() - 1);
            CHECK(b1 == doctest::Approx(expect).epsilon(1e-9));
            CHECK(std::abs(m.a() * m.a() - b1 * b1 + m.phi1() * m.theta2()) < 1e-9);
        }
    }
}

TEST_CASE("b along the circle: derivative matches finite differences") {
    auto v = Potential::two_step(2.0);
    auto g = gap_of(v, 1);
    auto bb = [&](double th) {
        double lam = g.mid() - 0.5 * g.width() * std::cos(th);
        return b_on_circle(g, th, monodromy(v, lam)).b;
    };
    for (double th : {1e-3, 0.3, 1.5, 3.1, 3.3, 4.7, 6.2}) {
        double lam = g.mid() - 0.5 * g.width() * std::cos(th);
        auto cb = b_on_circle(g, th, monodromy(v, lam));
        CHECK(cb.db == doctest::Approx(testing::central_diff(bb, th, 1e-4)).epsilon(1e-6));
        CHECK(cb.dlambda == doctest::Approx(0.5 * g.width() * std::sin(th)));
    }
}

TEST_CASE("small-z slope of b matches the effective mass") {
    auto v = Potential::two_step(2.0);
    for (int n : {-1, 1}) {
        auto g = gap_of(v, n);
        for (int edge : {-1, 1}) {
            double mass = edge > 0 ? g.mass_plus : g.mass_minus;
            double alpha = edge > 0 ? g.alpha_plus : g.alpha_minus;
            double sxy = 0, sxx = 0;
            for (int k = 1; k <= 10; ++k) {
                double z = 1e-3 * k;
                double b = b_sheeted(v, g, {alpha - edge * z * z, 1, 0});
                sxy += z * b;
                sxx += z * z;
            }
            double par = n % 2 == 0 ? 1.0 : -1.0;
            CHECK(par * sxy / sxx == doctest::Approx(std::sqrt(2 * std::abs(mass))).epsilon(0.01));
        }
    }
}

TEST_CASE("Weyl functions: symmetry, product identity, monotonicity, poles") {
    auto v = Potential::two_step(2.0);
    for (int n : {-1, 1}) {
        auto g = gap_of(v, n);
        for (double t : {0.0, 0.13, 0.4, 0.71}) {
            auto mu = dirichlet_point(v, g, t);
            for (int i = 1; i < 60; ++i) {
                double lam = g.alpha_minus + g.width() * i / 60.0;
                if (std::abs(lam - mu.lambda) < 1e-3 * g.width()) continue;
                SurfacePoint p{lam, 1, 0};
                auto mp = m_plus(v, g, p, t), mm = m_minus(v, g, p, t);
                auto mps = m_plus(v, g, star(p), t);
                REQUIRE_FALSE(mp.pole);
                REQUIRE_FALSE(mm.pole);
                CHECK(mps.value == doctest::Approx(mm.value).epsilon(1e-10));
                auto m = monodromy(v, lam, t);
                CHECK(mp.value * mm.value == doctest::Approx(-m.theta2() / m.phi1()).epsilon(1e-9));
                double h = 1e-6 * g.width();
                double dmp = (m_plus(v, g, {lam + h, 1, 0}, t).value - m_plus(v, g, {lam - h, 1, 0}, t).value) / (2 * h);
                CHECK(dmp < 0);
                double dmm = (m_minus(v, g, {lam + h, 1, 0}, t).value - m_minus(v, g, {lam - h, 1, 0}, t).value) / (2 * h);
                CHECK(dmm > 0);
            }
            if (!mu.is_edge()) {
                CHECK(m_plus(v, g, mu, t).pole);
                auto m = monodromy(v, mu.lambda, t);
                CHECK(m.a() == doctest::Approx(-b_sheeted(v, g, mu)).epsilon(1e-8).scale(1e-8));
                CHECK_FALSE(m_minus(v, g, mu, t).pole);
            }
        }
    }
}

TEST_CASE("projective Weyl pair and its derivative") {
    auto v = Potential::two_step(2.0);
    auto g = gap_of(v, 1);
    double t = 0.3;
    auto s = v.shift(t);
    auto ratio = [&](double th, int br) {
        double lam = g.mid() - 0.5 * g.width() * std::cos(th);
        auto mono = monodromy(s, lam);
        auto p = m_projective(b_on_circle(g, th, mono), mono, br);
        return std::atan2(p.u, p.w);
    };
    for (int br : {1, -1}) {
        for (double th : {0.2, 1.1, 2.5, 3.6, 5.9}) {
            double lam = g.mid() - 0.5 * g.width() * std::cos(th);
            auto mono = monodromy(s, lam);
            auto p = m_projective(b_on_circle(g, th, mono), mono, br);
            double rate = (p.w * p.du - p.u * p.dw) / (p.u * p.u + p.w * p.w);
            auto f = [&](double a) { return std::remainder(ratio(a, br) - ratio(th, br), kPi); };
            CHECK(rate == doctest::Approx(testing::central_diff(f, th, 1e-4)).epsilon(1e-6));
            auto m = br > 0 ? m_plus(v, g, from_angle(g, th), t) : m_minus(v, g, from_angle(g, th), t);
            if (!m.pole) CHECK(p.u / p.w == doctest::Approx(m.value).epsilon(1e-9));
        }
    }
}

TEST_CASE("Bloch solutions decay in gaps and are quasi-periodic on bands") {
    auto v = Potential::two_step(2.0);
    auto g = gap_of(v, 1);
    for (double t : {0.0, 0.25}) {
        SurfacePoint p{g.mid(), 1, 0};
        auto norm = [&](double x, SurfacePoint q, int br) {
            auto y = bloch_solution(v, g, q, t, x, br);
            return std::hypot(y[0], y[1]);
        };
        double n5 = norm(5, p, 1), n10 = norm(10, p, 1), n15 = norm(15, p, 1);
        CHECK(n10 < n5);
        CHECK(n15 < n10);
        CHECK(n15 / n10 == doctest::Approx(n10 / n5).epsilon(1e-4));
        // psi_+-(lambda_*) = psi_-+(lambda)
        auto a = bloch_solution(v, g, star(p), t, 0.7, 1), b = bloch_solution(v, g, p, t, 0.7, -1);
        CHECK(a[0] == doctest::Approx(b[0]));
        CHECK(a[1] == doctest::Approx(b[1]));
        // on sheet 2 the same branch grows
        CHECK(norm(10, star(p), 1) > norm(5, star(p), 1));
    }
    auto band_lambda = 0.5 * (g.alpha_plus + find_gap(band_edges(v, -12, 12), 2).alpha_minus);
    for (int br : {1, -1}) {
        for (double x : {0.3, 1.7, 4.2}) {
            auto y0 = bloch_solution_band(v, band_lambda, 0.1, x, br);
            auto y1 = bloch_solution_band(v, band_lambda, 0.1, x + 1, br);
            double n0 = std::hypot(std::abs(y0[0]), std::abs(y0[1]));
            double n1 = std::hypot(std::abs(y1[0]), std::abs(y1[1]));
            CHECK(n1 == doctest::Approx(n0).epsilon(1e-9));
        }
    }
}
