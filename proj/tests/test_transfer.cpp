#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "disloc/transfer.hpp"
#include "support.hpp"

using namespace disloc;

TEST_CASE("free segment is a rotation") {
    for (double lam : {-3.0, -0.4, 0.0, 1.7, 9.0}) {
        for (double h : {0.0, 0.1, 0.73}) {
            auto e = segment_step(0, 0, lam, h).e;
            CHECK(e.a == doctest::Approx(std::cos(lam * h)));
            CHECK(e.b == doctest::Approx(-std::sin(lam * h)));
            CHECK(e.c == doctest::Approx(std::sin(lam * h)));
            CHECK(e.d == doctest::Approx(std::cos(lam * h)));
        }
    }
    auto id = segment_step(2.0, -1.0, 0.3, 0.0).e;
    CHECK(max_abs_diff(id, RMat2::identity()) == 0.0);
}

TEST_CASE("constant mass segment closed form") {
    double m = 1.0;
    for (double lam : {-3.0, -0.5, 0.2, 2.5}) {
        std::complex<double> w = std::sqrt(std::complex<double>(lam * lam - m * m));
        std::complex<double> c = std::cos(w), s = std::sin(w) / w;
        auto e = segment_step(m, 0, lam, 1.0).e;
        CHECK(e.a == doctest::Approx(c.real()));
        CHECK(e.b == doctest::Approx(-(lam + m) * s.real()));
        CHECK(e.c == doctest::Approx((lam - m) * s.real()));
        CHECK(e.d == doctest::Approx(c.real()));
    }
}

TEST_CASE("segment exponential is continuous through omega = 0") {
    // lambda^2 = q1^2 + q2^2 exactly, and close to it on either side
    double q1 = 0.6, q2 = 0.8;
    auto at = [&](double lam) { return segment_step(q1, q2, lam, 0.9); };
    auto z = at(1.0);
    for (double d : {1e-3, 1e-5, 1e-7}) {
        for (double s : {-1.0, 1.0}) {
            auto x = at(1.0 + s * d);
            CHECK(max_abs_diff(x.e, z.e) < 5 * d);
            CHECK(max_abs_diff(x.de, z.de) < 5 * d);
        }
    }
    // derivative across the series cutoff agrees with a finite difference
    for (double lam : {1.0, 1.0 + 3e-3, 1.0 + 1e-2, 1.05}) {
        double h = 1e-5;
        auto fd = (at(lam + h).e - at(lam - h).e) * (0.5 / h);
        CHECK(max_abs_diff(fd, at(lam).de) < 1e-8);
    }
}

TEST_CASE("fundamental matrix agrees with RK4 integration") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ul(-8, 8), ux(0.0, 1.0), ut(-1, 1);
    for (int k = 0; k < 20; ++k) {
        auto v = testing::random_potential(rng);
        double lam = ul(rng), x = 2 * ux(rng), t = ut(rng);
        auto psi = fundamental(v, x, lam, t);
        auto ref = testing::rk4_fundamental(v, x, lam, t);
        CHECK(max_abs_diff(psi, ref) < 1e-8);
    }
}

TEST_CASE("fundamental matrix basics") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ul(-10, 10), ux(0.0, 1.0), ut(-2, 2);
    for (int k = 0; k < 100; ++k) {
        auto v = testing::random_potential(rng);
        double lam = ul(rng), x = ux(rng), t = ut(rng);
        CHECK(max_abs_diff(fundamental(v, 0.0, lam, t), RMat2::identity()) == 0.0);
        // psi(1 + x) = psi(x) psi(1)
        auto lhs = fundamental(v, 1 + x, lam, t);
        auto rhs = fundamental(v, x, lam, t) * fundamental(v, 1.0, lam, t);
        CHECK(max_abs_diff(lhs, rhs) < 1e-10 * std::max(1.0, frobenius(lhs)));
        CHECK(std::abs(fundamental(v, 3 * x, lam, t).det() - 1) < 1e-10);
    }
    auto v0 = Potential::zero();
    auto r = fundamental(v0, 0.7, 2.0);
    CHECK(r.a == doctest::Approx(std::cos(1.4)));
    CHECK(r.b == doctest::Approx(-std::sin(1.4)));
}

TEST_CASE("complex fundamental matches the real one and obeys the growth bound") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ur(-10, 10), ui(-5, 5), ux(0, 1);
    for (int k = 0; k < 50; ++k) {
        auto v = testing::random_potential(rng);
        double lr = ur(rng), x = ux(rng);
        auto cr = fundamental(v, x, std::complex<double>(lr, 0.0));
        auto rr = fundamental(v, x, lr);
        CHECK(std::abs(cr.a - rr.a) < 1e-12);
        CHECK(std::abs(cr.b - rr.b) < 1e-12);
        std::complex<double> lam(lr, ui(rng));
        auto psi = fundamental(v, x, lam);
        CHECK(spectral_norm(psi) <= std::exp(v.norm_p() + std::abs(lam.imag()) * x) * (1 + 1e-8));
        CHECK(std::abs(psi.det() - 1.0) < 1e-9 * std::exp(2 * std::abs(lam.imag())));
    }
}

TEST_CASE("monodromy lambda derivative matches finite differences") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ul(-8, 8), ut(-1, 1);
    for (int k = 0; k < 30; ++k) {
        auto v = testing::random_potential(rng);
        double lam = ul(rng), t = ut(rng);
        auto f = [&](double l, int e) {
            auto p = monodromy(v, l, t).psi;
            return e == 0 ? p.a : e == 1 ? p.b : e == 2 ? p.c : p.d;
        };
        auto d = monodromy(v, lam, t).dpsi;
        double ex[4] = {d.a, d.b, d.c, d.d};
        for (int e = 0; e < 4; ++e)
            CHECK(testing::central_diff([&](double l) { return f(l, e); }, lam, 1e-3) ==
                  doctest::Approx(ex[e]).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("free monodromy") {
    auto v = Potential::zero();
    for (double lam : {-2.0, 0.3, 4.0}) {
        auto m = monodromy(v, lam, 0.37);
        CHECK(m.delta() == doctest::Approx(std::cos(lam)));
        CHECK(std::abs(m.a()) < 1e-14);
        CHECK(m.phi1() == doctest::Approx(-std::sin(lam)));
        CHECK(m.theta2() == doctest::Approx(std::sin(lam)));
        auto dt = t_derivative(v, lam, 0.37);
        CHECK(max_abs_diff(dt, RMat2::zero()) < 1e-14);
    }
}

TEST_CASE("monodromy conjugation and trace invariance in t") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ul(-8, 8), ut(-1.5, 1.5);
    for (int k = 0; k < 50; ++k) {
        auto v = testing::random_potential(rng);
        double lam = ul(rng), t = ut(rng);
        auto m0 = monodromy(v, lam, 0.0), mt = monodromy(v, lam, t);
        CHECK(std::abs(m0.delta() - mt.delta()) < 1e-10);
        double tt = t - std::floor(t);
        auto pt = fundamental(v, tt, lam);
        auto conj = pt * m0.psi * pt.adjugate();
        CHECK(max_abs_diff(conj, mt.psi) < 1e-9);
    }
}

TEST_CASE("t derivative matches finite differences and has opposite diagonal") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ul(-8, 8), ut(0, 1);
    int checked = 0;
    while (checked < 30) {
        auto v = testing::random_potential(rng);
        double lam = ul(rng), t = ut(rng);
        double h = 1e-5;
        if (v.breakpoint_distance(t) < 3 * h) continue;
        ++checked;
        auto d = t_derivative(v, lam, t);
        auto fd = (monodromy(v, lam, t + h).psi - monodromy(v, lam, t - h).psi) * (0.5 / h);
        double scale = std::max(1.0, frobenius(d));
        CHECK(max_abs_diff(d, fd) < 1e-6 * scale);
        CHECK(std::abs(d.trace()) < 1e-12 * scale);
    }
}

TEST_CASE("norm of phi by quadrature") {
    CHECK(phi_norm_sq(Potential::zero(), M_PI) == doctest::Approx(1.0));
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ul(-12, 12), ut(-1, 1);
    for (int k = 0; k < 10; ++k) {
        auto v = testing::random_potential(rng);
        double lam = ul(rng), t = ut(rng);
        // fine midpoint rule on the exact solution as the oracle
        int n = 20000;
        double ref = 0;
        for (int i = 0; i < n; ++i) {
            auto p = fundamental(v, (i + 0.5) / n, lam, t);
            ref += (p.b * p.b + p.d * p.d) / n;
        }
        CHECK(phi_norm_sq(v, lam, t) == doctest::Approx(ref).epsilon(1e-7));
    }
}

TEST_CASE("Prufer angle of the free system") {
    for (double lam : {-7.0, -1.0, 0.5, 3.3, 12.0})
        CHECK(prufer_angle(Potential::zero(), lam, 0.0) == doctest::Approx(-lam).epsilon(1e-12));
    CHECK(prufer_angle(Potential::zero(), 2.0, 0.0, 0.25) == doctest::Approx(-0.5));
}

TEST_CASE("Prufer angle decreases in lambda") {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 10; ++k) {
        auto v = testing::random_potential(rng);
        double prev = prufer_angle(v, -15.0);
        for (int i = 1; i <= 300; ++i) {
            double b = prufer_angle(v, -15.0 + 0.1 * i);
            REQUIRE(b < prev);
            prev = b;
        }
    }
}
