#include "disloc/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "disloc/error.hpp"

namespace disloc {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kAngleTol = 1e-13;

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

ExtReal to_ext(const Projective& p) {
    if (std::abs(p.w) <= 1e-10 * std::abs(p.u)) return ExtReal::infinity();
    return {p.u / p.w, false};
}

} // namespace

SurfacePoint star(const SurfacePoint& p) {
    if (p.is_edge()) return p;
    return {p.lambda, 3 - p.sheet, 0};
}

double wrap_angle(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r >= kTwoPi ? 0.0 : r;
}

double to_angle(const GapInfo& gap, const SurfacePoint& p) {
    if (p.edge < 0) return 0.0;
    if (p.edge > 0) return std::numbers::pi;
    double hw = 0.5 * gap.width();
    double c = std::clamp((gap.mid() - p.lambda) / hw, -1.0, 1.0);
    double th = std::acos(c);
    return p.sheet == 2 ? kTwoPi - th : th;
}

SurfacePoint from_angle(const GapInfo& gap, double angle) {
    double th = wrap_angle(angle);
    if (th < kAngleTol || kTwoPi - th < kAngleTol) return {gap.alpha_minus, 0, -1};
    if (std::abs(th - std::numbers::pi) < kAngleTol) return {gap.alpha_plus, 0, +1};
    double lam = gap.mid() - 0.5 * gap.width() * std::cos(th);
    return {lam, th < std::numbers::pi ? 1 : 2, 0};
}

bool arc_contains(const GapInfo& gap, const SurfacePoint& a, const SurfacePoint& b, const SurfacePoint& x) {
    double ta = to_angle(gap, a), tb = to_angle(gap, b), tx = to_angle(gap, x);
    double db = wrap_angle(tb - ta), dx = wrap_angle(tx - ta);
    if (db < kAngleTol || kTwoPi - db < kAngleTol) return false;
    return dx > kAngleTol && dx < db - kAngleTol;
}

double edge_z(const GapInfo& gap, int edge, double angle) {
    double r = std::sqrt(gap.width());  // sqrt(2 * half width)
    return edge > 0 ? r * std::cos(0.5 * wrap_angle(angle))
                    : r * std::sin(0.5 * std::remainder(angle, kTwoPi));
}

double edge_z_rate(const GapInfo& gap, int edge, double angle) {
    double r = std::sqrt(gap.width());
    return edge > 0 ? -0.5 * r * std::sin(0.5 * wrap_angle(angle))
                    : 0.5 * r * std::cos(0.5 * std::remainder(angle, kTwoPi));
}

CircleB b_on_circle(const GapInfo& gap, double angle, const Monodromy& mono) {
    // Delta^2 - 1 = r (lambda - alpha^-)(alpha^+ - lambda) with r > 0 smooth on the closed gap,
    // so b = (-1)^n half sin(angle) r^{1/2} vanishes exactly at the edges.
    double th = wrap_angle(angle);
    double hw = 0.5 * gap.width();
    double s = std::sin(th), c = std::cos(th);
    CircleB cb;
    cb.lambda = gap.mid() - hw * c;
    cb.dlambda = hw * s;
    double dm = 2 * hw * std::pow(std::sin(0.5 * th), 2);
    double dp = 2 * hw * std::pow(std::cos(0.5 * th), 2);
    double d = mono.delta(), dd = mono.ddelta();
    double f = d * d - 1.0, df = 2 * d * dd;
    double r, dr = 0;
    if (std::min(dm, dp) > 1e-6 * std::max(1.0, std::abs(cb.lambda))) {
        r = f / (dm * dp);
        dr = (df - r * (dp - dm)) / (dm * dp);
    } else {
        r = dm <= dp ? df / dp : -df / dm;
    }
    r = std::max(r, 0.0);
    double sr = std::sqrt(r);
    double k = parity(gap.n) * hw;
    cb.b = k * s * sr;
    cb.db = k * (c * sr + (sr > 0 ? s * dr * cb.dlambda / (2 * sr) : 0.0));
    return cb;
}

double b_sheeted(const Potential& v, const GapInfo& gap, const SurfacePoint& p) {
    if (p.is_edge()) return 0.0;
    double th = to_angle(gap, p);
    double lam = gap.mid() - 0.5 * gap.width() * std::cos(th);
    return b_on_circle(gap, th, monodromy(v, lam)).b;
}

Projective m_projective(const CircleB& cb, const Monodromy& mono, int branch) {
    double s = branch > 0 ? 1.0 : -1.0;
    double a = mono.a(), da = mono.da() * cb.dlambda;
    double phi1 = mono.phi1(), dphi1 = mono.dpsi.b * cb.dlambda;
    double th2 = mono.theta2(), dth2 = mono.dpsi.c * cb.dlambda;
    double b = s * cb.b, db = s * cb.db;
    // m = (a - b)/phi1 = -theta2/(a + b), with b -> -b for m_-
    Projective p1{a - b, phi1, da - db, dphi1};
    Projective p2{-th2, a + b, -dth2, da + db};
    double n1 = p1.u * p1.u + p1.w * p1.w, n2 = p2.u * p2.u + p2.w * p2.w;
    return n1 >= n2 ? p1 : p2;
}

ExtReal m_plus(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t) {
    double th = to_angle(gap, p);
    double lam = gap.mid() - 0.5 * gap.width() * std::cos(th);
    if (p.is_edge()) lam = p.lambda;
    auto mono = monodromy(v, lam, t);
    return to_ext(m_projective(b_on_circle(gap, th, mono), mono, +1));
}

ExtReal m_minus(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t) {
    double th = to_angle(gap, p);
    double lam = gap.mid() - 0.5 * gap.width() * std::cos(th);
    if (p.is_edge()) lam = p.lambda;
    auto mono = monodromy(v, lam, t);
    return to_ext(m_projective(b_on_circle(gap, th, mono), mono, -1));
}

std::array<double, 2> bloch_solution(const Potential& v, const GapInfo& gap, const SurfacePoint& p,
                                     double t, double x, int branch) {
    ExtReal m = branch > 0 ? m_plus(v, gap, p, t) : m_minus(v, gap, p, t);
    // Whole periods go through the Floquet multiplier; integrating a decaying solution is unstable.
    double k = std::floor(x);
    RMat2 psi = fundamental(v, x - k, p.lambda, t);
    RMat2 mono = fundamental(v, 1.0, p.lambda, t);
    std::array<double, 2> y = m.pole ? std::array<double, 2>{psi.b, psi.d}
                                     : std::array<double, 2>{psi.a + m.value * psi.b, psi.c + m.value * psi.d};
    double rho = m.pole ? mono.d : mono.a + m.value * mono.b;
    double f = std::pow(rho, k);
    return {f * y[0], f * y[1]};
}

std::array<std::complex<double>, 2> bloch_solution_band(const Potential& v, double lambda, double t,
                                                       double x, int branch) {
    auto mono = monodromy(v, lambda, t);
    double k = quasimomentum(v, lambda);
    int n = int(std::floor(k / std::numbers::pi - 1e-12)) + 1;
    double s = parity(n) * std::sqrt(std::max(0.0, 1.0 - mono.delta() * mono.delta()));
    std::complex<double> b(0.0, s);
    double sg = branch > 0 ? 1.0 : -1.0;
    double phi1 = mono.phi1();
    require(std::abs(phi1) > 1e-14, "degenerate_point", "phi_1 vanishes at this band point");
    std::complex<double> m = (mono.a() - sg * b) / phi1;
    RMat2 psi = fundamental(v, x, lambda, t);
    return {psi.a + m * psi.b, psi.c + m * psi.d};
}

} // namespace disloc
