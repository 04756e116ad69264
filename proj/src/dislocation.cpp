#include "disloc/dislocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "disloc/error.hpp"
#include "disloc/roots.hpp"

namespace disloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

double cyc_dist(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

// d/d angle of atan2(u, w)
double phase_rate(const Projective& p) { return (p.w * p.du - p.u * p.dw) / (p.u * p.u + p.w * p.w); }

bool finite_m(const Projective& p) { return std::abs(p.w) > 1e-10 * std::abs(p.u); }
bool finite_inv(const Projective& p) { return std::abs(p.u) > 1e-10 * std::abs(p.w); }

double m_of(const Projective& p) { return p.u / p.w; }
double dm_of(const Projective& p) { return (p.du * p.w - p.u * p.dw) / (p.w * p.w); }
double inv_of(const Projective& p) { return p.w / p.u; }
double dinv_of(const Projective& p) { return (p.dw * p.u - p.w * p.du) / (p.u * p.u); }

// g(m, t) = m^2 (q1 + lambda) - 2 m q2 - (q1 - lambda) for m = u/w, scaled by w^2
double g_hom(const Projective& p, double q1, double q2, double lam) {
    return p.u * p.u * (q1 + lam) - 2 * p.u * p.w * q2 - p.w * p.w * (q1 - lam);
}

int nearest_edge(double angle) { return std::cos(angle) > 0 ? -1 : +1; }

State make_state(const GapInfo& gap, const StateFunction::Eval& e, double angle, double edge_tol) {
    State s;
    double th = wrap_angle(angle);
    if (cyc_dist(th, 0.0) < edge_tol) th = 0.0;
    if (cyc_dist(th, kPi) < edge_tol) th = kPi;
    s.angle = th;
    if (th == 0.0)
        s.point = {gap.alpha_minus, 0, -1};
    else if (th == kPi)
        s.point = {gap.alpha_plus, 0, +1};
    else
        s.point = from_angle(gap, th);
    s.kind = s.point.is_edge() ? StateKind::virtual_state
             : s.point.sheet == 1 ? StateKind::eigenvalue
                                  : StateKind::resonance;
    bool guard = std::min(std::abs(e.phi1_t), std::abs(e.phi1_0)) < 1e-4;
    bool w_ok = finite_m(e.mp) && finite_m(e.mm);
    bool g_ok = finite_inv(e.mp) && finite_inv(e.mm);
    double w = w_ok ? m_of(e.mp) - m_of(e.mm) : 0.0;
    double g = g_ok ? inv_of(e.mm) - inv_of(e.mp) : 0.0;
    if ((guard && g_ok) || !w_ok)
        s.residual = std::abs(g);
    else
        s.residual = std::abs(w);
    return s;
}

} // namespace

const char* kind_name(StateKind k) {
    switch (k) {
    case StateKind::eigenvalue: return "eigenvalue";
    case StateKind::resonance: return "resonance";
    case StateKind::virtual_state: return "virtual";
    }
    return "unknown";
}

StateFunction::StateFunction(const Potential& v, const GapInfo& gap, double t)
    : v_(v), shifted_(v.shift(t)), gap_(gap), t_(t) {
    require(!gap.closed, "closed_gap", fmt::format("gap {} is closed", gap.n));
    auto [q1, q2] = v.value_at(t);
    q1_ = q1;
    q2_ = q2;
}

StateFunction::Eval StateFunction::eval(double angle) const {
    Eval e;
    double th = wrap_angle(angle);
    double lam = gap_.mid() - 0.5 * gap_.width() * std::cos(th);
    if (th == 0.0) lam = gap_.alpha_minus;
    if (th == kPi) lam = gap_.alpha_plus;
    auto mt = monodromy(shifted_, lam);
    auto m0 = monodromy(v_, lam);
    e.cb = b_on_circle(gap_, th, m0);
    e.cb.lambda = lam;
    e.mp = m_projective(e.cb, mt, +1);
    e.mm = m_projective(e.cb, m0, -1);
    e.phi1_t = mt.phi1();
    e.phi1_0 = m0.phi1();
    double chi = 2 * std::atan2(e.mp.u, e.mp.w) - 2 * std::atan2(e.mm.u, e.mm.w);
    e.f = std::remainder(chi, kTwoPi);
    e.df = 2 * (phase_rate(e.mp) - phase_rate(e.mm));
    e.dft = 2 * g_hom(e.mp, q1_, q2_, lam) / (e.mp.u * e.mp.u + e.mp.w * e.mp.w);
    return e;
}

ExtReal w_fn(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t) {
    auto e = StateFunction(v, gap, t).eval(to_angle(gap, p));
    if (!finite_m(e.mp) || !finite_m(e.mm)) return ExtReal::infinity();
    return {m_of(e.mp) - m_of(e.mm), false};
}

ExtReal gamma_fn(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t) {
    auto e = StateFunction(v, gap, t).eval(to_angle(gap, p));
    if (!finite_inv(e.mp) || !finite_inv(e.mm)) return ExtReal::infinity();
    return {inv_of(e.mm) - inv_of(e.mp), false};
}

std::vector<State> locate_states(const Potential& v, const GapInfo& gap, double t, const LocateOptions& opt) {
    StateFunction sf(v, gap, t);
    double a1 = to_angle(gap, dirichlet_point(v, gap, t));
    double a2 = to_angle(gap, star(gap.mu));

    std::vector<double> roots;
    for (int attempt = 0; attempt < 5; ++attempt) {
        int n = opt.samples << attempt;
        double h = kTwoPi / n;
        std::vector<double> grid;
        grid.reserve(n + 64);
        for (int k = 0; k < n; ++k) grid.push_back(k * h);
        // the phase turns fast between nearby poles of m_+(., t) and m_-(., 0)
        for (double a : {a1, a2})
            for (double d : {-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5}) grid.push_back(wrap_angle(a + d * h));
        double gap12 = std::remainder(a2 - a1, kTwoPi);
        if (std::abs(gap12) < 4 * h)
            for (int k = 1; k < 32; ++k) grid.push_back(wrap_angle(a1 + gap12 * k / 32.0));
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end(), [](double x, double y) { return y - x < 1e-15; }),
                   grid.end());

        std::vector<double> f(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) f[k] = sf.phase(grid[k]);

        roots.clear();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            std::size_t k1 = (k + 1) % grid.size();
            double x0 = grid[k], x1 = k1 == 0 ? grid[0] + kTwoPi : grid[k1];
            if (std::abs(f[k]) < 1e-14) {
                roots.push_back(x0);
            } else if (f[k1] != 0 && (f[k] < 0) != (f[k1] < 0) && std::abs(f[k] - f[k1]) < kPi) {
                roots.push_back(bisect([&](double x) { return sf.phase(x); }, x0, x1, 1e-15));
            }
        }
        std::vector<double> uniq;
        for (double r : roots) {
            r = wrap_angle(r);
            bool dup = false;
            for (double u : uniq) dup = dup || cyc_dist(u, r) < 1e-9;
            if (!dup) uniq.push_back(r);
        }
        roots = uniq;
        if (roots.size() == 2) break;
        spdlog::debug("gap {} t={}: {} states at {} samples, refining", gap.n, t, roots.size(), n);
    }
    require(roots.size() == 2, "state_count",
            fmt::format("found {} states in gap {} at t = {}", roots.size(), gap.n, t));

    std::vector<State> out;
    for (double r : roots) out.push_back(make_state(gap, sf.eval(r), r, opt.edge_tol));
    std::sort(out.begin(), out.end(), [](const State& x, const State& y) { return x.angle < y.angle; });
    return out;
}

DubrovinRate dubrovin_rhs(const Potential& v, const GapInfo& gap, double angle, double t) {
    StateFunction sf(v, gap, t);
    auto e = sf.eval(angle);
    DubrovinRate r;
    r.angle_rate = -e.dft / e.df;
    double lam = e.cb.lambda;
    double guard_band = 0.02 * gap.width();
    if (lam - gap.alpha_minus < guard_band) r.edge = -1;
    if (gap.alpha_plus - lam < guard_band) r.edge = +1;
    double chart = r.edge == 0 ? e.cb.dlambda : edge_z_rate(gap, r.edge, angle);
    r.gamma_form = std::min(std::abs(e.phi1_t), std::abs(e.phi1_0)) < 1e-4;
    if (r.gamma_form) {
        // Gamma = 1/m_-(., 0) - 1/m_+(., t), d/dt Gamma = g / m_+^2
        double gm = g_hom(e.mp, sf.q1(), sf.q2(), lam) / (e.mp.u * e.mp.u);
        double dgamma = (dinv_of(e.mm) - dinv_of(e.mp)) / chart;
        r.rate = -gm / dgamma;
    } else {
        double g = g_hom(e.mp, sf.q1(), sf.q2(), lam) / (e.mp.w * e.mp.w);
        double dw = (dm_of(e.mp) - dm_of(e.mm)) / chart;
        r.rate = -g / dw;
    }
    return r;
}

StateDerivatives state_derivatives(const Potential& v, const GapInfo& gap, const State& s, double t) {
    StateFunction sf(v, gap, t);
    auto e = sf.eval(s.angle);
    StateDerivatives d;
    double lam_rate = e.cb.dlambda;
    double z_rate = edge_z_rate(gap, nearest_edge(s.angle), s.angle);
    d.w_finite = finite_m(e.mp) && finite_m(e.mm);
    if (d.w_finite) {
        double dw = dm_of(e.mp) - dm_of(e.mm);
        d.w_lambda = lam_rate != 0 ? dw / lam_rate : 0.0;
        d.w_z = dw / z_rate;
    }
    d.gamma_finite = finite_inv(e.mp) && finite_inv(e.mm);
    if (d.gamma_finite) {
        double dg = dinv_of(e.mm) - dinv_of(e.mp);
        d.gamma_lambda = lam_rate != 0 ? dg / lam_rate : 0.0;
        d.gamma_z = dg / z_rate;
    }
    double lam = e.cb.lambda;
    auto mt = monodromy(v, lam, t);
    auto m0 = monodromy(v, lam);
    double den0 = mt.phi1() + m0.phi1();
    d.s0_defined = std::abs(den0) > 1e-12;
    if (d.s0_defined) d.s0 = mt.phi1() / den0;
    double den1 = mt.dpsi.b + m0.dpsi.b;
    d.s1_defined = std::abs(den1) > 1e-12;
    if (d.s1_defined) d.s1 = mt.dpsi.b / den1;
    d.omega = (1 - mt.phi2() * mt.phi2()) / phi_norm_sq(v, lam, t);
    return d;
}

double riccati_rhs(double z, double lambda, double q1, double q2) {
    return z * z * (q1 + lambda) - 2 * z * q2 - (q1 - lambda);
}

SignCheck check_sign_lemma(const Potential& v, const GapInfo& gap, const State& s, double t) {
    auto d = state_derivatives(v, gap, s, t);
    double th_mu = to_angle(gap, dirichlet_point(v, gap, t));
    bool at_mu = !d.w_finite || cyc_dist(th_mu, s.angle) < 1e-9;
    SignCheck c;
    if (s.point.is_edge()) {
        int e = s.point.edge;
        c.expected_sign = e;
        auto ac = asymptotic_coefficients(v, gap, e, t);
        if (at_mu) {
            c.rule = "gamma_z";
            c.value = d.gamma_z;
            c.s_in_unit = d.s1_defined && d.s1 > 0 && d.s1 < 1;
            if (d.s1_defined) c.closed_form = -1.0 / (2 * ac.kappa * d.s1);
        } else {
            c.rule = "w_z";
            c.value = d.w_z;
            c.s_in_unit = d.s0_defined && d.s0 > 0 && d.s0 < 1;
            if (d.s0_defined) c.closed_form = -1.0 / (2 * ac.varkappa * d.s0);
        }
    } else {
        c.expected_sign = s.point.sheet == 1 ? -1 : 1;
        if (at_mu) {
            c.rule = "gamma_lambda";
            c.value = d.gamma_lambda;
            c.s_in_unit = d.s1_defined && d.s1 > 0 && d.s1 < 1;
            if (d.s1_defined) c.closed_form = -1.0 / (d.omega * d.s1);
        } else {
            c.rule = "w_lambda";
            c.value = d.w_lambda;
            // no S0 bound here: phi_1(1, ., t) and phi_1(1, ., 0) may differ in sign inside the gap
        }
    }
    bool sign_ok = c.value * c.expected_sign > 0;
    bool form_ok = c.closed_form == 0 ||
                   std::abs(c.value - c.closed_form) <= 1e-6 * std::max(1.0, std::abs(c.closed_form));
    c.ok = sign_ok && form_ok && c.s_in_unit;
    return c;
}

namespace {

bool newton(const StateFunction& sf, double& th) {
    double x = th;
    for (int it = 0; it < 50; ++it) {
        auto e = sf.eval(x);
        if (std::abs(e.f) < 1e-14) {
            th = x;
            return true;
        }
        double step = -e.f / e.df;
        if (!std::isfinite(step)) return false;
        step = std::clamp(step, -0.05, 0.05);
        x += step;
        if (std::abs(step) < 1e-15) break;
    }
    if (std::abs(sf.phase(x)) < 1e-11) {
        th = x;
        return true;
    }
    return false;
}

struct Tracker {
    const Potential& v;
    const GapInfo& gap;
    const TrackControl& ctrl;
    double t = 0, dt;
    double th_plus = kPi, th_minus = 0, th_mu;
    int successes = 0;
    Trajectory* out = nullptr;

    Tracker(const Potential& v_, const GapInfo& g, const TrackControl& c)
        : v(v_), gap(g), ctrl(c), dt(c.dt0), th_mu(to_angle(g, g.mu)) {}

    void record_collision(double t_old, double t_new, double d_old, double d_new, int branch, double th) {
        if (!out) return;
        if (std::abs(d_old) > 1.0 || std::abs(d_new) > 1.0) return;
        // a state resting on mu(t) is one event, recorded when it arrives
        bool at_old = std::abs(d_old) < 1e-12, at_new = std::abs(d_new) < 1e-12;
        if (!at_old && (at_new || (d_old < 0) != (d_new < 0))) {
            double s = d_old == d_new ? 1.0 : d_old / (d_old - d_new);
            out->collisions.push_back({t_old + s * (t_new - t_old), branch, from_angle(gap, th).lambda});
        }
    }

    void advance(double target) {
        double dir = target >= t ? 1.0 : -1.0;
        while (std::abs(target - t) > 1e-15) {
            double h = std::min(dt, std::abs(target - t));
            StateFunction here(v, gap, t);
            auto ep = here.eval(th_plus), em = here.eval(th_minus);
            double rp = -ep.dft / ep.df, rm = -em.dft / em.df;
            double fastest = std::max(std::abs(rp), std::abs(rm));
            if (fastest * h > ctrl.max_angle_step) h = 0.9 * ctrl.max_angle_step / fastest;
            double t_new = std::abs(target - t) <= h ? target : t + dir * h;
            double hs = t_new - t;

            StateFunction there(v, gap, t_new);
            double pp = th_plus + hs * rp, pm = th_minus + hs * rm;
            double cp = pp, cm = pm;
            bool ok = newton(there, cp) && newton(there, cm);
            double tol_p = std::max(0.25 * std::abs(hs * rp), 1e-5);
            double tol_m = std::max(0.25 * std::abs(hs * rm), 1e-5);
            ok = ok && std::abs(cp - pp) < tol_p && std::abs(cm - pm) < tol_m;
            ok = ok && std::abs(cp - th_plus) <= ctrl.max_angle_step && std::abs(cm - th_minus) <= ctrl.max_angle_step;
            ok = ok && cyc_dist(cp, cm) > 1e-6;
            double mu_new = th_mu;
            if (ok) {
                double a = to_angle(gap, dirichlet_point(v, gap, t_new));
                double dmu = std::remainder(a - th_mu, kTwoPi);
                ok = std::abs(dmu) <= 2 * ctrl.max_angle_step;
                mu_new = th_mu + dmu;
            }
            if (!ok) {
                dt = 0.5 * h;
                successes = 0;
                if (out) ++out->rejected;
                require(dt >= ctrl.dt_min, "tracking_failed",
                        fmt::format("step size underflow in gap {} at t = {}", gap.n, t));
                continue;
            }
            record_collision(t, t_new, std::remainder(th_plus - th_mu, kTwoPi), std::remainder(cp - mu_new, kTwoPi),
                             +1, cp);
            record_collision(t, t_new, std::remainder(th_minus - th_mu, kTwoPi), std::remainder(cm - mu_new, kTwoPi),
                             -1, cm);
            th_plus = cp;
            th_minus = cm;
            th_mu = mu_new;
            t = t_new;
            if (out) ++out->steps;
            if (++successes >= 5) {
                dt = std::min(2 * dt, ctrl.dt_max);
                successes = 0;
            }
        }
    }
};

} // namespace

Trajectory track_states(const Potential& v, const GapInfo& gap, double t0, double t1, const TrackControl& ctrl) {
    require(!gap.closed, "closed_gap", fmt::format("gap {} is closed", gap.n));
    require(ctrl.samples >= 2, "invalid_argument", "need at least two output samples");
    Trajectory traj;
    Tracker tr(v, gap, ctrl);
    tr.advance(t0);
    tr.out = &traj;
    LocateOptions lo;
    for (int k = 0; k < ctrl.samples; ++k) {
        double tk = t0 + (t1 - t0) * k / (ctrl.samples - 1);
        tr.advance(tk);
        StateFunction sf(v, gap, tk);
        TrackSample s;
        s.t = tk;
        s.plus = make_state(gap, sf.eval(tr.th_plus), tr.th_plus, lo.edge_tol);
        s.minus = make_state(gap, sf.eval(tr.th_minus), tr.th_minus, lo.edge_tol);
        s.angle_plus = tr.th_plus;
        s.angle_minus = tr.th_minus;
        s.angle_mu = tr.th_mu;
        if (ctrl.verify) {
            auto found = locate_states(v, gap, tk, lo);
            auto matches = [&](double th) {
                return cyc_dist(th, found[0].angle) < 1e-6 || cyc_dist(th, found[1].angle) < 1e-6;
            };
            require(matches(tr.th_plus) && matches(tr.th_minus), "tracking_failed",
                    fmt::format("tracked states left the zero set in gap {} at t = {}", gap.n, tk));
        }
        traj.samples.push_back(s);
    }
    const auto& first = traj.samples.front();
    const auto& last = traj.samples.back();
    traj.winding_plus = (last.angle_plus - first.angle_plus) / kTwoPi;
    traj.winding_minus = (last.angle_minus - first.angle_minus) / kTwoPi;
    traj.winding_mu = (last.angle_mu - first.angle_mu) / kTwoPi;
    return traj;
}

namespace {

// int_a^b F(q1(tau), q2(tau)) dtau for the piecewise-constant V.
template <class F>
double integrate_pc(const Potential& v, double a, double b, F&& fn) {
    if (b < a) return -integrate_pc(v, b, a, fn);
    double acc = 0, x = a;
    while (x < b) {
        std::size_t i = v.segment_at(x);
        double base = std::floor(x);
        double end = base + v.right(i);
        if (end <= x) end = x + 1e-15;
        double e = std::min(end, b);
        acc += fn(v.q1(i), v.q2(i)) * (e - x);
        x = e;
    }
    return acc;
}

} // namespace

AsymptoticCoefficients asymptotic_coefficients(const Potential& v, const GapInfo& gap, int edge, double t0) {
    require(edge == 1 || edge == -1, "invalid_argument", "edge must be +1 or -1");
    require(!gap.closed, "closed_gap", fmt::format("gap {} is closed", gap.n));
    AsymptoticCoefficients c;
    c.edge = edge;
    c.t0 = t0;
    c.alpha = edge > 0 ? gap.alpha_plus : gap.alpha_minus;
    double mass = std::abs(edge > 0 ? gap.mass_plus : gap.mass_minus);
    auto sp = dirichlet_point(v, gap, t0);
    c.mu_at_edge = sp.edge == edge;
    double root2m = std::sqrt(2 * mass);
    c.kappa = -edge * root2m / (2 * phi_norm_sq(v, c.alpha, t0));
    auto m0 = monodromy(v, c.alpha);
    auto mt = monodromy(v, c.alpha, t0);
    c.varkappa = parity(gap.n) * m0.phi1() / (2 * root2m);
    if (c.mu_at_edge) {
        c.slope = 2 * c.kappa * mt.dpsi.b / (mt.dpsi.b + m0.dpsi.b);
    } else {
        c.slope = 2 * c.varkappa * mt.phi1() / (mt.phi1() + m0.phi1());
        c.m_plus0 = mt.a() / mt.phi1();  // b = 0 at the edge
    }
    return c;
}

double AsymptoticCoefficients::integral(const Potential& v, double t) const {
    double al = alpha, m = m_plus0;
    if (mu_at_edge) return integrate_pc(v, t0, t, [&](double q1, double) { return q1 + al; });
    return integrate_pc(v, t0, t,
                        [&](double q1, double q2) { return m * m * (q1 + al) - 2 * m * q2 - (q1 - al); });
}

double AsymptoticCoefficients::q_scale(const Potential& v, double t) const {
    double al = alpha;
    return std::abs(integrate_pc(v, t0, t, [&](double q1, double) { return std::abs(q1 + al); }));
}

double AsymptoticCoefficients::g_scale(const Potential& v, double t) const {
    double al = alpha, m = m_plus0;
    return std::abs(integrate_pc(
        v, t0, t, [&](double q1, double q2) { return std::abs(m * m * (q1 + al) - 2 * m * q2 - (q1 - al)); }));
}

double AsymptoticCoefficients::w_scale(const Potential& v, double t) const {
    double al = alpha;
    double sq = std::abs(integrate_pc(v, t0, t, [&](double q1, double q2) { return 2 * (q1 * q1 + q2 * q2 + al * al); }));
    return std::sqrt(std::abs(t - t0)) * std::sqrt(sq);
}

Swapped swap_dislocation(const Potential& v, double t) { return {v.shift(t), -t}; }

} // namespace disloc
