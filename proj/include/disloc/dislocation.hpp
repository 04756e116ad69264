#pragma once

#include <string>
#include <vector>

#include "disloc/surface.hpp"

namespace disloc {

enum class StateKind { eigenvalue, resonance, virtual_state };
const char* kind_name(StateKind k);

struct State {
    SurfacePoint point;
    double angle = 0;     // clockwise circle angle in [0, 2 pi)
    double residual = 0;  // |w| or |Gamma|, whichever the guard rule selects
    StateKind kind = StateKind::eigenvalue;
};

// w = m_+(., t) - m_-(., 0) and Gamma = 1/m_-(., 0) - 1/m_+(., t).
ExtReal w_fn(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t);
ExtReal gamma_fn(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t);

// States are the zeros of f = 2 atan m_+(., t) - 2 atan m_-(., 0) taken mod 2 pi.
// f is smooth across poles of either Weyl function, which is where w and Gamma switch roles.
class StateFunction {
public:
    StateFunction(const Potential& v, const GapInfo& gap, double t);

    struct Eval {
        double f;       // in [-pi, pi]
        double df;      // d f / d angle
        double dft;     // d f / d t at fixed angle
        Projective mp;  // m_+(., t)
        Projective mm;  // m_-(., 0)
        CircleB cb;
        double phi1_t, phi1_0;
    };
    Eval eval(double angle) const;
    double phase(double angle) const { return eval(angle).f; }
    double t() const { return t_; }
    double q1() const { return q1_; }  // V(t), right-sided
    double q2() const { return q2_; }
    const GapInfo& gap() const { return gap_; }

private:
    Potential v_;
    Potential shifted_;
    GapInfo gap_;
    double t_, q1_, q2_;
};

struct LocateOptions {
    int samples = 512;
    double edge_tol = 1e-7;  // angle distance classified as an edge (virtual state)
};

// Exactly two states per open gap; throws otherwise.
std::vector<State> locate_states(const Potential& v, const GapInfo& gap, double t,
                                 const LocateOptions& opt = {});

// g(z) = z^2 (q1 + lambda) - 2 z q2 - (q1 - lambda); m_+(lambda, .) solves m' = g(m).
double riccati_rhs(double z, double lambda, double q1, double q2);

// Time derivative of a state in the local chart: lambda away from the edges, z within
// 0.02 |gap| of alpha^+-; w form unless min(|phi_1(t)|, |phi_1(0)|) < 1e-4, then Gamma form.
struct DubrovinRate {
    int edge = 0;             // 0: lambda chart, +-1: z chart at alpha^+-
    bool gamma_form = false;
    double rate = 0;          // d lambda/dt or dz/dt
    double angle_rate = 0;    // d angle/dt from the phase function
};
DubrovinRate dubrovin_rhs(const Potential& v, const GapInfo& gap, double angle, double t);

// Derivatives of w and Gamma at a state in both charts, with S0, S1 and Omega there.
struct StateDerivatives {
    double w_lambda = 0, gamma_lambda = 0, w_z = 0, gamma_z = 0;
    bool w_finite = false, gamma_finite = false;
    double s0 = 0, s1 = 0, omega = 0;
    bool s0_defined = false, s1_defined = false;
};
StateDerivatives state_derivatives(const Potential& v, const GapInfo& gap, const State& s, double t);

// Sign identities for the derivative of w or Gamma at a state, in the chart that applies:
// lambda or z, w off mu(t) and Gamma at mu(t). Closed forms are compared where they exist.
struct SignCheck {
    std::string rule;         // "w_lambda", "gamma_lambda", "w_z" or "gamma_z"
    double value = 0;         // the derivative
    int expected_sign = 0;
    double closed_form = 0;   // 0 when the rule has none
    bool s_in_unit = true;    // S0 or S1 in (0, 1) where applicable
    bool ok = false;
};
SignCheck check_sign_lemma(const Potential& v, const GapInfo& gap, const State& s, double t);

struct TrackControl {
    int samples = 101;          // output grid over [t0, t1]
    double dt0 = 1e-3;
    double dt_max = 0.02;
    double dt_min = 1e-12;
    double max_angle_step = 0.39269908169872414;  // pi/8
    bool verify = true;         // cross-check every output sample against locate_states
};

struct TrackSample {
    double t;
    State plus, minus;
    double angle_plus, angle_minus;  // unwrapped
    double angle_mu;                 // unwrapped Dirichlet point angle
};

struct CollisionEvent {
    double t;
    int branch;  // +1 for lambda^+, -1 for lambda^-
    double lambda;
};

struct Trajectory {
    std::vector<TrackSample> samples;
    std::vector<CollisionEvent> collisions;
    double winding_plus = 0, winding_minus = 0, winding_mu = 0;  // revolutions over [t0, t1]
    int steps = 0, rejected = 0;
};

// lambda^+-(t) with lambda^+-(0) = alpha^+-, followed continuously from t = 0.
Trajectory track_states(const Potential& v, const GapInfo& gap, double t0, double t1,
                        const TrackControl& ctrl = {});

// Local behaviour of the state leaving an edge at t0.
struct AsymptoticCoefficients {
    int edge = 0;
    double alpha = 0;
    double t0 = 0;
    bool mu_at_edge = false;  // Dirichlet point sits at the edge at t0
    double kappa = 0;         // -+|2M|^{1/2} / (2 ||phi(., alpha, t0)||^2)
    double varkappa = 0;      // (-1)^n phi_1(1, alpha, 0) / (2 |2M|^{1/2})
    double slope = 0;         // z(t) ~ slope * int_{t0}^{t} g(tau) dtau
    double m_plus0 = 0;       // m_+(alpha, t0), used by the integrand when mu is elsewhere

    // int_{t0}^{t} of the integrand (q1 + alpha or g(m_+(alpha, t0), tau)).
    double integral(const Potential& v, double t) const;
    double predict(const Potential& v, double t) const { return slope * integral(v, t); }
    // Remainder scales Q, G and W.
    double q_scale(const Potential& v, double t) const;
    double g_scale(const Potential& v, double t) const;
    double w_scale(const Potential& v, double t) const;
};
AsymptoticCoefficients asymptotic_coefficients(const Potential& v, const GapInfo& gap, int edge,
                                               double t0 = 0.0);

// Q = V(. + t) and tau = -t: states of (Q, tau) sit at the mirrored points.
struct Swapped {
    Potential q;
    double tau;
};
Swapped swap_dislocation(const Potential& v, double t);

} // namespace disloc
