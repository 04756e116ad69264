#pragma once

#include <array>
#include <complex>

#include "disloc/spectrum.hpp"
#include "disloc/transfer.hpp"

namespace disloc {

// Same projection, other sheet. Edges are fixed.
SurfacePoint star(const SurfacePoint& p);

// Clockwise angle on the circle gap: sheet 1 runs alpha^- -> alpha^+ over [0, pi],
// sheet 2 runs back over (pi, 2 pi); lambda = mid - half cos(angle).
double to_angle(const GapInfo& gap, const SurfacePoint& p);
SurfacePoint from_angle(const GapInfo& gap, double angle);
double wrap_angle(double angle);  // into [0, 2 pi)

// Open clockwise arc from a to b; empty when a == b.
bool arc_contains(const GapInfo& gap, const SurfacePoint& a, const SurfacePoint& b, const SurfacePoint& x);

// Local edge coordinate: lambda = alpha^+ - z^2 near alpha^+, lambda = alpha^- + z^2 near alpha^-,
// z > 0 on sheet 1.
double edge_z(const GapInfo& gap, int edge, double angle);
double edge_z_rate(const GapInfo& gap, int edge, double angle);  // dz/dangle

// b = (-1)^{n+j+1} |Delta^2 - 1|^{1/2} on sheet j.
double b_sheeted(const Potential& v, const GapInfo& gap, const SurfacePoint& p);

// Extended real: a finite value or a pole.
struct ExtReal {
    double value = 0;
    bool pole = false;

    static ExtReal infinity() { return {0.0, true}; }
};

// m_+ = (a - b)/phi_1 and m_- = (a + b)/phi_1 at (p, t).
ExtReal m_plus(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t);
ExtReal m_minus(const Potential& v, const GapInfo& gap, const SurfacePoint& p, double t);

// b and its derivative along the circle at the given angle; mono is the monodromy at lambda(angle).
struct CircleB {
    double lambda, dlambda;  // lambda(angle) and d lambda / d angle
    double b, db;
};
CircleB b_on_circle(const GapInfo& gap, double angle, const Monodromy& mono);

// Homogeneous pair (u, w) with m = u / w and derivatives along the circle. Well conditioned at
// poles and at removable points. branch +1 gives m_+, -1 gives m_-.
struct Projective {
    double u, w, du, dw;
};
Projective m_projective(const CircleB& cb, const Monodromy& mono, int branch);

// Bloch solutions theta + m_pm phi at x for a gap point; sheet-1 psi_+ decays as x -> +infinity.
std::array<double, 2> bloch_solution(const Potential& v, const GapInfo& gap, const SurfacePoint& p,
                                     double t, double x, int branch = +1);
// On a band, with b = i s and the branch (-1)^n i b(lambda + i0) <= 0 on band n.
std::array<std::complex<double>, 2> bloch_solution_band(const Potential& v, double lambda, double t,
                                                       double x, int branch = +1);

} // namespace disloc
