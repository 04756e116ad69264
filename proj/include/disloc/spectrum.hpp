#pragma once

#include <vector>

#include "disloc/potential.hpp"

namespace disloc {

// Point on the two-sheeted Riemann surface over a gap. sheet is 1 (physical) or 2;
// edge is -1 at alpha^-, +1 at alpha^+ and 0 elsewhere. Edge points have sheet 0.
struct SurfacePoint {
    double lambda = 0;
    int sheet = 1;
    int edge = 0;

    bool is_edge() const { return edge != 0; }
};

struct GapInfo {
    int n = 0;
    double alpha_minus = 0, alpha_plus = 0;
    SurfacePoint mu;  // Dirichlet point at t = 0
    double nu = 0;    // Neumann point at t = 0
    double mass_minus = 0, mass_plus = 0;
    bool closed = false;

    double width() const { return alpha_plus - alpha_minus; }
    double mid() const { return 0.5 * (alpha_minus + alpha_plus); }
};

struct Discriminant {
    double value;
    double derivative;
};

Discriminant discriminant(const Potential& v, double lambda);

// All gaps whose Dirichlet point lies in [lo, hi]. Throws if an end of the window sits inside a gap.
std::vector<GapInfo> band_edges(const Potential& v, double lo, double hi, int grid = 4000);

// Gap with index n among the gaps of [lo, hi]; throws if absent.
GapInfo find_gap(const std::vector<GapInfo>& gaps, int n);

// M = -Delta(alpha) Delta'(alpha) at both edges.
std::pair<double, double> effective_masses(const Potential& v, const GapInfo& gap);

// Zero of phi_1(1, ., t) in the closure of the gap, with its sheet.
SurfacePoint dirichlet_point(const Potential& v, const GapInfo& gap, double t);
// Zero of theta_2(1, ., t) in the closure of the gap.
double neumann_point(const Potential& v, const GapInfo& gap, double t);

// Real quasimomentum on a band: cos k = Delta, k = pi n at the edges of gap n.
double quasimomentum(const Potential& v, double lambda);

// Gap index from the Prufer angle at a Dirichlet point.
int gap_index(const Potential& v, double mu, double t = 0.0);

// Sheet (1 or 2) of a Dirichlet point in gap n, from the sign of a = (phi_2 - theta_1)/2 there.
int dirichlet_sheet(int n, double a);

} // namespace disloc
