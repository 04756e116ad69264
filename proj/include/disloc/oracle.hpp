#pragma once

#include <vector>

#include "disloc/spectrum.hpp"

namespace disloc {

// Brute-force check of the dislocated operator on the line: V on x < 0 and V(x + t) on x > 0.
// Solutions are shot in from -L and +L with fixed unit data, whole periods are applied by
// repeated squaring of the period map with renormalisation, and the two directions are
// compared by their Wronskian at the matching point.
struct OracleConfig {
    double periods = 1048576;   // L, in periods
    double match_point = 0.0;   // in [0, 1)
    double initial_angle = 0.3; // direction of the unit data at +-L
    int grid = 800;             // scan points across the gap
};

// Normalised Wronskian of the solutions decaying at -infinity and +infinity.
double decaying_match(const Potential& v, double t, double lambda, const OracleConfig& cfg = {});

// Eigenvalues of the dislocated operator inside the open gap.
std::vector<double> eigenvalue_oracle(const Potential& v, const GapInfo& gap, double t,
                                      const OracleConfig& cfg = {});

// Projections of the resonances: eigenvalues of the swapped dislocation (V(. + t), -t).
std::vector<double> resonance_oracle(const Potential& v, const GapInfo& gap, double t,
                                     const OracleConfig& cfg = {});

} // namespace disloc
