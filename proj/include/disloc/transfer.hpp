#pragma once

#include <complex>

#include "disloc/mat2.hpp"
#include "disloc/potential.hpp"

namespace disloc {

// Solution of J y' + V y = lambda y over one constant piece of length h, with its lambda-derivative.
template <class T>
struct SegmentStep {
    Mat2<T> e;
    Mat2<T> de;
};

SegmentStep<double> segment_step(double q1, double q2, double lambda, double h);
Mat2<std::complex<double>> segment_exp(double q1, double q2, std::complex<double> lambda, double h);

// Fundamental matrix psi(x) = (theta, phi), psi(0) = I, for V(. + t). Any real x >= 0.
RMat2 fundamental(const Potential& v, double x, double lambda, double t = 0.0);
CMat2 fundamental(const Potential& v, double x, std::complex<double> lambda, double t = 0.0);

struct Monodromy {
    RMat2 psi;   // psi(1, lambda, t)
    RMat2 dpsi;  // d/dlambda psi(1, lambda, t)

    double delta() const { return 0.5 * psi.trace(); }
    double ddelta() const { return 0.5 * dpsi.trace(); }
    double theta1() const { return psi.a; }
    double phi1() const { return psi.b; }
    double theta2() const { return psi.c; }
    double phi2() const { return psi.d; }
    double a() const { return 0.5 * (psi.d - psi.a); }
    double da() const { return 0.5 * (dpsi.d - dpsi.a); }
};

// Monodromy of an already shifted potential.
Monodromy monodromy(const Potential& shifted, double lambda);
Monodromy monodromy(const Potential& v, double lambda, double t);

// d/dt psi(1, lambda, t); at a breakpoint of V the right-sided value of V(t) is used.
RMat2 t_derivative(const Potential& v, double lambda, double t);

// int_0^1 |phi(x, lambda, t)|^2 dx
double phi_norm_sq(const Potential& v, double lambda, double t = 0.0);

// Continuous angle beta(x) with phi = rho (sin beta, cos beta), beta(0) = 0.
double prufer_angle(const Potential& v, double lambda, double t = 0.0, double x = 1.0);

} // namespace disloc
