#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace disloc {

// Piecewise-constant 1-periodic potential V = [[q1, q2], [q2, -q1]].
// Segment i covers [breakpoints[i], breakpoints[i+1]) with the last one ending at 1.
class Potential {
public:
    Potential(std::vector<double> breakpoints, std::vector<double> q1, std::vector<double> q2);

    std::size_t size() const { return bp_.size(); }
    double left(std::size_t i) const { return bp_[i]; }
    double right(std::size_t i) const { return i + 1 < bp_.size() ? bp_[i + 1] : 1.0; }
    double length(std::size_t i) const { return right(i) - left(i); }
    double q1(std::size_t i) const { return q1_[i]; }
    double q2(std::size_t i) const { return q2_[i]; }

    const std::vector<double>& breakpoints() const { return bp_; }
    const std::vector<double>& q1_values() const { return q1_; }
    const std::vector<double>& q2_values() const { return q2_; }

    // Segment containing x mod 1 (right-continuous).
    std::size_t segment_at(double x) const;
    std::pair<double, double> value_at(double x) const;
    // Distance from x mod 1 to the nearest breakpoint (0 and 1 identified).
    double breakpoint_distance(double x) const;

    // x -> V(x + t)
    Potential shift(double t) const;
    // q1(x) = q1(1-x) and q2(x) = -q2(1-x) almost everywhere.
    bool is_even_class(double tol = 1e-12) const;
    // (int q1^2 + q2^2)^{1/2}
    double norm_p() const;
    // max 2(q1^2 + q2^2)
    double norm_inf() const;

    static Potential zero();
    static Potential constant(double q1, double q2 = 0.0);
    // q2 = c on [0, 1/2), -c on [1/2, 1); q1 = m
    static Potential two_step(double c, double m = 0.0);
    // q1 = c on [0, delta) and [1-delta, 1), q2 two-step with amplitude c2
    static Potential edge_mass(double c, double delta, double c2);
    // N uniform segments with midpoint values of f
    static Potential sample(const std::function<std::pair<double, double>(double)>& f, std::size_t n);

private:
    std::vector<double> bp_, q1_, q2_;
};

bool approx_equal(const Potential& a, const Potential& b, double tol);

} // namespace disloc
