#include "disloc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "disloc/error.hpp"

namespace disloc {

namespace {

double wrap01(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

// Breakpoints closer than this are merged (floating-point residue of shifts).
constexpr double kMergeTol = 1e-13;

} // namespace

Potential::Potential(std::vector<double> breakpoints, std::vector<double> q1, std::vector<double> q2)
    : bp_(std::move(breakpoints)), q1_(std::move(q1)), q2_(std::move(q2)) {
    require(!bp_.empty(), "invalid_potential", "potential needs at least one segment");
    require(bp_.size() == q1_.size() && bp_.size() == q2_.size(), "invalid_potential",
            "breakpoints, q1 and q2 must have equal length");
    require(bp_[0] == 0.0, "invalid_potential", "first breakpoint must be 0");
    for (std::size_t i = 0; i < bp_.size(); ++i) {
        require(std::isfinite(bp_[i]) && std::isfinite(q1_[i]) && std::isfinite(q2_[i]),
                "invalid_potential", "non-finite potential data");
        if (i > 0)
            require(bp_[i] > bp_[i - 1], "invalid_potential", "breakpoints must increase strictly");
    }
    require(bp_.back() < 1.0, "invalid_potential", "breakpoints must lie in [0,1)");
}

std::size_t Potential::segment_at(double x) const {
    double y = wrap01(x);
    auto it = std::upper_bound(bp_.begin(), bp_.end(), y);
    return static_cast<std::size_t>(it - bp_.begin()) - 1;
}

std::pair<double, double> Potential::value_at(double x) const {
    std::size_t i = segment_at(x);
    return {q1_[i], q2_[i]};
}

double Potential::breakpoint_distance(double x) const {
    double y = wrap01(x);
    double d = std::min(y, 1.0 - y);
    for (double b : bp_) d = std::min(d, std::abs(y - b));
    return d;
}

Potential Potential::shift(double t) const {
    double s = wrap01(t);
    std::vector<std::pair<double, std::size_t>> pts;
    pts.reserve(bp_.size() + 1);
    for (std::size_t i = 0; i < bp_.size(); ++i) {
        double b = wrap01(bp_[i] - s);
        if (1.0 - b < kMergeTol) b = 0.0;
        pts.emplace_back(b, i);
    }
    std::sort(pts.begin(), pts.end());
    if (pts.front().first > kMergeTol) pts.insert(pts.begin(), {0.0, segment_at(s)});
    std::vector<double> nb, n1, n2;
    for (auto& [b, i] : pts) {
        if (!nb.empty() && b - nb.back() < kMergeTol) {
            // keep the right-sided value
            n1.back() = q1_[i];
            n2.back() = q2_[i];
            continue;
        }
        nb.push_back(nb.empty() ? 0.0 : b);
        n1.push_back(q1_[i]);
        n2.push_back(q2_[i]);
    }
    return Potential(std::move(nb), std::move(n1), std::move(n2));
}

bool Potential::is_even_class(double tol) const {
    std::vector<double> cuts = bp_;
    for (double b : bp_)
        if (b > 0) cuts.push_back(1.0 - b);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] - cuts[k] < kMergeTol) continue;
        double x = 0.5 * (cuts[k] + cuts[k + 1]);
        auto [a1, a2] = value_at(x);
        auto [b1, b2] = value_at(1.0 - x);
        if (std::abs(a1 - b1) > tol || std::abs(a2 + b2) > tol) return false;
    }
    return true;
}

double Potential::norm_p() const {
    double s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += length(i) * (q1_[i] * q1_[i] + q2_[i] * q2_[i]);
    return std::sqrt(s);
}

double Potential::norm_inf() const {
    double m = 0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, 2 * (q1_[i] * q1_[i] + q2_[i] * q2_[i]));
    return m;
}

Potential Potential::zero() { return constant(0.0, 0.0); }

Potential Potential::constant(double q1, double q2) { return Potential({0.0}, {q1}, {q2}); }

Potential Potential::two_step(double c, double m) { return Potential({0.0, 0.5}, {m, m}, {c, -c}); }

Potential Potential::edge_mass(double c, double delta, double c2) {
    require(delta > 0 && delta < 0.5, "invalid_potential", "edge width must lie in (0, 1/2)");
    return Potential({0.0, delta, 0.5, 1.0 - delta}, {c, 0.0, 0.0, c}, {c2, c2, -c2, -c2});
}

Potential Potential::sample(const std::function<std::pair<double, double>(double)>& f, std::size_t n) {
    require(n > 0, "invalid_argument", "sample needs at least one segment");
    std::vector<double> b(n), q1(n), q2(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = double(i) / double(n);
        auto [u, v] = f((i + 0.5) / double(n));
        q1[i] = u;
        q2[i] = v;
    }
    return Potential(std::move(b), std::move(q1), std::move(q2));
}

bool approx_equal(const Potential& a, const Potential& b, double tol) {
    std::vector<double> cuts = a.breakpoints();
    cuts.insert(cuts.end(), b.breakpoints().begin(), b.breakpoints().end());
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] - cuts[k] < 1e3 * tol) continue;
        double x = 0.5 * (cuts[k] + cuts[k + 1]);
        auto [a1, a2] = a.value_at(x);
        auto [b1, b2] = b.value_at(x);
        if (std::abs(a1 - b1) > tol || std::abs(a2 - b2) > tol) return false;
    }
    return true;
}

} // namespace disloc
