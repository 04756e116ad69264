#include "disloc/io.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "disloc/error.hpp"

namespace disloc {

Potential potential_from_json(const Json& j) {
    try {
        return Potential(j.at("breakpoints").get<std::vector<double>>(), j.at("q1").get<std::vector<double>>(),
                         j.at("q2").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid_potential", fmt::format("malformed potential JSON: {}", e.what()));
    }
}

Json to_json(const Potential& v) {
    return Json{{"breakpoints", v.breakpoints()}, {"q1", v.q1_values()}, {"q2", v.q2_values()}};
}

Potential load_potential(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), "io_error", fmt::format("cannot open {}", path));
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid_potential", fmt::format("{}: {}", path, e.what()));
    }
    return potential_from_json(j);
}

Json to_json(const SurfacePoint& p) {
    Json j;
    j["lambda"] = p.lambda;
    // edges close sheet 1 on the circle
    j["sheet"] = p.is_edge() ? 1 : p.sheet;
    j["edge"] = p.is_edge();
    return j;
}

Json to_json(const GapInfo& g) {
    Json j;
    j["n"] = g.n;
    j["alpha_minus"] = g.alpha_minus;
    j["alpha_plus"] = g.alpha_plus;
    j["mu"] = g.mu.lambda;
    j["mu_sheet"] = g.mu.is_edge() ? Json(g.mu.edge < 0 ? "edge_minus" : "edge_plus") : Json(g.mu.sheet);
    j["nu"] = g.nu;
    j["mass_minus"] = g.mass_minus;
    j["mass_plus"] = g.mass_plus;
    j["closed"] = g.closed;
    return j;
}

Json to_json(const State& s) {
    Json j = to_json(s.point);
    j["angle"] = s.angle;
    j["kind"] = kind_name(s.kind);
    j["residual"] = s.residual;
    return j;
}

namespace {

std::string sheet_str(const SurfacePoint& p) {
    if (p.edge < 0) return "edge_minus";
    if (p.edge > 0) return "edge_plus";
    return std::to_string(p.sheet);
}

} // namespace

void write_track_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,lambda_plus,sheet_plus,angle_plus,lambda_minus,sheet_minus,angle_minus,kind_plus,kind_minus\n";
    for (const auto& s : tr.samples) {
        os << fmt::format("{:.12g},{:.15g},{},{:.15g},{:.15g},{},{:.15g},{},{}\n", s.t, s.plus.point.lambda,
                          sheet_str(s.plus.point), s.plus.angle, s.minus.point.lambda, sheet_str(s.minus.point),
                          s.minus.angle, kind_name(s.plus.kind), kind_name(s.minus.kind));
    }
}

Json track_summary(const GapInfo& gap, const Trajectory& tr) {
    Json j;
    j["gap"] = to_json(gap);
    j["t0"] = tr.samples.front().t;
    j["t1"] = tr.samples.back().t;
    j["winding_plus"] = tr.winding_plus;
    j["winding_minus"] = tr.winding_minus;
    j["winding_mu"] = tr.winding_mu;
    Json ev = Json::array();
    for (const auto& c : tr.collisions)
        ev.push_back(Json{{"t", c.t}, {"state", c.branch > 0 ? "plus" : "minus"}, {"lambda", c.lambda}});
    j["collisions"] = ev;
    j["steps"] = tr.steps;
    j["rejected_steps"] = tr.rejected;
    return j;
}

} // namespace disloc
