#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "disloc/dislocation.hpp"

namespace disloc {

using Json = nlohmann::ordered_json;

// {"breakpoints": [...], "q1": [...], "q2": [...]}
Potential potential_from_json(const Json& j);
Json to_json(const Potential& v);
Potential load_potential(const std::string& path);

Json to_json(const SurfacePoint& p);
Json to_json(const GapInfo& g);
Json to_json(const State& s);

// t, lambda_plus, sheet_plus, angle_plus, lambda_minus, sheet_minus, angle_minus, kind_plus, kind_minus
void write_track_csv(std::ostream& os, const Trajectory& tr);
Json track_summary(const GapInfo& gap, const Trajectory& tr);

} // namespace disloc
