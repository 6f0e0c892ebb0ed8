#pragma once

// CSV writers for trajectories and JSON encoders for every report type.
// Numbers are printed in the shortest form that round-trips, so artifacts
// reload exactly and repeated runs compare byte for byte.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "wed/comparison.hpp"
#include "wed/qualitative.hpp"
#include "wed/rateind.hpp"
#include "wed/wide.hpp"

namespace wed {

using Json = nlohmann::ordered_json;

std::string format_number(double x);

/// "t,node_index,value"; node_index runs over all stored values.
void write_trajectory_csv(std::ostream& out, const Trajectory& u);
/// "t,node_index,value,jump_magnitude" with |u_n - u_{n-1}| per node (0 at t = 0).
void write_ri_trajectory_csv(std::ostream& out, const Trajectory& u);
/// "t,component_index,value"
void write_lagrangian_csv(std::ostream& out, const Trajectory& u);

/// "index,value" rows for a counterexample vector.
std::string counterexample_csv(const std::vector<double>& v);

Json to_json(const MinimizeReport& r);
Json to_json(const FixedPointReport& r);
Json to_json(const ContinuationResult& r);
Json to_json(const Compatibility& c);
Json to_json(const ConditionResult& c);
Json to_json(const PropertyReport& r);
Json to_json(const InvariantSolveResult& r);
Json to_json(const LatticeAudit& a);
Json to_json(const OrderedPair& p);
Json to_json(const RIReport& r);
Json to_json(const RIContinuation& r);
Json to_json(const RIOrderedPair& p);
Json to_json(const EnergeticResiduals& r);
Json to_json(const WideReport& r);
Json to_json(const WideContinuation& r);
Json to_json(const GrowthReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace wed
