#pragma once

// Lattice structure of the WED functional in potential form: submodularity
// margins, ordered minimiser pairs and the audit of the lattice replacement.

#include <string>
#include <vector>

#include "wed/wed.hpp"

namespace wed {

/// I(u) = sum_n [eps b_n dt psi(u') + a_n dt (phi1(u_n) - phi2(u_n, t_n) - <g(t_n), u_n>)]
/// with the weights of the linearised functional.
double potential_wed_value(const WedModel& model, const Trajectory& u, double eps);

/// I(u) + I(v) - I(u ^ v) - I(u v v) for u pinned at u0 <= v0 pinned at v0.
double submodularity_check(const WedProblem& problem, const Trajectory& u, const Trajectory& v);

struct LatticeAudit {
  double eps = 0.0;
  double value_u = 0.0;
  double value_v = 0.0;
  double value_min = 0.0;  ///< I(u ^ v)
  double value_max = 0.0;  ///< I(u v v)
  double margin_min = 0.0;  ///< I(u) - I(u ^ v) + tol, must be >= 0
  double margin_max = 0.0;  ///< I(v) - I(u v v) + tol, must be >= 0
  bool passed = true;
  std::string note;
};

LatticeAudit lattice_value_audit(const WedProblem& problem, const Trajectory& u, const Trajectory& v);

struct OrderedPair {
  Trajectory u;
  Trajectory v;
  std::vector<double> schedule;
  std::vector<LatticeAudit> audits;
  std::vector<FixedPointReport> reports_u;
  std::vector<FixedPointReport> reports_v;
  /// min over knots and nodes of v - u, per time slice of the final pair
  std::vector<double> ordering_margins;
  double min_ordering_margin = 0.0;
  bool complete = false;
  bool audit_passed = true;
};

/// Minimises from u0 and from v0 for every eps of the schedule and replaces
/// the pair by (u ^ v, u v v) before continuing with the next eps.
OrderedPair ordered_minimizers(const WedProblem& problem, const Field& u0, const Field& v0,
                               const std::vector<double>& schedule, const FixedPointOptions& opt = {});

/// min over slices and nodes of b - a (n = 0..N).
std::vector<double> ordering_margins(const Trajectory& a, const Trajectory& b);

void require_ordered(const Field& u0, const Field& v0, const char* what);

}  // namespace wed
