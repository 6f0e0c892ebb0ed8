#pragma once

// Maps R describing qualitative properties (symmetry, monotonicity, bounds),
// numerical checks of the invariance conditions and R-invariant solves.

#include <cstdint>
#include <string>
#include <vector>

#include "wed/field.hpp"
#include "wed/wed.hpp"

namespace wed {

enum class RMapKind {
  rigid,
  symmetric_decreasing,
  steiner,
  monotone,
  truncate_lower,
  truncate_upper,
  positive_part,
  negative_part,
  lv_clamp,
  averaging,
  compose
};

/// Which form of the drive inequality the map satisfies:
/// dilation   -- delta V_R in V_R and <F(v), Ru> >= <F(v), u> for R-invariant v;
/// pointwise  -- <F(u), Ru> >= <F(u), u> for every u (no dilation hypothesis).
enum class Branch { dilation, pointwise };

/// Declared algebraic type, tested by the property suites.
enum class MapAlgebra { idempotent, automorphism, none };

struct RMap {
  RMapKind kind = RMapKind::rigid;
  std::string label;
  NodePermutation perm;       ///< rigid
  Rearrangement rearrangement;  ///< symmetric_decreasing / steiner / monotone
  double level = 0.0;         ///< truncation M
  double K = 1.0;             ///< lv_clamp
  int axis = 0;               ///< averaging
  std::vector<RMap> members;  ///< compose: R1 o ... o Rk (Rk applied first)

  static RMap identity(const Grid& g);
  static RMap reflection(const Grid& g, int axis);
  static RMap rotation90(const Grid& g);
  static RMap translation(const Grid& g, std::array<int, 2> shift);
  static RMap symmetric_decreasing();
  static RMap steiner(int axis);
  static RMap monotone(int axis, int direction);
  static RMap truncate_lower(double M);
  static RMap truncate_upper(double M);
  static RMap positive_part();
  static RMap negative_part();
  static RMap lv_clamp(double K);
  static RMap averaging(int axis);
  static RMap compose(std::vector<RMap> members);

  Branch branch() const;
  MapAlgebra algebra() const;
  std::string name() const;
};

Field apply_rmap(const RMap& r, const Field& u);
/// Slice-wise application. With `require_fixed_initial`, a pinned u0 must
/// satisfy R u0 = u0 exactly (PreconditionError otherwise).
Trajectory apply_rmap(const RMap& r, const Trajectory& u, bool require_fixed_initial = true);

/// An element of V_R built from u: R u for idempotent maps, the orbit average
/// for automorphisms, member-wise for compositions.
Field project_rmap(const RMap& r, const Field& u);

/// Order of the permutation group generated by a rigid map (1 for identity).
int rigid_order(const NodePermutation& p);

struct Compatibility {
  std::string name;
  bool passed = true;
  std::string detail;
};

/// The hypotheses attached to the map (coefficient invariance, forcing
/// sign / symmetry, domain symmetry), evaluated on the problem data.
std::vector<Compatibility> compatibility(const RMap& r, const WedProblem& problem);
bool compatible(const std::vector<Compatibility>& c);

struct ConditionResult {
  std::string name;
  bool passed = true;
  bool skipped = false;
  double worst_margin = 0.0;
  int samples = 0;
  std::vector<double> counterexample;
  std::string note;
};

struct PropertyReport {
  std::vector<ConditionResult> conditions;
  std::uint64_t seed = 0;
  bool passed() const;
  const ConditionResult* find(const std::string& name) const;
};

/// (R1): convexity of the fixed-point set, W^{1,p} stability of R on
/// trajectories, and dilation stability for branch-(2.5) maps.
PropertyReport check_r1(const RMap& r, const GridPtr& grid, int components, int samples, std::uint64_t seed);

/// (R2.1)-(R2.3) on random and adversarial samples.
PropertyReport check_r2(const RMap& r, const WedProblem& problem, int samples, std::uint64_t seed);

struct InvariantSolveOptions {
  FixedPointOptions fixed_point;
  double tolerance = 1e-8;
  /// Run even when a compatibility predicate fails (unrestricted loop,
  /// invariance measured post hoc); used to exhibit violations.
  bool allow_incompatible = false;
  int self_check_samples = 0;
};

struct InvariantSolveResult {
  Trajectory trajectory;
  ContinuationResult continuation;
  double residual = 0.0;
  std::vector<double> residual_per_eps;
  bool flagged = false;
  bool projected = false;
  std::vector<Compatibility> compatibility;
  PropertyReport report;
};

/// sup_t |R u(t) - u(t)|_inf
double invariance_residual(const RMap& r, const Trajectory& u);

InvariantSolveResult invariant_solve(const WedProblem& problem, const RMap& r, const std::vector<double>& schedule,
                                     const InvariantSolveOptions& opt = {});

}  // namespace wed
