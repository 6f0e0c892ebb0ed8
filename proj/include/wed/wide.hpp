#pragma once

// Weighted-Inertia-Dissipation-Energy functionals for the semilinear wave
// equation and for Lagrangian mechanics, their minimisation and the
// invariance checks for symmetry maps.

#include <optional>
#include <string>
#include <vector>

#include "wed/energy.hpp"
#include "wed/newton.hpp"

namespace wed {

/// rho u_tt + nu u_t - Lap u + F'(u) = 0, F(s) = sum_k poly[k] s^k.
struct WideWaveProblem {
  GridPtr grid;
  double rho = 1.0;
  double nu = 0.0;
  std::vector<double> poly;  ///< F; empty means F = 0
  double lambda = 0.0;       ///< declared lambda-convexity: F'' >= -lambda
  double p = 2.0;            ///< growth exponent (>= 2)
  double horizon = 1.0;
  int steps = 200;
  double epsilon = 0.05;
  Field u0;
  Field v0;

  void validate() const;
};

/// U(u) = 1/2 u.K u + b.u + sum_k radial[k] |u|^{2k}  (radial[0] ignored).
struct LagrangianPotential {
  std::vector<double> K;  ///< d x d row-major; empty means 0
  std::vector<double> b;  ///< empty means 0
  std::vector<double> radial;

  double value(std::span<const double> u) const;
};

/// M u_tt + nu u_t + grad U(u) = 0 in R^d.
struct LagrangianProblem {
  int d = 1;
  std::vector<double> M{1.0};  ///< d x d row-major, symmetric positive definite
  double nu = 0.0;
  LagrangianPotential U;
  double horizon = 1.0;
  int steps = 200;
  double epsilon = 0.05;
  std::vector<double> u0{1.0};
  std::vector<double> v0{0.0};

  void validate() const;
  /// The d coordinates as nodes of a points grid (cell volume 1).
  GridPtr grid() const;
  Field initial() const;
  Field velocity() const;
};

struct WideReport {
  MinimizeReport minimize;
  /// Curvature floor handed to the minimiser (the declared lambda of F; 0 for convex data).
  double lambda = 0.0;
  bool converged = false;
};

/// A trajectory shaped for the problem with both pins set and every slice
/// filled with the linear extrapolation u0 + t v0.
Trajectory wide_initial_guess(const WideWaveProblem& p);
Trajectory wide_initial_guess(const LagrangianProblem& p);

struct WideValueGrad {
  double value = 0.0;
  std::vector<double> grad;  ///< zero on both pinned slices
};

WideValueGrad wide_value_grad(const WideWaveProblem& p, const Trajectory& traj);
WideValueGrad wide_value_grad(const LagrangianProblem& p, const Trajectory& traj);

std::pair<Trajectory, WideReport> minimize_wide(const WideWaveProblem& p, const Trajectory& init,
                                                const MinimizeOptions& opt = {});
std::pair<Trajectory, WideReport> minimize_wide(const LagrangianProblem& p, const Trajectory& init,
                                                const MinimizeOptions& opt = {});

struct WideContinuation {
  std::vector<double> schedule;
  std::vector<Trajectory> family;
  std::vector<WideReport> reports;
  bool complete = false;
};

WideContinuation wide_eps_continuation(const WideWaveProblem& p, const std::vector<double>& schedule,
                                       const MinimizeOptions& opt = {});
WideContinuation wide_eps_continuation(const LagrangianProblem& p, const std::vector<double>& schedule,
                                       const MinimizeOptions& opt = {});

enum class WideMapKind { rigid, averaging, lagrangian_affine };

/// rigid: node permutation (reflection, rotation, torus translation);
/// averaging: mean along an axis; lagrangian_affine: R u = r u + v.
struct WideMap {
  WideMapKind kind = WideMapKind::rigid;
  NodePermutation perm;
  int axis = 0;
  std::vector<double> r;  ///< d x d row-major, orthogonal
  std::vector<double> v;  ///< shift

  static WideMap rigid(NodePermutation perm);
  static WideMap averaging(int axis);
  static WideMap lagrangian_affine(std::vector<double> r, std::vector<double> v);

  Field apply(const Field& u) const;
  /// Action on velocities: the linear part (r v for affine maps).
  Field apply_velocity(const Field& v0) const;
};

struct WideInvariantResult {
  Trajectory trajectory;
  WideContinuation continuation;
  double residual = 0.0;
  bool flagged = false;
};

/// Solves the eps schedule, then reports sup_t |R u(t) - u(t)|_inf. Throws
/// PreconditionError when R u0 != u0, R v0 != v0 or a hypothesis fails.
WideInvariantResult wide_invariant_solve(const WideWaveProblem& p, const WideMap& r,
                                         const std::vector<double>& schedule, const MinimizeOptions& opt = {});
WideInvariantResult wide_invariant_solve(const LagrangianProblem& p, const WideMap& r,
                                         const std::vector<double>& schedule, const MinimizeOptions& opt = {});

/// sup_t |R u(t) - u_R(t)|_inf where u_R solves the problem with data (R u0, R v0).
double wide_equivariance_residual(const LagrangianProblem& p, const WideMap& r, const std::vector<double>& schedule,
                                  const MinimizeOptions& opt = {});

/// 1/2 u'.M u' + U(u) per knot (forward differences; last knot repeats).
std::vector<double> hamiltonian_series(const LagrangianProblem& p, const Trajectory& u);

}  // namespace wed
