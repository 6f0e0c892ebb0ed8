#pragma once

// Weighted-Energy-Dissipation functional over pinned trajectories, its
// minimisation, the fixed-point loop for state-dependent drives, epsilon
// continuation and the residual diagnostics.

#include <functional>
#include <optional>
#include <vector>

#include "wed/energy.hpp"
#include "wed/newton.hpp"

namespace wed {

struct WedProblem {
  GridPtr grid;
  int components = 1;
  DissipationSpec dissipation;
  EnergySpec energy1;  ///< convex part phi1
  EnergySpec energy2;  ///< concave power part and forcing h of phi2 (kind ignored)
  ReactionSpec reaction;
  GrowthCertificate certificate;
  double horizon = 1.0;
  int steps = 64;
  double epsilon = 0.1;
  Field initial;

  void validate() const;
  double dt() const { return horizon / steps; }
  /// True when F(v) = d phi2(v) + f(v) depends on v.
  bool state_dependent_drive() const;
};

/// Largest admissible T / eps (keeps every weight e^{-t/eps} representable).
inline constexpr double kMaxHorizonOverEps = 600.0;

/// Evaluators built once per problem (the fractional kernel is O(n^2)).
class WedModel {
 public:
  explicit WedModel(const WedProblem& p);

  const WedProblem& problem() const { return p_; }
  const ConvexEnergy& phi1() const { return phi1_; }
  const ConcaveEnergy& phi2() const { return phi2_; }
  const DissipationPotential& psi() const { return psi_; }
  /// Slots frozen in every time slice (Dirichlet boundary nodes).
  const std::vector<char>& frozen_nodes() const { return frozen_; }

  /// d phi1(u) as a nodal (L^2) representative.
  void dphi1(std::span<const double> u, std::span<double> out) const;
  /// d phi2(u, t) + f(u, t) as a nodal representative.
  void drive(std::span<const double> u, double t, std::span<double> out) const;

 private:
  WedProblem p_;
  ConvexEnergy phi1_;
  ConcaveEnergy phi2_;
  DissipationPotential psi_;
  std::vector<char> frozen_;
};

/// Weights of the discrete functional: energy terms of slot n use
/// e^{-t_n/eps}, the dissipation of interval (t_{n-1}, t_n] uses the
/// midpoint weight e^{-(t_n - dt/2)/eps}.
double energy_weight(double t, double eps);
double dissipation_weight(double t, double dt, double eps);

/// The WED functional I_{eps,w} restricted to trajectories pinned at u0.
class WedObjective : public Objective {
 public:
  WedObjective(const WedModel& model, const Trajectory& w, double eps);

  std::size_t size() const override { return slots_ * static_cast<std::size_t>(steps_ + 1); }
  double value_grad(std::span<const double> x, std::span<double> grad) const override;
  void hessian(std::span<const double> x, std::vector<Triplet>& out) const override;
  std::vector<char> frozen() const override;
  std::vector<double> gradient_scale() const override;

 private:
  const WedModel& model_;
  const Trajectory& w_;
  double eps_;
  int steps_;
  double dt_;
  std::size_t slots_;
};

struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;  ///< trajectory-shaped, zero in the pinned slot
};

ValueGrad wed_value_grad(const WedProblem& problem, const Trajectory& w, const Trajectory& traj);

/// Minimises I_{eps,w} starting from `init` (which must be pinned at u0).
std::pair<Trajectory, MinimizeReport> minimize_wed(const WedProblem& problem, const Trajectory& w,
                                                   const Trajectory& init, const MinimizeOptions& opt = {});

/// w = F(v) slice by slice.
Trajectory drive_of(const WedProblem& problem, const Trajectory& v);

struct FixedPointOptions {
  double theta = 0.5;
  double tol = 1e-8;
  int max_outer = 60;
  MinimizeOptions inner;
  /// Applied to each outer iterate before F is evaluated (invariance projection).
  std::function<void(Trajectory&)> project;
};

struct FixedPointReport {
  int outer_iterations = 0;
  std::vector<double> residuals;  // |S(u_k) - u_k| per outer iteration
  double theta = 0.5;
  bool converged = false;
  MinimizeReport last_inner;
  std::string message;
};

std::pair<Trajectory, FixedPointReport> fixed_point_solve(const WedProblem& problem, const FixedPointOptions& opt = {},
                                                         const std::optional<Trajectory>& warm = std::nullopt);

struct ContinuationResult {
  std::vector<double> schedule;
  std::vector<Trajectory> family;
  std::vector<FixedPointReport> reports;
  bool complete = false;
  const Trajectory& final() const { return family.back(); }
};

/// Geometric schedule, ratio 1/2, from min(T/5, 0.2) down to max(2 dt, 1e-3),
/// clipped so that T / eps <= kMaxHorizonOverEps.
std::vector<double> default_schedule(double horizon, int steps);

ContinuationResult eps_continuation(const WedProblem& problem, const std::vector<double>& schedule,
                                    const FixedPointOptions& opt = {});

struct ElResidual {
  std::vector<double> interior;  ///< per time index (0 and N unused)
  double interior_max = 0.0;
  double terminal = 0.0;
};

/// Discrete -eps (a(u'))' + a(u') + d phi1(u) - w with w = F(u) and the
/// terminal condition a(u'(T)) = 0.
ElResidual euler_lagrange_residual(const WedProblem& problem, const Trajectory& traj);

/// Discrete L^{p'}(0,T;L^{p'}) norm of a(u') + d phi1(u) - d phi2(u) - f(u).
double strong_solution_residual(const Trajectory& traj, const WedProblem& problem);

/// Implicit-Euler / incremental minimisation oracle on the same time mesh.
Trajectory reference_solve(const WedProblem& problem, const MinimizeOptions& opt = {});

/// (sum_n dt sum_i |a_i - b_i|^p h^d)^{1/p} over n = 1..N.
double trajectory_distance(const Trajectory& a, const Trajectory& b, double p = 2.0);
double trajectory_norm(const Trajectory& a, double p = 2.0);
double trajectory_sup_distance(const Trajectory& a, const Trajectory& b);

}  // namespace wed
