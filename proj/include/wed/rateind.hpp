#pragma once

// Rate-independent WED functional over piecewise-constant trajectories,
// its minimisation, energetic-solution residuals and ordered pairs.

#include <string>
#include <vector>

#include "wed/energy.hpp"
#include "wed/newton.hpp"

namespace wed {

/// phi_t(u) = sum_i phit(u_i) h^d + a/2 sum_edges |grad u|^2 h^d - <h(t), u>,
/// psi(v) = sum_i |v_i| h^d, with phit(s) = sum_k poly[k] s^k.
struct RIProblem {
  GridPtr grid;
  std::vector<double> poly{0.0, 0.0, 0.5};
  double p = 2.0;
  double a = 0.0;
  TimeField h;
  double horizon = 1.0;
  int steps = 200;
  double epsilon = 0.01;
  Field initial;

  void validate() const;
  double dt() const { return horizon / steps; }
};

double ri_energy(const RIProblem& problem, std::span<const double> u, double t, const SliceSink* sink = nullptr);
double ri_dissipation(const RIProblem& problem, std::span<const double> v);

/// Weight of the jump u_n - u_{n-1}: e^{-(t_n - dt/2)/eps}.
double ri_jump_weight(double t, double dt, double eps);
/// Terminal coefficient: the discrete tail sum_{k > N} e^{-t_k/eps} dt.
double ri_terminal_weight(double T, double dt, double eps);

/// tau phi_T(u_N) + sum_n c_n eps psi(u_n - u_{n-1}) + sum_n e^{-t_n/eps} dt phi_{t_n}(u_n).
double wed_ri_value(const RIProblem& problem, const Trajectory& traj);

struct RIReport {
  bool converged = false;
  double value = 0.0;
  /// Largest violation of the per-knot sign condition.
  double stationarity = 0.0;
  int active_set_rounds = 0;
  int newton_iterations = 0;
  std::string message;
};

std::pair<Trajectory, RIReport> minimize_wed_ri(const RIProblem& problem, const Trajectory& init);

/// u_n = argmin_v psi(v - u_{n-1}) + phi_{t_n}(v).
std::pair<Trajectory, RIReport> incremental_solve(const RIProblem& problem);

struct EnergeticResiduals {
  double stability = 0.0;       ///< right limit: u_n tested against phi_{t_n}
  double stability_left = 0.0;  ///< left limit: u_{n-1} tested against phi_{t_n}
  double balance = 0.0;
  std::vector<double> stability_per_knot;
  std::vector<double> balance_per_knot;
};

EnergeticResiduals energetic_residuals(const Trajectory& traj, const RIProblem& problem);

struct RIContinuation {
  std::vector<double> schedule;
  std::vector<Trajectory> family;
  std::vector<RIReport> reports;
  bool complete = false;
};

RIContinuation ri_eps_continuation(const RIProblem& problem, const std::vector<double>& schedule);

/// I(u) + I(v) - I(u ^ v) - I(u v v)
double ri_submodularity(const RIProblem& problem, const Trajectory& u, const Trajectory& v);

struct RIOrderedPair {
  Trajectory u;
  Trajectory v;
  std::vector<double> schedule;
  std::vector<RIReport> reports_u;
  std::vector<RIReport> reports_v;
  std::vector<double> ordering_margins;
  double min_ordering_margin = 0.0;
  /// I(u) - I(u ^ v) and I(v) - I(u v v) per eps, before replacement
  std::vector<std::pair<double, double>> lattice_margins;
  bool complete = false;
};

RIOrderedPair ordered_ri_minimizers(const RIProblem& problem, const Field& u0, const Field& v0,
                                    const std::vector<double>& schedule);

}  // namespace wed
