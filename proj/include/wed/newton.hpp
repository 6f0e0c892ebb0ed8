#pragma once

// Inner minimizer shared by the WED, WIDE and incremental solvers: damped
// Newton with a sparse LDLT factorisation, Levenberg shift and a strong-Wolfe
// line search.

#include <span>
#include <string>
#include <vector>

#include "wed/energy.hpp"

namespace wed {

class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t size() const = 0;
  /// Returns the value; fills `grad` when it is non-empty.
  virtual double value_grad(std::span<const double> x, std::span<double> grad) const = 0;
  virtual void hessian(std::span<const double> x, std::vector<Triplet>& out) const = 0;
  /// Coordinates that never move (pinned slots, Dirichlet nodes).
  virtual std::vector<char> frozen() const { return std::vector<char>(size(), 0); }
  /// Per-coordinate divisor applied to the gradient in the convergence test.
  virtual std::vector<double> gradient_scale() const { return std::vector<double>(size(), 1.0); }
};

struct MinimizeOptions {
  double gtol = 1e-8;
  int max_iter = 200;
  double c1 = 1e-4;
  double c2 = 0.9;
};

struct MinimizeReport {
  int iterations = 0;
  double value = 0.0;
  double grad_norm = 0.0;  ///< max-norm of the scaled gradient
  bool converged = false;
  double wall_seconds = 0.0;  ///< diagnostics only, never serialised
  std::string message;
};

MinimizeReport minimize(const Objective& obj, std::vector<double>& x, const MinimizeOptions& opt = {});

/// Scaled max-norm of the gradient used by `minimize`'s convergence test.
double scaled_gradient_norm(const Objective& obj, std::span<const double> x);

}  // namespace wed
