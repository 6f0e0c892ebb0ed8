#pragma once

// Reference solutions used by the tests. None of them calls into the
// library's solvers: closed forms, brute-force enumeration and a dense
// implicit-Euler integrator.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// -eps u'' + u' + u = 0 on (0, T), u(0) = 1, u'(T) = 0.
inline double scalar_bvp(double t, double eps, double T) {
  const double disc = std::sqrt(1.0 + 4.0 * eps);
  const double rp = (1.0 + disc) / (2.0 * eps);
  const double rm = (1.0 - disc) / (2.0 * eps);
  // u = A e^{rp (t - T)} + B e^{rm t}; the growing mode is written relative
  // to T so nothing overflows.
  const double ep = std::exp(-rp * T);
  const double em = std::exp(rm * T);
  // A ep + B = 1 and A rp + B rm em = 0
  const double A = -rm * em / (rp - rm * em * ep);
  const double B = 1.0 - A * ep;
  return A * std::exp(rp * (t - T)) + B * std::exp(rm * t);
}

// Graph Laplacian (edge differences over h^2) of a Neumann path with n nodes.
inline Eigen::MatrixXd path_laplacian(int n, double h) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double w = 1.0 / (h * h);
    L(i, i) += w;
    L(i + 1, i + 1) += w;
    L(i, i + 1) -= w;
    L(i + 1, i) -= w;
  }
  return L;
}

// Implicit Euler for u' + L u = 0; row n holds u at t_n.
inline std::vector<std::vector<double>> implicit_euler(const Eigen::MatrixXd& L, const std::vector<double>& u0,
                                                       double dt, int steps) {
  const int n = static_cast<int>(u0.size());
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + dt * L;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  std::vector<std::vector<double>> out{u0};
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.data(), n);
  for (int k = 0; k < steps; ++k) {
    u = lu.solve(u);
    out.emplace_back(u.data(), u.data() + n);
  }
  return out;
}

// Play operator for |u'| + u - h(t) with h(t) = 2t, started at u0: the state
// is clamped into [h - 1, h + 1].
inline double play(double u0, double t) {
  return std::clamp(u0, 2.0 * t - 1.0, 2.0 * t + 1.0);
}

// All vectors of length n over {0, ..., k-1}.
inline std::vector<std::vector<double>> words(int n, int k) {
  std::vector<std::vector<double>> out;
  std::vector<int> d(static_cast<std::size_t>(n), 0);
  for (;;) {
    out.emplace_back(d.begin(), d.end());
    int i = 0;
    while (i < n && ++d[static_cast<std::size_t>(i)] == k) d[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return out;
}

// sum |differences|^m along a path, optionally with zero exterior nodes at
// both ends.
inline double path_variation(const std::vector<double>& u, double m, bool zero_ends) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) s += std::pow(std::abs(u[i + 1] - u[i]), m);
  if (zero_ends && !u.empty()) s += std::pow(std::abs(u.front()), m) + std::pow(std::abs(u.back()), m);
  return s;
}

// Smallest path variation over every arrangement of the multiset u.
inline double min_variation(std::vector<double> u, double m, bool zero_ends) {
  std::sort(u.begin(), u.end());
  double best = path_variation(u, m, zero_ends);
  while (std::next_permutation(u.begin(), u.end())) best = std::min(best, path_variation(u, m, zero_ends));
  return best;
}

// Largest sum u_i v_{sigma(i)} over all permutations sigma.
inline double max_pairing(const std::vector<double>& u, std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double best = -1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    best = std::max(best, s);
  } while (std::next_permutation(v.begin(), v.end()));
  return best;
}

}  // namespace oracle
