#pragma once

// Dissipation potentials, convex energies (phi1), concave perturbations plus
// forcing (phi2) and reaction terms, each with value, analytic gradient and
// (where a solver needs it) Hessian entries on nodal vectors.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wed/field.hpp"

namespace wed {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Accumulation target for one slice: grad[offset + i] += scale * dF/du_i and
/// Hessian entries (offset + i, offset + j, scale * d2F/du_i du_j).
struct SliceSink {
  std::span<double> grad;
  std::vector<Triplet>* hess = nullptr;
  std::size_t offset = 0;
  double scale = 1.0;
};

/// Nodal vector affine in time: base + t * slope (empty vectors mean zero).
struct TimeField {
  std::vector<double> base;
  std::vector<double> slope;

  bool empty() const { return base.empty() && slope.empty(); }
  double at(std::size_t i, double t) const;
};

// ---- dissipation -------------------------------------------------------------

enum class AlphaKind { power, table };

struct DissipationSpec {
  AlphaKind kind = AlphaKind::power;
  double p = 2.0;
  /// table kind: alpha is piecewise linear through (table_s[k], table_alpha[k]),
  /// extended linearly with the end slopes.
  std::vector<double> table_s;
  std::vector<double> table_alpha;
  double growth_constant = 1.0;

  void validate() const;
  double alpha(double s) const;
  double alpha_prime(double s) const;
  /// A(s) = int_0^s alpha
  double A(double s) const;
};

// ---- energies ----------------------------------------------------------------

enum class EnergyKind { m_laplace, quadratic, fractional, lv_quadratic };

struct EnergySpec {
  EnergyKind kind = EnergyKind::quadratic;

  // m_laplace
  double m = 2.0;
  std::vector<double> B;  ///< per node (size 1 means constant)
  std::vector<double> C;  ///< per node (size 1 means constant)

  // quadratic / fractional
  double gamma = 1.0;
  double s = 0.5;
  bool exterior = true;

  // lv_quadratic
  double D1 = 1.0;
  double D2 = 1.0;
  double F1 = 0.0;
  double F2 = 0.0;

  // concave part of phi2 = sum D |u|^q / q + <h(t), u>
  bool has_power = false;
  double q = 2.0;
  std::vector<double> D;  ///< per stored value (size 1 means constant)
  TimeField forcing;

  void validate(const Grid& grid, int components, double p) const;
};

/// Weights of the discrete Gagliardo seminorm on a grid:
/// [u]^2 = sum_{i != j} w_ij (u_i - u_j)^2 + sum_i w_ext_i u_i^2.
class FractionalKernel {
 public:
  FractionalKernel(const Grid& grid, double s, bool exterior);

  std::size_t size() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  double exterior(std::size_t i) const { return ext_[i]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
  std::vector<double> ext_;
};

enum class LoopOrder { row_major, column_major };

/// Seminorm value; `sink` (optional) receives the gradient/Hessian.
double fractional_seminorm(const FractionalKernel& k, std::span<const double> u, const SliceSink* sink = nullptr,
                           LoopOrder order = LoopOrder::row_major);

/// phi1: the convex, lower-semicontinuous part.
class ConvexEnergy {
 public:
  ConvexEnergy(EnergySpec spec, GridPtr grid, int components = 1);

  double eval(std::span<const double> u, const SliceSink* sink = nullptr) const;
  const EnergySpec& spec() const { return spec_; }
  const Grid& grid() const { return *grid_; }

 private:
  double m_laplace(std::span<const double> u, const SliceSink* sink) const;
  double lv(std::span<const double> u, const SliceSink* sink) const;

  EnergySpec spec_;
  GridPtr grid_;
  int components_;
  std::shared_ptr<const FractionalKernel> kernel_;
};

/// phi2: power-type concave perturbation plus the linear forcing term.
class ConcaveEnergy {
 public:
  ConcaveEnergy(EnergySpec spec, GridPtr grid, int components = 1);

  double eval(std::span<const double> u, double t, const SliceSink* sink = nullptr) const;
  bool differentiable() const { return !spec_.has_power || spec_.q > 1.0; }
  bool state_dependent() const { return spec_.has_power; }
  const EnergySpec& spec() const { return spec_; }

 private:
  EnergySpec spec_;
  GridPtr grid_;
  int components_;
};

class DissipationPotential {
 public:
  DissipationPotential(DissipationSpec spec, GridPtr grid);

  double eval(std::span<const double> v, const SliceSink* sink = nullptr) const;
  /// alpha(v) componentwise (the L^2 representative of d psi).
  void alpha(std::span<const double> v, std::span<double> out) const;
  const DissipationSpec& spec() const { return spec_; }

 private:
  DissipationSpec spec_;
  GridPtr grid_;
};

// ---- reactions ---------------------------------------------------------------

enum class ReactionKind { none, constant_g, lotka_volterra };

struct LotkaVolterra {
  double A = 1.0;
  double K = 1.0;
  double B = 0.0;
  double C = 0.0;
  double E = 0.0;
};

struct ReactionSpec {
  ReactionKind kind = ReactionKind::none;
  TimeField g;
  LotkaVolterra lv;

  void validate(int components) const;
  bool state_dependent() const { return kind == ReactionKind::lotka_volterra; }
};

/// f(u, t) written into `out` (nodal values, same layout as u).
void reaction_eval(const ReactionSpec& spec, std::span<const double> u, double t, std::span<double> out);

// ---- Field-level convenience entry points ------------------------------------

struct Evaluation {
  double value = 0.0;
  Field grad;
};

Evaluation dissipation_eval(const DissipationSpec& spec, const Field& v);
Evaluation energy1_eval(const EnergySpec& spec, const Field& u);
Evaluation energy2_eval(const EnergySpec& spec, const Field& u, double t = 0.0);
Evaluation fractional_seminorm(const Field& u, double s, bool exterior = true);
Field reaction_eval(const ReactionSpec& spec, const Field& u, double t = 0.0);

// ---- growth certificates -----------------------------------------------------

struct GrowthCertificate {
  double k = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  /// Monotone table (r_k, l_k) for the constant l(|u|_V); may be empty.
  std::vector<double> ell_r;
  std::vector<double> ell_value;
  int samples = 100;
  std::uint64_t seed = 1;
};

struct GrowthReport {
  bool passed = true;
  int samples = 0;
  double worst_energy_margin = 0.0;    ///< min of k phi1 + C1 - phi2
  double worst_reaction_margin = 0.0;  ///< min of C2 (|u|^p + 1) - |f(u)|^{p'}
  std::vector<double> counterexample;
};

GrowthReport check_growth(const ConvexEnergy& phi1, const ConcaveEnergy& phi2, const ReactionSpec& reaction,
                          double p, const GrowthCertificate& cert);

}  // namespace wed
