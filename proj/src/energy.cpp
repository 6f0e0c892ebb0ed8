#include "wed/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace wed {

namespace {

double coef(const std::vector<double>& c, std::size_t i) { return c.size() == 1 ? c[0] : c[i]; }

void add_grad(const SliceSink* sink, std::size_t i, double g) {
  if (sink && !sink->grad.empty()) sink->grad[sink->offset + i] += sink->scale * g;
}

void add_hess(const SliceSink* sink, std::size_t i, std::size_t j, double h) {
  if (sink && sink->hess && h != 0.0) sink->hess->push_back({sink->offset + i, sink->offset + j, sink->scale * h});
}

void check_coef(const std::vector<double>& c, std::size_t n, const char* name, double lower_bound, bool strict) {
  if (c.size() != 1 && c.size() != n)
    throw ConfigError(std::string("energy: coefficient ") + name + " must be a constant or one value per node");
  for (double x : c) {
    if (!std::isfinite(x) || (strict ? !(x > lower_bound) : x < lower_bound))
      throw ConfigError(std::string("energy: coefficient ") + name + " out of range");
  }
}

// |r|^m / m with derivative |r|^{m-2} r and second derivative (m-1)|r|^{m-2}.
struct PowerTerm {
  double value, d1, d2;
};

PowerTerm power_term(double r, double m) {
  const double a = std::abs(r);
  if (m == 2.0) return {0.5 * r * r, r, 1.0};
  const double am2 = std::pow(a, m - 2.0);
  return {am2 * a * a / m, am2 * r, (m - 1.0) * (a > 0.0 ? am2 : (m < 2.0 ? 1e300 : 0.0))};
}

}  // namespace

double TimeField::at(std::size_t i, double t) const {
  double v = 0.0;
  if (!base.empty()) v += base.size() == 1 ? base[0] : base[i];
  if (!slope.empty()) v += t * (slope.size() == 1 ? slope[0] : slope[i]);
  return v;
}

// ---- dissipation -------------------------------------------------------------

void DissipationSpec::validate() const {
  if (kind == AlphaKind::power) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("dissipation: exponent p must exceed 1");
    return;
  }
  if (table_s.size() < 2 || table_s.size() != table_alpha.size())
    throw ConfigError("dissipation: alpha table needs at least two (s, alpha) pairs");
  for (std::size_t k = 1; k < table_s.size(); ++k) {
    if (!(table_s[k] > table_s[k - 1])) throw ConfigError("dissipation: table abscissae must increase");
    if (table_alpha[k] < table_alpha[k - 1]) throw ConfigError("dissipation: alpha must be nondecreasing");
  }
  const double scale = 1.0 + std::abs(table_alpha.front()) + std::abs(table_alpha.back());
  if (std::abs(alpha(0.0)) > 1e-12 * scale) throw ConfigError("dissipation: alpha(0) must vanish so that A >= 0");
  const double first_slope = (table_alpha[1] - table_alpha[0]) / (table_s[1] - table_s[0]);
  const std::size_t n = table_s.size();
  const double last_slope = (table_alpha[n - 1] - table_alpha[n - 2]) / (table_s[n - 1] - table_s[n - 2]);
  if (!(first_slope > 0.0) || !(last_slope > 0.0))
    throw ConfigError("dissipation: end slopes of the alpha table must be positive (p = 2 growth)");
}

double DissipationSpec::alpha(double s) const {
  if (kind == AlphaKind::power) return p == 2.0 ? s : std::pow(std::abs(s), p - 2.0) * s;
  const std::size_t n = table_s.size();
  std::size_t k = 0;
  if (s <= table_s[0]) k = 0;
  else if (s >= table_s[n - 1]) k = n - 2;
  else k = static_cast<std::size_t>(std::upper_bound(table_s.begin(), table_s.end(), s) - table_s.begin()) - 1;
  const double w = (s - table_s[k]) / (table_s[k + 1] - table_s[k]);
  return table_alpha[k] + w * (table_alpha[k + 1] - table_alpha[k]);
}

double DissipationSpec::alpha_prime(double s) const {
  if (kind == AlphaKind::power) {
    if (p == 2.0) return 1.0;
    const double a = std::max(std::abs(s), 1e-12);
    return (p - 1.0) * std::pow(a, p - 2.0);
  }
  const std::size_t n = table_s.size();
  std::size_t k = 0;
  if (s <= table_s[0]) k = 0;
  else if (s >= table_s[n - 1]) k = n - 2;
  else k = static_cast<std::size_t>(std::upper_bound(table_s.begin(), table_s.end(), s) - table_s.begin()) - 1;
  return (table_alpha[k + 1] - table_alpha[k]) / (table_s[k + 1] - table_s[k]);
}

double DissipationSpec::A(double s) const {
  if (kind == AlphaKind::power) {
    const double a = std::abs(s);
    return p == 2.0 ? 0.5 * s * s : std::pow(a, p) / p;
  }
  // exact trapezoids between the knots lying in [0, s]
  const double lo = std::min(0.0, s);
  const double hi = std::max(0.0, s);
  std::vector<double> pts{lo};
  for (double x : table_s)
    if (x > lo && x < hi) pts.push_back(x);
  pts.push_back(hi);
  double acc = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) acc += 0.5 * (alpha(pts[k - 1]) + alpha(pts[k])) * (pts[k] - pts[k - 1]);
  return s >= 0.0 ? acc : -acc;
}

DissipationPotential::DissipationPotential(DissipationSpec spec, GridPtr grid)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  spec_.validate();
}

double DissipationPotential::eval(std::span<const double> v, const SliceSink* sink) const {
  const double hd = grid_->cell_volume();
  double val = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    val += spec_.A(v[i]);
    if (sink) {
      add_grad(sink, i, spec_.alpha(v[i]) * hd);
      add_hess(sink, i, i, spec_.alpha_prime(v[i]) * hd);
    }
  }
  return val * hd;
}

void DissipationPotential::alpha(std::span<const double> v, std::span<double> out) const {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = spec_.alpha(v[i]);
}

// ---- fractional kernel -------------------------------------------------------

namespace {

struct Cell {
  double mid, width;
};

// Cells covering [a, b], graded geometrically away from the coordinate pc so
// that the singular kernel centred at pc is resolved.
std::vector<Cell> graded_cells(double pc, double a, double b, int K, double delta) {
  std::vector<Cell> cells;
  auto emit = [&](double d0, double d1, double sign) {
    if (!(d1 > d0)) return;
    std::vector<double> br(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
      const double f = static_cast<double>(k) / K;
      br[static_cast<std::size_t>(k)] =
          d0 > 0.0 ? d0 * std::pow(d1 / d0, f) : delta * (std::pow(1.0 + d1 / delta, f) - 1.0);
    }
    br.back() = d1;
    for (int k = 0; k < K; ++k) {
      const double lo = br[static_cast<std::size_t>(k)];
      const double hi = br[static_cast<std::size_t>(k) + 1];
      cells.push_back({pc + sign * 0.5 * (lo + hi), hi - lo});
    }
  };
  if (pc <= a) {
    emit(a - pc, b - pc, +1.0);
  } else if (pc >= b) {
    emit(pc - b, pc - a, -1.0);
  } else {
    emit(0.0, pc - a, -1.0);
    emit(0.0, b - pc, +1.0);
  }
  return cells;
}

double exterior_1d(double x, double L, double R, double lo, double hi, double s) {
  auto piece = [s](double d0, double d1) { return (std::pow(d0, -2.0 * s) - std::pow(d1, -2.0 * s)) / (2.0 * s); };
  return piece(x - L, x - lo) + piece(R - x, hi - x);
}

double exterior_2d(double px, double py, const std::array<double, 4>& omega, const std::array<double, 4>& box,
                   double s, double delta) {
  constexpr int K = 64;
  const double expo = -(2.0 + 2.0 * s) / 2.0;
  auto slab = [&](double x0, double x1, double y0, double y1) {
    const auto cx = graded_cells(px, x0, x1, K, delta);
    const auto cy = graded_cells(py, y0, y1, K, delta);
    double acc = 0.0;
    for (const auto& a : cx) {
      double row = 0.0;
      const double dx = a.mid - px;
      for (const auto& b : cy) {
        const double dy = b.mid - py;
        row += std::pow(dx * dx + dy * dy, expo) * b.width;
      }
      acc += row * a.width;
    }
    return acc;
  };
  const auto [Lx, Rx, Ly, Ry] = omega;
  const auto [bx0, bx1, by0, by1] = box;
  return slab(bx0, Lx, by0, by1) + slab(Rx, bx1, by0, by1) + slab(Lx, Rx, by0, Ly) + slab(Lx, Rx, Ry, by1);
}

}  // namespace

FractionalKernel::FractionalKernel(const Grid& grid, double s, bool exterior) : n_(grid.size()) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional: s must lie in (0, 1)");
  if (exterior && grid.kind() == DomainKind::torus)
    throw ConfigError("fractional: the zero exterior condition is not defined on a torus");
  const int d = grid.dim();
  const double hd = grid.cell_volume();
  const double expo = -(d + 2.0 * s) / 2.0;
  w_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto xi = grid.coord(i);
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      const auto xj = grid.coord(j);
      const double dx = std::abs(xi[0] - xj[0]);
      const double dy = std::abs(xi[1] - xj[1]);
      w_[i * n_ + j] = hd * hd * std::pow(dx * dx + dy * dy, expo);
    }
  }
  ext_.assign(n_, 0.0);
  if (!exterior) return;
  const double hx = grid.spacing(0);
  const double radius = 10.0 * grid.diameter();
  const auto c = grid.center();
  const double Lx = grid.spec().lower[0] - 0.5 * hx;
  const double Rx = grid.spec().lower[0] + (grid.nodes(0) - 0.5) * hx;
  if (d == 1) {
    for (std::size_t i = 0; i < n_; ++i)
      ext_[i] = 2.0 * hd * exterior_1d(grid.coord(i)[0], Lx, Rx, c[0] - radius, c[0] + radius, s);
    return;
  }
  const double hy = grid.spacing(1);
  const double Ly = grid.spec().lower[1] - 0.5 * hy;
  const double Ry = grid.spec().lower[1] + (grid.nodes(1) - 0.5) * hy;
  const std::array<double, 4> omega{Lx, Rx, Ly, Ry};
  const std::array<double, 4> box{c[0] - radius, c[0] + radius, c[1] - radius, c[1] + radius};
  const double delta = 0.5 * std::min(hx, hy);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto x = grid.coord(i);
    ext_[i] = 2.0 * hd * exterior_2d(x[0], x[1], omega, box, s, delta);
  }
}

double fractional_seminorm(const FractionalKernel& k, std::span<const double> u, const SliceSink* sink,
                           LoopOrder order) {
  const std::size_t n = k.size();
  if (u.size() != n) throw GridMismatch("fractional_seminorm: field size does not match the kernel");
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double partial = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const std::size_t i = order == LoopOrder::row_major ? a : b;
      const std::size_t j = order == LoopOrder::row_major ? b : a;
      const double diff = u[i] - u[j];
      partial += k.weight(i, j) * diff * diff;
    }
    total += partial;
  }
  for (std::size_t i = 0; i < n; ++i) total += k.exterior(i) * u[i] * u[i];

  if (sink) {
    for (std::size_t i = 0; i < n; ++i) {
      double g = 2.0 * k.exterior(i) * u[i];
      double diag = 2.0 * k.exterior(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        g += 4.0 * k.weight(i, j) * (u[i] - u[j]);
        diag += 4.0 * k.weight(i, j);
        add_hess(sink, i, j, -4.0 * k.weight(i, j));
      }
      add_grad(sink, i, g);
      add_hess(sink, i, i, diag);
    }
  }
  return total;
}

// ---- energies ----------------------------------------------------------------

void EnergySpec::validate(const Grid& grid, int components, double p) const {
  const std::size_t n = grid.size();
  switch (kind) {
    case EnergyKind::m_laplace:
      if (components != 1) throw ConfigError("energy: m_laplace acts on scalar fields");
      if (!(m >= 2.0)) throw ConfigError("energy: m_laplace requires m >= 2");
      check_coef(B, n, "B", 0.0, true);
      check_coef(C, n, "C", 0.0, false);
      break;
    case EnergyKind::quadratic:
      if (!(gamma > 0.0)) throw ConfigError("energy: quadratic requires gamma > 0");
      break;
    case EnergyKind::fractional:
      if (components != 1) throw ConfigError("energy: fractional acts on scalar fields");
      if (!(s > 0.0 && s < 1.0)) throw ConfigError("energy: fractional order s must lie in (0, 1)");
      if (!(gamma >= 0.0)) throw ConfigError("energy: fractional requires gamma >= 0");
      break;
    case EnergyKind::lv_quadratic:
      if (components != 2) throw ConfigError("energy: lv_quadratic needs a (u, v) pair");
      if (!(D1 > 0.0 && D2 > 0.0 && F1 > 0.0 && F2 > 0.0))
        throw ConfigError("energy: Lotka-Volterra requires D1, D2, F1, F2 > 0");
      break;
  }
  if (has_power) {
    if (!(q > 1.0 && q <= p)) throw ConfigError("energy: concave exponent q must lie in (1, p]");
    check_coef(D, n * static_cast<std::size_t>(components), "D", 0.0, false);
  }
  const std::size_t slots = n * static_cast<std::size_t>(components);
  for (const auto* v : {&forcing.base, &forcing.slope}) {
    if (!v->empty() && v->size() != 1 && v->size() != slots)
      throw ConfigError("energy: forcing must be a constant or one value per stored slot");
    for (double x : *v)
      if (!std::isfinite(x)) throw ConfigError("energy: forcing must be finite");
  }
}

ConvexEnergy::ConvexEnergy(EnergySpec spec, GridPtr grid, int components)
    : spec_(std::move(spec)), grid_(std::move(grid)), components_(components) {
  spec_.validate(*grid_, components_, std::numeric_limits<double>::infinity());
  if (spec_.kind == EnergyKind::fractional)
    kernel_ = std::make_shared<FractionalKernel>(*grid_, spec_.s, spec_.exterior);
}

double ConvexEnergy::m_laplace(std::span<const double> u, const SliceSink* sink) const {
  const Grid& g = *grid_;
  const double hd = g.cell_volume();
  const double m = spec_.m;
  double val = 0.0;
  for (const auto& e : g.edges()) {
    const double h = g.spacing(e.axis);
    const double Be = 0.5 * (coef(spec_.B, e.a) + coef(spec_.B, e.b));
    const auto pt = power_term((u[e.b] - u[e.a]) / h, m);
    val += Be * pt.value * hd;
    if (sink) {
      const double gr = Be * pt.d1 * hd / h;
      add_grad(sink, e.b, gr);
      add_grad(sink, e.a, -gr);
      const double hs = Be * pt.d2 * hd / (h * h);
      add_hess(sink, e.a, e.a, hs);
      add_hess(sink, e.b, e.b, hs);
      add_hess(sink, e.a, e.b, -hs);
      add_hess(sink, e.b, e.a, -hs);
    }
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double Ci = coef(spec_.C, i);
    if (Ci != 0.0) {
      const auto pt = power_term(u[i], m);
      val += Ci * pt.value * hd;
      add_grad(sink, i, Ci * pt.d1 * hd);
      add_hess(sink, i, i, Ci * pt.d2 * hd);
    }
    const double bw = g.boundary_weight(i);
    if (bw > 0.0) {
      const double b = g.robin_b();
      val += bw * u[i] * u[i] / (2.0 * b);
      add_grad(sink, i, bw * u[i] / b);
      add_hess(sink, i, i, bw / b);
    }
  }
  return val;
}

double ConvexEnergy::lv(std::span<const double> u, const SliceSink* sink) const {
  const Grid& g = *grid_;
  const std::size_t n = g.size();
  const double hd = g.cell_volume();
  const double D[2] = {spec_.D1, spec_.D2};
  const double F[2] = {spec_.F1, spec_.F2};
  double val = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t o = c * n;
    for (const auto& e : g.edges()) {
      const double h = g.spacing(e.axis);
      const double dz = (u[o + e.b] - u[o + e.a]) / h;
      val += 0.5 * D[c] * dz * dz * hd;
      if (sink) {
        const double gr = D[c] * dz * hd / h;
        add_grad(sink, o + e.b, gr);
        add_grad(sink, o + e.a, -gr);
        const double hs = D[c] * hd / (h * h);
        add_hess(sink, o + e.a, o + e.a, hs);
        add_hess(sink, o + e.b, o + e.b, hs);
        add_hess(sink, o + e.a, o + e.b, -hs);
        add_hess(sink, o + e.b, o + e.a, -hs);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      val += 0.5 * F[c] * u[o + i] * u[o + i] * hd;
      add_grad(sink, o + i, F[c] * u[o + i] * hd);
      add_hess(sink, o + i, o + i, F[c] * hd);
    }
  }
  return val;
}

double ConvexEnergy::eval(std::span<const double> u, const SliceSink* sink) const {
  const double hd = grid_->cell_volume();
  switch (spec_.kind) {
    case EnergyKind::m_laplace:
      return m_laplace(u, sink);
    case EnergyKind::lv_quadratic:
      return lv(u, sink);
    case EnergyKind::quadratic:
    case EnergyKind::fractional: {
      double val = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        val += 0.5 * spec_.gamma * u[i] * u[i] * hd;
        add_grad(sink, i, spec_.gamma * u[i] * hd);
        add_hess(sink, i, i, spec_.gamma * hd);
      }
      if (spec_.kind == EnergyKind::fractional) {
        if (sink) {
          SliceSink half = *sink;
          half.scale *= 0.5;
          val += 0.5 * fractional_seminorm(*kernel_, u, &half);
        } else {
          val += 0.5 * fractional_seminorm(*kernel_, u);
        }
      }
      return val;
    }
  }
  return 0.0;
}

ConcaveEnergy::ConcaveEnergy(EnergySpec spec, GridPtr grid, int components)
    : spec_(std::move(spec)), grid_(std::move(grid)), components_(components) {
  if (spec_.has_power && !(spec_.q > 1.0)) throw ConfigError("energy: concave exponent q must exceed 1");
}

double ConcaveEnergy::eval(std::span<const double> u, double t, const SliceSink* sink) const {
  const double hd = grid_->cell_volume();
  double val = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (spec_.has_power) {
      const double Di = coef(spec_.D, i);
      if (Di != 0.0) {
        const auto pt = power_term(u[i], spec_.q);
        val += Di * pt.value * hd;
        add_grad(sink, i, Di * pt.d1 * hd);
        add_hess(sink, i, i, Di * std::min(pt.d2, 1e12) * hd);
      }
    }
    if (!spec_.forcing.empty()) {
      const double hi = spec_.forcing.at(i, t);
      val += hi * u[i] * hd;
      add_grad(sink, i, hi * hd);
    }
  }
  return val;
}

// ---- reactions ---------------------------------------------------------------

void ReactionSpec::validate(int components) const {
  if (kind == ReactionKind::lotka_volterra) {
    if (components != 2) throw ConfigError("reaction: Lotka-Volterra needs a (u, v) pair");
    if (!(lv.A > 0.0 && lv.K > 0.0)) throw ConfigError("reaction: Lotka-Volterra requires A, K > 0");
    if (!(lv.B >= 0.0 && lv.C >= 0.0 && lv.E >= 0.0))
      throw ConfigError("reaction: Lotka-Volterra requires B, C, E >= 0");
  }
}

void reaction_eval(const ReactionSpec& spec, std::span<const double> u, double t, std::span<double> out) {
  switch (spec.kind) {
    case ReactionKind::none:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case ReactionKind::constant_g:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.g.at(i, t);
      return;
    case ReactionKind::lotka_volterra: {
      if (u.size() % 2 != 0) throw ConfigError("reaction: Lotka-Volterra needs a (u, v) pair");
      const std::size_t n = u.size() / 2;
      const auto& p = spec.lv;
      for (std::size_t i = 0; i < n; ++i) {
        const double U = std::max(std::min(u[i], p.K), 0.0);
        const double V = std::max(u[n + i], 0.0);
        const double inter = U * V / (1.0 + p.E * V);
        out[i] = p.A * U * (1.0 - U / p.K) - p.B * inter;
        out[n + i] = p.C * inter;
      }
      return;
    }
  }
}

// ---- Field-level entry points ------------------------------------------------

Evaluation dissipation_eval(const DissipationSpec& spec, const Field& v) {
  DissipationPotential psi(spec, v.grid_ptr());
  Field g(v.grid_ptr(), v.components());
  SliceSink sink{g.values()};
  const double val = psi.eval(v.values(), &sink);
  return {val, std::move(g)};
}

Evaluation energy1_eval(const EnergySpec& spec, const Field& u) {
  ConvexEnergy phi(spec, u.grid_ptr(), u.components());
  Field g(u.grid_ptr(), u.components());
  SliceSink sink{g.values()};
  const double val = phi.eval(u.values(), &sink);
  return {val, std::move(g)};
}

Evaluation energy2_eval(const EnergySpec& spec, const Field& u, double t) {
  ConcaveEnergy phi(spec, u.grid_ptr(), u.components());
  Field g(u.grid_ptr(), u.components());
  SliceSink sink{g.values()};
  const double val = phi.eval(u.values(), t, &sink);
  return {val, std::move(g)};
}

Evaluation fractional_seminorm(const Field& u, double s, bool exterior) {
  FractionalKernel k(u.grid(), s, exterior);
  Field g(u.grid_ptr(), u.components());
  SliceSink sink{g.values()};
  const double val = fractional_seminorm(k, u.values(), &sink);
  return {val, std::move(g)};
}

Field reaction_eval(const ReactionSpec& spec, const Field& u, double t) {
  spec.validate(u.components());
  Field out(u.grid_ptr(), u.components());
  reaction_eval(spec, u.values(), t, out.values());
  return out;
}

// ---- growth certificates -----------------------------------------------------

GrowthReport check_growth(const ConvexEnergy& phi1, const ConcaveEnergy& phi2, const ReactionSpec& reaction,
                          double p, const GrowthCertificate& cert) {
  GrowthReport rep;
  const Grid& g = phi1.grid();
  const double hd = g.cell_volume();
  const int comps = reaction.kind == ReactionKind::lotka_volterra || phi1.spec().kind == EnergyKind::lv_quadratic ? 2 : 1;
  const std::size_t n = g.size() * static_cast<std::size_t>(comps);
  std::mt19937_64 rng(cert.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> u(n);
  std::vector<double> f(n);
  const double pp = p / (p - 1.0);
  rep.worst_energy_margin = std::numeric_limits<double>::infinity();
  rep.worst_reaction_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cert.samples; ++k) {
    const double amp = std::pow(10.0, 2.0 * unit(rng));
    for (auto& x : u) x = amp * unit(rng);
    const double e_margin = cert.k * phi1.eval(u) + cert.C1 - phi2.eval(u, 0.0);
    reaction_eval(reaction, u, 0.0, f);
    double fn = 0.0;
    double un = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fn += std::pow(std::abs(f[i]), pp);
      un += std::pow(std::abs(u[i]), p);
    }
    const double r_margin = cert.C2 * (un * hd + 1.0) - fn * hd;
    if (e_margin < rep.worst_energy_margin || r_margin < rep.worst_reaction_margin) {
      if (e_margin < 0.0 || r_margin < 0.0) {
        if (rep.passed) rep.counterexample = u;
        rep.passed = false;
      }
    }
    rep.worst_energy_margin = std::min(rep.worst_energy_margin, e_margin);
    rep.worst_reaction_margin = std::min(rep.worst_reaction_margin, r_margin);
    ++rep.samples;
  }
  return rep;
}

}  // namespace wed
