#include "wed/wide.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace wed {

namespace {

double poly_value(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
  return v;
}

double poly_d1(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * s + static_cast<double>(k) * c[k];
  return v;
}

double poly_d2(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 2;) v = v * s + static_cast<double>(k * (k - 1)) * c[k];
  return v;
}

void check_time_grid(double T, int steps, double eps, const char* what) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError(std::string(what) + ": horizon must be positive");
  if (steps < 2) throw ConfigError(std::string(what) + ": need at least 3 time knots");
  if (!(eps > 0.0) || !(eps < T)) throw ConfigError(std::string(what) + ": epsilon must lie in (0, T)");
  if (T / eps > 600.0) throw ConfigError(std::string(what) + ": T / epsilon exceeds 600");
}

// Everything the objective needs, independent of wave vs Lagrangian origin.
struct SecondOrder {
  GridPtr grid;
  std::size_t slots = 0;
  int steps = 0;
  double horizon = 1.0;
  double eps = 0.1;
  std::vector<Triplet> mass;  // inertia metric (S x S)
  std::vector<Triplet> damp;  // dissipation metric (S x S), nu included
  std::function<double(std::span<const double>, const SliceSink*)> energy;
  std::vector<char> frozen_nodes;
  double cell = 1.0;
  Field u0;
  Field v0;
};

void mat_vec(const std::vector<Triplet>& m, std::span<const double> x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : m) out[t.row] += t.value * x[t.col];
}

class WideObjective : public Objective {
 public:
  explicit WideObjective(const SecondOrder& m) : m_(m), dt_(m.horizon / m.steps) {}

  std::size_t size() const override { return m_.slots * static_cast<std::size_t>(m_.steps + 1); }

  double value_grad(std::span<const double> x, std::span<double> grad) const override {
    const std::size_t S = m_.slots;
    const bool want = !grad.empty();
    std::vector<double> D(S);
    std::vector<double> MD(S);
    double v = 0.0;
    for (int n = 1; n <= m_.steps; ++n) {
      const double t = dt_ * n;
      const double a = std::exp(-t / m_.eps);
      const std::size_t on = static_cast<std::size_t>(n) * S;
      if (n < m_.steps) {
        for (std::size_t i = 0; i < S; ++i) D[i] = (x[on + S + i] - 2.0 * x[on + i] + x[on - S + i]) / (dt_ * dt_);
        mat_vec(m_.mass, D, MD);
        const double c = a * dt_ * m_.eps * m_.eps;
        double q = 0.0;
        for (std::size_t i = 0; i < S; ++i) q += D[i] * MD[i];
        v += 0.5 * c * q;
        if (want)
          for (std::size_t i = 0; i < S; ++i) {
            const double g = c * MD[i] / (dt_ * dt_);
            grad[on + S + i] += g;
            grad[on + i] -= 2.0 * g;
            grad[on - S + i] += g;
          }
      }
      if (!m_.damp.empty()) {
        const double b = std::exp(-(t - 0.5 * dt_) / m_.eps);
        for (std::size_t i = 0; i < S; ++i) D[i] = (x[on + i] - x[on - S + i]) / dt_;
        mat_vec(m_.damp, D, MD);
        const double c = b * dt_ * m_.eps;
        double q = 0.0;
        for (std::size_t i = 0; i < S; ++i) q += D[i] * MD[i];
        v += 0.5 * c * q;
        if (want)
          for (std::size_t i = 0; i < S; ++i) {
            grad[on + i] += c * MD[i] / dt_;
            grad[on - S + i] -= c * MD[i] / dt_;
          }
      }
      SliceSink s{grad, nullptr, on, a * dt_};
      v += a * dt_ * m_.energy(x.subspan(on, S), want ? &s : nullptr);
    }
    if (want) {
      const auto fz = frozen();
      for (std::size_t k = 0; k < fz.size(); ++k)
        if (fz[k]) grad[k] = 0.0;
    }
    return v;
  }

  void hessian(std::span<const double> x, std::vector<Triplet>& out) const override {
    const std::size_t S = m_.slots;
    for (int n = 1; n <= m_.steps; ++n) {
      const double t = dt_ * n;
      const double a = std::exp(-t / m_.eps);
      const std::size_t on = static_cast<std::size_t>(n) * S;
      if (n < m_.steps) {
        const double c = a * dt_ * m_.eps * m_.eps / (dt_ * dt_ * dt_ * dt_);
        const std::size_t off[3] = {on - S, on, on + S};
        const double w[3] = {1.0, -2.0, 1.0};
        for (const auto& e : m_.mass)
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) out.push_back({off[p] + e.row, off[q] + e.col, c * w[p] * w[q] * e.value});
      }
      if (!m_.damp.empty()) {
        const double b = std::exp(-(t - 0.5 * dt_) / m_.eps);
        const double c = b * dt_ * m_.eps / (dt_ * dt_);
        for (const auto& e : m_.damp) {
          out.push_back({on + e.row, on + e.col, c * e.value});
          out.push_back({on - S + e.row, on - S + e.col, c * e.value});
          out.push_back({on + e.row, on - S + e.col, -c * e.value});
          out.push_back({on - S + e.row, on + e.col, -c * e.value});
        }
      }
      SliceSink s{{}, &out, on, a * dt_};
      m_.energy(x.subspan(on, S), &s);
    }
  }

  std::vector<char> frozen() const override {
    std::vector<char> f(size(), 0);
    const std::size_t S = m_.slots;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = k < 2 * S || m_.frozen_nodes[k % S];
    return f;
  }

  // The inertia block carries (eps/dt)^2 relative to the energy block, and
  // rounding in the second differences scales with it.
  std::vector<double> gradient_scale() const override {
    double mmax = 0.0;
    for (const auto& e : m_.mass)
      if (e.row == e.col) mmax = std::max(mmax, e.value / m_.cell);
    const double inertia = 1.0 + m_.eps * m_.eps * mmax / (dt_ * dt_);
    std::vector<double> s(size(), 1.0);
    for (int n = 1; n <= m_.steps; ++n)
      std::fill_n(s.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(n) * m_.slots),
                  static_cast<std::ptrdiff_t>(m_.slots), std::exp(-dt_ * n / m_.eps) * dt_ * m_.cell * inertia);
    return s;
  }

 private:
  const SecondOrder& m_;
  double dt_;
};

SecondOrder model_of(const WideWaveProblem& p) {
  p.validate();
  SecondOrder m;
  m.grid = p.grid;
  m.slots = p.grid->size();
  m.steps = p.steps;
  m.horizon = p.horizon;
  m.eps = p.epsilon;
  m.cell = p.grid->cell_volume();
  for (std::size_t i = 0; i < m.slots; ++i) {
    m.mass.push_back({i, i, p.rho * m.cell});
    if (p.nu > 0.0) m.damp.push_back({i, i, p.nu * m.cell});
  }
  m.frozen_nodes.assign(m.slots, 0);
  if (p.grid->boundary() == Boundary::dirichlet)
    for (std::size_t i : p.grid->boundary_nodes()) m.frozen_nodes[i] = 1;
  const GridPtr grid = p.grid;
  const std::vector<double> poly = p.poly;
  m.energy = [grid, poly](std::span<const double> u, const SliceSink* sink) {
    const double hd = grid->cell_volume();
    double v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      v += poly_value(poly, u[i]) * hd;
      if (sink) {
        if (!sink->grad.empty()) sink->grad[sink->offset + i] += sink->scale * poly_d1(poly, u[i]) * hd;
        if (sink->hess) sink->hess->push_back({sink->offset + i, sink->offset + i, sink->scale * poly_d2(poly, u[i]) * hd});
      }
    }
    for (const auto& e : grid->edges()) {
      const double h = grid->spacing(e.axis);
      const double c = hd / (h * h);
      const double d = u[e.a] - u[e.b];
      v += 0.5 * c * d * d;
      if (sink) {
        if (!sink->grad.empty()) {
          sink->grad[sink->offset + e.a] += sink->scale * c * d;
          sink->grad[sink->offset + e.b] -= sink->scale * c * d;
        }
        if (sink->hess) {
          const double w = sink->scale * c;
          sink->hess->push_back({sink->offset + e.a, sink->offset + e.a, w});
          sink->hess->push_back({sink->offset + e.b, sink->offset + e.b, w});
          sink->hess->push_back({sink->offset + e.a, sink->offset + e.b, -w});
          sink->hess->push_back({sink->offset + e.b, sink->offset + e.a, -w});
        }
      }
    }
    return v;
  };
  m.u0 = p.u0;
  m.v0 = p.v0;
  return m;
}

SecondOrder model_of(const LagrangianProblem& p) {
  p.validate();
  SecondOrder m;
  m.grid = p.grid();
  m.slots = static_cast<std::size_t>(p.d);
  m.steps = p.steps;
  m.horizon = p.horizon;
  m.eps = p.epsilon;
  m.cell = 1.0;
  for (std::size_t i = 0; i < m.slots; ++i) {
    for (std::size_t j = 0; j < m.slots; ++j)
      if (p.M[i * m.slots + j] != 0.0) m.mass.push_back({i, j, p.M[i * m.slots + j]});
    if (p.nu > 0.0) m.damp.push_back({i, i, p.nu});
  }
  m.frozen_nodes.assign(m.slots, 0);
  const LagrangianPotential U = p.U;
  const std::size_t d = m.slots;
  m.energy = [U, d](std::span<const double> u, const SliceSink* sink) {
    const double v = U.value(u);
    if (!sink) return v;
    double r2 = 0.0;
    for (double x : u) r2 += x * x;
    // radial part g(r2) = sum_k c_k r2^k: grad 2 g' u, Hessian 2 g' I + 4 g'' u u^T
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t k = 1; k < U.radial.size(); ++k) {
      const double kk = static_cast<double>(k);
      g1 += U.radial[k] * kk * std::pow(r2, kk - 1.0);
      if (k >= 2) g2 += U.radial[k] * kk * (kk - 1.0) * std::pow(r2, kk - 2.0);
    }
    for (std::size_t i = 0; i < d; ++i) {
      double gi = 2.0 * g1 * u[i];
      if (!U.K.empty())
        for (std::size_t j = 0; j < d; ++j) gi += U.K[i * d + j] * u[j];
      if (!U.b.empty()) gi += U.b[i];
      if (!sink->grad.empty()) sink->grad[sink->offset + i] += sink->scale * gi;
      if (sink->hess) {
        for (std::size_t j = 0; j < d; ++j) {
          double h = 4.0 * g2 * u[i] * u[j] + (i == j ? 2.0 * g1 : 0.0);
          if (!U.K.empty()) h += U.K[i * d + j];
          if (h != 0.0) sink->hess->push_back({sink->offset + i, sink->offset + j, sink->scale * h});
        }
      }
    }
    return v;
  };
  m.u0 = p.initial();
  m.v0 = p.velocity();
  return m;
}

Trajectory initial_guess(const SecondOrder& m) {
  Trajectory t(m.grid, m.horizon, m.steps);
  for (int n = 0; n <= m.steps; ++n) {
    auto s = t.slice(n);
    for (std::size_t i = 0; i < m.slots; ++i) s[i] = m.u0[i] + t.time(n) * m.v0[i];
  }
  t.pin_initial(m.u0);
  t.pin_velocity(m.v0);
  return t;
}

void require_pins(const SecondOrder& m, const Trajectory& t, const char* what) {
  if (!same_grid(*m.grid, t.grid()) || t.steps() != m.steps || t.horizon() != m.horizon || t.components() != 1)
    throw GridMismatch(std::string(what) + ": trajectory does not match the problem's space-time grid");
  if (!t.initial_consistent() || !(*t.pinned_initial() == m.u0) || !t.pinned_velocity() ||
      !(*t.pinned_velocity() == m.v0))
    throw PreconditionError(std::string(what) + ": trajectory must be pinned at (u0, v0)");
  const auto s1 = t.slice(1);
  const double dt = t.dt();
  for (std::size_t i = 0; i < m.slots; ++i)
    if (s1[i] != m.u0[i] + dt * m.v0[i])
      throw PreconditionError(std::string(what) + ": first slice does not carry the pinned velocity");
}

WideValueGrad value_grad(const SecondOrder& m, const Trajectory& t) {
  require_pins(m, t, "wide_value_grad");
  WideObjective obj(m);
  WideValueGrad out;
  out.grad.assign(obj.size(), 0.0);
  out.value = obj.value_grad(t.data(), out.grad);
  return out;
}

std::pair<Trajectory, WideReport> solve(const SecondOrder& m, const Trajectory& init, const MinimizeOptions& opt,
                                        double lambda) {
  require_pins(m, init, "minimize_wide");
  WideObjective obj(m);
  std::vector<double> x(init.data().begin(), init.data().end());
  WideReport rep;
  rep.lambda = lambda;
  rep.minimize = minimize(obj, x, opt);
  rep.converged = rep.minimize.converged;
  Trajectory out = init;
  std::copy(x.begin(), x.end(), out.data().begin());
  return {std::move(out), rep};
}

template <class Problem>
WideContinuation continuation(const Problem& p, const std::vector<double>& schedule, const MinimizeOptions& opt) {
  if (schedule.empty()) throw ConfigError("wide_eps_continuation: empty epsilon schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1])) throw ConfigError("wide_eps_continuation: schedule must be strictly decreasing");
  WideContinuation res;
  std::optional<Trajectory> warm;
  for (double eps : schedule) {
    Problem q = p;
    q.epsilon = eps;
    auto [u, rep] = minimize_wide(q, warm ? *warm : wide_initial_guess(q), opt);
    res.schedule.push_back(eps);
    res.family.push_back(u);
    res.reports.push_back(rep);
    if (!rep.converged) return res;
    warm = std::move(u);
  }
  res.complete = true;
  return res;
}

double map_residual(const WideMap& r, const Trajectory& u) {
  double m = 0.0;
  for (int n = 0; n <= u.steps(); ++n) {
    const Field f = u.field(n);
    const Field g = r.apply(f);
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(g[i] - f[i]));
  }
  return m;
}

}  // namespace

// ---- problems ----------------------------------------------------------------

void WideWaveProblem::validate() const {
  if (!grid) throw ConfigError("wide: problem has no grid");
  if (grid->dim() != 1 || (grid->kind() != DomainKind::interval && grid->kind() != DomainKind::torus))
    throw ConfigError("wide: the wave problem lives on a 1D interval or torus");
  if (grid->boundary() == Boundary::robin) throw ConfigError("wide: Robin boundaries are not supported");
  if (!(rho > 0.0)) throw ConfigError("wide: rho must be positive");
  if (!(nu >= 0.0)) throw ConfigError("wide: nu must be >= 0");
  if (!(p >= 2.0)) throw ConfigError("wide: growth exponent p must be >= 2");
  check_time_grid(horizon, steps, epsilon, "wide");
  for (const Field* f : {&u0, &v0})
    if (!f->grid_ptr() || !same_grid(*grid, f->grid()) || f->components() != 1)
      throw GridMismatch("wide: initial data do not live on the problem grid");
  std::size_t degree = 0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    if (!std::isfinite(poly[k])) throw ConfigError("wide: F coefficients must be finite");
    if (poly[k] != 0.0) degree = k;
  }
  if (static_cast<double>(degree) > p) throw ConfigError("wide: F grows faster than |s|^p");
  if (degree >= 1 && (degree % 2 == 1 || poly[degree] < 0.0))
    throw ConfigError("wide: F is not bounded below by (1/C)|s|^p - C");
  double L = 10.0;
  for (std::size_t i = 0; i < u0.size(); ++i) L = std::max(L, 10.0 * (1.0 + std::abs(u0[i])));
  for (int k = 0; k <= 2000; ++k) {
    const double s = -L + 2.0 * L * k / 2000.0;
    if (poly_d2(poly, s) < -lambda - 1e-12) throw ConfigError("wide: F'' < -lambda on the sample set");
  }
  if (grid->boundary() == Boundary::dirichlet)
    for (std::size_t i : grid->boundary_nodes())
      if (u0[i] != 0.0 || v0[i] != 0.0) throw ConfigError("wide: Dirichlet problems need u0 = v0 = 0 on the boundary");
}

double LagrangianPotential::value(std::span<const double> u) const {
  const std::size_t d = u.size();
  double v = 0.0;
  double r2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    r2 += u[i] * u[i];
    if (!b.empty()) v += b[i] * u[i];
    if (!K.empty())
      for (std::size_t j = 0; j < d; ++j) v += 0.5 * u[i] * K[i * d + j] * u[j];
  }
  for (std::size_t k = 1; k < radial.size(); ++k) v += radial[k] * std::pow(r2, static_cast<double>(k));
  return v;
}

void LagrangianProblem::validate() const {
  if (d < 1) throw ConfigError("lagrangian: dimension must be >= 1");
  const auto D = static_cast<std::size_t>(d);
  if (M.size() != D * D) throw ConfigError("lagrangian: mass matrix must be d x d");
  Eigen::MatrixXd Mm(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mm(i, j) = M[static_cast<std::size_t>(i * d + j)];
      if (M[static_cast<std::size_t>(i * d + j)] != M[static_cast<std::size_t>(j * d + i)])
        throw ConfigError("lagrangian: mass matrix must be symmetric");
    }
  if (Eigen::LLT<Eigen::MatrixXd>(Mm).info() != Eigen::Success)
    throw ConfigError("lagrangian: mass matrix is not positive definite");
  if (!(nu >= 0.0)) throw ConfigError("lagrangian: nu must be >= 0");
  if (!U.K.empty() && U.K.size() != D * D) throw ConfigError("lagrangian: K must be d x d");
  if (!U.b.empty() && U.b.size() != D) throw ConfigError("lagrangian: b must have d entries");
  for (double c : U.radial)
    if (c < 0.0) throw ConfigError("lagrangian: radial coefficients must be >= 0 (convexity)");
  if (u0.size() != D || v0.size() != D) throw ConfigError("lagrangian: u0 and v0 must have d entries");
  check_time_grid(horizon, steps, epsilon, "lagrangian");
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int s = 0; s < 200; ++s) {
    std::vector<double> a(D), b(D), m(D);
    for (std::size_t i = 0; i < D; ++i) {
      a[i] = nd(rng);
      b[i] = nd(rng);
      m[i] = 0.5 * (a[i] + b[i]);
    }
    const double ua = U.value(a);
    const double ub = U.value(b);
    if (U.value(m) > 0.5 * (ua + ub) + 1e-12 * (1.0 + std::abs(ua) + std::abs(ub)))
      throw ConfigError("lagrangian: U is not convex on a sampled segment");
  }
}

GridPtr LagrangianProblem::grid() const {
  GridSpec s;
  s.dim = 1;
  s.kind = DomainKind::points;
  s.nodes = {d, 1};
  s.boundary = Boundary::neumann;
  s.point_spacing = 1.0;
  return Grid::build(s);
}

Field LagrangianProblem::initial() const { return Field(grid(), u0); }
Field LagrangianProblem::velocity() const { return Field(grid(), v0); }

// ---- functional and solves ---------------------------------------------------

Trajectory wide_initial_guess(const WideWaveProblem& p) { return initial_guess(model_of(p)); }
Trajectory wide_initial_guess(const LagrangianProblem& p) { return initial_guess(model_of(p)); }

WideValueGrad wide_value_grad(const WideWaveProblem& p, const Trajectory& t) { return value_grad(model_of(p), t); }
WideValueGrad wide_value_grad(const LagrangianProblem& p, const Trajectory& t) { return value_grad(model_of(p), t); }

std::pair<Trajectory, WideReport> minimize_wide(const WideWaveProblem& p, const Trajectory& init,
                                                const MinimizeOptions& opt) {
  return solve(model_of(p), init, opt, std::max(0.0, p.lambda));
}

std::pair<Trajectory, WideReport> minimize_wide(const LagrangianProblem& p, const Trajectory& init,
                                                const MinimizeOptions& opt) {
  return solve(model_of(p), init, opt, 0.0);
}

WideContinuation wide_eps_continuation(const WideWaveProblem& p, const std::vector<double>& schedule,
                                       const MinimizeOptions& opt) {
  return continuation(p, schedule, opt);
}

WideContinuation wide_eps_continuation(const LagrangianProblem& p, const std::vector<double>& schedule,
                                       const MinimizeOptions& opt) {
  return continuation(p, schedule, opt);
}

// ---- maps --------------------------------------------------------------------

WideMap WideMap::rigid(NodePermutation perm) {
  WideMap m;
  m.kind = WideMapKind::rigid;
  m.perm = std::move(perm);
  return m;
}

WideMap WideMap::averaging(int axis) {
  WideMap m;
  m.kind = WideMapKind::averaging;
  m.axis = axis;
  return m;
}

WideMap WideMap::lagrangian_affine(std::vector<double> r, std::vector<double> v) {
  WideMap m;
  m.kind = WideMapKind::lagrangian_affine;
  m.r = std::move(r);
  m.v = std::move(v);
  return m;
}

Field WideMap::apply(const Field& u) const {
  switch (kind) {
    case WideMapKind::rigid:
      return rigid_transform(u, perm);
    case WideMapKind::averaging:
      return average_along(u, axis);
    case WideMapKind::lagrangian_affine: {
      Field out = apply_velocity(u);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += v.empty() ? 0.0 : v[i];
      return out;
    }
  }
  return u;
}

Field WideMap::apply_velocity(const Field& w) const {
  if (kind != WideMapKind::lagrangian_affine) return apply(w);
  const std::size_t d = w.size();
  if (r.size() != d * d) throw ConfigError("wide map: r must be d x d");
  Field out = w;
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += r[i * d + j] * w[j];
    out[i] = s;
  }
  return out;
}

WideInvariantResult wide_invariant_solve(const WideWaveProblem& p, const WideMap& r,
                                         const std::vector<double>& schedule, const MinimizeOptions& opt) {
  p.validate();
  if (r.kind == WideMapKind::lagrangian_affine) throw ConfigError("wide_invariant_solve: affine maps act on R^d only");
  if (r.kind == WideMapKind::rigid && !r.perm.is_automorphism(*p.grid))
    throw PreconditionError("wide_invariant_solve: the permutation is not a symmetry of the grid");
  if (r.kind == WideMapKind::averaging) {
    if (p.lambda > 0.0) throw PreconditionError("wide_invariant_solve: averaging requires convex F");
    if (p.grid->boundary() == Boundary::dirichlet)
      throw PreconditionError("wide_invariant_solve: averaging needs a Neumann or periodic grid");
  }
  if (!(r.apply(p.u0) == p.u0) || !(r.apply_velocity(p.v0) == p.v0))
    throw PreconditionError("wide_invariant_solve: initial data are not R-invariant");
  WideInvariantResult res;
  res.continuation = wide_eps_continuation(p, schedule, opt);
  res.trajectory = res.continuation.family.back();
  res.residual = map_residual(r, res.trajectory);
  res.flagged = !res.continuation.complete || res.residual > 1e-7;
  return res;
}

namespace {

void check_affine(const LagrangianProblem& p, const WideMap& r) {
  if (r.kind != WideMapKind::lagrangian_affine)
    throw ConfigError("wide_invariant_solve: Lagrangian problems take affine maps R u = r u + v");
  const auto d = static_cast<std::size_t>(p.d);
  if (r.r.size() != d * d || (!r.v.empty() && r.v.size() != d)) throw ConfigError("wide map: size mismatch");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double rtr = 0.0;
      double rtmr = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        rtr += r.r[k * d + i] * r.r[k * d + j];
        for (std::size_t l = 0; l < d; ++l) rtmr += r.r[k * d + i] * p.M[k * d + l] * r.r[l * d + j];
      }
      if (std::abs(rtr - (i == j ? 1.0 : 0.0)) > 1e-12) throw PreconditionError("wide map: r is not orthogonal");
      if (std::abs(rtmr - p.M[i * d + j]) > 1e-12 * (1.0 + std::abs(p.M[i * d + j])))
        throw PreconditionError("wide map: the mass matrix is not r-invariant");
    }
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(0.0, 2.0);
  const GridPtr g = p.grid();
  for (int s = 0; s < 500; ++s) {
    Field u(g);
    for (std::size_t i = 0; i < d; ++i) u[i] = nd(rng);
    const double a = p.U.value(u.values());
    const double b = p.U.value(r.apply(u).values());
    if (b > a + 1e-12 * (1.0 + std::abs(a))) throw PreconditionError("wide map: U(r u + v) > U(u) on a sample");
  }
}

}  // namespace

WideInvariantResult wide_invariant_solve(const LagrangianProblem& p, const WideMap& r,
                                         const std::vector<double>& schedule, const MinimizeOptions& opt) {
  p.validate();
  check_affine(p, r);
  if (!(r.apply(p.initial()) == p.initial()) || !(r.apply_velocity(p.velocity()) == p.velocity()))
    throw PreconditionError("wide_invariant_solve: initial data are not R-invariant");
  WideInvariantResult res;
  res.continuation = wide_eps_continuation(p, schedule, opt);
  res.trajectory = res.continuation.family.back();
  res.residual = map_residual(r, res.trajectory);
  res.flagged = !res.continuation.complete || res.residual > 1e-7;
  return res;
}

double wide_equivariance_residual(const LagrangianProblem& p, const WideMap& r, const std::vector<double>& schedule,
                                  const MinimizeOptions& opt) {
  p.validate();
  check_affine(p, r);
  LagrangianProblem q = p;
  const Field ru0 = r.apply(p.initial());
  const Field rv0 = r.apply_velocity(p.velocity());
  q.u0.assign(ru0.values().begin(), ru0.values().end());
  q.v0.assign(rv0.values().begin(), rv0.values().end());
  const auto a = wide_eps_continuation(p, schedule, opt);
  const auto b = wide_eps_continuation(q, schedule, opt);
  double m = 0.0;
  const Trajectory& ua = a.family.back();
  const Trajectory& ub = b.family.back();
  for (int n = 0; n <= ua.steps(); ++n) {
    const Field ra = r.apply(ua.field(n));
    const auto sb = ub.slice(n);
    for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - sb[i]));
  }
  return m;
}

std::vector<double> hamiltonian_series(const LagrangianProblem& p, const Trajectory& u) {
  const auto d = static_cast<std::size_t>(p.d);
  std::vector<double> H;
  std::vector<double> v(d), mid(d);
  for (int n = 0; n < u.steps(); ++n) {
    auto a = u.slice(n);
    auto b = u.slice(n + 1);
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = (b[i] - a[i]) / u.dt();
      mid[i] = 0.5 * (a[i] + b[i]);
    }
    double kin = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) kin += 0.5 * v[i] * p.M[i * d + j] * v[j];
    H.push_back(kin + p.U.value(mid));
  }
  H.push_back(H.back());
  return H;
}

}  // namespace wed
