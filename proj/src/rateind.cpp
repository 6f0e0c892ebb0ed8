#include "wed/rateind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

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

void require_match(const RIProblem& p, const Trajectory& t, const char* what) {
  if (!same_grid(*p.grid, t.grid()) || t.components() != 1 || t.steps() != p.steps || t.horizon() != p.horizon)
    throw GridMismatch(std::string(what) + ": trajectory does not match the problem's space-time grid");
}

// Smooth part sum_n e_n phi_{t_n}(x_n) over a chain of slices; slice 0 is frozen.
class ChainSmooth : public Objective {
 public:
  ChainSmooth(const RIProblem& p, std::vector<double> e, std::vector<double> t)
      : p_(p), e_(std::move(e)), t_(std::move(t)), slots_(p.grid->size()) {}

  std::size_t slots() const { return slots_; }
  int steps() const { return static_cast<int>(e_.size()) - 1; }

  std::size_t size() const override { return slots_ * e_.size(); }

  double value_grad(std::span<const double> x, std::span<double> grad) const override {
    double v = 0.0;
    for (int n = 1; n <= steps(); ++n) {
      const std::size_t on = static_cast<std::size_t>(n) * slots_;
      SliceSink s{grad, nullptr, on, e_[static_cast<std::size_t>(n)]};
      v += e_[static_cast<std::size_t>(n)] *
           ri_energy(p_, x.subspan(on, slots_), t_[static_cast<std::size_t>(n)], grad.empty() ? nullptr : &s);
    }
    return v;
  }

  void hessian(std::span<const double> x, std::vector<Triplet>& out) const override {
    for (int n = 1; n <= steps(); ++n) {
      const std::size_t on = static_cast<std::size_t>(n) * slots_;
      SliceSink s{{}, &out, on, e_[static_cast<std::size_t>(n)]};
      ri_energy(p_, x.subspan(on, slots_), t_[static_cast<std::size_t>(n)], &s);
    }
  }

  std::vector<char> frozen() const override {
    std::vector<char> f(size(), 0);
    std::fill_n(f.begin(), static_cast<std::ptrdiff_t>(slots_), 1);
    return f;
  }

  std::vector<double> gradient_scale() const override {
    std::vector<double> s(size(), 1.0);
    const double hd = p_.grid->cell_volume();
    for (int n = 1; n <= steps(); ++n)
      std::fill_n(s.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(n) * slots_),
                  static_cast<std::ptrdiff_t>(slots_), e_[static_cast<std::size_t>(n)] * hd);
    return s;
  }

 private:
  const RIProblem& p_;
  std::vector<double> e_;
  std::vector<double> t_;
  std::size_t slots_;
};

// Jump term sum_n kappa_n sum_i |x_{n,i} - x_{n-1,i}| h^d.
struct Chain {
  const ChainSmooth& smooth;
  std::vector<double> kappa;  // index n = 1..N
  double hd;
};

double jump_value(const Chain& c, std::span<const double> x) {
  const std::size_t S = c.smooth.slots();
  double v = 0.0;
  for (int n = 1; n <= c.smooth.steps(); ++n)
    for (std::size_t i = 0; i < S; ++i)
      v += c.kappa[static_cast<std::size_t>(n)] * c.hd * std::abs(x[n * S + i] - x[(n - 1) * S + i]);
  return v;
}

// Active-set form: jumps in the zero set are merged (one variable per run of
// equal values along time), the others contribute kappa h^d s (x_n - x_{n-1}).
class GroupObjective : public Objective {
 public:
  GroupObjective(const Chain& c, const std::vector<int>& sign, std::span<const double> x0) : c_(c), sign_(sign) {
    const std::size_t S = c.smooth.slots();
    const int N = c.smooth.steps();
    group_.assign(c.smooth.size(), 0);
    for (std::size_t i = 0; i < S; ++i) {
      for (int n = 0; n <= N; ++n) {
        const std::size_t k = n * S + i;
        if (n == 0 || sign_[k] != 0) {
          group_frozen_.push_back(n == 0);
          members_.emplace_back();
        }
        group_[k] = members_.size() - 1;
        members_.back().push_back(k);
      }
    }
    base_.assign(x0.begin(), x0.end());
    for (std::size_t g = 0; g < members_.size(); ++g)
      if (group_frozen_[g])
        for (std::size_t k : members_[g]) base_[k] = x0[members_[g].front()];
  }

  std::size_t size() const override { return members_.size(); }

  std::vector<double> restrict_to_groups(std::span<const double> x) const {
    std::vector<double> y(size());
    for (std::size_t g = 0; g < size(); ++g) {
      double s = 0.0;
      for (std::size_t k : members_[g]) s += x[k];
      y[g] = group_frozen_[g] ? x[members_[g].front()] : s / static_cast<double>(members_[g].size());
    }
    return y;
  }

  std::vector<double> expand(std::span<const double> y) const {
    std::vector<double> x(base_);
    for (std::size_t g = 0; g < size(); ++g)
      if (!group_frozen_[g])
        for (std::size_t k : members_[g]) x[k] = y[g];
    return x;
  }

  double value_grad(std::span<const double> y, std::span<double> grad) const override {
    const auto x = expand(y);
    std::vector<double> gx(grad.empty() ? 0 : x.size(), 0.0);
    double v = c_.smooth.value_grad(x, gx);
    const std::size_t S = c_.smooth.slots();
    for (std::size_t k = S; k < x.size(); ++k) {
      if (sign_[k] == 0) continue;
      const double kk = c_.kappa[k / S] * c_.hd * sign_[k];
      v += kk * (x[k] - x[k - S]);
      if (!gx.empty()) {
        gx[k] += kk;
        gx[k - S] -= kk;
      }
    }
    if (!grad.empty()) {
      for (std::size_t k = 0; k < x.size(); ++k) grad[group_[k]] += gx[k];
      for (std::size_t g = 0; g < size(); ++g)
        if (group_frozen_[g]) grad[g] = 0.0;
    }
    return v;
  }

  void hessian(std::span<const double> y, std::vector<Triplet>& out) const override {
    const auto x = expand(y);
    std::vector<Triplet> full;
    c_.smooth.hessian(x, full);
    for (const auto& t : full) out.push_back({group_[t.row], group_[t.col], t.value});
  }

  std::vector<char> frozen() const override {
    std::vector<char> f(size());
    for (std::size_t g = 0; g < size(); ++g) f[g] = group_frozen_[g];
    return f;
  }

  std::vector<double> gradient_scale() const override {
    const auto full = c_.smooth.gradient_scale();
    std::vector<double> s(size(), 0.0);
    for (std::size_t k = 0; k < full.size(); ++k) s[group_[k]] += full[k];
    return s;
  }

 private:
  const Chain& c_;
  const std::vector<int>& sign_;
  std::vector<std::size_t> group_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<char> group_frozen_;
  std::vector<double> base_;
};

// Backward recursion for the subgradient selection zeta of every jump:
// G_n + h^d (kappa_n zeta_n - kappa_{n+1} zeta_{n+1}) = 0, zeta_{N+1} = 0.
std::vector<double> zeta_recursion(const Chain& c, std::span<const double> x) {
  const std::size_t S = c.smooth.slots();
  const int N = c.smooth.steps();
  std::vector<double> g(x.size(), 0.0);
  c.smooth.value_grad(x, g);
  std::vector<double> z(x.size(), 0.0);
  for (std::size_t i = 0; i < S; ++i) {
    double next = 0.0;  // kappa_{n+1} zeta_{n+1}
    for (int n = N; n >= 1; --n) {
      const std::size_t k = n * S + i;
      const double kz = next - g[k] / c.hd;
      z[k] = kz / c.kappa[static_cast<std::size_t>(n)];
      next = kz;
    }
  }
  return z;
}

double sign_violation(const Chain& c, std::span<const double> x, const std::vector<double>& z,
                      std::vector<int>* sign) {
  const std::size_t S = c.smooth.slots();
  double worst = 0.0;
  for (std::size_t k = S; k < x.size(); ++k) {
    const double d = x[k] - x[k - S];
    const bool zero = sign ? (*sign)[k] == 0 : d == 0.0;
    const double v = zero ? std::max(0.0, std::abs(z[k]) - 1.0) : std::abs(z[k] - (d > 0.0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

RIReport solve_chain(const Chain& c, std::vector<double>& x) {
  RIReport rep;
  const std::size_t S = c.smooth.slots();
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  std::vector<int> sign(x.size(), 0);
  for (std::size_t k = S; k < x.size(); ++k) {
    const double d = x[k] - x[k - S];
    sign[k] = std::abs(d) <= 1e-14 * scale ? 0 : (d > 0.0 ? 1 : -1);
  }

  MinimizeOptions polish;
  polish.gtol = 1e-13;
  polish.max_iter = 200;
  std::vector<double> best = x;
  double best_viol = std::numeric_limits<double>::infinity();
  std::set<std::vector<int>> seen;
  const int max_rounds = 200 + static_cast<int>(x.size());
  for (int round = 1; round <= max_rounds; ++round) {
    rep.active_set_rounds = round;
    GroupObjective go(c, sign, x);
    auto y = go.restrict_to_groups(x);
    const auto r = minimize(go, y, polish);
    rep.newton_iterations += r.iterations;
    std::vector<double> xn = go.expand(y);

    // nonzero jumps that changed sign join the zero set
    bool changed = false;
    for (std::size_t k = S; k < xn.size(); ++k) {
      if (sign[k] == 0) continue;
      const double d = xn[k] - xn[k - S];
      if (d * sign[k] <= 0.0) {
        sign[k] = 0;
        changed = true;
      }
    }
    x = xn;
    if (changed) continue;
    const auto z = zeta_recursion(c, x);
    const double viol = sign_violation(c, x, z, &sign);
    if (viol < best_viol) {
      best_viol = viol;
      best = x;
    }
    // zero jumps whose multiplier leaves [-1, 1] are released all at once,
    // or only the worst one when that would revisit an earlier active set
    std::vector<int> next = sign;
    double worst = 1e-9;
    std::size_t release = 0;
    for (std::size_t k = S; k < x.size(); ++k) {
      if (sign[k] != 0 || std::abs(z[k]) - 1.0 <= 1e-9) continue;
      next[k] = z[k] > 0.0 ? 1 : -1;
      if (std::abs(z[k]) - 1.0 > worst) {
        worst = std::abs(z[k]) - 1.0;
        release = k;
      }
    }
    if (release == 0) break;
    if (seen.count(next)) {
      next = sign;
      next[release] = z[release] > 0.0 ? 1 : -1;
    }
    seen.insert(next);
    sign = std::move(next);
  }
  x = best;
  const auto z = zeta_recursion(c, x);
  rep.stationarity = sign_violation(c, x, z, nullptr);
  rep.value = c.smooth.value_grad(x, {}) + jump_value(c, x);
  rep.converged = rep.stationarity <= 1e-6;
  rep.message = rep.converged ? "sign condition satisfied" : "sign condition violated after active-set polish";
  return rep;
}

Trajectory pinned_copy(const RIProblem& p, std::span<const double> x) {
  Trajectory t(p.grid, p.horizon, p.steps);
  std::copy(x.begin(), x.end(), t.data().begin());
  t.pin_initial(p.initial);
  return t;
}

}  // namespace

void RIProblem::validate() const {
  if (!grid) throw ConfigError("rateind: problem has no grid");
  if (grid->boundary() == Boundary::dirichlet || grid->boundary() == Boundary::robin)
    throw ConfigError("rateind: only Neumann, periodic or point grids are supported");
  if (poly.empty()) throw ConfigError("rateind: polynomial table is empty");
  for (double c : poly)
    if (!std::isfinite(c)) throw ConfigError("rateind: polynomial coefficients must be finite");
  if (!(p >= 1.0)) throw ConfigError("rateind: growth exponent p must be >= 1");
  std::size_t degree = 0;
  for (std::size_t k = 0; k < poly.size(); ++k)
    if (poly[k] != 0.0) degree = k;
  if (static_cast<double>(degree) > p) throw ConfigError("rateind: polynomial degree exceeds the growth exponent p");
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("rateind: diffusion a must be >= 0");
  if (!(horizon > 0.0) || steps < 1) throw ConfigError("rateind: need T > 0 and N >= 1");
  if (!(epsilon > 0.0) || !(epsilon < horizon)) throw ConfigError("rateind: epsilon must lie in (0, T)");
  if (horizon / epsilon > 600.0) throw ConfigError("rateind: T / epsilon exceeds 600");
  if (!initial.grid_ptr() || !same_grid(*grid, initial.grid()) || initial.components() != 1)
    throw GridMismatch("rateind: initial datum does not live on the problem grid");
  for (const auto* v : {&h.base, &h.slope})
    if (!v->empty() && v->size() != 1 && v->size() != grid->size())
      throw ConfigError("rateind: forcing must be a constant or one value per node");
  double L = 10.0;
  for (std::size_t i = 0; i < initial.size(); ++i) L = std::max(L, 10.0 * (1.0 + std::abs(initial[i])));
  for (int k = 0; k <= 2000; ++k) {
    const double s = -L + 2.0 * L * k / 2000.0;
    const double c2 = poly_d2(poly, s);
    if (c2 < -1e-12 * (1.0 + std::abs(c2))) throw ConfigError("rateind: polynomial energy is not convex");
  }
}

double ri_energy(const RIProblem& p, std::span<const double> u, double t, const SliceSink* sink) {
  const Grid& g = *p.grid;
  const double hd = g.cell_volume();
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    v += (poly_value(p.poly, u[i]) - p.h.at(i, t) * u[i]) * hd;
    if (sink) {
      if (!sink->grad.empty()) sink->grad[sink->offset + i] += sink->scale * (poly_d1(p.poly, u[i]) - p.h.at(i, t)) * hd;
      if (sink->hess)
        sink->hess->push_back({sink->offset + i, sink->offset + i, sink->scale * poly_d2(p.poly, u[i]) * hd});
    }
  }
  if (p.a > 0.0) {
    for (const auto& e : g.edges()) {
      const double hx = g.spacing(e.axis);
      const double c = p.a * hd / (hx * hx);
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
  }
  return v;
}

double ri_dissipation(const RIProblem& p, std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s * p.grid->cell_volume();
}

double ri_jump_weight(double t, double dt, double eps) { return std::exp(-(t - 0.5 * dt) / eps); }

double ri_terminal_weight(double T, double dt, double eps) { return std::exp(-T / eps) * dt / std::expm1(dt / eps); }

double wed_ri_value(const RIProblem& p, const Trajectory& traj) {
  require_match(p, traj, "wed_ri_value");
  const double dt = p.dt();
  const double eps = p.epsilon;
  double v = ri_terminal_weight(p.horizon, dt, eps) * ri_energy(p, traj.slice(p.steps), p.horizon);
  std::vector<double> d(traj.slice_size());
  for (int n = 1; n <= p.steps; ++n) {
    const double t = traj.time(n);
    auto a = traj.slice(n);
    auto b = traj.slice(n - 1);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    v += ri_jump_weight(t, dt, eps) * eps * ri_dissipation(p, d);
    v += std::exp(-t / eps) * dt * ri_energy(p, a, t);
  }
  return v;
}

std::pair<Trajectory, RIReport> minimize_wed_ri(const RIProblem& p, const Trajectory& init) {
  p.validate();
  require_match(p, init, "minimize_wed_ri");
  if (!init.initial_consistent() || !(*init.pinned_initial() == p.initial))
    throw PreconditionError("minimize_wed_ri: initial trajectory must be pinned at u0");
  const double dt = p.dt();
  const double eps = p.epsilon;
  std::vector<double> e(static_cast<std::size_t>(p.steps) + 1, 0.0);
  std::vector<double> t(e.size(), 0.0);
  std::vector<double> kappa(e.size(), 0.0);
  for (int n = 1; n <= p.steps; ++n) {
    t[static_cast<std::size_t>(n)] = init.time(n);
    e[static_cast<std::size_t>(n)] = std::exp(-t[static_cast<std::size_t>(n)] / eps) * dt;
    kappa[static_cast<std::size_t>(n)] = eps * ri_jump_weight(t[static_cast<std::size_t>(n)], dt, eps);
  }
  e.back() += ri_terminal_weight(p.horizon, dt, eps);
  ChainSmooth smooth(p, e, t);
  Chain chain{smooth, kappa, p.grid->cell_volume()};
  std::vector<double> x(init.data().begin(), init.data().end());
  auto rep = solve_chain(chain, x);
  Trajectory out = pinned_copy(p, x);
  rep.value = wed_ri_value(p, out);
  return {std::move(out), rep};
}

std::pair<Trajectory, RIReport> incremental_solve(const RIProblem& p) {
  p.validate();
  const std::size_t S = p.grid->size();
  Trajectory out(p.grid, p.horizon, p.steps);
  out.pin_initial(p.initial);
  RIReport total;
  total.converged = true;
  for (int n = 1; n <= p.steps; ++n) {
    ChainSmooth smooth(p, {0.0, 1.0}, {0.0, out.time(n)});
    Chain chain{smooth, {0.0, 1.0}, p.grid->cell_volume()};
    std::vector<double> x(2 * S);
    auto prev = out.slice(n - 1);
    std::copy(prev.begin(), prev.end(), x.begin());
    std::copy(prev.begin(), prev.end(), x.begin() + static_cast<std::ptrdiff_t>(S));
    const auto r = solve_chain(chain, x);
    total.newton_iterations += r.newton_iterations;
    total.active_set_rounds += r.active_set_rounds;
    total.stationarity = std::max(total.stationarity, r.stationarity);
    total.converged = total.converged && r.converged;
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(S), x.end(), out.slice(n).begin());
  }
  total.message = total.converged ? "all incremental steps stationary" : "an incremental step failed the sign condition";
  return {std::move(out), total};
}

EnergeticResiduals energetic_residuals(const Trajectory& traj, const RIProblem& p) {
  require_match(p, traj, "energetic_residuals");
  EnergeticResiduals r;
  const std::size_t S = traj.slice_size();
  const double hd = p.grid->cell_volume();
  auto stability = [&](std::span<const double> u, double t) {
    const double e0 = ri_energy(p, u, t);
    std::vector<double> w(u.begin(), u.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
      for (double mag : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) {
        for (double sgn : {1.0, -1.0}) {
          const double d = sgn * mag * (1.0 + std::abs(u[i]));
          w[i] = u[i] + d;
          worst = std::max(worst, e0 - ri_energy(p, w, t) - std::abs(d) * hd);
        }
      }
      w[i] = u[i];
    }
    return worst;
  };
  const double e_init = ri_energy(p, traj.slice(0), 0.0);
  double var = 0.0;
  double power = 0.0;
  r.stability_per_knot.push_back(stability(traj.slice(0), 0.0));
  r.balance_per_knot.push_back(0.0);
  r.stability = r.stability_per_knot.back();
  std::vector<double> d(S);
  for (int n = 1; n <= traj.steps(); ++n) {
    const double t = traj.time(n);
    const double tp = traj.time(n - 1);
    auto u = traj.slice(n);
    auto up = traj.slice(n - 1);
    for (std::size_t i = 0; i < S; ++i) {
      d[i] = u[i] - up[i];
      power += (p.h.at(i, t) - p.h.at(i, tp)) * u[i] * hd;
    }
    var += ri_dissipation(p, d);
    r.stability_per_knot.push_back(stability(u, t));
    r.stability = std::max(r.stability, r.stability_per_knot.back());
    r.stability_left = std::max(r.stability_left, stability(up, t));
    r.balance_per_knot.push_back(std::abs(ri_energy(p, u, t) + var - e_init + power));
    r.balance = std::max(r.balance, r.balance_per_knot.back());
  }
  return r;
}

RIContinuation ri_eps_continuation(const RIProblem& problem, const std::vector<double>& schedule) {
  if (schedule.empty()) throw ConfigError("ri_eps_continuation: empty epsilon schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1])) throw ConfigError("ri_eps_continuation: schedule must be strictly decreasing");
  RIContinuation res;
  Trajectory warm = Trajectory::constant(problem.initial, problem.horizon, problem.steps);
  for (double eps : schedule) {
    RIProblem p = problem;
    p.epsilon = eps;
    auto [u, rep] = minimize_wed_ri(p, warm);
    res.schedule.push_back(eps);
    res.family.push_back(u);
    res.reports.push_back(rep);
    if (!rep.converged) return res;
    warm = std::move(u);
  }
  res.complete = true;
  return res;
}

double ri_submodularity(const RIProblem& p, const Trajectory& u, const Trajectory& v) {
  const auto [lo, hi] = lattice_min_max(u, v);
  return wed_ri_value(p, u) + wed_ri_value(p, v) - wed_ri_value(p, lo) - wed_ri_value(p, hi);
}

RIOrderedPair ordered_ri_minimizers(const RIProblem& problem, const Field& u0, const Field& v0,
                                    const std::vector<double>& schedule) {
  require_same_grid(u0, v0, "ordered_ri_minimizers");
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (!(u0[i] <= v0[i])) throw PreconditionError("ordered_ri_minimizers: initial data are not ordered (u0 <= v0)");
  if (schedule.empty()) throw ConfigError("ordered_ri_minimizers: empty epsilon schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1])) throw ConfigError("ordered_ri_minimizers: schedule must be strictly decreasing");
  RIOrderedPair out;
  Trajectory wu = Trajectory::constant(u0, problem.horizon, problem.steps);
  Trajectory wv = Trajectory::constant(v0, problem.horizon, problem.steps);
  for (double eps : schedule) {
    RIProblem pu = problem;
    pu.epsilon = eps;
    pu.initial = u0;
    RIProblem pv = pu;
    pv.initial = v0;
    auto [u, ru] = minimize_wed_ri(pu, wu);
    auto [v, rv] = minimize_wed_ri(pv, wv);
    out.schedule.push_back(eps);
    out.reports_u.push_back(ru);
    out.reports_v.push_back(rv);
    auto [lo, hi] = lattice_min_max(u, v);
    out.lattice_margins.emplace_back(wed_ri_value(pu, u) - wed_ri_value(pu, lo), wed_ri_value(pu, v) - wed_ri_value(pu, hi));
    out.u = lo;
    out.v = hi;
    wu = std::move(lo);
    wv = std::move(hi);
    if (!ru.converged || !rv.converged) break;
    if (eps == schedule.back()) out.complete = true;
  }
  out.min_ordering_margin = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= out.u.steps(); ++n) {
    auto a = out.u.slice(n);
    auto b = out.v.slice(n);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::min(m, b[i] - a[i]);
    out.ordering_margins.push_back(m);
    out.min_ordering_margin = std::min(out.min_ordering_margin, m);
  }
  return out;
}

}  // namespace wed
