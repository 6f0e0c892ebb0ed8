#include "wed/wed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wed {

namespace {

double dual_exponent(const DissipationSpec& d) {
  const double p = d.kind == AlphaKind::power ? d.p : 2.0;
  return p / (p - 1.0);
}

double primal_exponent(const DissipationSpec& d) { return d.kind == AlphaKind::power ? d.p : 2.0; }

double masked_l2(std::span<const double> r, const std::vector<char>& frozen, std::size_t nodes, double hd) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!frozen[i % nodes]) s += r[i] * r[i];
  return std::sqrt(s * hd);
}

void require_compatible(const WedProblem& p, const Trajectory& t, const char* what) {
  if (!same_grid(*p.grid, t.grid()) || t.components() != p.components || t.steps() != p.steps ||
      t.horizon() != p.horizon)
    throw GridMismatch(std::string(what) + ": trajectory does not match the problem's space-time grid");
}

}  // namespace

// ---- problem -----------------------------------------------------------------

void WedProblem::validate() const {
  if (!grid) throw ConfigError("wed: problem has no grid");
  if (components != 1 && components != 2) throw ConfigError("wed: components must be 1 or 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("wed: horizon T must be positive");
  if (steps < 1) throw ConfigError("wed: need at least one time step");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("wed: epsilon must be positive");
  if (!(epsilon < horizon)) throw ConfigError("wed: epsilon must be smaller than the horizon T");
  if (horizon / epsilon > kMaxHorizonOverEps)
    throw ConfigError("wed: T / epsilon exceeds " + std::to_string(kMaxHorizonOverEps) +
                      " (weights underflow double precision)");
  if (!initial.grid_ptr() || !same_grid(*grid, initial.grid()) || initial.components() != components)
    throw GridMismatch("wed: initial datum does not live on the problem grid");
  dissipation.validate();
  const double p = primal_exponent(dissipation);
  energy1.validate(*grid, components, p);
  EnergySpec concave = energy2;
  concave.kind = EnergyKind::quadratic;
  concave.gamma = 1.0;
  concave.validate(*grid, components, p);
  reaction.validate(components);
  if (grid->boundary() == Boundary::dirichlet) {
    for (std::size_t i : grid->boundary_nodes())
      for (int c = 0; c < components; ++c)
        if (initial.component(c)[i] != 0.0)
          throw ConfigError("wed: Dirichlet problems need u0 = 0 on the boundary");
  }
}

bool WedProblem::state_dependent_drive() const {
  return reaction.state_dependent() || (energy2.has_power && !energy2.D.empty() &&
                                        std::any_of(energy2.D.begin(), energy2.D.end(), [](double d) { return d != 0.0; }));
}

WedModel::WedModel(const WedProblem& p)
    : p_((p.validate(), p)),
      phi1_(p.energy1, p.grid, p.components),
      phi2_(p.energy2, p.grid, p.components),
      psi_(p.dissipation, p.grid),
      frozen_(p.grid->size(), 0) {
  if (p.grid->boundary() == Boundary::dirichlet)
    for (std::size_t i : p.grid->boundary_nodes()) frozen_[i] = 1;
}

void WedModel::dphi1(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  SliceSink sink{out, nullptr, 0, 1.0 / p_.grid->cell_volume()};
  phi1_.eval(u, &sink);
}

void WedModel::drive(std::span<const double> u, double t, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  SliceSink sink{out, nullptr, 0, 1.0 / p_.grid->cell_volume()};
  phi2_.eval(u, t, &sink);
  if (p_.reaction.kind != ReactionKind::none) {
    std::vector<double> f(u.size());
    reaction_eval(p_.reaction, u, t, f);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += f[i];
  }
}

double energy_weight(double t, double eps) { return std::exp(-t / eps); }

double dissipation_weight(double t, double dt, double eps) { return std::exp(-(t - 0.5 * dt) / eps); }

// ---- objective ---------------------------------------------------------------

WedObjective::WedObjective(const WedModel& model, const Trajectory& w, double eps)
    : model_(model), w_(w), eps_(eps), steps_(model.problem().steps), dt_(model.problem().dt()),
      slots_(w.slice_size()) {
  require_compatible(model.problem(), w, "wed objective");
}

double WedObjective::value_grad(std::span<const double> x, std::span<double> grad) const {
  const auto& p = model_.problem();
  const double hd = p.grid->cell_volume();
  const bool want = !grad.empty();
  std::vector<double> D(slots_);
  std::vector<double> gD(slots_);
  double value = 0.0;
  for (int n = 1; n <= steps_; ++n) {
    const double t = p.horizon * n / steps_;
    const std::size_t on = static_cast<std::size_t>(n) * slots_;
    const std::size_t op = on - slots_;
    const double a = energy_weight(t, eps_);
    const double b = dissipation_weight(t, dt_, eps_);
    for (std::size_t i = 0; i < slots_; ++i) D[i] = (x[on + i] - x[op + i]) / dt_;
    std::fill(gD.begin(), gD.end(), 0.0);
    SliceSink sd{gD};
    const double cpsi = eps_ * b * dt_;
    value += cpsi * model_.psi().eval(D, want ? &sd : nullptr);
    SliceSink s1{grad, nullptr, on, a * dt_};
    value += a * dt_ * model_.phi1().eval(x.subspan(on, slots_), want ? &s1 : nullptr);
    auto w = w_.slice(n);
    double pair = 0.0;
    for (std::size_t i = 0; i < slots_; ++i) pair += w[i] * x[on + i];
    value -= a * dt_ * pair * hd;
    if (want) {
      for (std::size_t i = 0; i < slots_; ++i) {
        const double g = cpsi * gD[i] / dt_;
        grad[on + i] += g - a * dt_ * w[i] * hd;
        grad[op + i] -= g;
      }
    }
  }
  if (want) {
    const auto fz = frozen();
    for (std::size_t i = 0; i < grad.size(); ++i)
      if (fz[i]) grad[i] = 0.0;
  }
  return value;
}

void WedObjective::hessian(std::span<const double> x, std::vector<Triplet>& out) const {
  const auto& p = model_.problem();
  std::vector<double> D(slots_);
  std::vector<Triplet> local;
  for (int n = 1; n <= steps_; ++n) {
    const double t = p.horizon * n / steps_;
    const std::size_t on = static_cast<std::size_t>(n) * slots_;
    const std::size_t op = on - slots_;
    const double a = energy_weight(t, eps_);
    const double b = dissipation_weight(t, dt_, eps_);
    for (std::size_t i = 0; i < slots_; ++i) D[i] = (x[on + i] - x[op + i]) / dt_;
    local.clear();
    SliceSink sd{{}, &local, 0, 1.0};
    model_.psi().eval(D, &sd);
    const double c = eps_ * b * dt_ / (dt_ * dt_);
    for (const auto& e : local) {
      out.push_back({on + e.row, on + e.col, c * e.value});
      out.push_back({op + e.row, op + e.col, c * e.value});
      out.push_back({on + e.row, op + e.col, -c * e.value});
      out.push_back({op + e.row, on + e.col, -c * e.value});
    }
    SliceSink s1{{}, &out, on, a * dt_};
    model_.phi1().eval(x.subspan(on, slots_), &s1);
  }
}

std::vector<char> WedObjective::frozen() const {
  std::vector<char> fz(size(), 0);
  const auto& nodes = model_.frozen_nodes();
  const std::size_t nn = nodes.size();
  for (std::size_t k = 0; k < fz.size(); ++k) fz[k] = k < slots_ || nodes[k % nn];
  return fz;
}

std::vector<double> WedObjective::gradient_scale() const {
  const double hd = model_.problem().grid->cell_volume();
  std::vector<double> sc(size(), 1.0);
  for (int n = 1; n <= steps_; ++n) {
    const double s = energy_weight(model_.problem().horizon * n / steps_, eps_) * dt_ * hd;
    std::fill_n(sc.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(n) * slots_),
                static_cast<std::ptrdiff_t>(slots_), s);
  }
  return sc;
}

// ---- solves ------------------------------------------------------------------

ValueGrad wed_value_grad(const WedProblem& problem, const Trajectory& w, const Trajectory& traj) {
  WedModel model(problem);
  require_compatible(problem, traj, "wed_value_grad");
  if (!traj.initial_consistent()) throw PreconditionError("wed_value_grad: trajectory is not pinned at u0");
  WedObjective obj(model, w, problem.epsilon);
  ValueGrad out;
  out.grad.assign(obj.size(), 0.0);
  out.value = obj.value_grad(traj.data(), out.grad);
  return out;
}

std::pair<Trajectory, MinimizeReport> minimize_wed(const WedProblem& problem, const Trajectory& w,
                                                   const Trajectory& init, const MinimizeOptions& opt) {
  WedModel model(problem);
  require_compatible(problem, init, "minimize_wed");
  if (!init.initial_consistent() || !(*init.pinned_initial() == problem.initial))
    throw PreconditionError("minimize_wed: initial trajectory must be pinned at the problem's u0");
  WedObjective obj(model, w, problem.epsilon);
  std::vector<double> x(init.data().begin(), init.data().end());
  auto rep = minimize(obj, x, opt);
  Trajectory out = init;
  std::copy(x.begin(), x.end(), out.data().begin());
  return {std::move(out), rep};
}

Trajectory drive_of(const WedProblem& problem, const Trajectory& v) {
  WedModel model(problem);
  require_compatible(problem, v, "drive_of");
  Trajectory w(problem.grid, problem.horizon, problem.steps, problem.components);
  for (int n = 0; n <= problem.steps; ++n) model.drive(v.slice(n), v.time(n), w.slice(n));
  return w;
}

std::pair<Trajectory, FixedPointReport> fixed_point_solve(const WedProblem& problem, const FixedPointOptions& opt,
                                                         const std::optional<Trajectory>& warm) {
  if (!(opt.theta > 0.0 && opt.theta <= 1.0)) throw ConfigError("fixed point: damping must lie in (0, 1]");
  WedModel model(problem);
  FixedPointReport rep;
  rep.theta = opt.theta;
  Trajectory u = warm ? *warm : Trajectory::constant(problem.initial, problem.horizon, problem.steps);
  require_compatible(problem, u, "fixed_point_solve");
  if (!u.initial_consistent() || !(*u.pinned_initial() == problem.initial))
    throw PreconditionError("fixed_point_solve: warm start must be pinned at the problem's u0");
  const double p = primal_exponent(problem.dissipation);

  auto S = [&](const Trajectory& v, MinimizeReport& inner) {
    Trajectory arg = v;
    if (opt.project) opt.project(arg);
    Trajectory w(problem.grid, problem.horizon, problem.steps, problem.components);
    for (int n = 0; n <= problem.steps; ++n) model.drive(arg.slice(n), arg.time(n), w.slice(n));
    WedObjective obj(model, w, problem.epsilon);
    std::vector<double> x(u.data().begin(), u.data().end());
    inner = minimize(obj, x, opt.inner);
    Trajectory out = u;
    std::copy(x.begin(), x.end(), out.data().begin());
    return out;
  };

  if (!problem.state_dependent_drive()) {
    auto s = S(u, rep.last_inner);
    rep.outer_iterations = 1;
    rep.residuals.push_back(0.0);
    rep.converged = rep.last_inner.converged;
    rep.message = rep.converged ? "drive independent of the state: single minimisation" : rep.last_inner.message;
    return {std::move(s), rep};
  }

  double theta = opt.theta;
  for (int k = 1; k <= opt.max_outer; ++k) {
    auto s = S(u, rep.last_inner);
    rep.outer_iterations = k;
    if (!rep.last_inner.converged) {
      rep.message = "inner minimisation failed: " + rep.last_inner.message;
      return {std::move(u), rep};
    }
    Trajectory next = u;
    auto nd = next.data();
    auto sd = s.data();
    auto ud = u.data();
    for (std::size_t i = 0; i < nd.size(); ++i) nd[i] = (1.0 - theta) * ud[i] + theta * sd[i];
    const double res = trajectory_distance(s, u, p);
    rep.theta = theta;
    if (!rep.residuals.empty()) theta = res < rep.residuals.back() ? std::min(1.0, 2.0 * theta) : std::max(0.5 * theta, 1.0 / 64.0);
    rep.residuals.push_back(res);
    u = std::move(next);
    if (res <= opt.tol) {
      rep.converged = true;
      rep.message = "fixed point residual below tolerance";
      return {std::move(u), rep};
    }
  }
  rep.message = "outer iteration limit reached";
  return {std::move(u), rep};
}

std::vector<double> default_schedule(double horizon, int steps) {
  const double dt = horizon / steps;
  const double hi = std::min(horizon / 5.0, 0.2);
  const double lo = std::max({2.0 * dt, 1e-3, horizon / kMaxHorizonOverEps});
  std::vector<double> out;
  for (double e = hi; e >= lo * (1.0 - 1e-12); e *= 0.5) out.push_back(e);
  if (out.empty()) out.push_back(std::max(hi, lo));
  return out;
}

ContinuationResult eps_continuation(const WedProblem& problem, const std::vector<double>& schedule,
                                    const FixedPointOptions& opt) {
  if (schedule.empty()) throw ConfigError("eps_continuation: empty epsilon schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0) || !(schedule[k] < problem.horizon))
      throw ConfigError("eps_continuation: every epsilon must lie in (0, T)");
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw ConfigError("eps_continuation: schedule must be strictly decreasing");
  }
  ContinuationResult res;
  std::optional<Trajectory> warm;
  for (double eps : schedule) {
    WedProblem p = problem;
    p.epsilon = eps;
    auto [traj, rep] = fixed_point_solve(p, opt, warm);
    res.schedule.push_back(eps);
    res.family.push_back(traj);
    res.reports.push_back(rep);
    if (!rep.converged) return res;
    warm = std::move(traj);
  }
  res.complete = true;
  return res;
}

// ---- residuals ---------------------------------------------------------------

ElResidual euler_lagrange_residual(const WedProblem& problem, const Trajectory& traj) {
  WedModel model(problem);
  require_compatible(problem, traj, "euler_lagrange_residual");
  const int N = problem.steps;
  const double dt = problem.dt();
  const double eps = problem.epsilon;
  const double r = dt / eps;
  const std::size_t S = traj.slice_size();
  const double hd = problem.grid->cell_volume();
  const std::size_t nn = problem.grid->size();

  std::vector<std::vector<double>> alpha(static_cast<std::size_t>(N) + 1, std::vector<double>(S, 0.0));
  std::vector<double> D(S);
  for (int n = 1; n <= N; ++n) {
    auto a = traj.slice(n);
    auto b = traj.slice(n - 1);
    for (std::size_t i = 0; i < S; ++i) D[i] = (a[i] - b[i]) / dt;
    model.psi().alpha(D, alpha[static_cast<std::size_t>(n)]);
  }
  ElResidual out;
  out.interior.assign(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> d1(S);
  std::vector<double> w(S);
  std::vector<double> res(S);
  for (int n = 1; n < N; ++n) {
    model.dphi1(traj.slice(n), d1);
    model.drive(traj.slice(n), traj.time(n), w);
    const auto& an = alpha[static_cast<std::size_t>(n)];
    const auto& an1 = alpha[static_cast<std::size_t>(n) + 1];
    for (std::size_t i = 0; i < S; ++i)
      res[i] = (eps / dt) * (std::exp(0.5 * r) * an[i] - std::exp(-0.5 * r) * an1[i]) + d1[i] - w[i];
    out.interior[static_cast<std::size_t>(n)] = masked_l2(res, model.frozen_nodes(), nn, hd);
    out.interior_max = std::max(out.interior_max, out.interior[static_cast<std::size_t>(n)]);
  }
  out.terminal = masked_l2(alpha[static_cast<std::size_t>(N)], model.frozen_nodes(), nn, hd);
  return out;
}

double strong_solution_residual(const Trajectory& traj, const WedProblem& problem) {
  WedModel model(problem);
  require_compatible(problem, traj, "strong_solution_residual");
  const double pp = dual_exponent(problem.dissipation);
  const double dt = problem.dt();
  const double hd = problem.grid->cell_volume();
  const std::size_t S = traj.slice_size();
  const std::size_t nn = problem.grid->size();
  std::vector<double> D(S), a(S), d1(S), w(S);
  double acc = 0.0;
  for (int n = 1; n <= problem.steps; ++n) {
    auto u = traj.slice(n);
    auto um = traj.slice(n - 1);
    for (std::size_t i = 0; i < S; ++i) D[i] = (u[i] - um[i]) / dt;
    model.psi().alpha(D, a);
    model.dphi1(u, d1);
    model.drive(u, traj.time(n), w);
    for (std::size_t i = 0; i < S; ++i)
      if (!model.frozen_nodes()[i % nn]) acc += std::pow(std::abs(a[i] + d1[i] - w[i]), pp) * hd * dt;
  }
  return std::pow(acc, 1.0 / pp);
}

namespace {

class StepObjective : public Objective {
 public:
  StepObjective(const WedModel& m, std::span<const double> prev, std::span<const double> g, double t, double dt)
      : m_(m), prev_(prev), g_(g), t_(t), dt_(dt) {}

  std::size_t size() const override { return prev_.size(); }

  double value_grad(std::span<const double> x, std::span<double> grad) const override {
    const std::size_t S = size();
    const double hd = m_.problem().grid->cell_volume();
    const bool want = !grad.empty();
    std::vector<double> D(S), gD(S, 0.0);
    for (std::size_t i = 0; i < S; ++i) D[i] = (x[i] - prev_[i]) / dt_;
    SliceSink sd{gD};
    double v = dt_ * m_.psi().eval(D, want ? &sd : nullptr);
    SliceSink s1{grad, nullptr, 0, 1.0};
    v += m_.phi1().eval(x, want ? &s1 : nullptr);
    SliceSink s2{grad, nullptr, 0, -1.0};
    v -= m_.phi2().eval(x, t_, want ? &s2 : nullptr);
    for (std::size_t i = 0; i < S; ++i) {
      v -= g_[i] * x[i] * hd;
      if (want) grad[i] += gD[i] - g_[i] * hd;
    }
    if (want) {
      const auto& fz = m_.frozen_nodes();
      for (std::size_t i = 0; i < S; ++i)
        if (fz[i % fz.size()]) grad[i] = 0.0;
    }
    return v;
  }

  void hessian(std::span<const double> x, std::vector<Triplet>& out) const override {
    const std::size_t S = size();
    std::vector<double> D(S);
    for (std::size_t i = 0; i < S; ++i) D[i] = (x[i] - prev_[i]) / dt_;
    SliceSink sd{{}, &out, 0, 1.0 / dt_};
    m_.psi().eval(D, &sd);
    SliceSink s1{{}, &out, 0, 1.0};
    m_.phi1().eval(x, &s1);
    SliceSink s2{{}, &out, 0, -1.0};
    m_.phi2().eval(x, t_, &s2);
  }

  std::vector<char> frozen() const override {
    std::vector<char> fz(size());
    const auto& nodes = m_.frozen_nodes();
    for (std::size_t i = 0; i < fz.size(); ++i) fz[i] = nodes[i % nodes.size()];
    return fz;
  }

  std::vector<double> gradient_scale() const override {
    return std::vector<double>(size(), m_.problem().grid->cell_volume());
  }

 private:
  const WedModel& m_;
  std::span<const double> prev_;
  std::span<const double> g_;
  double t_;
  double dt_;
};

}  // namespace

Trajectory reference_solve(const WedProblem& problem, const MinimizeOptions& opt) {
  WedModel model(problem);
  Trajectory out = Trajectory::constant(problem.initial, problem.horizon, problem.steps);
  const std::size_t S = out.slice_size();
  std::vector<double> g(S);
  for (int n = 1; n <= problem.steps; ++n) {
    auto prev = out.slice(n - 1);
    reaction_eval(problem.reaction, prev, out.time(n), g);
    StepObjective obj(model, prev, g, out.time(n), problem.dt());
    std::vector<double> x(prev.begin(), prev.end());
    auto rep = minimize(obj, x, opt);
    if (!rep.converged)
      throw std::runtime_error("reference_solve: step " + std::to_string(n) + " did not converge (" + rep.message + ")");
    std::copy(x.begin(), x.end(), out.slice(n).begin());
  }
  return out;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b, double p) {
  if (a.data().size() != b.data().size()) throw GridMismatch("trajectory_distance: shapes differ");
  const double hd = a.grid().cell_volume();
  const std::size_t S = a.slice_size();
  double acc = 0.0;
  for (int n = 1; n <= a.steps(); ++n) {
    auto x = a.slice(n);
    auto y = b.slice(n);
    for (std::size_t i = 0; i < S; ++i) acc += std::pow(std::abs(x[i] - y[i]), p);
  }
  return std::pow(acc * hd * a.dt(), 1.0 / p);
}

double trajectory_norm(const Trajectory& a, double p) {
  Trajectory z(a.grid_ptr(), a.horizon(), a.steps(), a.components());
  return trajectory_distance(a, z, p);
}

double trajectory_sup_distance(const Trajectory& a, const Trajectory& b) {
  if (a.data().size() != b.data().size()) throw GridMismatch("trajectory_sup_distance: shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace wed
