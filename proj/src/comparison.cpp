#include "wed/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace wed {

void require_ordered(const Field& u0, const Field& v0, const char* what) {
  require_same_grid(u0, v0, what);
  if (u0.components() != v0.components()) throw GridMismatch(std::string(what) + ": component counts differ");
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (!(u0[i] <= v0[i])) throw PreconditionError(std::string(what) + ": initial data are not ordered (u0 <= v0)");
}

double potential_wed_value(const WedModel& model, const Trajectory& u, double eps) {
  const auto& p = model.problem();
  if (p.reaction.kind == ReactionKind::lotka_volterra)
    throw ConfigError("potential form: the reaction term is not a potential (constant g required)");
  const double dt = u.dt();
  const double hd = p.grid->cell_volume();
  const std::size_t slots = u.slice_size();
  std::vector<double> D(slots);
  std::vector<double> g(slots, 0.0);
  double value = 0.0;
  for (int n = 1; n <= u.steps(); ++n) {
    const double t = u.time(n);
    auto un = u.slice(n);
    auto up = u.slice(n - 1);
    for (std::size_t i = 0; i < slots; ++i) D[i] = (un[i] - up[i]) / dt;
    value += eps * dissipation_weight(t, dt, eps) * dt * model.psi().eval(D);
    double e = model.phi1().eval(un) - model.phi2().eval(un, t);
    if (p.reaction.kind == ReactionKind::constant_g) {
      reaction_eval(p.reaction, un, t, g);
      double pair = 0.0;
      for (std::size_t i = 0; i < slots; ++i) pair += g[i] * un[i];
      e -= pair * hd;
    }
    value += energy_weight(t, eps) * dt * e;
  }
  return value;
}

double submodularity_check(const WedProblem& problem, const Trajectory& u, const Trajectory& v) {
  if (!u.initial_consistent() || !v.initial_consistent())
    throw PreconditionError("submodularity_check: trajectories must be pinned");
  require_ordered(*u.pinned_initial(), *v.pinned_initial(), "submodularity_check");
  WedModel model(problem);
  const auto [lo, hi] = lattice_min_max(u, v);
  const double eps = problem.epsilon;
  return potential_wed_value(model, u, eps) + potential_wed_value(model, v, eps) -
         potential_wed_value(model, lo, eps) - potential_wed_value(model, hi, eps);
}

LatticeAudit lattice_value_audit(const WedProblem& problem, const Trajectory& u, const Trajectory& v) {
  WedModel model(problem);
  const double eps = problem.epsilon;
  const auto [lo, hi] = lattice_min_max(u, v);
  LatticeAudit a;
  a.eps = eps;
  a.value_u = potential_wed_value(model, u, eps);
  a.value_v = potential_wed_value(model, v, eps);
  a.value_min = potential_wed_value(model, lo, eps);
  a.value_max = potential_wed_value(model, hi, eps);
  a.margin_min = a.value_u - a.value_min + 1e-9 * (1.0 + std::abs(a.value_u));
  a.margin_max = a.value_v - a.value_max + 1e-9 * (1.0 + std::abs(a.value_v));
  a.passed = a.margin_min >= 0.0 && a.margin_max >= 0.0;
  if (!a.passed) a.note = "lattice value exceeds the original: inputs are not minimisers or the discretisation is not submodular";
  return a;
}

std::vector<double> ordering_margins(const Trajectory& a, const Trajectory& b) {
  std::vector<double> out;
  for (int n = 0; n <= a.steps(); ++n) {
    auto x = a.slice(n);
    auto y = b.slice(n);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) m = std::min(m, y[i] - x[i]);
    out.push_back(m);
  }
  return out;
}

OrderedPair ordered_minimizers(const WedProblem& problem, const Field& u0, const Field& v0,
                               const std::vector<double>& schedule, const FixedPointOptions& opt) {
  require_ordered(u0, v0, "ordered_minimizers");
  if (problem.reaction.kind == ReactionKind::lotka_volterra)
    throw ConfigError("ordered_minimizers: needs a potential problem (reaction none or constant g)");
  if (schedule.empty()) throw ConfigError("ordered_minimizers: empty epsilon schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1])) throw ConfigError("ordered_minimizers: schedule must be strictly decreasing");

  OrderedPair out;
  std::optional<Trajectory> wu;
  std::optional<Trajectory> wv;
  for (double eps : schedule) {
    WedProblem pu = problem;
    pu.epsilon = eps;
    pu.initial = u0;
    WedProblem pv = pu;
    pv.initial = v0;
    auto [u, ru] = fixed_point_solve(pu, opt, wu);
    auto [v, rv] = fixed_point_solve(pv, opt, wv);
    out.schedule.push_back(eps);
    out.reports_u.push_back(ru);
    out.reports_v.push_back(rv);
    auto audit = lattice_value_audit(pu, u, v);
    out.audit_passed = out.audit_passed && audit.passed;
    out.audits.push_back(audit);
    auto [lo, hi] = lattice_min_max(u, v);
    out.u = std::move(lo);
    out.v = std::move(hi);
    if (!ru.converged || !rv.converged) break;
    wu = out.u;
    wv = out.v;
    if (eps == schedule.back()) out.complete = true;
  }
  out.ordering_margins = ordering_margins(out.u, out.v);
  out.min_ordering_margin = *std::min_element(out.ordering_margins.begin(), out.ordering_margins.end());
  return out;
}

}  // namespace wed
