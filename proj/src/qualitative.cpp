#include "wed/qualitative.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wed {

// ---- construction ------------------------------------------------------------

RMap RMap::identity(const Grid& g) {
  RMap r;
  r.kind = RMapKind::rigid;
  r.label = "identity";
  r.perm = NodePermutation::identity(g);
  return r;
}

RMap RMap::reflection(const Grid& g, int axis) {
  RMap r;
  r.kind = RMapKind::rigid;
  r.label = axis == 0 ? "reflection_x" : "reflection_y";
  r.perm = NodePermutation::reflection(g, axis);
  return r;
}

RMap RMap::rotation90(const Grid& g) {
  RMap r;
  r.kind = RMapKind::rigid;
  r.label = "rotation90";
  r.perm = NodePermutation::rotation90(g);
  return r;
}

RMap RMap::translation(const Grid& g, std::array<int, 2> shift) {
  RMap r;
  r.kind = RMapKind::rigid;
  r.label = "translation(" + std::to_string(shift[0]) + "," + std::to_string(shift[1]) + ")";
  r.perm = NodePermutation::translation(g, shift);
  return r;
}

RMap RMap::symmetric_decreasing() {
  RMap r;
  r.kind = RMapKind::symmetric_decreasing;
  r.rearrangement = {RearrangeKind::symmetric_decreasing, 0, 1};
  return r;
}

RMap RMap::steiner(int axis) {
  RMap r;
  r.kind = RMapKind::steiner;
  r.rearrangement = {RearrangeKind::steiner, axis, 1};
  return r;
}

RMap RMap::monotone(int axis, int direction) {
  RMap r;
  r.kind = RMapKind::monotone;
  r.rearrangement = {RearrangeKind::monotone, axis, direction};
  return r;
}

RMap RMap::truncate_lower(double M) {
  if (M > 0.0) throw ConfigError("truncate_lower: M must be <= 0");
  RMap r;
  r.kind = RMapKind::truncate_lower;
  r.level = M;
  return r;
}

RMap RMap::truncate_upper(double M) {
  if (M < 0.0) throw ConfigError("truncate_upper: M must be >= 0");
  RMap r;
  r.kind = RMapKind::truncate_upper;
  r.level = M;
  return r;
}

RMap RMap::positive_part() {
  RMap r;
  r.kind = RMapKind::positive_part;
  return r;
}

RMap RMap::negative_part() {
  RMap r;
  r.kind = RMapKind::negative_part;
  return r;
}

RMap RMap::lv_clamp(double K) {
  if (!(K > 0.0)) throw ConfigError("lv_clamp: K must be positive");
  RMap r;
  r.kind = RMapKind::lv_clamp;
  r.K = K;
  return r;
}

RMap RMap::averaging(int axis) {
  RMap r;
  r.kind = RMapKind::averaging;
  r.axis = axis;
  return r;
}

RMap RMap::compose(std::vector<RMap> members) {
  if (members.empty()) throw ConfigError("compose: member list must be nonempty");
  RMap r;
  r.kind = RMapKind::compose;
  r.members = std::move(members);
  return r;
}

Branch RMap::branch() const {
  switch (kind) {
    case RMapKind::truncate_lower:
    case RMapKind::truncate_upper:
      return level == 0.0 ? Branch::dilation : Branch::pointwise;
    case RMapKind::lv_clamp:
      return Branch::pointwise;
    case RMapKind::compose:
      for (const auto& m : members)
        if (m.branch() == Branch::pointwise) return Branch::pointwise;
      return Branch::dilation;
    default:
      return Branch::dilation;
  }
}

MapAlgebra RMap::algebra() const {
  switch (kind) {
    case RMapKind::rigid:
      return MapAlgebra::automorphism;
    case RMapKind::compose:
      return MapAlgebra::none;
    default:
      return MapAlgebra::idempotent;
  }
}

std::string RMap::name() const {
  auto num = [](double x) {
    std::ostringstream s;
    s << x;
    return s.str();
  };
  switch (kind) {
    case RMapKind::rigid:
      return label.empty() ? "rigid" : label;
    case RMapKind::symmetric_decreasing:
      return "symmetric_decreasing";
    case RMapKind::steiner:
      return "steiner(" + std::to_string(rearrangement.axis) + ")";
    case RMapKind::monotone:
      return "monotone(" + std::to_string(rearrangement.axis) + "," + std::to_string(rearrangement.direction) + ")";
    case RMapKind::truncate_lower:
      return "truncate_lower(" + num(level) + ")";
    case RMapKind::truncate_upper:
      return "truncate_upper(" + num(level) + ")";
    case RMapKind::positive_part:
      return "positive_part";
    case RMapKind::negative_part:
      return "negative_part";
    case RMapKind::lv_clamp:
      return "lv_clamp(" + num(K) + ")";
    case RMapKind::averaging:
      return "averaging(" + std::to_string(axis) + ")";
    case RMapKind::compose: {
      std::string s = "compose(";
      for (std::size_t k = 0; k < members.size(); ++k) s += (k ? "," : "") + members[k].name();
      return s + ")";
    }
  }
  return "?";
}

// ---- application -------------------------------------------------------------

Field apply_rmap(const RMap& r, const Field& u) {
  switch (r.kind) {
    case RMapKind::rigid:
      return rigid_transform(u, r.perm);
    case RMapKind::symmetric_decreasing:
    case RMapKind::steiner:
    case RMapKind::monotone:
      return rearrange(u, r.rearrangement);
    case RMapKind::truncate_lower:
      return truncate(u, TruncationMode::lower, r.level);
    case RMapKind::truncate_upper:
      return truncate(u, TruncationMode::upper, r.level);
    case RMapKind::positive_part:
      return sign_part(u, SignPart::positive);
    case RMapKind::negative_part:
      return sign_part(u, SignPart::negative);
    case RMapKind::lv_clamp: {
      if (u.components() != 2) throw ConfigError("lv_clamp: needs a (u, v) pair");
      Field out = u;
      for (auto& x : out.component(0)) x = std::max(std::min(x, r.K), 0.0);
      for (auto& x : out.component(1)) x = std::max(x, 0.0);
      return out;
    }
    case RMapKind::averaging:
      return average_along(u, r.axis);
    case RMapKind::compose: {
      Field out = u;
      for (auto it = r.members.rbegin(); it != r.members.rend(); ++it) out = apply_rmap(*it, out);
      return out;
    }
  }
  return u;
}

Trajectory apply_rmap(const RMap& r, const Trajectory& u, bool require_fixed_initial) {
  Trajectory out = u;
  for (int n = 0; n <= u.steps(); ++n) out.set_slice(n, apply_rmap(r, u.field(n)));
  if (u.pinned_initial()) {
    const Field ru0 = apply_rmap(r, *u.pinned_initial());
    if (require_fixed_initial && !(ru0 == *u.pinned_initial()))
      throw PreconditionError("apply_rmap: R u0 != u0 for map " + r.name());
    out.pin_initial(ru0);
  }
  if (u.pinned_velocity()) out.pin_velocity(apply_rmap(r, *u.pinned_velocity()));
  return out;
}

int rigid_order(const NodePermutation& p) {
  const auto& m = p.map();
  std::vector<std::size_t> cur = m;
  for (int k = 1; k <= 4096; ++k) {
    bool id = true;
    for (std::size_t i = 0; i < cur.size(); ++i)
      if (cur[i] != i) {
        id = false;
        break;
      }
    if (id) return k;
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = m[cur[i]];
  }
  throw ConfigError("rigid map: permutation order exceeds 4096");
}

Field project_rmap(const RMap& r, const Field& u) {
  if (r.kind == RMapKind::rigid) {
    const int k = rigid_order(r.perm);
    Field acc = u;
    Field cur = u;
    for (int j = 1; j < k; ++j) {
      cur = rigid_transform(cur, r.perm);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cur[i];
    }
    for (auto& x : acc.values()) x /= k;
    return acc;
  }
  if (r.kind == RMapKind::compose) {
    Field out = u;
    for (auto it = r.members.rbegin(); it != r.members.rend(); ++it) out = project_rmap(*it, out);
    return out;
  }
  return apply_rmap(r, u);
}

double invariance_residual(const RMap& r, const Trajectory& u) {
  double m = 0.0;
  for (int n = 0; n <= u.steps(); ++n) {
    const Field f = u.field(n);
    const Field g = apply_rmap(r, f);
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(g[i] - f[i]));
  }
  return m;
}

// ---- compatibility -----------------------------------------------------------

namespace {

std::vector<std::vector<double>> data_at_knots(const TimeField& tf, std::size_t slots, const WedProblem& p) {
  std::vector<std::vector<double>> out;
  if (tf.empty()) return out;
  for (int n = 0; n <= p.steps; ++n) {
    const double t = p.horizon * n / p.steps;
    std::vector<double> v(slots);
    for (std::size_t i = 0; i < slots; ++i) v[i] = tf.at(i, t);
    out.push_back(std::move(v));
  }
  return out;
}

// Forcing h of phi2 and the constant reaction g, sampled at every knot.
std::vector<std::vector<double>> forcing_knots(const WedProblem& p) {
  const std::size_t slots = p.grid->size() * static_cast<std::size_t>(p.components);
  auto h = data_at_knots(p.energy2.forcing, slots, p);
  if (p.reaction.kind == ReactionKind::constant_g) {
    auto g = data_at_knots(p.reaction.g, slots, p);
    h.insert(h.end(), g.begin(), g.end());
  }
  return h;
}

bool is_constant(const std::vector<double>& c) {
  return std::all_of(c.begin(), c.end(), [&](double x) { return x == c.front(); });
}

bool constant_along(const std::vector<double>& c, const Grid& g, int axis) {
  if (c.size() <= 1) return true;
  const std::size_t n = g.size();
  for (std::size_t base = 0; base < c.size(); base += n) {
    for (std::size_t i = 0; i < n; ++i) {
      auto ix = g.multi_index(i);
      if (ix[static_cast<std::size_t>(axis)] == 0) continue;
      ix[static_cast<std::size_t>(axis)] -= 1;
      if (c[base + i] != c[base + g.index(ix[0], ix[1])]) return false;
    }
  }
  return true;
}

bool invariant_under(const RMap& r, const std::vector<double>& c, const GridPtr& g, int components) {
  if (c.size() <= 1) return true;
  const int comps = static_cast<int>(c.size() / g->size());
  (void)components;
  Field f(g, c, comps);
  return apply_rmap(r, f) == f;
}

void add(std::vector<Compatibility>& out, std::string name, bool ok, std::string detail = {}) {
  out.push_back({std::move(name), ok, std::move(detail)});
}

std::vector<const std::vector<double>*> coefficients(const WedProblem& p) {
  std::vector<const std::vector<double>*> c;
  if (p.energy1.kind == EnergyKind::m_laplace) {
    c.push_back(&p.energy1.B);
    c.push_back(&p.energy1.C);
  }
  if (p.energy2.has_power) c.push_back(&p.energy2.D);
  return c;
}

bool D_vanishes(const WedProblem& p) {
  return !p.energy2.has_power ||
         std::all_of(p.energy2.D.begin(), p.energy2.D.end(), [](double d) { return d == 0.0; });
}

}  // namespace

std::vector<Compatibility> compatibility(const RMap& r, const WedProblem& p) {
  std::vector<Compatibility> out;
  const Grid& g = *p.grid;
  const auto knots = forcing_knots(p);
  auto forcing_all = [&](auto pred) {
    for (const auto& v : knots)
      for (double x : v)
        if (!pred(x)) return false;
    return true;
  };
  auto forcing_invariant = [&]() {
    for (const auto& v : knots)
      if (!invariant_under(r, v, p.grid, p.components)) return false;
    return true;
  };
  auto coefficients_constant = [&]() {
    for (const auto* c : coefficients(p))
      if (!is_constant(*c)) return false;
    return true;
  };

  switch (r.kind) {
    case RMapKind::rigid: {
      add(out, "domain invariant (grid automorphism)", r.perm.is_automorphism(g));
      bool coef_ok = true;
      for (const auto* c : coefficients(p)) coef_ok = coef_ok && invariant_under(r, *c, p.grid, p.components);
      add(out, "coefficients B, C, D invariant", coef_ok);
      add(out, "forcing invariant", forcing_invariant());
      break;
    }
    case RMapKind::symmetric_decreasing:
      add(out, "domain radially symmetric",
          (g.dim() == 1 && g.kind() != DomainKind::torus) || g.spec().radial_symmetric,
          "1D intervals, or 2D grids flagged radial_symmetric");
      add(out, "coefficients B, C, D constant", coefficients_constant());
      add(out, "forcing equals its symmetric decreasing rearrangement", forcing_invariant());
      break;
    case RMapKind::steiner:
      add(out, "domain is a 2D box (reflection invariant across the symmetrised lines)",
          g.dim() == 2 && g.kind() != DomainKind::torus);
      add(out, "coefficients B, C, D constant", coefficients_constant());
      add(out, "forcing equals its Steiner symmetrisation", forcing_invariant());
      break;
    case RMapKind::monotone: {
      add(out, "free ends in the monotone direction (Neumann box)",
          g.kind() != DomainKind::torus && g.boundary() == Boundary::neumann);
      bool ok = true;
      for (const auto* c : coefficients(p)) ok = ok && constant_along(*c, g, r.rearrangement.axis);
      add(out, "coefficients B, C, D constant along the direction", ok);
      add(out, "forcing equals its monotone rearrangement", forcing_invariant());
      break;
    }
    case RMapKind::truncate_lower:
    case RMapKind::positive_part:
      add(out, "forcing h >= 0", forcing_all([](double x) { return x >= 0.0; }));
      add(out, "M = 0 or D = 0", r.kind == RMapKind::positive_part || r.level == 0.0 || D_vanishes(p));
      break;
    case RMapKind::truncate_upper:
    case RMapKind::negative_part:
      add(out, "forcing h <= 0", forcing_all([](double x) { return x <= 0.0; }));
      add(out, "M = 0 or D = 0", r.kind == RMapKind::negative_part || r.level == 0.0 || D_vanishes(p));
      break;
    case RMapKind::lv_clamp:
      add(out, "Lotka-Volterra system", p.reaction.kind == ReactionKind::lotka_volterra &&
                                            p.energy1.kind == EnergyKind::lv_quadratic && p.components == 2);
      add(out, "clamp level equals the carrying capacity K",
          p.reaction.kind == ReactionKind::lotka_volterra && p.reaction.lv.K == r.K);
      break;
    case RMapKind::averaging: {
      add(out, "Neumann or periodic box", g.boundary() == Boundary::neumann || g.boundary() == Boundary::periodic);
      bool ok = true;
      for (const auto* c : coefficients(p)) ok = ok && constant_along(*c, g, r.axis);
      add(out, "coefficients B, C, D constant along the direction", ok);
      add(out, "forcing constant along the direction", forcing_invariant());
      break;
    }
    case RMapKind::compose:
      for (const auto& m : r.members)
        for (auto& c : compatibility(m, p)) add(out, m.name() + ": " + c.name, c.passed, c.detail);
      break;
  }
  if (p.grid->boundary() == Boundary::dirichlet && r.kind != RMapKind::rigid && r.kind != RMapKind::compose) {
    Field z = Field::constant(p.grid, 0.0, p.components);
    add(out, "Dirichlet data preserved (R 0 = 0)", apply_rmap(r, z) == z);
  }
  return out;
}

bool compatible(const std::vector<Compatibility>& c) {
  return std::all_of(c.begin(), c.end(), [](const Compatibility& x) { return x.passed; });
}

bool PropertyReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.passed; });
}

const ConditionResult* PropertyReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

// ---- sampled checks ----------------------------------------------------------

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{-1.0, 1.0};

  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  Field field(const GridPtr& g, int comps, int mode) {
    Field f(g, comps);
    const double amp = std::pow(10.0, unit(rng));
    for (auto& x : f.values()) {
      x = amp * unit(rng);
      if (mode == 1) x = std::abs(x);
    }
    return f;
  }
};

void zero_dirichlet(Field& f) {
  const Grid& g = f.grid();
  if (g.boundary() != Boundary::dirichlet) return;
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t i : g.boundary_nodes()) f.component(c)[i] = 0.0;
}

void record(ConditionResult& c, double margin, double tol, const Field& sample) {
  ++c.samples;
  if (c.samples == 1 || margin < c.worst_margin) {
    c.worst_margin = margin;
    if (margin < -tol) {
      c.passed = false;
      c.counterexample.assign(sample.values().begin(), sample.values().end());
    }
  }
}

double sup(const Field& f) { return sup_norm(f.values()); }

ConditionResult condition(std::string name) {
  ConditionResult c;
  c.name = std::move(name);
  return c;
}

}  // namespace

PropertyReport check_r1(const RMap& r, const GridPtr& grid, int components, int samples, std::uint64_t seed) {
  PropertyReport rep;
  rep.seed = seed;
  Sampler s(seed);
  ConditionResult nonempty = condition("R1 nonempty");
  ConditionResult convex = condition("R1 convex fixed set");
  ConditionResult sobolev = condition("R1 W1p stability");
  ConditionResult dilation = condition("R1 dilation");
  if (r.branch() == Branch::pointwise) {
    dilation.skipped = true;
    dilation.note = "pointwise-branch map: dilation hypothesis not required";
  }
  {
    Field z = Field::constant(grid, 0.0, components);
    const Field pz = project_rmap(r, z);
    const Field rpz = apply_rmap(r, pz);
    double d = 0.0;
    for (std::size_t i = 0; i < pz.size(); ++i) d = std::max(d, std::abs(rpz[i] - pz[i]));
    record(nonempty, -d, 1e-12, pz);
  }
  for (int k = 0; k < samples; ++k) {
    Field x = s.field(grid, components, k % 2);
    Field y = s.field(grid, components, (k + 1) % 2);
    const Field a = project_rmap(r, x);
    const Field b = project_rmap(r, y);
    Field mid = a;
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
    const Field rm = apply_rmap(r, mid);
    double d = 0.0;
    for (std::size_t i = 0; i < mid.size(); ++i) d = std::max(d, std::abs(rm[i] - mid[i]));
    record(convex, -d, 1e-12 * (1.0 + sup(mid)), mid);

    // discrete W^{1,2} seminorm of a 4-knot trajectory
    std::vector<Field> traj;
    for (int n = 0; n < 4; ++n) traj.push_back(s.field(grid, components, k % 2));
    double su = 0.0;
    double sr = 0.0;
    for (int n = 1; n < 4; ++n) {
      const Field r1 = apply_rmap(r, traj[static_cast<std::size_t>(n)]);
      const Field r0 = apply_rmap(r, traj[static_cast<std::size_t>(n) - 1]);
      for (std::size_t i = 0; i < r1.size(); ++i) {
        const double du = traj[static_cast<std::size_t>(n)][i] - traj[static_cast<std::size_t>(n) - 1][i];
        const double dr = r1[i] - r0[i];
        su += du * du;
        sr += dr * dr;
      }
    }
    record(sobolev, su - sr, 1e-10 * (1.0 + su), traj[0]);

    if (!dilation.skipped) {
      for (double delta : {0.25, 0.5, 0.75}) {
        Field da = a;
        for (auto& v : da.values()) v *= delta;
        const Field rda = apply_rmap(r, da);
        double dd = 0.0;
        for (std::size_t i = 0; i < da.size(); ++i) dd = std::max(dd, std::abs(rda[i] - da[i]));
        record(dilation, -dd, 1e-12 * (1.0 + sup(da)), da);
      }
    }
  }
  rep.conditions = {nonempty, convex, sobolev, dilation};
  return rep;
}

PropertyReport check_r2(const RMap& r, const WedProblem& problem, int samples, std::uint64_t seed) {
  WedModel model(problem);
  PropertyReport rep;
  rep.seed = seed;
  Sampler s(seed);
  const GridPtr& g = problem.grid;
  const int comps = problem.components;
  const double hd = g->cell_volume();
  std::uniform_real_distribution<double> tdist(0.0, problem.horizon);
  ConditionResult r21 = condition("R2.1 energy");
  ConditionResult r22 = condition("R2.2 dissipation");
  ConditionResult r23 = condition(r.branch() == Branch::dilation ? "R2.3 drive (invariant v)" : "R2.3 drive (v = u)");

  auto sample = [&](int k) {
    Field u = s.field(g, comps, k % 3 == 1 ? 1 : 0);
    if (k % 3 == 2) {
      // adversarial: an R-invariant field perturbed slightly
      Field p = project_rmap(r, u);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += 1e-3 * s.unit(s.rng) * (1.0 + std::abs(p[i]));
      u = p;
    }
    zero_dirichlet(u);
    return u;
  };

  std::vector<double> w(g->size() * static_cast<std::size_t>(comps));
  for (int k = 0; k < samples; ++k) {
    const Field u = sample(k);
    const Field ru = apply_rmap(r, u);
    const double e0 = model.phi1().eval(u.values());
    const double e1 = model.phi1().eval(ru.values());
    record(r21, e0 - e1, 1e-10 * (1.0 + std::abs(e0)), u);

    const Field u1 = sample(k + 1);
    const Field ru1 = apply_rmap(r, u1);
    const double t = tdist(s.rng);
    const double dt = problem.dt();
    Field du = u1;
    Field dr = ru1;
    for (std::size_t i = 0; i < du.size(); ++i) {
      du[i] = (u1[i] - u[i]) / dt;
      dr[i] = (ru1[i] - ru[i]) / dt;
    }
    const double weight = energy_weight(t, problem.epsilon);
    const double d0 = weight * model.psi().eval(du.values());
    const double d1 = weight * model.psi().eval(dr.values());
    record(r22, d0 - d1, 1e-10 * (1.0 + std::abs(d0)), u);

    Field v = r.branch() == Branch::dilation ? project_rmap(r, sample(k + 2)) : u;
    zero_dirichlet(v);
    model.drive(v.values(), t, w);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      a += w[i] * ru[i] * hd;
      b += w[i] * u[i] * hd;
    }
    record(r23, a - b, 1e-10 * (1.0 + std::abs(a) + std::abs(b)), u);
  }
  rep.conditions = {r21, r22, r23};
  return rep;
}

InvariantSolveResult invariant_solve(const WedProblem& problem, const RMap& r, const std::vector<double>& schedule,
                                     const InvariantSolveOptions& opt) {
  problem.validate();
  if (!(apply_rmap(r, problem.initial) == problem.initial))
    throw PreconditionError("invariant_solve: R u0 != u0 for map " + r.name());
  InvariantSolveResult res;
  res.compatibility = compatibility(r, problem);
  const bool ok = compatible(res.compatibility);
  if (!ok && !opt.allow_incompatible) {
    std::string msg = "invariant_solve: compatibility conditions fail for " + r.name() + ":";
    for (const auto& c : res.compatibility)
      if (!c.passed) msg += " [" + c.name + "]";
    throw PreconditionError(msg);
  }
  FixedPointOptions fp = opt.fixed_point;
  res.projected = ok && r.branch() == Branch::dilation;
  if (res.projected) {
    fp.project = [&r](Trajectory& t) {
      for (int n = 1; n <= t.steps(); ++n) t.set_slice(n, project_rmap(r, t.field(n)));
    };
  }
  res.continuation = eps_continuation(problem, schedule, fp);
  for (const auto& t : res.continuation.family) res.residual_per_eps.push_back(invariance_residual(r, t));
  res.trajectory = res.continuation.family.back();
  res.residual = res.residual_per_eps.back();
  res.flagged = !res.continuation.complete || res.residual > opt.tolerance;

  // margins of (R2.1)/(R2.2) on the solution's own slices
  WedProblem p = problem;
  p.epsilon = res.continuation.schedule.back();
  WedModel model(p);
  ConditionResult e = condition("self R2.1 energy");
  ConditionResult d = condition("self R2.2 dissipation");
  const auto& u = res.trajectory;
  for (int n = 0; n <= u.steps(); ++n) {
    const Field f = u.field(n);
    const Field rf = apply_rmap(r, f);
    const double e0 = model.phi1().eval(f.values());
    record(e, e0 - model.phi1().eval(rf.values()), 1e-10 * (1.0 + std::abs(e0)), f);
    if (n > 0) {
      const Field fp0 = u.field(n - 1);
      const Field rp = apply_rmap(r, fp0);
      std::vector<double> a(f.size()), b(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) {
        a[i] = (f[i] - fp0[i]) / u.dt();
        b[i] = (rf[i] - rp[i]) / u.dt();
      }
      const double d0 = model.psi().eval(a);
      record(d, d0 - model.psi().eval(b), 1e-10 * (1.0 + std::abs(d0)), f);
    }
  }
  res.report.conditions = {e, d};
  if (opt.self_check_samples > 0) {
    auto r2 = check_r2(r, p, opt.self_check_samples, 7);
    for (auto& c : r2.conditions) res.report.conditions.push_back(c);
  }
  return res;
}

}  // namespace wed
