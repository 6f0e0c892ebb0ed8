#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wed/runner.hpp"

namespace wed {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

// Worst margin over samples, kept with the number of samples seen.
struct Tally {
  double worst = std::numeric_limits<double>::infinity();
  int samples = 0;
  void add(double m) {
    worst = std::min(worst, m);
    ++samples;
  }
};

class Suite {
 public:
  explicit Suite(std::string name) { rep_.suite = std::move(name); }

  void margin(const std::string& check, const Tally& t, double tol, const std::string& note = {}, bool gating = true) {
    const bool ok = t.samples > 0 && t.worst >= tol;
    push(check, ok, t.worst, tol, note + (note.empty() ? "" : "; ") + std::to_string(t.samples) + " samples", gating);
  }
  void at_most(const std::string& check, double value, double tol, const std::string& note = {}, bool gating = true) {
    push(check, value <= tol, value, tol, note, gating);
  }
  void flag(const std::string& check, bool ok, const std::string& note = {}) {
    push(check, ok, ok ? 1.0 : 0.0, 1.0, note, true);
  }

  SuiteReport done() {
    rep_.passed = std::all_of(rep_.checks.begin(), rep_.checks.end(), [](const CheckLine& c) { return !c.gating || c.passed; });
    return rep_;
  }

 private:
  void push(const std::string& check, bool ok, double v, double tol, const std::string& note, bool gating) {
    rep_.checks.push_back({rep_.suite, check, ok, gating, v, tol, note});
  }
  SuiteReport rep_;
};

GridPtr line_grid(int n, Boundary bc = Boundary::neumann, double lo = 0.0, double hi = 1.0) {
  GridSpec s;
  s.kind = n < 3 ? DomainKind::points : DomainKind::interval;
  s.nodes = {n, 1};
  s.lower = {lo, 0.0};
  s.upper = {hi, 1.0};
  s.point_spacing = n == 2 ? hi - lo : 1.0;
  s.boundary = n < 3 ? Boundary::neumann : bc;
  return Grid::build(s);
}

GridPtr box_grid(int nx, int ny, bool radial) {
  GridSpec s;
  s.dim = 2;
  s.kind = DomainKind::rectangle;
  s.nodes = {nx, ny};
  s.upper = {1.0, static_cast<double>(ny - 1) / static_cast<double>(std::max(nx - 1, 1))};
  s.radial_symmetric = radial;
  return Grid::build(s);
}

Field random_nonnegative(const GridPtr& g, Rng& rng) {
  Field u(g);
  const bool ties = uniform(rng, 0.0, 1.0) < 0.3;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = ties ? uniform_int(rng, 0, 3) : uniform(rng, 0.0, 2.0);
  return u;
}

// ---- rearrangement -----------------------------------------------------------

double power_sum(std::span<const double> u, double p) {
  double s = 0.0;
  if (std::isinf(p)) {
    for (double x : u) s = std::max(s, std::abs(x));
    return s;
  }
  for (double x : u) s += std::pow(std::abs(x), p);
  return s;
}

// Sum of |differences|^m along one axis of the grid; `zero_ends` adds the two
// edges to an exterior zero at both ends of every line.
double line_variation(const Field& u, int axis, double m, bool zero_ends) {
  const Grid& g = u.grid();
  double s = 0.0;
  for (const auto& e : g.edges())
    if (e.axis == axis) s += std::pow(std::abs(u[e.b] - u[e.a]), m);
  if (zero_ends) {
    const int n = g.nodes(axis);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const int k = g.multi_index(i)[static_cast<std::size_t>(axis)];
      if (k == 0 || k == n - 1) s += std::pow(std::abs(u[i]), m) * (n == 1 ? 2.0 : 1.0);
    }
  }
  return s;
}

double full_variation(const Field& u, double m) {
  double s = 0.0;
  for (const auto& e : u.grid().edges()) s += std::pow(std::abs(u[e.b] - u[e.a]), m);
  return s;
}

struct RearrangeCase {
  std::string kind;
  std::function<GridPtr(Rng&)> grid;
  std::function<Rearrangement(const Grid&, Rng&)> map;
  bool one_d;
};

void lemma_items(Suite& s, const RearrangeCase& c, int samples, std::uint64_t seed) {
  Rng rng(seed);
  Tally lp, hl, ne, ps, ps2d;
  for (int k = 0; k < samples; ++k) {
    const GridPtr g = c.grid(rng);
    const Rearrangement r = c.map(*g, rng);
    const Field u = random_nonnegative(g, rng);
    const Field v = random_nonnegative(g, rng);
    const Field ru = rearrange(u, r);
    const Field rv = rearrange(v, r);
    for (double p : {1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()}) {
      const double a = power_sum(u.values(), p);
      lp.add(-std::abs(power_sum(ru.values(), p) - a) / (1.0 + a));
    }
    double uv = 0.0, ruv = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      uv += u[i] * v[i];
      ruv += ru[i] * rv[i];
      scale += u[i] * v[i];
    }
    hl.add((ruv - uv) / scale);
    const std::function<double(double)> J[] = {[](double x) { return std::abs(x); }, [](double x) { return x * x; },
                                               [](double x) { return x > 0.0 ? x * x : 0.0; }};
    for (const auto& j : J) {
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        a += j(u[i] - v[i]);
        b += j(ru[i] - rv[i]);
      }
      ne.add((a - b) / (1.0 + a));
    }
    for (double m : {2.0, 3.0}) {
      if (c.one_d || r.kind == RearrangeKind::steiner || r.kind == RearrangeKind::monotone) {
        const bool zero = r.kind != RearrangeKind::monotone;
        const double a = line_variation(u, r.axis, m, zero);
        ps.add((a - line_variation(ru, r.axis, m, zero)) / (1.0 + a));
      }
      if (!c.one_d) {
        const double a = full_variation(u, m);
        ps2d.add((a - full_variation(ru, m)) / (1.0 + a));
      }
    }
  }
  const double tol = -1e-12;
  s.margin(c.kind + ": conservation of Lp norms", lp, tol);
  s.margin(c.kind + ": Hardy-Littlewood", hl, tol);
  s.margin(c.kind + ": nonexpansivity (|x|, x^2, (x+)^2)", ne, tol);
  if (ps.samples) s.margin(c.kind + ": Polya-Szego along the rearranged direction (m = 2, 3)", ps, tol);
  if (ps2d.samples)
    s.margin(c.kind + ": Polya-Szego on the full 2D grid (empirical)", ps2d, tol,
             "reported only; the discrete 2D statement is not asserted", false);
}

// All vectors of length n over {0, 1, 2}.
std::vector<std::vector<double>> words(int n) {
  std::vector<std::vector<double>> out;
  std::vector<int> d(static_cast<std::size_t>(n), 0);
  for (;;) {
    out.emplace_back(d.begin(), d.end());
    int k = 0;
    while (k < n && ++d[static_cast<std::size_t>(k)] == 3) d[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return out;
}

void exhaustive(Suite& s) {
  Tally hl, ps;
  for (const auto& [name, r, zero] : {std::tuple{std::string("symmetric_decreasing"),
                                                 Rearrangement{RearrangeKind::symmetric_decreasing, 0, 1}, true},
                                      std::tuple{std::string("monotone"), Rearrangement{RearrangeKind::monotone, 0, 1}, false},
                                      std::tuple{std::string("monotone(-1)"),
                                                 Rearrangement{RearrangeKind::monotone, 0, -1}, false}}) {
    for (int n = 1; n <= 7; ++n) {
      const GridPtr g = line_grid(n);
      const auto all = words(n);
      std::vector<Field> fields, re;
      for (const auto& w : all) {
        fields.emplace_back(g, w);
        re.push_back(rearrange(fields.back(), r));
      }
      for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = 0; b < all.size(); ++b) {
          double uv = 0.0, ruv = 0.0;
          for (int i = 0; i < n; ++i) {
            uv += fields[a][static_cast<std::size_t>(i)] * fields[b][static_cast<std::size_t>(i)];
            ruv += re[a][static_cast<std::size_t>(i)] * re[b][static_cast<std::size_t>(i)];
          }
          hl.add(ruv - uv);
        }
      // permutation oracle: the rearranged vector attains the minimum over
      // every arrangement of the same multiset
      for (std::size_t a = 0; a < all.size(); ++a) {
        if (!std::is_sorted(all[a].begin(), all[a].end())) continue;
        for (double m : {1.0, 2.0, 3.0}) {
          std::vector<double> w = all[a];
          double best = std::numeric_limits<double>::infinity();
          do {
            best = std::min(best, line_variation(Field(g, w), 0, m, zero));
          } while (std::next_permutation(w.begin(), w.end()));
          ps.add(best - line_variation(re[a], 0, m, zero));
        }
      }
    }
  }
  s.margin("exhaustive Hardy-Littlewood, n <= 7, alphabet {0,1,2}", hl, -1e-12);
  s.margin("exhaustive 1D Polya-Szego against permutation minimum, n <= 7, m = 1, 2, 3", ps, -1e-12);
}

SuiteReport rearrangement_suite() {
  Suite s("rearrangement");
  const std::vector<RearrangeCase> cases = {
      {"symmetric_decreasing 1D", [](Rng& r) { return line_grid(uniform_int(r, 1, 64)); },
       [](const Grid&, Rng&) { return Rearrangement{RearrangeKind::symmetric_decreasing, 0, 1}; }, true},
      {"symmetric_decreasing 2D radial",
       [](Rng& r) {
         const int k = uniform_int(r, 3, 8);
         return box_grid(k, k, true);
       },
       [](const Grid&, Rng&) { return Rearrangement{RearrangeKind::symmetric_decreasing, 0, 1}; }, false},
      {"steiner", [](Rng& r) { return box_grid(uniform_int(r, 3, 8), uniform_int(r, 3, 8), false); },
       [](const Grid&, Rng& r) { return Rearrangement{RearrangeKind::steiner, uniform_int(r, 0, 1), 1}; }, false},
      {"monotone 1D", [](Rng& r) { return line_grid(uniform_int(r, 1, 64)); },
       [](const Grid&, Rng& r) { return Rearrangement{RearrangeKind::monotone, 0, uniform_int(r, 0, 1) ? 1 : -1}; },
       true},
      {"monotone 2D", [](Rng& r) { return box_grid(uniform_int(r, 3, 8), uniform_int(r, 3, 8), false); },
       [](const Grid&, Rng& r) {
         return Rearrangement{RearrangeKind::monotone, uniform_int(r, 0, 1), uniform_int(r, 0, 1) ? 1 : -1};
       },
       false},
  };
  std::uint64_t seed = 1000;
  for (const auto& c : cases) lemma_items(s, c, 1000, seed++);
  exhaustive(s);
  return s.done();
}

// ---- submodularity -----------------------------------------------------------

Trajectory random_trajectory(const GridPtr& g, const Field& u0, int steps, Rng& rng, double lo, double hi) {
  Trajectory t(g, 1.0, steps, u0.components());
  for (int n = 1; n <= steps; ++n)
    for (double& x : t.slice(n)) x = uniform(rng, lo, hi);
  t.set_slice(0, u0);
  t.pin_initial(u0);
  return t;
}

WedProblem submodular_problem(const std::string& kind, const GridPtr& g) {
  WedProblem p;
  p.grid = g;
  p.horizon = 1.0;
  p.steps = 12;
  p.epsilon = 0.2;
  if (kind == "quadratic") {
    p.energy1.kind = EnergyKind::quadratic;
  } else if (kind == "m_laplace") {
    p.energy1.kind = EnergyKind::m_laplace;
    p.energy1.m = 3.0;
    p.energy1.B = {1.0};
    p.energy1.C = {0.5};
  } else {
    p.energy1.kind = EnergyKind::fractional;
    p.energy1.s = 0.5;
  }
  p.energy2.forcing.base = {0.3};
  p.initial = Field(g);
  return p;
}

SuiteReport submodularity_suite() {
  Suite s("submodularity");
  const GridPtr g = line_grid(8);
  for (const std::string kind : {"quadratic", "m_laplace", "fractional"}) {
    Rng rng(kind.size() * 7919u + 17u);
    WedProblem p = submodular_problem(kind, g);
    Tally t;
    for (int k = 0; k < 500; ++k) {
      Field u0(g), v0(g);
      for (std::size_t i = 0; i < u0.size(); ++i) {
        u0[i] = uniform(rng, -1.0, 1.0);
        v0[i] = u0[i] + uniform(rng, 0.0, 1.0);
      }
      p.initial = u0;
      const Trajectory u = random_trajectory(g, u0, p.steps, rng, -1.5, 1.5);
      const Trajectory v = random_trajectory(g, v0, p.steps, rng, -1.5, 1.5);
      t.add(submodularity_check(p, u, v));
    }
    s.margin(kind + (kind == "m_laplace" ? " (m = 3)" : kind == "fractional" ? " (s = 0.5)" : "") +
                 ": I(u^v) + I(uvv) <= I(u) + I(v)",
             t, -1e-10);
  }
  for (double sv : {0.25, 0.5, 0.75}) {
    Rng rng(static_cast<std::uint64_t>(sv * 1000));
    Tally t;
    for (int k = 0; k < 500; ++k) {
      const GridPtr gk = line_grid(uniform_int(rng, 3, 24), Boundary::dirichlet);
      Field u(gk), v(gk);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = uniform(rng, -1.0, 1.0);
        v[i] = uniform(rng, -1.0, 1.0);
      }
      const auto [lo, hi] = lattice_min_max(u, v);
      const double a = fractional_seminorm(u, sv).value + fractional_seminorm(v, sv).value;
      t.add((a - fractional_seminorm(lo, sv).value - fractional_seminorm(hi, sv).value) / (1.0 + a));
    }
    s.margin("fractional lattice inequality, s = " + format_number(sv), t, -1e-12);
  }
  {
    Rng rng(4242);
    RIProblem p;
    p.grid = line_grid(4);
    p.a = 0.5;
    p.h.slope = {1.0};
    p.steps = 12;
    p.epsilon = 0.2;
    p.initial = Field(p.grid);
    Tally t;
    for (int k = 0; k < 500; ++k) {
      Field u0(p.grid), v0(p.grid);
      for (std::size_t i = 0; i < u0.size(); ++i) {
        u0[i] = uniform(rng, -1.0, 1.0);
        v0[i] = u0[i] + uniform(rng, 0.0, 1.0);
      }
      const Trajectory u = random_trajectory(p.grid, u0, p.steps, rng, -1.5, 1.5);
      const Trajectory v = random_trajectory(p.grid, v0, p.steps, rng, -1.5, 1.5);
      t.add(ri_submodularity(p, u, v));
    }
    s.margin("rate-independent functional", t, -1e-10);
  }
  return s.done();
}

// ---- gradients ---------------------------------------------------------------

// Central difference along a random direction against <grad, d>.
double fd_error(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                std::span<const double> grad, const std::vector<char>& frozen, Rng& rng) {
  std::vector<double> d(x.size()), xp(x.begin(), x.end()), xm(x.begin(), x.end());
  double gd = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = frozen.empty() || !frozen[i] ? uniform(rng, -1.0, 1.0) : 0.0;
    gd += grad[i] * d[i];
  }
  const double h = 1e-5;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += h * d[i];
    xm[i] -= h * d[i];
  }
  const double fd = (f(xp) - f(xm)) / (2.0 * h);
  return std::abs(fd - gd) / std::max({std::abs(fd), std::abs(gd), 1e-8});
}

SuiteReport gradients_suite() {
  Suite s("gradients");
  Rng rng(99);
  const GridPtr g = line_grid(8);
  // WED functional
  for (const std::string kind : {"quadratic", "m_laplace", "fractional", "lotka_volterra"}) {
    WedProblem p = submodular_problem(kind == "lotka_volterra" ? "quadratic" : kind, g);
    p.dissipation.p = kind == "m_laplace" ? 3.0 : 2.0;
    if (kind == "lotka_volterra") {
      p.components = 2;
      p.energy1 = EnergySpec{};
      p.energy1.kind = EnergyKind::lv_quadratic;
      p.energy1.D1 = 0.2;
      p.energy1.D2 = 0.3;
      p.energy1.F1 = 0.5;
      p.energy1.F2 = 0.7;
      p.reaction.kind = ReactionKind::lotka_volterra;
      p.reaction.lv = {1.0, 1.0, 0.5, 0.5, 0.2};
      p.energy2.forcing = {};
    }
    p.energy2.has_power = kind == "quadratic";
    p.energy2.q = 1.5;
    p.energy2.D = {0.2};
    Field u0(g, p.components);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = uniform(rng, 0.1, 1.0);
    p.initial = u0;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Trajectory u = random_trajectory(g, u0, p.steps, rng, 0.1, 1.2);
      const Trajectory w = random_trajectory(g, u0, p.steps, rng, -1.0, 1.0);
      const auto vg = wed_value_grad(p, w, u);
      std::vector<char> frozen(u.data().size(), 0);
      std::fill_n(frozen.begin(), u.slice_size(), 1);
      auto f = [&](std::span<const double> x) {
        Trajectory t = u;
        std::copy(x.begin(), x.end(), t.data().begin());
        return wed_value_grad(p, w, t).value;
      };
      worst = std::max(worst, fd_error(f, u.data(), vg.grad, frozen, rng));
    }
    s.at_most("WED value/gradient, " + kind, worst, 1e-5);
  }
  // energies at field level
  {
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      Field u(g);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = uniform(rng, -1.0, 1.0);
      for (const std::string kind : {"m_laplace", "fractional"}) {
        EnergySpec e;
        e.kind = kind == "m_laplace" ? EnergyKind::m_laplace : EnergyKind::fractional;
        e.m = 3.0;
        e.B = {1.0};
        e.C = {0.3};
        const auto ev = energy1_eval(e, u);
        auto f = [&](std::span<const double> x) { return energy1_eval(e, Field(g, {x.begin(), x.end()})).value; };
        worst = std::max(worst, fd_error(f, u.values(), ev.grad.values(), {}, rng));
      }
      DissipationSpec d;
      d.p = 3.0;
      const auto dv = dissipation_eval(d, u);
      auto f = [&](std::span<const double> x) { return dissipation_eval(d, Field(g, {x.begin(), x.end()})).value; };
      worst = std::max(worst, fd_error(f, u.values(), dv.grad.values(), {}, rng));
    }
    s.at_most("energies and dissipation at field level", worst, 1e-5);
  }
  // WIDE: wave on a torus and a Lagrangian system in R^2, N = 12
  {
    GridSpec ts;
    ts.kind = DomainKind::torus;
    ts.nodes = {8, 1};
    ts.boundary = Boundary::periodic;
    const GridPtr tg = Grid::build(ts);
    WideWaveProblem w;
    w.grid = tg;
    w.nu = 0.3;
    w.poly = {0.0, 0.0, -0.5, 0.0, 0.25};
    w.lambda = 1.0;
    w.p = 4.0;
    w.steps = 12;
    w.epsilon = 0.2;
    w.u0 = Field(tg);
    w.v0 = Field(tg);
    for (std::size_t i = 0; i < 8; ++i) {
      w.u0[i] = uniform(rng, -1.0, 1.0);
      w.v0[i] = uniform(rng, -1.0, 1.0);
    }
    LagrangianProblem l;
    l.d = 2;
    l.M = {2.0, 0.5, 0.5, 1.0};
    l.nu = 0.4;
    l.U.K = {1.0, 0.2, 0.2, 0.5};
    l.U.b = {0.1, -0.2};
    l.U.radial = {0.0, 0.3, 0.1};
    l.steps = 12;
    l.epsilon = 0.2;
    l.u0 = {0.5, -0.3};
    l.v0 = {0.2, 0.4};
    double worst = 0.0;
    auto probe = [&](const auto& prob) {
      Trajectory t = wide_initial_guess(prob);
      for (int n = 2; n <= t.steps(); ++n)
        for (double& x : t.slice(n)) x += uniform(rng, -0.5, 0.5);
      const auto vg = wide_value_grad(prob, t);
      std::vector<char> frozen(t.data().size(), 0);
      std::fill_n(frozen.begin(), 2 * t.slice_size(), 1);
      auto f = [&](std::span<const double> x) {
        Trajectory c = t;
        std::copy(x.begin(), x.end(), c.data().begin());
        return wide_value_grad(prob, c).value;
      };
      worst = std::max(worst, fd_error(f, t.data(), vg.grad, frozen, rng));
    };
    for (int k = 0; k < 5; ++k) {
      probe(w);
      probe(l);
    }
    s.at_most("WIDE value/gradient (wave on torus, Lagrangian d = 2, N = 12)", worst, 1e-5);
  }
  return s.done();
}

// ---- invariance --------------------------------------------------------------

Scenario bundled(const std::string& name) { return parse_scenario(find_bundled(name)->text); }

SuiteReport invariance_suite() {
  Suite s("invariance");
  for (const std::string name : {"heat_reflection", "mlaplace_reflection", "fractional_symmetric"}) {
    const Scenario sc = bundled(name);
    for (const auto& r : sc.maps) {
      const auto res = invariant_solve(*sc.wed, r, sc.schedule, {sc.fixed_point});
      s.at_most(name + ": " + r.name() + " invariance residual", res.residual, 1e-8,
                res.continuation.complete ? "" : "continuation incomplete");
    }
  }
  {
    const Scenario sc = bundled("heat_positivity");
    const auto cont = eps_continuation(*sc.wed, sc.schedule, sc.fixed_point);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& u : cont.family)
      for (double x : u.data()) lo = std::min(lo, x);
    s.margin("heat_positivity: u >= 0 along the schedule (M = 0, h >= 0)", Tally{lo, 1}, -1e-10);
  }
  {
    const Scenario sc = bundled("lv_box");
    const WedProblem& p = *sc.wed;
    const auto cont = eps_continuation(p, sc.schedule, sc.fixed_point);
    const double K = p.reaction.lv.K;
    double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u, lo_v = lo_u;
    for (const auto& u : cont.family)
      for (int n = 0; n <= u.steps(); ++n) {
        const Field f = u.field(n);
        for (double x : f.component(0)) {
          lo_u = std::min(lo_u, x);
          hi_u = std::max(hi_u, x);
        }
        for (double x : f.component(1)) lo_v = std::min(lo_v, x);
      }
    s.margin("lv_box: u >= 0", Tally{lo_u, 1}, -1e-10);
    s.margin("lv_box: u <= K", Tally{K - hi_u, 1}, -1e-10);
    s.margin("lv_box: v >= 0", Tally{lo_v, 1}, -1e-10);
    Rng rng(31);
    const RMap clamp = RMap::lv_clamp(K);
    Tally t;
    for (int k = 0; k < 500; ++k) {
      Field w(p.grid, 2);
      for (double& x : w.component(0)) x = uniform(rng, -0.5 * K, 1.5 * K);
      for (double& x : w.component(1)) x = uniform(rng, -0.5, 1.5);
      const Field f = reaction_eval(p.reaction, w);
      const Field rw = apply_rmap(clamp, w);
      const double a = pairing(f, rw);
      const double b = pairing(f, w);
      t.add((a - b) / (1.0 + std::abs(a) + std::abs(b)));
    }
    s.margin("lv_clamp: <f(w), R w> >= <f(w), w>", t, -1e-12);
  }
  {
    const Scenario sc = bundled("heat_reflection");
    for (const auto& r : {RMap::reflection(*sc.wed->grid, 0), RMap::positive_part(), RMap::truncate_lower(0.0)}) {
      const auto r1 = check_r1(r, sc.wed->grid, 1, 24, 5);
      const auto r2 = check_r2(r, *sc.wed, 24, 6);
      s.flag("sampled R1 for " + r.name(), r1.passed());
      s.flag("sampled R2 for " + r.name(), r2.passed());
    }
  }
  {
    const Scenario sc = bundled("reflection_incompatible");
    const auto c = compatibility(sc.maps[0], *sc.wed);
    const auto r2 = check_r2(sc.maps[0], *sc.wed, 24, 7);
    s.flag("asymmetric forcing + reflection is reported incompatible", !compatible(c) && !r2.passed());
  }
  return s.done();
}

// ---- energetic ---------------------------------------------------------------

SuiteReport energetic_suite() {
  Suite s("energetic");
  const Scenario sc = bundled("ri_ramp");
  const RIProblem& p = *sc.ri;
  const auto cont = ri_eps_continuation(p, sc.schedule);
  s.flag("continuation converged", cont.complete);
  if (!cont.family.empty()) {
    RIProblem q = p;
    q.epsilon = cont.schedule[cont.family.size() - 1];
    const Trajectory& u = cont.family.back();
    const auto [inc, irep] = incremental_solve(q);
    s.at_most("sup distance to incremental minimisation", trajectory_sup_distance(u, inc), 5e-2);
    const auto er = energetic_residuals(u, q);
    s.at_most("global stability residual", er.stability, 1e-2);
    s.at_most("energy balance residual", er.balance, 1e-2);
  }
  const auto pair = ordered_ri_minimizers(p, p.initial, *sc.comparison, sc.schedule);
  s.margin("ordered pair from u0 = 0, v0 = 0.5", Tally{pair.min_ordering_margin, 1}, -1e-10);
  return s.done();
}

// ---- WIDE --------------------------------------------------------------------

SuiteReport wide_suite() {
  Suite s("wide");
  {
    LagrangianProblem p;
    p.U.radial = {0.0, 0.5};
    const auto sch = default_schedule(p.horizon, p.steps);
    const auto c = wide_eps_continuation(p, sch);
    const Trajectory& u = c.family.back();
    double err = 0.0;
    for (int n = 0; n <= u.steps(); ++n) err = std::max(err, std::abs(u.slice(n)[0] - std::cos(u.time(n))));
    s.at_most("oscillator: max |u - cos t|, N = 200", err, 5e-2);
    const auto H = hamiltonian_series(p, u);
    double drift = 0.0;
    for (double h : H) drift = std::max(drift, std::abs(h - H.front()) / std::abs(H.front()));
    s.at_most("oscillator: Hamiltonian drift", drift, 0.05, "diagnostic", false);
  }
  {
    LagrangianProblem p;
    p.d = 2;
    p.M = {1.0, 0.0, 0.0, 1.0};
    p.U.radial = {0.0, 0.5};
    p.u0 = {1.0, 0.3};
    p.v0 = {0.2, -0.5};
    const auto r = WideMap::lagrangian_affine({0.0, -1.0, 1.0, 0.0}, {0.0, 0.0});
    s.at_most("rotation by 90 degrees, d = 2: equivariance residual",
              wide_equivariance_residual(p, r, default_schedule(p.horizon, p.steps)), 1e-7);
  }
  {
    const Scenario sc = bundled("lagrangian_rotation");
    const auto res = wide_invariant_solve(*sc.lagrangian, sc.wide_maps[0], sc.schedule);
    s.at_most("rotation about the axis, d = 3: invariance residual", res.residual, 1e-7);
  }
  {
    const Scenario sc = bundled("wave_constant");
    for (const auto& r : sc.wide_maps) {
      const auto res = wide_invariant_solve(*sc.wave, r, sc.schedule);
      s.at_most(std::string("constant data on the torus: ") +
                    (r.kind == WideMapKind::averaging ? "averaging" : "translation") + " residual",
                res.residual, 1e-10);
    }
  }
  {
    const Scenario sc = bundled("wave_standing");
    const auto c = wide_eps_continuation(*sc.wave, sc.schedule);
    const Trajectory& u = c.family.back();
    const Grid& g = u.grid();
    double err = 0.0;
    for (int n = 0; n <= u.steps(); ++n)
      for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(u.slice(n)[i] - std::cos(u.time(n)) * std::cos(g.coord(i)[0])));
    s.at_most("standing wave cos(t) cos(x)", err, 5e-2);
  }
  return s.done();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"rearrangement", "submodularity", "gradients",
                                                 "invariance",    "energetic",     "wide"};
  return names;
}

SuiteReport verify_suite(const std::string& name) {
  if (name == "rearrangement") return rearrangement_suite();
  if (name == "submodularity") return submodularity_suite();
  if (name == "gradients") return gradients_suite();
  if (name == "invariance") return invariance_suite();
  if (name == "energetic") return energetic_suite();
  if (name == "wide") return wide_suite();
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace wed
