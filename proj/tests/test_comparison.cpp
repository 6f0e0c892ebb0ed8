#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wed/comparison.hpp"

using namespace wed;

namespace {

GridPtr points(int n) {
  GridSpec s;
  s.kind = DomainKind::points;
  s.nodes = {n, 1};
  return Grid::build(s);
}

GridPtr line(int n) {
  GridSpec s;
  s.nodes = {n, 1};
  return Grid::build(s);
}

Trajectory random_pinned(const Field& u0, int steps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  Trajectory t(u0.grid_ptr(), 1.0, steps);
  for (int n = 1; n <= steps; ++n)
    for (double& x : t.slice(n)) x = U(rng);
  t.pin_initial(u0);
  return t;
}

WedProblem quadratic_heat(const GridPtr& g, int steps) {
  WedProblem p;
  p.grid = g;
  p.energy1.kind = EnergyKind::m_laplace;
  p.energy1.m = 2.0;
  p.energy1.B = {1.0};
  p.energy1.C = {0.5};
  p.energy2.forcing.base = {0.2};
  p.steps = steps;
  p.epsilon = 0.2;
  p.initial = Field(g);
  return p;
}

// Independent evaluation of the potential functional for a 2-node quadratic
// problem with psi = v^2/2, phi1 = (u1 - u0)^2 / 2 + C u^2 / 2, phi2 = <g, u>.
double brute_value(const Trajectory& u, double eps, double C, double g) {
  double s = 0.0;
  const double dt = u.dt();
  for (int n = 1; n <= u.steps(); ++n) {
    const double a = std::exp(-u.time(n) / eps);
    const double b = std::exp(-(u.time(n) - 0.5 * dt) / eps);
    const auto x = u.slice(n), y = u.slice(n - 1);
    double diss = 0.0, en = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double v = (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) / dt;
      diss += 0.5 * v * v;
      en += 0.5 * C * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)] - g * x[static_cast<std::size_t>(i)];
    }
    en += 0.5 * (x[1] - x[0]) * (x[1] - x[0]);
    s += eps * b * dt * diss + a * dt * en;
  }
  return s;
}

}  // namespace

TEST(Submodularity, IdenticalPairHasZeroMargin) {
  std::mt19937_64 rng(1);
  const WedProblem p = quadratic_heat(line(5), 6);
  const Trajectory u = random_pinned(p.initial, 6, rng);
  EXPECT_EQ(submodularity_check(p, u, u), 0.0);
}

TEST(Submodularity, TwoNodeBruteForce) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const GridPtr g = points(2);
  WedProblem p = quadratic_heat(g, 3);
  for (int k = 0; k < 200; ++k) {
    const Field u0(g, {U(rng), U(rng)});
    const Field v0(g, {u0[0] + 0.5 * (U(rng) + 1.0), u0[1] + 0.5 * (U(rng) + 1.0)});
    p.initial = u0;
    const Trajectory u = random_pinned(u0, 3, rng);
    const Trajectory v = random_pinned(v0, 3, rng);
    const auto [lo, hi] = lattice_min_max(u, v);
    const double brute = brute_value(u, 0.2, 0.5, 0.2) + brute_value(v, 0.2, 0.5, 0.2) -
                         brute_value(lo, 0.2, 0.5, 0.2) - brute_value(hi, 0.2, 0.5, 0.2);
    const double m = submodularity_check(p, u, v);
    EXPECT_NEAR(m, brute, 1e-12 * (1.0 + std::abs(brute)));
    EXPECT_GE(m, -1e-10);
  }
}

TEST(Submodularity, FractionalAndMLaplace) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const GridPtr g = line(6);
  for (const EnergyKind kind : {EnergyKind::fractional, EnergyKind::m_laplace}) {
    WedProblem p = quadratic_heat(g, 6);
    p.energy1.kind = kind;
    p.energy1.m = 3.0;
    for (int k = 0; k < 100; ++k) {
      Field u0(g), v0(g);
      for (std::size_t i = 0; i < 6; ++i) {
        u0[i] = U(rng);
        v0[i] = u0[i] + 0.5 * (U(rng) + 1.0);
      }
      p.initial = u0;
      EXPECT_GE(submodularity_check(p, random_pinned(u0, 6, rng), random_pinned(v0, 6, rng)), -1e-10);
    }
  }
}

TEST(Submodularity, UnorderedInitialDataThrows) {
  std::mt19937_64 rng(4);
  const GridPtr g = line(4);
  const WedProblem p = quadratic_heat(g, 4);
  const Field a(g, {0.0, 1.0, 0.0, 0.0});
  const Field b(g, {1.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(submodularity_check(p, random_pinned(a, 4, rng), random_pinned(b, 4, rng)), PreconditionError);
}

TEST(OrderedMinimizers, EqualDataGiveEqualOutputs) {
  const WedProblem p = quadratic_heat(line(6), 16);
  const Field u0 = Field::constant(p.grid, 0.3);
  const auto pair = ordered_minimizers(p, u0, u0, {0.2, 0.1});
  EXPECT_EQ(pair.u, pair.v);
}

TEST(OrderedMinimizers, ScalarDecay) {
  WedProblem p;
  p.grid = points(1);
  p.steps = 200;
  p.initial = Field(p.grid, {0.0});
  const auto pair = ordered_minimizers(p, Field(p.grid, {0.0}), Field(p.grid, {1.0}), default_schedule(1.0, 200));
  ASSERT_TRUE(pair.complete);
  EXPECT_TRUE(pair.audit_passed);
  for (double x : pair.u.data()) EXPECT_EQ(x, 0.0);
  for (int n = 1; n <= 200; ++n) EXPECT_GT(pair.v.slice(n)[0], 0.0);
  EXPECT_NEAR(pair.v.slice(200)[0], std::exp(-1.0), 2e-2);
}

TEST(OrderedMinimizers, RateLimitedHeat) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  WedProblem p = quadratic_heat(line(8), 16);
  p.dissipation.p = 3.0;
  Field u0(p.grid), v0(p.grid);
  for (std::size_t i = 0; i < 8; ++i) {
    u0[i] = U(rng);
    v0[i] = u0[i] + U(rng);
  }
  const auto pair = ordered_minimizers(p, u0, v0, {0.2, 0.1, 0.05});
  ASSERT_TRUE(pair.complete);
  EXPECT_TRUE(pair.audit_passed);
  EXPECT_GE(pair.min_ordering_margin, -1e-10);
  EXPECT_EQ(pair.u.field(0), u0);
  EXPECT_EQ(pair.v.field(0), v0);
}

TEST(OrderedMinimizers, UnorderedInputsThrow) {
  const WedProblem p = quadratic_heat(line(4), 8);
  EXPECT_THROW(ordered_minimizers(p, Field::constant(p.grid, 1.0), Field::constant(p.grid, 0.0), {0.1}),
               PreconditionError);
}

TEST(LatticeAudit, IdenticalAndAdversarial) {
  std::mt19937_64 rng(6);
  const WedProblem p = quadratic_heat(line(5), 6);
  const Trajectory u = random_pinned(p.initial, 6, rng);
  const auto same = lattice_value_audit(p, u, u);
  EXPECT_EQ(same.value_u, same.value_min);
  EXPECT_EQ(same.value_v, same.value_max);
  EXPECT_TRUE(same.passed);
  // random non-minimisers: the audit is allowed to fail, but the four values
  // must still satisfy submodularity
  const Field v0 = Field::constant(p.grid, 1.0);
  const Trajectory v = random_pinned(v0, 6, rng);
  const auto a = lattice_value_audit(p, u, v);
  EXPECT_GE(a.value_u + a.value_v - a.value_min - a.value_max, -1e-10);
  if (!a.passed) EXPECT_FALSE(a.note.empty());
}
