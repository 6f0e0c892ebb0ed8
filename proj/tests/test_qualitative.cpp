#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wed/qualitative.hpp"

using namespace wed;

namespace {

GridPtr line(int n, Boundary bc = Boundary::neumann) {
  GridSpec s;
  s.nodes = {n, 1};
  s.boundary = bc;
  return Grid::build(s);
}

GridPtr points(int n) {
  GridSpec s;
  s.kind = DomainKind::points;
  s.nodes = {n, 1};
  return Grid::build(s);
}

std::vector<double> values(const Field& u) { return {u.values().begin(), u.values().end()}; }

WedProblem symmetric_heat(Boundary bc = Boundary::neumann) {
  WedProblem p;
  p.grid = line(11, bc);
  p.energy1.kind = EnergyKind::m_laplace;
  p.energy1.m = 2.0;
  p.energy1.B = {1.0};
  p.energy1.C = {0.0};
  p.steps = 32;
  p.epsilon = 0.1;
  p.initial = Field(p.grid);
  for (std::size_t i = 0; i < 11; ++i) {
    const double x = p.grid->coord(i)[0] - 0.5;
    p.initial[i] = bc == Boundary::dirichlet ? std::cos(M_PI * x) * (std::abs(x) < 0.5 ? 1.0 : 0.0)
                                             : std::exp(-20.0 * x * x);
  }
  // make the data exactly mirror-symmetric
  for (std::size_t i = 0; i < 5; ++i) p.initial[10 - i] = p.initial[i];
  p.initial[0] = p.initial[10] = bc == Boundary::dirichlet ? 0.0 : p.initial[0];
  return p;
}

}  // namespace

TEST(RMap, ComposeAppliesLastMemberFirst) {
  const GridPtr g = line(3);
  const Field u(g, {-1.0, 0.5, 2.0});
  const RMap r = RMap::compose({RMap::reflection(*g, 0), RMap::positive_part()});
  EXPECT_EQ(values(apply_rmap(r, u)), (std::vector<double>{2.0, 0.5, 0.0}));
  EXPECT_THROW(RMap::compose({}), ConfigError);
}

TEST(RMap, LvClamp) {
  const Field u(points(2), {2.0, -1.0, -3.0, 4.0}, 2);
  EXPECT_EQ(values(apply_rmap(RMap::lv_clamp(1.0), u)), (std::vector<double>{1.0, 0.0, 0.0, 4.0}));
}

TEST(RMap, Identity) {
  const Field u(line(4), {1.0, -2.0, 3.0, 0.5});
  EXPECT_EQ(apply_rmap(RMap::identity(u.grid()), u), u);
}

TEST(RMap, DeclaredAlgebra) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-1.0, 2.0);
  const GridPtr g = line(7);
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = U(rng);
  for (const RMap& r : {RMap::symmetric_decreasing(), RMap::monotone(0, 1), RMap::truncate_lower(-0.5),
                        RMap::truncate_upper(1.0), RMap::positive_part(), RMap::negative_part(), RMap::averaging(0)}) {
    EXPECT_EQ(r.algebra(), MapAlgebra::idempotent) << r.name();
    const Field once = apply_rmap(r, u);
    EXPECT_EQ(apply_rmap(r, once), once) << r.name();
  }
  const RMap refl = RMap::reflection(*g, 0);
  EXPECT_EQ(refl.algebra(), MapAlgebra::automorphism);
  EXPECT_EQ(apply_rmap(refl, apply_rmap(refl, u)), u);
  EXPECT_EQ(rigid_order(refl.perm), 2);
}

TEST(RMap, TrajectoryRequiresFixedInitial) {
  const GridPtr g = line(3);
  Trajectory t(g, 1.0, 4);
  t.pin_initial(Field(g, {1.0, 2.0, 3.0}));
  EXPECT_THROW(apply_rmap(RMap::reflection(*g, 0), t), PreconditionError);
  EXPECT_NO_THROW(apply_rmap(RMap::reflection(*g, 0), t, false));
}

TEST(RMap, Branches) {
  EXPECT_EQ(RMap::truncate_lower(0.0).branch(), Branch::dilation);
  EXPECT_EQ(RMap::truncate_upper(1.0).branch(), Branch::pointwise);
  EXPECT_EQ(RMap::lv_clamp(1.0).branch(), Branch::pointwise);
  EXPECT_EQ(RMap::symmetric_decreasing().branch(), Branch::dilation);
}

TEST(CheckR1, DilationAndConvexity) {
  const GridPtr g = line(9);
  const auto trunc = check_r1(RMap::truncate_lower(0.0), g, 1, 20, 3);
  EXPECT_TRUE(trunc.passed());
  const auto* dil = trunc.find("R1 dilation");
  ASSERT_NE(dil, nullptr);
  EXPECT_FALSE(dil->skipped);
  const auto refl = check_r1(RMap::reflection(*g, 0), g, 1, 20, 3);
  EXPECT_TRUE(refl.passed());
  const auto upper = check_r1(RMap::truncate_upper(1.0), g, 1, 20, 3);
  ASSERT_NE(upper.find("R1 dilation"), nullptr);
  EXPECT_TRUE(upper.find("R1 dilation")->skipped);
}

TEST(CheckR2, SymmetricDecreasingOnConstantCoefficients) {
  WedProblem p = symmetric_heat(Boundary::dirichlet);
  const auto rep = check_r2(RMap::symmetric_decreasing(), p, 40, 8);
  EXPECT_TRUE(rep.passed());
  for (const auto& c : rep.conditions)
    if (!c.skipped) EXPECT_GE(c.worst_margin, -1e-10) << c.name;
}

TEST(CheckR2, TruncationWithNegativeForcingFails) {
  WedProblem p = symmetric_heat(Boundary::dirichlet);
  p.energy2.forcing.base = {-1.0};
  const auto rep = check_r2(RMap::truncate_lower(0.0), p, 40, 8);
  EXPECT_FALSE(rep.passed());
  bool has_counterexample = false;
  for (const auto& c : rep.conditions)
    if (!c.passed) has_counterexample = has_counterexample || !c.counterexample.empty();
  EXPECT_TRUE(has_counterexample);
}

TEST(CheckR2, LvClampDriveInequality) {
  WedProblem p;
  p.grid = line(6);
  p.components = 2;
  p.energy1.kind = EnergyKind::lv_quadratic;
  p.energy1.D1 = p.energy1.D2 = 0.1;
  p.energy1.F1 = p.energy1.F2 = 0.5;
  p.reaction.kind = ReactionKind::lotka_volterra;
  p.reaction.lv = {1.0, 1.0, 0.5, 0.5, 0.2};
  p.steps = 8;
  p.initial = Field::constant(p.grid, 0.5, 2);
  const auto rep = check_r2(RMap::lv_clamp(1.0), p, 60, 4);
  EXPECT_TRUE(rep.passed());
}

TEST(Compatibility, AsymmetricForcingBreaksReflection) {
  WedProblem p = symmetric_heat();
  EXPECT_TRUE(compatible(compatibility(RMap::reflection(*p.grid, 0), p)));
  p.energy2.forcing.base.assign(11, 0.0);
  p.energy2.forcing.base[2] = 1.0;
  EXPECT_FALSE(compatible(compatibility(RMap::reflection(*p.grid, 0), p)));
}

TEST(InvariantSolve, ReflectionOfSymmetricHeat) {
  const WedProblem p = symmetric_heat();
  const auto res = invariant_solve(p, RMap::reflection(*p.grid, 0), {0.2, 0.1, 0.05});
  EXPECT_LE(res.residual, 1e-8);
  EXPECT_FALSE(res.flagged);
  EXPECT_TRUE(res.projected);
  for (std::size_t k = 1; k < res.residual_per_eps.size(); ++k)
    EXPECT_LE(res.residual_per_eps[k], res.residual_per_eps[k - 1] + 1e-15);
}

TEST(InvariantSolve, ComposedMapsEitherOrder) {
  const WedProblem p = symmetric_heat(Boundary::dirichlet);
  const RMap refl = RMap::reflection(*p.grid, 0);
  for (const RMap& r : {RMap::compose({refl, RMap::truncate_lower(0.0)}), RMap::compose({RMap::truncate_lower(0.0), refl})}) {
    const auto res = invariant_solve(p, r, {0.2, 0.1});
    EXPECT_LE(res.residual, 1e-8) << r.name();
  }
}

TEST(InvariantSolve, LvClampKeepsTheBox) {
  WedProblem p;
  p.grid = line(8);
  p.components = 2;
  p.energy1.kind = EnergyKind::lv_quadratic;
  p.energy1.D1 = 0.1;
  p.energy1.D2 = 0.1;
  p.energy1.F1 = 0.5;
  p.energy1.F2 = 0.5;
  p.reaction.kind = ReactionKind::lotka_volterra;
  p.reaction.lv = {1.0, 1.0, 0.5, 0.5, 0.2};
  p.steps = 16;
  p.initial = Field(p.grid, 2);
  for (std::size_t i = 0; i < 8; ++i) {
    p.initial[i] = 0.1 * static_cast<double>(i) + 0.2;
    p.initial[8 + i] = 0.3;
  }
  const auto res = invariant_solve(p, RMap::lv_clamp(1.0), {0.2, 0.1});
  EXPECT_LE(res.residual, 1e-8);
  for (int n = 0; n <= 16; ++n) {
    const Field f = res.trajectory.field(n);
    for (double x : f.component(0)) {
      EXPECT_GE(x, -1e-10);
      EXPECT_LE(x, 1.0 + 1e-10);
    }
    for (double x : f.component(1)) EXPECT_GE(x, -1e-10);
  }
}

TEST(InvariantSolve, RejectsNonInvariantInitialData) {
  WedProblem p = symmetric_heat();
  p.initial[1] += 0.1;
  EXPECT_THROW(invariant_solve(p, RMap::reflection(*p.grid, 0), {0.1}), PreconditionError);
}

TEST(InvariantSolve, IncompatibleDataIsRefusedUnlessAllowed) {
  WedProblem p = symmetric_heat();
  p.energy2.forcing.base.assign(11, 0.0);
  p.energy2.forcing.base[2] = 1.0;
  const RMap r = RMap::reflection(*p.grid, 0);
  EXPECT_THROW(invariant_solve(p, r, {0.1}), PreconditionError);
  InvariantSolveOptions opt;
  opt.allow_incompatible = true;
  const auto res = invariant_solve(p, r, {0.1}, opt);
  EXPECT_TRUE(res.flagged);
  EXPECT_GT(res.residual, 1e-3);
}
