#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "bbeig/eigensolver.hpp"
#include "bbeig/special_functions.hpp"

using namespace bbeig;

namespace {

constexpr double pi = std::numbers::pi;

struct Problem {
  DomainPtr domain;
  std::shared_ptr<const StiffnessOperator> stiffness;
};

Problem make(const Shape& s, double h) {
  auto d = build_domain(s, make_grid(s, h));
  return {d, std::make_shared<const StiffnessOperator>(assemble(d))};
}

double lambda_of(const Problem& p, const WeightField& w) { return PencilSolver(p.stiffness).solve(w).lambda; }

WeightField ball_weight(const Problem& p, const Point& c, double eps, double m_bar, double m_under) {
  return rasterize_weight(*p.domain, BallSpec::with_measure(p.domain->dimension(), c, eps), m_bar, m_under);
}

}  // namespace

TEST(Assemble, ClassicalSpectrum) {
  auto line = make(Shape::interval(0, 1), 1.0 / 128);
  EXPECT_NEAR(lambda_of(line, constant_weight(*line.domain, 1.0)) / (pi * pi), 1.0, 1e-3);
  auto sq = make(Shape::unit_square(), 1.0 / 128);
  EXPECT_NEAR(lambda_of(sq, constant_weight(*sq.domain, 1.0)) / (2 * pi * pi), 1.0, 2e-3);
  auto disk = make(Shape(Disk{{0, 0}, 1.0}), 1.0 / 128);
  const double j01 = bessel_j_first_zero(BesselOrder(0));
  EXPECT_NEAR(lambda_of(disk, constant_weight(*disk.domain, 1.0)) / (j01 * j01), 1.0, 1e-2);
}

TEST(Assemble, MatrixIsSymmetricMMatrix) {
  auto p = make(Shape(LShape{{0, 0}, 1.0}), 1.0 / 16);
  const auto& k = p.stiffness->matrix;
  EXPECT_EQ(k.rows(), p.domain->dof_count());
  const Eigen::MatrixXd dense(k);
  EXPECT_LT((dense - dense.transpose()).norm(), 1e-12);
  for (int i = 0; i < dense.rows(); ++i) {
    EXPECT_GT(dense(i, i), 0.0);
    for (int j = 0; j < dense.cols(); ++j)
      if (i != j) { EXPECT_LE(dense(i, j), 0.0); }
  }
}

TEST(Rasterize, SmallestResolvableBall) {
  const double h = 1.0 / 32;
  auto p = make(Shape::unit_square(), h);
  const auto w = ball_weight(p, {0.5, 0.5}, h * h, 1.0, 1.0);
  int positive = 0;
  for (double v : w.values) positive += v > 0.0;
  EXPECT_EQ(positive, 1);
}

TEST(Rasterize, MassBookkeeping) {
  const double h = 1.0 / 64;
  auto p = make(Shape::unit_square(), h);
  const double cell = h * h;
  for (double eps : {0.01, 0.05, 0.2}) {
    const double m_bar = 1.0, m_under = 0.25;
    const auto w = ball_weight(p, {0.43, 0.51}, eps, m_bar, m_under);
    const double omega = p.domain->discrete_volume();
    EXPECT_NEAR(w.total_mass(cell), m_bar * eps - m_under * (omega - eps), 2 * m_bar * cell) << eps;
    EXPECT_NEAR(w.favorable_measure(cell), eps, 2 * cell) << eps;
    for (double f : w.fractions) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(Rasterize, ShiftChangesOnlyRimCells) {
  const double h = 1.0 / 64;
  auto p = make(Shape::unit_square(), h);
  const double eps = 0.05;
  const double r = ball_radius(2, eps);
  const auto a = ball_weight(p, {0.5, 0.5}, eps, 1.0, 1.0);
  const auto b = ball_weight(p, {0.5 + h, 0.5}, eps, 1.0, 1.0);
  int changed = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) changed += a.values[i] != b.values[i];
  EXPECT_GT(changed, 0);
  // Only cells meeting one of the two circles change: each circle meets at
  // most 2 sqrt(2) pi r / h cells plus a few.
  EXPECT_LE(changed, 2 * (2 * std::sqrt(2.0) * M_PI * r / h + 8));
}

TEST(Rasterize, IndicatorMode) {
  const double h = 1.0 / 32;
  auto p = make(Shape::unit_square(), h);
  const auto w = rasterize_weight(*p.domain, BallSpec::with_measure(2, {0.5, 0.5}, 0.05), 1.0, 0.5, 4,
                                  RimMode::indicator);
  for (double v : w.values) EXPECT_TRUE(v == 1.0 || v == -0.5);
}

TEST(Principal, ConstantWeightAndRayleigh) {
  auto p = make(Shape::unit_square(), 1.0 / 128);
  const auto w = constant_weight(*p.domain, 1.0);
  PencilSolver solver(p.stiffness);
  const auto r = solver.solve(w);
  EXPECT_NEAR(r.lambda / (2 * pi * pi), 1.0, 2e-3);
  EXPECT_TRUE(r.positivity_ok);
  EXPECT_NEAR(l2_norm(*p.domain, r.u), 1.0, 1e-12);
  EXPECT_NEAR(rayleigh_quotient(*p.stiffness, w, r.u) / r.lambda, 1.0, 1e-8);
}

TEST(Principal, OneDimensionalShootingOracle) {
  // (-L, L) with m = 1 on (-r, r) and -1 outside: cos(s x) inside, sinh(s (L - |x|)) outside,
  // matched log-derivatives give tan(s r) = coth(s (L - r)), s = sqrt(lambda).
  const double L = 1.0, r = 0.25;
  auto f = [&](double s) { return std::tan(s * r) - 1.0 / std::tanh(s * (L - r)); };
  std::uintmax_t iters = 200;
  auto root = boost::math::tools::toms748_solve(f, 0.1, pi / (2 * r) - 1e-9, boost::math::tools::eps_tolerance<double>(50),
                                                iters);
  const double s = 0.5 * (root.first + root.second);
  auto p = make(Shape::interval(-L, L), 1.0 / 512);
  const auto w = rasterize_weight(*p.domain, BallSpec{{0, 0}, 2 * r, r}, 1.0, 1.0);
  EXPECT_NEAR(lambda_of(p, w) / (s * s), 1.0, 1e-3);
}

TEST(Principal, WeightScaling) {
  auto p = make(Shape::unit_square(), 1.0 / 48);
  auto w = ball_weight(p, {0.4, 0.55}, 0.05, 1.0, 0.5);
  const double l = lambda_of(p, w);
  for (auto& v : w.values) v *= 3.0;
  w.m_bar *= 3.0;
  w.m_under *= 3.0;
  EXPECT_NEAR(lambda_of(p, w) * 3.0 / l, 1.0, 1e-8);
}

TEST(Principal, DomainMonotonicity) {
  const double h = 1.0 / 64;
  auto small = make(Shape::unit_square(), h);
  auto large = make(Shape(Rectangle{{0, 0}, {1.5, 1.5}}), h);
  const double a = lambda_of(small, ball_weight(small, {0.5, 0.5}, 0.05, 1.0, 1.0));
  const double b = lambda_of(large, ball_weight(large, {0.5, 0.5}, 0.05, 1.0, 1.0));
  EXPECT_LE(b, a * (1 + 1e-10));
}

TEST(Principal, FavourableValueMonotonicity) {
  auto p = make(Shape::unit_square(), 1.0 / 48);
  double prev = INFINITY;
  for (double m_bar : {0.5, 1.0, 2.0, 4.0}) {
    const double l = lambda_of(p, ball_weight(p, {0.5, 0.5}, 0.05, m_bar, 1.0));
    EXPECT_LE(l, prev);
    prev = l;
  }
}

TEST(Principal, SecondOrderConvergence) {
  // Two configurations: the unit square and the 2x1 rectangle, m = 1.
  for (const Shape& s : {Shape::unit_square(), Shape(Rectangle{{0, 0}, {2, 1}})}) {
    double l[3];
    const double hs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    for (int i = 0; i < 3; ++i) {
      auto p = make(s, hs[i]);
      l[i] = lambda_of(p, constant_weight(*p.domain, 1.0));
    }
    EXPECT_NEAR((l[0] - l[1]) / (l[1] - l[2]), 4.0, 0.3) << s.describe();
  }
}

TEST(Principal, LanczosMatchesInertiaBisection) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto p = make(Shape::unit_square(), 1.0 / 40);
  for (int trial = 0; trial < 5; ++trial) {
    const double eps = 0.02 + 0.08 * unit(rng);
    const double r = ball_radius(2, eps);
    const Point c{r + (1 - 2 * r) * unit(rng), r + (1 - 2 * r) * unit(rng)};
    const auto w = ball_weight(p, c, eps, 1.0, 0.25 + 0.75 * unit(rng));
    const double l = lambda_of(p, w);
    EXPECT_EQ(count_eigenvalues_below(*p.stiffness, w, l * (1 - 1e-6)), 0);
    EXPECT_EQ(count_eigenvalues_below(*p.stiffness, w, l * (1 + 1e-6)), 1);
    const double b = inertia_bisection(*p.stiffness, w, 1e-3 * l, 1.5 * l, 1e-10);
    EXPECT_NEAR(b / l, 1.0, 1e-6) << trial;
  }
}

TEST(Principal, ShiftAndInvertAndPolish) {
  auto p = make(Shape::unit_square(), 1.0 / 48);
  const auto w = ball_weight(p, {0.5, 0.5}, 0.03, 1.0, 0.25);
  PencilSolver solver(p.stiffness);
  const auto a = solver.solve(w);
  const auto b = solver.solve(w, a.lambda * 1.01);
  EXPECT_NEAR(b.lambda / a.lambda, 1.0, 1e-10);
  const auto c = solver.polish(w, a);
  EXPECT_NEAR(c.lambda / a.lambda, 1.0, 1e-12);
  EXPECT_LE(c.residual, 1e-10);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.u.size(); ++i) diff = std::max(diff, std::abs(a.u[i] - c.u[i]));
  EXPECT_LT(diff, 1e-6);
}

TEST(Helmholtz, MaximumPrinciple) {
  auto p = make(Shape::unit_square(), 1.0 / 32);
  const auto& d = *p.domain;
  const GridFunction zero(d.grid().node_count(), 0.0);
  const auto v = solve_helmholtz(p.domain, 5.0, zero, [](const Point&) { return 1.0; });
  for (int k = 0; k < d.dof_count(); ++k) {
    EXPECT_GT(v[d.node_of_dof(k)], 0.0);
    EXPECT_LT(v[d.node_of_dof(k)], 1.0);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GridFunction rhs(d.grid().node_count(), 0.0);
  for (int k = 0; k < d.dof_count(); ++k) rhs[d.node_of_dof(k)] = unit(rng);
  const auto u = solve_helmholtz(p.domain, 2.0, rhs, [&](const Point& x) { return x[0] * x[0]; });
  for (int k = 0; k < d.dof_count(); ++k) EXPECT_GE(u[d.node_of_dof(k)], 0.0);
}

TEST(Helmholtz, OneDimensionalCosh) {
  const double L = 2.0, c = 3.0;
  auto exact = [&](double x) { return std::cosh(std::sqrt(c) * (x - L / 2)) / std::cosh(std::sqrt(c) * L / 2); };
  double err[2];
  const double hs[] = {1.0 / 32, 1.0 / 64};
  for (int i = 0; i < 2; ++i) {
    auto p = make(Shape::interval(0, L), hs[i]);
    const GridFunction zero(p.domain->grid().node_count(), 0.0);
    const auto v = solve_helmholtz(p.domain, c, zero, [](const Point&) { return 1.0; });
    err[i] = 0.0;
    for (int k = 0; k < p.domain->dof_count(); ++k) {
      const int n = p.domain->node_of_dof(k);
      err[i] = std::max(err[i], std::abs(v[n] - exact(p.domain->grid().node(n)[0])));
    }
  }
  EXPECT_LT(err[0], hs[0] * hs[0]);
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.3);
}

TEST(Helmholtz, LogBoundaryMatchesDirectSolve) {
  auto p = make(Shape::unit_square(), 1.0 / 32);
  const HelmholtzSolver hs(p.domain, 4.0);
  auto g = [](const Point& x) { return std::exp(-3.0 * x[0]); };
  const auto direct = hs.solve(GridFunction(p.domain->grid().node_count(), 0.0), g);
  const auto scaled = hs.solve_log_boundary([](const Point& x) { return -3.0 * x[0]; });
  for (int k = 0; k < p.domain->dof_count(); ++k) {
    const int n = p.domain->node_of_dof(k);
    EXPECT_NEAR(scaled.values[n] * std::exp(scaled.log_scale), direct[n], 1e-12);
  }
}

TEST(Bathtub, ConstantFunctionTies) {
  const double h = 1.0 / 16;
  auto p = make(Shape::unit_square(), h);
  const auto& d = *p.domain;
  GridFunction u(d.grid().node_count(), 0.0);
  for (int k = 0; k < d.dof_count(); ++k) u[d.node_of_dof(k)] = 2.0;
  const double eps = 6.5 * h * h;
  const auto w = bathtub_rearrangement(d, u, eps, 1.0, 0.5);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(w.values[k], 1.0);
  EXPECT_NEAR(w.values[6], 0.5 * 1.0 - 0.5 * 0.5, 1e-15);
  for (int k = 7; k < d.dof_count(); ++k) EXPECT_EQ(w.values[k], -0.5);
  const double omega = d.discrete_volume();
  EXPECT_NEAR(weighted_mass(d, w, u), (1.0 * eps - 0.5 * (omega - eps)) * 4.0, 1e-12);
}

TEST(Bathtub, DominatesRandomAdmissibleWeights) {
  auto p = make(Shape::unit_square(), 1.0 / 12);
  const auto& d = *p.domain;
  const double cell = d.grid().cell_volume();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GridFunction u(d.grid().node_count(), 0.0);
  for (int k = 0; k < d.dof_count(); ++k) u[d.node_of_dof(k)] = unit(rng);
  const double eps = 0.1, m_bar = 2.0, m_under = 0.5;
  const auto best = bathtub_rearrangement(d, u, eps, m_bar, m_under);
  const double top = weighted_mass(d, best, u);
  EXPECT_NEAR(best.favorable_measure(cell), eps, 1e-12);
  for (int t = 0; t < 100; ++t) {
    WeightField w = best;
    double excess = 0.0;
    for (auto& v : w.values) {
      v = -m_under + (m_bar + m_under) * unit(rng);
      excess += (v + m_under) * cell;
    }
    const double budget = (m_bar + m_under) * eps;
    if (excess > budget)
      for (auto& v : w.values) v = -m_under + (v + m_under) * budget / excess;
    EXPECT_LE(weighted_mass(d, w, u), top + 1e-12);
  }
}

TEST(Conversions, RoundTrip) {
  auto p = make(Shape(Disk{{0, 0}, 1.0}), 1.0 / 8);
  Vector v(p.domain->dof_count());
  for (int i = 0; i < v.size(); ++i) v[i] = i;
  EXPECT_EQ((to_unknowns(*p.domain, to_nodes(*p.domain, v)) - v).norm(), 0.0);
}
