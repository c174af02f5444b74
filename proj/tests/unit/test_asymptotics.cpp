#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "bbeig/asymptotics.hpp"
#include "bbeig/error.hpp"

using namespace bbeig;

namespace {

const LimitSolution& planar() {
  static const LimitSolution sol = solve_limit_problem(WeightParams::standard(2, 1.0, 0.25));
  return sol;
}

std::vector<AsymptoticRecord> synthetic_rows(double psi, double scale) {
  std::vector<AsymptoticRecord> rows;
  for (double eps : {0.1, 0.05, 0.02, 0.01}) {
    AsymptoticRecord r;
    r.eps = eps;
    r.k = std::sqrt(eps);
    r.beta = 1.0 / r.k;
    r.psi_tilde = psi;
    r.gap = scale * planar().phi * std::exp(-r.beta * psi);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST(ExpansionReport, SyntheticRowsRecoverRateAndRatio) {
  const auto rows = synthetic_rows(1.3, 1.0);
  const auto rep = expansion_report(rows, planar(), 0.5);
  EXPECT_EQ(rep.fit.points, 4);
  EXPECT_NEAR(rep.rate, 1.3, 1e-10);
  EXPECT_NEAR(rep.rate_vs_psi, 0.0, 1e-10);
  for (double r : rep.ratio) EXPECT_NEAR(r, 1.0, 1e-12);
  EXPECT_TRUE(rep.last_ratio_in_band);
  EXPECT_NEAR(rep.rate_reference, 2 * planar().decay_rate() * 0.5, 1e-15);
}

TEST(ExpansionReport, ConstantPrefactorShowsInRatio) {
  const auto rep = expansion_report(synthetic_rows(1.0, 3.0), planar(), 0.5);
  EXPECT_NEAR(rep.rate, 1.0, 1e-10);
  for (double r : rep.ratio) EXPECT_NEAR(r, 3.0, 1e-12);
  EXPECT_FALSE(rep.last_ratio_in_band);
  EXPECT_TRUE(rep.ratio_trends_to_one);
}

TEST(ExpansionReport, NonPositiveGapExcludedWithWarning) {
  auto rows = synthetic_rows(1.0, 1.0);
  rows[1].gap = -1e-9;
  rows[2].error = "boom";
  const auto rep = expansion_report(rows, planar(), 0.5);
  EXPECT_EQ(rep.fit.points, 2);
  EXPECT_FALSE(rep.used[1]);
  EXPECT_FALSE(rep.used[2]);
  EXPECT_EQ(rep.warnings.size(), 2u);
  EXPECT_THROW(expansion_report({rows[0], rows[1]}, planar(), 0.5), ConfigError);
}

TEST(ProjectionResidual, ZeroWhenProjectionEqualsFunction) {
  const Shape s = Shape::unit_square();
  const auto d = build_domain(s, make_grid(s, 1.0 / 16));
  GridFunction u(d->grid().node_count(), 0.0);
  for (int i = 0; i < d->dof_count(); ++i) {
    const int node = d->node_of_dof(i);
    const Point p = d->grid().node(node);
    u[node] = std::sin(M_PI * p[0]) * std::sin(M_PI * p[1]);
  }
  const auto r = projection_residual(*d, u, u, 5.0);
  EXPECT_EQ(r.h1_norm, 0.0);
  EXPECT_EQ(r.laplacian_norm, 0.0);
  for (double v : r.phi) EXPECT_EQ(v, 0.0);
}

TEST(ProjectionResidual, H1NormScalesLinearly) {
  const Shape s = Shape::unit_square();
  const auto d = build_domain(s, make_grid(s, 1.0 / 16));
  GridFunction u(d->grid().node_count(), 0.0), z(d->grid().node_count(), 0.0);
  for (int i = 0; i < d->dof_count(); ++i) {
    const int node = d->node_of_dof(i);
    const Point p = d->grid().node(node);
    u[node] = p[0] * (1 - p[0]) * p[1] * (1 - p[1]);
  }
  const auto a = projection_residual(*d, u, z, 1.0), b = projection_residual(*d, u, z, 2.0);
  EXPECT_GT(a.h1_norm, 0.0);
  EXPECT_NEAR(b.h1_norm / a.h1_norm, 2.0, 1e-12);
  EXPECT_NEAR(b.laplacian_norm / a.laplacian_norm, 2.0, 1e-12);
}

TEST(PsiTilde, ConcentricDiskMatchesRadialSolution) {
  // On the disk of radius R = d/k centred at the origin, the harmonic extension
  // is w(R) I0(kappa |y|) / I0(kappa R).
  const Shape disk(Disk{{0, 0}, 1.0});
  const double eps = 0.01, k = std::sqrt(eps);
  const double h = ball_radius(2, eps) / 8;
  const auto d = build_domain(disk, make_grid(disk, h, {0, 0}));
  const auto psi = compute_psi_tilde(*d, {0, 0}, k, planar());
  const double kappa = planar().decay_rate(), R = 1.0 / k;
  const double log_h0 = eval_log_w(R, planar()) - std::log(boost::math::cyl_bessel_i(0.0, kappa * R));
  const double bound = -k * eval_log_w(R, planar());
  EXPECT_GT(psi.value, bound);
  EXPECT_NEAR(psi.value / (-k * log_h0), 1.0, 0.02);
  EXPECT_NEAR(psi.value, 2 * kappa, 0.1 * 2 * kappa);
}

TEST(PsiTilde, LargerDomainGivesLargerPsi) {
  const double eps = 0.02, k = std::sqrt(eps);
  const double h = ball_radius(2, eps) / 8;
  const Shape small(Disk{{0, 0}, 0.8}), large(Disk{{0, 0}, 1.0});
  const auto a = compute_psi_tilde(*build_domain(small, make_grid(small, h, {0, 0})), {0, 0}, k, planar());
  const auto b = compute_psi_tilde(*build_domain(large, make_grid(large, h, {0, 0})), {0, 0}, k, planar());
  EXPECT_LT(a.value, b.value);
}

TEST(DiscreteLimit, CloseToContinuumEigenvalue) {
  const WeightParams p = WeightParams::standard(2, 1.0, 0.25);
  const auto ref = discrete_limit_reference(p, p.transition_radius() / 8, {0, 0}, 8.0);
  EXPECT_NEAR(ref.lambda / planar().lambda0, 1.0, 5e-3);
  double norm = 0.0;
  for (int dof = 0; dof < ref.domain->dof_count(); ++dof) {
    const double v = ref.w[ref.domain->node_of_dof(dof)];
    EXPECT_GT(v, 0.0);
    norm += v * v;
  }
  EXPECT_NEAR(norm * ref.domain->grid().cell_volume(), 1.0, 1e-10);
}

TEST(AnalyzeEps, SquareRowIsConsistent) {
  SweepSettings settings;
  const auto r = analyze_eps(Shape::unit_square(), planar(), 0.1, settings);
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_NEAR(r.center[0], 0.5, r.h + 1e-12);
  EXPECT_NEAR(r.center[1], 0.5, r.h + 1e-12);
  EXPECT_NEAR(r.lambda_tilde, r.k * r.k * r.lambda, 1e-12 * r.lambda_tilde);
  EXPECT_NEAR(r.lambda1, r.lambda_tilde - planar().lambda0, 1e-12);
  EXPECT_GT(r.gap, 0.0);
  EXPECT_LE(r.route_gap, 1e-10);
  EXPECT_NEAR(r.blowup_l2_norm, 1.0, 1e-2);
  EXPECT_GT(r.psi_tilde, 0.0);
  EXPECT_GT(r.evaluations, 0);
}

TEST(AnalyzeEps, OversizedEpsReportedInRow) {
  SweepSettings settings;
  settings.blowup_analysis = false;
  const auto r = analyze_eps(Shape::unit_square(), planar(), 0.9, settings);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.error.find("epsilon too large for domain"), std::string::npos) << r.error;
}

TEST(Sweep, RejectsNonDecreasingList) {
  SweepSettings settings;
  settings.eps_list = {0.05, 0.1};
  EXPECT_THROW(sweep(Shape::unit_square(), planar(), settings), ConfigError);
  settings.eps_list = {};
  EXPECT_THROW(sweep(Shape::unit_square(), planar(), settings), ConfigError);
}
