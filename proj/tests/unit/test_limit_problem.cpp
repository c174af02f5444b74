#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "bbeig/limit_problem.hpp"

using namespace bbeig;

namespace {

constexpr double pi = std::numbers::pi;

WeightParams params(int n, double m_bar, double m_under, double rho = 0.0) {
  WeightParams p;
  p.dimension = n;
  p.m_bar = m_bar;
  p.m_under = m_under;
  p.rho = rho;
  return p;
}

// Root of the matching condition from Boost's Bessel functions.
double boost_lambda0(int n, double m_bar, double m_under, double rho) {
  using namespace boost::math;
  const double nu = 0.5 * n - 1.0;
  auto f = [&](double lam) {
    const double a = std::sqrt(lam * m_bar), b = std::sqrt(lam * m_under);
    return a * cyl_bessel_j(nu + 1, a * rho) / cyl_bessel_j(nu, a * rho) -
           b * cyl_bessel_k(nu + 1, b * rho) / cyl_bessel_k(nu, b * rho);
  };
  const double top = std::pow(cyl_bessel_j_zero(nu, 1) / (rho * std::sqrt(m_bar)), 2);
  std::uintmax_t iters = 200;
  auto r = tools::toms748_solve(f, 1e-8 * top, 0.999999 * top, tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

// Radial integral of g(r) r^{n-1} times the sphere area, split at rho.
double radial_integral(int n, double rho, const std::function<double(double)>& g, double tail = 60.0) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double r) { return g(r) * std::pow(r, n - 1); };
  const double v = gauss_kronrod<double, 31>::integrate(f, 0.0, rho, 15, 1e-14) +
                   gauss_kronrod<double, 31>::integrate(f, rho, rho + tail, 20, 1e-14);
  return unit_sphere_area(n) * v;
}

}  // namespace

TEST(Measure, BallVolumesAndRadii) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * pi / 3.0, 1e-14);
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * pi, 1e-15);
  EXPECT_NEAR(measure_radius(1, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(measure_radius(2, 1.0), 1.0 / std::sqrt(pi), 1e-15);
  EXPECT_NEAR(WeightParams::standard(2, 1, 1).transition_radius(), 1.0 / std::sqrt(pi), 1e-15);
}

TEST(Matching, OneDimensionReducesToTangent) {
  // tan(sqrt(lambda)/2) = 1 at rho = 1/2, so the residual vanishes at pi^2/4.
  const auto p = params(1, 1, 1, 0.5);
  EXPECT_NEAR(matching_residual(pi * pi / 4, p), 0.0, 1e-13);
  const double lam = 1.7;
  const double s = std::sqrt(lam);
  EXPECT_NEAR(matching_residual(lam, p), s * std::tan(s / 2) - s, 1e-13);
}

TEST(Matching, SignAtBranchEnds) {
  for (int n : {1, 2, 3}) {
    const auto p = WeightParams::standard(n, 1.0, 0.5);
    const double top = principal_branch_limit(p);
    EXPECT_LT(matching_residual(1e-6 * top, p), 0.0);
    EXPECT_GT(matching_residual(top * (1 - 1e-9), p), 1e3);
  }
  EXPECT_THROW(matching_residual(-1.0, WeightParams::standard(2, 1, 1)), std::exception);
}

TEST(Lambda0, ClosedFormsInOneDimension) {
  EXPECT_NEAR(solve_lambda0(params(1, 1, 1, 0.5)), pi * pi / 4, 1e-12);
  // m_bar = 4: 2 sqrt(l) tan(sqrt(l)) = sqrt(l), so sqrt(l) = atan(1/2).
  const double s = std::atan(0.5);
  EXPECT_NEAR(solve_lambda0(params(1, 4, 1, 0.5)), s * s, 1e-12);
}

TEST(Lambda0, AgreesWithBoostRoot) {
  for (int n : {1, 2, 3})
    for (double mu : {0.25, 1.0, 3.0}) {
      const auto p = WeightParams::standard(n, 1.0, mu);
      const double ours = solve_lambda0(p);
      EXPECT_NEAR(ours / boost_lambda0(n, 1.0, mu, p.transition_radius()), 1.0, 1e-12) << n << " " << mu;
    }
}

TEST(Lambda0, FrozenTwoDimensionalValues) {
  const auto a = solve_limit_problem(WeightParams::standard(2, 1.0, 1.0));
  EXPECT_NEAR(a.lambda0, 8.19027713236561, 1e-11);
  EXPECT_NEAR(a.phi / 61.55755765, 1.0, 1e-8);
  const auto b = solve_limit_problem(WeightParams::standard(2, 1.0, 0.25));
  EXPECT_NEAR(b.lambda0, 5.13637822974083, 1e-11);
  EXPECT_NEAR(b.phi / 25.28952535, 1.0, 1e-8);
  EXPECT_NEAR(2 * b.decay_rate(), 2.26636, 1e-5);
}

TEST(Lambda0, ScalingLaws) {
  const auto base = params(2, 1.5, 0.5, 0.4);
  const double l0 = solve_lambda0(base);
  for (double c : {0.5, 2.0, 10.0}) {
    auto p = base;
    p.m_bar *= c;
    p.m_under *= c;
    EXPECT_NEAR(solve_lambda0(p) * c / l0, 1.0, 1e-11) << c;
  }
  auto q = base;
  q.rho *= 2.0;
  EXPECT_NEAR(solve_lambda0(q) * 4.0 / l0, 1.0, 1e-11);
}

TEST(Lambda0, DecreasesInFavourableValue) {
  double prev = INFINITY;
  for (double mb : {0.5, 1.0, 1.5, 2.0, 4.0}) {
    const double l = solve_lambda0(params(2, mb, 0.3, 0.5));
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(LimitSolution, OneDimensionalClosedForm) {
  const auto sol = solve_limit_problem(params(1, 1, 1, 0.5));
  // w = A cos(pi r/2) inside, B e^{-pi r/2} outside, int w^2 = A^2 (1/2 + 2/pi).
  const double A = 1.0 / std::sqrt(0.5 + 2.0 / pi);
  const double B = A * std::cos(pi / 4) * std::exp(pi / 4);
  for (double r : {0.0, 0.1, 0.3, 0.49}) EXPECT_NEAR(eval_w(r, sol), A * std::cos(pi * r / 2), 1e-12);
  for (double r : {0.51, 1.0, 3.0, 10.0}) EXPECT_NEAR(eval_w(r, sol), B * std::exp(-pi * r / 2), 1e-12);
  EXPECT_NEAR(eval_w(-0.3, sol), eval_w(0.3, sol), 1e-15);
  for (double r : {0.2, 1.0, 2.5}) EXPECT_NEAR(eval_V0(r, sol), std::cosh(pi * r / 2), 1e-12 * std::cosh(pi * r / 2));

  // gamma = lambda0 (m_bar + m_under) * 2 int_0^{1/2} w V0, elementary antiderivative.
  const double gamma = pi * pi / 4 * 2 * 2 * A * (std::sqrt(2.0) / 2) * std::exp(pi / 4) / pi;
  EXPECT_NEAR(sol.gamma / gamma, 1.0, 1e-10);
  EXPECT_NEAR(indefinite_mass(sol), A * A / 2, 1e-12);
  EXPECT_NEAR(sol.phi, 2 * std::sqrt(2.0) * pi * std::exp(pi / 4) / A, 1e-9);
  EXPECT_NEAR(sol.phi, 20.7776563, 1e-6);

  const auto split = w_squared_integrals(sol);
  EXPECT_NEAR(split.inside + split.outside, 1.0, 1e-10);
  EXPECT_NEAR(split.inside, 2 * A * A * (0.25 + 0.5 / pi), 1e-12);
}

TEST(LimitSolution, EvenAtOrigin) {
  for (int n : {1, 2, 3}) {
    const auto sol = solve_limit_problem(WeightParams::standard(n, 1.0, 0.25));
    EXPECT_TRUE(std::isfinite(eval_w(0.0, sol)));
    EXPECT_GT(eval_w(0.0, sol), 0.0);
    EXPECT_NEAR(eval_w_deriv(0.0, sol), 0.0, 1e-14);
    EXPECT_NEAR(eval_V0(0.0, sol), 1.0, 1e-15);
  }
}

TEST(LimitSolution, TailPlateau) {
  const auto sol = solve_limit_problem(WeightParams::standard(2, 1.0, 0.25));
  const double kappa = sol.decay_rate();
  auto scaled = [&](double r) { return std::exp(eval_log_w(r, sol) + kappa * r) * std::sqrt(r); };
  const double ref = scaled(15.0);
  for (double r = 10.0; r <= 20.0; r += 0.5) EXPECT_NEAR(scaled(r) / ref, 1.0, 0.02) << r;
  // Logarithmic derivative approaches -kappa.
  EXPECT_NEAR(eval_w_deriv(20.0, sol) / eval_w(20.0, sol) / -kappa, 1.0, 0.05);
  EXPECT_NEAR(eval_log_w(3.0, sol), std::log(eval_w(3.0, sol)), 1e-12);
  EXPECT_TRUE(std::isfinite(eval_log_w(5000.0, sol)));
}

TEST(LimitSolution, RadialOdeResidual) {
  for (int n : {1, 2, 3}) {
    const auto sol = solve_limit_problem(WeightParams::standard(n, 1.0, 0.5));
    const double rho = sol.rho();
    const double dr = 1e-4;
    for (double r : {0.3 * rho, 0.7 * rho, 1.4 * rho, 2.5 * rho, 4.0 * rho}) {
      const double m = r < rho ? sol.params.m_bar : -sol.params.m_under;
      const double w0 = eval_w(r, sol);
      const double d2 = (eval_w(r + dr, sol) - 2 * w0 + eval_w(r - dr, sol)) / (dr * dr);
      const double d1 = (eval_w(r + dr, sol) - eval_w(r - dr, sol)) / (2 * dr);
      const double lhs = -d2 - (n - 1) / r * d1;
      EXPECT_NEAR(lhs / (sol.lambda0 * m * w0), 1.0, 1e-6) << n << " " << r;
      EXPECT_NEAR(eval_w_deriv(r, sol), d1, 1e-7 * std::abs(d1) + 1e-12);
    }
  }
}

TEST(LimitSolution, V0SolvesScreenedEquation) {
  for (int n : {1, 2, 3}) {
    const auto sol = solve_limit_problem(WeightParams::standard(n, 1.0, 0.25));
    const double c = sol.lambda0 * sol.params.m_under;
    const double dr = 1e-4;
    for (double r : {0.5, 1.0, 2.0}) {
      const double v = eval_V0(r, sol);
      const double d2 = (eval_V0(r + dr, sol) - 2 * v + eval_V0(r - dr, sol)) / (dr * dr);
      const double d1 = (eval_V0(r + dr, sol) - eval_V0(r - dr, sol)) / (2 * dr);
      EXPECT_NEAR((-d2 - (n - 1) / r * d1 + c * v) / (c * v), 0.0, 1e-6) << n << " " << r;
    }
  }
}

TEST(LimitSolution, NormalizationIndependentQuadrature) {
  for (int n : {1, 2, 3}) {
    const auto sol = solve_limit_problem(WeightParams::standard(n, 1.0, 0.25));
    const double total = radial_integral(n, sol.rho(), [&](double r) { return std::pow(eval_w(r, sol), 2); });
    EXPECT_NEAR(total, 1.0, 1e-8) << n;
    // int m0 w^2 equals int |grad w|^2 / lambda0 (multiply the equation by w).
    const double grad = radial_integral(n, sol.rho(), [&](double r) { return std::pow(eval_w_deriv(r, sol), 2); });
    EXPECT_NEAR(indefinite_mass(sol), grad / sol.lambda0, 1e-8) << n;
  }
}

TEST(LimitSolution, NormalizationIsScaleInvariant) {
  const auto p = WeightParams::standard(2, 1.0, 0.25);
  const double l = solve_lambda0(p);
  const auto a = normalize_w(make_limit_solution(p, l, 1.0));
  const auto b = normalize_w(make_limit_solution(p, l, 2.0));
  EXPECT_NEAR(a.A, b.A, 1e-14);
  EXPECT_NEAR(a.B, b.B, 1e-14);
  for (double r : {0.0, 0.4, 2.0}) EXPECT_NEAR(eval_w(r, a), eval_w(r, b), 1e-14);
}

TEST(LimitSolution, GammaPositive) {
  for (int n : {1, 2, 3})
    for (double mu : {0.25, 1.0}) {
      const auto sol = solve_limit_problem(WeightParams::standard(n, 1.0, mu));
      EXPECT_GT(sol.gamma, 0.0);
      EXPECT_NEAR(sol.phi, 2 * sol.gamma / indefinite_mass(sol), 1e-12 * sol.phi);
    }
}

TEST(WeightParams, Validation) {
  EXPECT_THROW(params(2, -1, 1).validate(), std::exception);
  EXPECT_THROW(params(2, 1, 0).validate(), std::exception);
  EXPECT_THROW(params(4, 1, 1).validate(), std::exception);
  EXPECT_NO_THROW(params(3, 1, 1).validate());
}
