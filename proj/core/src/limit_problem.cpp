#include "bbeig/limit_problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bbeig/error.hpp"
#include "bbeig/quadrature.hpp"

namespace bbeig {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadAbsTol = 1e-13;
constexpr double kQuadRelTol = 1e-13;

// z^{-nu} J_nu(z) and z^{-nu} I_nu(z), regular at z = 0.
double power_scaled(BesselKind kind, BesselOrder nu, double z) {
  const double v = nu.value();
  if (z < 1.0) {
    const double q = 0.25 * z * z;
    double term = 1.0 / (std::pow(2.0, v) * std::tgamma(v + 1.0));
    double sum = term;
    for (int k = 1; k < 40; ++k) {
      term *= q / (k * (k + v));
      if (kind == BesselKind::J) term = -term;
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
  }
  const double f = kind == BesselKind::J ? bessel_j(nu, z) : bessel_i(nu, z);
  return f * std::pow(z, -v);
}

// r^{-nu} J_nu(a r)
double radial_j(BesselOrder nu, double a, double r) {
  return std::pow(a, nu.value()) * power_scaled(BesselKind::J, nu, a * r);
}

// r^{-nu} K_nu(b r) e^{b r}
double radial_k_scaled(BesselOrder nu, double b, double r) {
  return std::pow(r, -nu.value()) * bessel_k_scaled(nu, b * r);
}

// Integral of r K_nu(b r)^2 over (rho, inf), times e^{2 b rho}.
double k_tail_scaled(BesselOrder nu, double b, double rho) {
  const double x = b * rho;
  const double km = bessel_k_scaled(nu.minus_one(), x);
  const double k0 = bessel_k_scaled(nu, x);
  const double kp = bessel_k_scaled(nu.plus_one(), x);
  return 0.5 * rho * rho * (km * kp - k0 * k0);
}

double inner_w_squared(const LimitSolution& sol) {
  const int n = sol.params.dimension;
  const double a = sol.inner_rate();
  auto f = [&](double r) {
    const double w = radial_j(sol.nu, a, r);
    return w * w * std::pow(r, n - 1);
  };
  return integrate(f, 0.0, sol.rho(), kQuadAbsTol, kQuadRelTol).value;
}

}  // namespace

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double measure_radius(int n, double measure) {
  return std::pow(measure / unit_ball_volume(n), 1.0 / n);
}

WeightParams WeightParams::standard(int n, double m_bar, double m_under) {
  WeightParams p;
  p.dimension = n;
  p.m_bar = m_bar;
  p.m_under = m_under;
  p.rho = measure_radius(n, 1.0);
  return p;
}

double WeightParams::transition_radius() const {
  return rho > 0.0 ? rho : measure_radius(dimension, 1.0);
}

void WeightParams::validate() const {
  if (dimension < 1 || dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (!(m_bar > 0.0)) throw ConfigError("m_bar must be positive");
  if (!(m_under > 0.0)) throw ConfigError("m_under must be positive");
  if (!(rho >= 0.0)) throw ConfigError("rho must be positive");
}

double LimitSolution::inner_rate() const { return std::sqrt(lambda0 * params.m_bar); }
double LimitSolution::decay_rate() const { return std::sqrt(lambda0 * params.m_under); }

double principal_branch_limit(const WeightParams& params) {
  const BesselOrder nu = BesselOrder::for_dimension(params.dimension);
  const double j = bessel_j_first_zero(nu);
  const double s = j / (params.transition_radius() * std::sqrt(params.m_bar));
  return s * s;
}

double matching_residual(double lambda, const WeightParams& params) {
  params.validate();
  const double limit = principal_branch_limit(params);
  if (!(lambda > 0.0) || !(lambda < limit)) throw SolverError("outside principal branch");
  const BesselOrder nu = BesselOrder::for_dimension(params.dimension);
  const double rho = params.transition_radius();
  const double a = std::sqrt(lambda * params.m_bar);
  const double b = std::sqrt(lambda * params.m_under);
  const double inner = a * bessel_j(nu.plus_one(), a * rho) / bessel_j(nu, a * rho);
  const double outer = b * bessel_k_scaled(nu.plus_one(), b * rho) / bessel_k_scaled(nu, b * rho);
  return inner - outer;
}

double solve_lambda0(const WeightParams& params) {
  params.validate();
  const double ref = principal_branch_limit(params);
  double lo = 1e-8 * ref;
  double hi = 0.999 * ref;
  double flo = matching_residual(lo, params);
  const double fhi = matching_residual(hi, params);
  if (!(flo < 0.0 && fhi > 0.0)) throw SolverError("matching bracket failure");

  while (hi - lo > 1e-7 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = matching_residual(mid, params);
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }

  // Newton on the bracket with a centred difference slope.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 30; ++it) {
    const double f = matching_residual(x, params);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x;
    else hi = x;
    const double dx = 1e-6 * x;
    const double slope = (matching_residual(x + dx, params) - matching_residual(x - dx, params)) / (2 * dx);
    double next = x - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 2e-16 * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

LimitSolution make_limit_solution(const WeightParams& params, double lambda0, double A) {
  params.validate();
  LimitSolution s;
  s.params = params;
  s.params.rho = params.transition_radius();
  s.nu = BesselOrder::for_dimension(params.dimension);
  s.lambda0 = lambda0;
  s.A = A;
  const double rho = s.rho();
  const double inside = A * radial_j(s.nu, s.inner_rate(), rho);
  // B rho^{-nu} K_nu(b rho) = w(rho)
  s.B = inside / (std::pow(rho, -s.nu.value()) * bessel_k(s.nu, s.decay_rate() * rho));
  return s;
}

WSquaredSplit w_squared_integrals(const LimitSolution& sol) {
  const int n = sol.params.dimension;
  const double area = unit_sphere_area(n);
  const double rho = sol.rho();
  const double b = sol.decay_rate();
  WSquaredSplit out;
  out.inside = area * sol.A * sol.A * inner_w_squared(sol);
  // B^2 e^{-2 b rho} stays representable since B carries the e^{b rho} growth.
  const double be = sol.B * std::exp(-b * rho);
  out.outside = area * be * be * k_tail_scaled(sol.nu, b, rho);
  return out;
}

LimitSolution normalize_w(const LimitSolution& sol) {
  const WSquaredSplit split = w_squared_integrals(sol);
  const double norm = std::sqrt(split.inside + split.outside);
  LimitSolution out = sol;
  out.A = sol.A / norm;
  out.B = sol.B / norm;
  out.l2_norm = norm;
  return out;
}

double eval_w(double r, const LimitSolution& sol) {
  if (r < 0.0) r = -r;
  if (r <= sol.rho()) return sol.A * radial_j(sol.nu, sol.inner_rate(), r);
  const double b = sol.decay_rate();
  return sol.B * radial_k_scaled(sol.nu, b, r) * std::exp(-b * r);
}

double eval_w_deriv(double r, const LimitSolution& sol) {
  const double a = sol.inner_rate();
  const double b = sol.decay_rate();
  if (r <= sol.rho()) {
    // -A a r^{-nu} J_{nu+1}(a r) = -A a r * r^{-(nu+1)} J_{nu+1}(a r)
    return -sol.A * a * r * radial_j(sol.nu.plus_one(), a, r);
  }
  return -sol.B * b * std::pow(r, -sol.nu.value()) * bessel_k_scaled(sol.nu.plus_one(), b * r) *
         std::exp(-b * r);
}

double eval_log_w(double r, const LimitSolution& sol) {
  if (r < 0.0) r = -r;
  if (r <= sol.rho()) return std::log(eval_w(r, sol));
  const double b = sol.decay_rate();
  return std::log(sol.B) + std::log(radial_k_scaled(sol.nu, b, r)) - b * r;
}

double eval_V0(double r, const LimitSolution& sol) {
  if (r < 0.0) r = -r;
  const double kappa = sol.decay_rate();
  return power_scaled(BesselKind::I, sol.nu, kappa * r) / power_scaled(BesselKind::I, sol.nu, 0.0);
}

double indefinite_mass(const LimitSolution& sol) {
  const WSquaredSplit split = w_squared_integrals(sol);
  const double value = sol.params.m_bar * split.inside - sol.params.m_under * split.outside;
  if (!(value > 0.0)) throw SolverError("indefinite mass nonpositive");
  return value;
}

double compute_gamma(const LimitSolution& sol) {
  const int n = sol.params.dimension;
  auto f = [&](double r) { return eval_w(r, sol) * eval_V0(r, sol) * std::pow(r, n - 1); };
  const double integral = integrate(f, 0.0, sol.rho(), kQuadAbsTol, kQuadRelTol).value;
  return sol.lambda0 * (sol.params.m_bar + sol.params.m_under) * unit_sphere_area(n) * integral;
}

double compute_phi(const LimitSolution& sol) {
  const double gamma = sol.gamma > 0.0 ? sol.gamma : compute_gamma(sol);
  return 2.0 * gamma / indefinite_mass(sol);
}

LimitSolution solve_limit_problem(const WeightParams& params) {
  const double lambda0 = solve_lambda0(params);
  LimitSolution sol = normalize_w(make_limit_solution(params, lambda0));
  sol.gamma = compute_gamma(sol);
  sol.phi = compute_phi(sol);
  return sol;
}

}  // namespace bbeig
