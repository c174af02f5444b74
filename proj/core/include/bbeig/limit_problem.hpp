#pragma once

#include "bbeig/special_functions.hpp"

namespace bbeig {

double unit_ball_volume(int n);
// Surface measure of the unit sphere S^{n-1}; 2 for n = 1.
double unit_sphere_area(int n);
// Radius of the n-ball with the given volume.
double measure_radius(int n, double measure);

struct WeightParams {
  int dimension = 2;
  double m_bar = 1.0;
  double m_under = 1.0;
  double rho = 0.0;  // transition radius; 0 selects the measure-one ball radius

  static WeightParams standard(int n, double m_bar, double m_under);

  double transition_radius() const;
  void validate() const;
};

struct LimitSolution {
  WeightParams params;
  BesselOrder nu{0};
  double lambda0 = 0.0;
  double A = 0.0;
  double B = 0.0;
  double l2_norm = 1.0;  // norm of w before the last normalization
  double gamma = 0.0;
  double phi = 0.0;

  double rho() const { return params.transition_radius(); }
  double inner_rate() const;  // sqrt(lambda0 * m_bar)
  double decay_rate() const;  // sqrt(lambda0 * m_under)
};

// Upper end of the principal branch, (j_{nu,1} / (rho sqrt(m_bar)))^2.
double principal_branch_limit(const WeightParams& params);

// a J_{nu+1}(a rho)/J_nu(a rho) - b K_{nu+1}(b rho)/K_nu(b rho), a = sqrt(lambda m_bar),
// b = sqrt(lambda m_under). Throws outside (0, principal_branch_limit).
double matching_residual(double lambda, const WeightParams& params);

double solve_lambda0(const WeightParams& params);

// w with inner amplitude A, outer amplitude fixed by continuity at rho.
LimitSolution make_limit_solution(const WeightParams& params, double lambda0, double A = 1.0);
LimitSolution normalize_w(const LimitSolution& sol);

double eval_w(double r, const LimitSolution& sol);
double eval_w_deriv(double r, const LimitSolution& sol);
// log w(r), finite for all r through the scaled K form.
double eval_log_w(double r, const LimitSolution& sol);
double eval_V0(double r, const LimitSolution& sol);

// Integrals over R^N: of w^2, split inside and outside the ball, and of m0 w^2.
struct WSquaredSplit {
  double inside = 0.0;
  double outside = 0.0;
};
WSquaredSplit w_squared_integrals(const LimitSolution& sol);
double indefinite_mass(const LimitSolution& sol);

double compute_gamma(const LimitSolution& sol);
double compute_phi(const LimitSolution& sol);

// solve_lambda0, normalize, then gamma and Phi.
LimitSolution solve_limit_problem(const WeightParams& params);

}  // namespace bbeig
