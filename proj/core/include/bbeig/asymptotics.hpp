#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bbeig/eigensolver.hpp"
#include "bbeig/geometry.hpp"
#include "bbeig/limit_problem.hpp"
#include "bbeig/placement.hpp"

namespace bbeig {

struct AsymptoticRecord {
  double eps = 0.0;
  double k = 0.0;
  double beta = 0.0;
  double h = 0.0;
  Point center{0.0, 0.0};
  double lambda = 0.0;
  double lambda_tilde = 0.0;
  double lambda1 = 0.0;  // lambda_tilde - lambda0
  // Limit eigenvalue of the same discretization (same h/k, same sub-cell
  // offset of the ball) on a large ball; gap = lambda_tilde - lambda0_h.
  double lambda0_h = 0.0;
  double gap = 0.0;
  double discretization_margin = 0.0;  // |lambda0_h - lambda0|
  double dist = 0.0;
  double dist_over_k = 0.0;
  double psi_tilde = 0.0;
  double psi_tilde_h = 0.0;  // same, from the discrete limit eigenfunction
  double correction = 0.0;   // Phi exp(-beta psi_tilde)
  double predicted = 0.0;
  double ratio = 0.0;    // gap / correction
  double ratio_h = 0.0;  // gap / (Phi exp(-beta psi_tilde_h))
  double blowup_l2_gap = 0.0;
  double blowup_l2_gap_h = 0.0;  // against the discrete limit eigenfunction
  double blowup_l2_floor = 0.0;  // discrete against continuous limit eigenfunction
  double blowup_l2_norm = 0.0;
  double phi_norm = 0.0;            // discrete H1
  double phi_laplacian_norm = 0.0;  // L2 norm of the 5-point Laplacian
  double route_gap = 0.0;           // max |h_direct - (w - Pw)| / max w
  int evaluations = 0;
  double seconds = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct SweepSettings {
  std::vector<double> eps_list{0.1, 0.07, 0.05, 0.03, 0.02, 0.01};
  // Grid spacing per row: fixed_h if positive, else r(eps) / cells_per_radius.
  double fixed_h = 0.0;
  int cells_per_radius = 8;
  double l2_gap_radius = 4.0;
  // The discrete limit problem lives on the ball of radius
  // (extent of the blow-up domain) + reference_margin / decay rate.
  double reference_margin = 4.0;
  bool blowup_analysis = true;
  int workers = 1;
  double memory_budget_bytes = 2.0e9;
  PlacementSettings placement;
};

struct BlowUpSample {
  GridFunction values;
  int clipped = 0;  // blow-up nodes whose preimage fell outside the data
};

// k^{N/2} u(x + k y) by bilinear interpolation onto the nodes of blowup.
BlowUpSample blow_up_eigenfunction(const GridDomain& original, const GridFunction& u, const Point& center,
                                   double k, const GridDomain& blowup);

// Bilinear interpolation of a node function; zero outside the grid.
double interpolate(const GridDomain& domain, const GridFunction& f, const Point& p);

// Half-width of a window containing the whole blow-up of the domain.
double full_blowup_window(const GridDomain& domain, const Point& center, double k);

struct PsiTilde {
  double value = 0.0;
  double log_h0 = 0.0;  // log h(0)
};

// -k log h(0) with h solving (-Delta + lambda0 m_under) h = 0 on the blow-up
// domain, h = w on its boundary. Solved in scaled form, so h(0) may be far
// below the smallest double.
PsiTilde compute_psi_tilde(const GridDomain& domain, const Point& center, double k, const LimitSolution& sol,
                           const BlowUpOptions& options = {});

struct DiscreteLimit {
  DomainPtr domain;
  double lambda = 0.0;
  GridFunction w;  // L2-normalized, positive
  WeightField weight;
};

// Principal eigenpair of the limit weight on the ball of the given radius,
// on the lattice of spacing h through anchor.
DiscreteLimit discrete_limit_reference(const WeightParams& params, double h, const Point& anchor, double radius,
                                       int subsamples = 4, const EigenOptions& options = {});

struct ProjectionResidual {
  GridFunction phi;
  double h1_norm = 0.0;
  double laplacian_norm = 0.0;
};

// phi = scale (u - pw) on the nodes of the domain, with its discrete H1 norm
// (central differences, phi = 0 off the interior) and the L2 norm of its
// 5-point Laplacian.
ProjectionResidual projection_residual(const GridDomain& domain, const GridFunction& u, const GridFunction& pw,
                                       double scale);

// One row: optimize the center, then the blow-up quantities.
AsymptoticRecord analyze_eps(const Shape& shape, const LimitSolution& sol, double eps,
                             const SweepSettings& settings);

using SweepProgress = std::function<void(const std::vector<AsymptoticRecord>&)>;

// Rows in eps_list order. Row failures are stored in the row. progress is
// called with the rows finished so far (in eps order) after each row.
std::vector<AsymptoticRecord> sweep(const Shape& shape, const LimitSolution& sol, const SweepSettings& settings,
                                    const SweepProgress& progress = {});

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct ExpansionReport {
  std::vector<double> eps;
  std::vector<double> ratio;
  std::vector<bool> used;  // row has a positive gap and entered the fit
  LogLinearFit fit;
  double rate = 0.0;  // -slope
  double psi_tilde_last = 0.0;
  double rate_reference = 0.0;  // 2 sqrt(lambda0 m_under) d_max
  double rate_vs_psi = 0.0;     // rate / psi_tilde_last - 1
  double rate_vs_reference = 0.0;
  bool ratio_trends_to_one = false;     // |log ratio| nonincreasing
  bool ratio_approaches_band = false;   // distance of ratio to [1/2, 2] nonincreasing
  bool last_ratio_in_band = false;
  std::vector<std::string> warnings;
};

// Fit of log(gap) against beta and ratios gap / (Phi e^{-beta psi}).
// d_max is the domain's inradius.
ExpansionReport expansion_report(const std::vector<AsymptoticRecord>& records, const LimitSolution& sol,
                                 double d_max);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Sweep-level properties with their pinned tolerances: monotone columns,
// bounds on psi_tilde, route agreement, fitted rate and ratio bands.
std::vector<PropertyCheck> sweep_property_checks(const std::vector<AsymptoticRecord>& records,
                                                 const ExpansionReport& report, const LimitSolution& sol,
                                                 double d_max);

}  // namespace bbeig
