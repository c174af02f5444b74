#pragma once

#include <functional>

namespace bbeig {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Adaptive Gauss-Kronrod (7/15) on a finite interval. Subintervals are split
// until the summed error estimate meets max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 1e-13);

}  // namespace bbeig
