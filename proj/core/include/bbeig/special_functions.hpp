#pragma once

#include <compare>

namespace bbeig {

// Order of a cylinder function. Stored as twice the order so that the
// half-integer orders of odd dimensions compare exactly.
class BesselOrder {
 public:
  constexpr explicit BesselOrder(int twice_nu) : twice_(twice_nu) {}

  // nu = N/2 - 1
  static constexpr BesselOrder for_dimension(int n) { return BesselOrder(n - 2); }

  constexpr double value() const { return 0.5 * twice_; }
  constexpr int twice() const { return twice_; }
  constexpr bool half_integer() const { return twice_ % 2 != 0; }
  constexpr BesselOrder plus_one() const { return BesselOrder(twice_ + 2); }
  constexpr BesselOrder minus_one() const { return BesselOrder(twice_ - 2); }
  constexpr BesselOrder abs() const { return BesselOrder(twice_ < 0 ? -twice_ : twice_); }

  constexpr auto operator<=>(const BesselOrder&) const = default;

 private:
  int twice_;
};

enum class BesselKind { J, I, K };

// J and I accept orders -1/2, 0, 1/2, 1, 3/2. K accepts |nu| <= 3/2.
// Other orders throw std::invalid_argument.
double bessel_j(BesselOrder nu, double x);
double bessel_i(BesselOrder nu, double x);
double bessel_k(BesselOrder nu, double x);

// e^{-x} I_nu(x) and e^{x} K_nu(x).
double bessel_i_scaled(BesselOrder nu, double x);
double bessel_k_scaled(BesselOrder nu, double x);

// Derivative with respect to x, for orders -1/2, 0, 1/2.
double bessel_deriv(BesselKind kind, BesselOrder nu, double x);

// First positive zero of J_nu.
double bessel_j_first_zero(BesselOrder nu);

// Plain power series in extended precision for any real order. K uses the
// reflection formula and therefore needs a non-integer order. These are the
// reference evaluations against which the closed forms are checked.
double bessel_j_series(double nu, double x);
double bessel_i_series(double nu, double x);
double bessel_k_series(double nu, double x);

}  // namespace bbeig
