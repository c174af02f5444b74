#include "bbeig/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bbeig {
namespace {

using ld = long double;

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

// Power series switchover for integer-order J. Against the envelope, the
// series error grows past 1e-14 above this point and the Hankel truncation
// error falls below it, so both sides stay under about 3e-14.
constexpr double kJSeriesLimit = 14.5;
constexpr double kISeriesLimit = 40.0;
constexpr double kKSeriesLimit = 2.0;

[[noreturn]] void unsupported(BesselOrder nu) {
  throw std::invalid_argument("unsupported Bessel order " + std::to_string(nu.value()));
}

void require_jn_order(BesselOrder nu) {
  if (nu.twice() < -1 || nu.twice() > 3) unsupported(nu);
}

void require_nonnegative(double x) {
  if (!(x >= 0.0)) throw std::domain_error("Bessel argument must be nonnegative");
}

void require_positive(double x) {
  if (x == 0.0) throw std::domain_error("singular argument");
  if (!(x > 0.0)) throw std::domain_error("Bessel argument must be positive");
}

ld series(ld nu, ld x, bool alternating) {
  const ld q = x * x / 4;
  ld term = std::pow(x / 2, nu) / std::tgamma(nu + 1);
  ld sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (k + nu));
    if (alternating) term = -term;
    sum += term;
    if (k > q && std::fabs(term) <= 1e-21L * std::fabs(sum)) break;
  }
  return sum;
}

// Coefficient recurrence of the large-argument expansions:
// a_k = a_{k-1} (mu - (2k-1)^2) / (8k), mu = 4 nu^2.
struct HankelPQ {
  double p;
  double q;
};

HankelPQ hankel_pq(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (8.0 * k * x);
    if (std::fabs(a) > last || a == 0.0) break;
    last = std::fabs(a);
    // P takes the even terms with alternating sign, Q the odd ones.
    const int m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) p += sign * a;
    else q += sign * a;
    if (std::fabs(a) < 1e-18) break;
  }
  return {p, q};
}

double j_hankel(double nu, double x) {
  const auto [p, q] = hankel_pq(nu, x);
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// e^{-x} I_nu(x) for large x.
double i_scaled_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double sum = 1.0;
  double a = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= -(mu - odd * odd) / (8.0 * k * x);
    if (std::fabs(a) > last || a == 0.0) break;
    last = std::fabs(a);
    sum += a;
    if (std::fabs(a) < 1e-18) break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

struct KPair {
  double k0;
  double k1;
};

// K_0 and K_1, scaled by e^x.
KPair k01_scaled(double x) {
  if (x <= kKSeriesLimit) {
    const ld xl = x;
    const ld q = xl * xl / 4;
    const ld log_half = std::log(xl / 2);
    const ld i0 = series(0, xl, false);
    const ld i1 = series(1, xl, false);

    // K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k q^k / (k!)^2
    ld term = 1;
    ld harmonic = 0;
    ld sum0 = 0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (ld(k) * k);
      harmonic += 1.0L / k;
      const ld add = term * harmonic;
      sum0 += add;
      if (add < 1e-22L * std::fabs(sum0)) break;
    }
    const ld k0 = -(log_half + kEulerGamma) * i0 + sum0;

    // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_{k>=0} (psi(k+1)+psi(k+2)) q^k / (k!(k+1)!)
    ld t = 1;
    ld psi_k1 = -kEulerGamma;
    ld psi_k2 = 1.0L - kEulerGamma;
    ld sum1 = t * (psi_k1 + psi_k2);
    for (int k = 1; k < 200; ++k) {
      t *= q / (ld(k) * (k + 1));
      psi_k1 += 1.0L / k;
      psi_k2 += 1.0L / (k + 1);
      const ld add = t * (psi_k1 + psi_k2);
      sum1 += add;
      if (std::fabs(add) < 1e-22L * std::fabs(sum1)) break;
    }
    const ld k1 = 1.0L / xl + log_half * i1 - xl / 4 * sum1;
    const ld scale = std::exp(xl);
    return {static_cast<double>(k0 * scale), static_cast<double>(k1 * scale)};
  }

  // Steed's continued fraction CF2 with Temme's normalization, order 0.
  const double xmu = 0.0;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - xmu * xmu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < 1e-17) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(kPi / (2.0 * x)) / s;
  const double k1 = k0 * (xmu + x + 0.5 - h) / x;
  return {k0, k1};
}

double j_closed_half(int twice, double x) {
  const double pref = std::sqrt(2.0 / (kPi * x));
  switch (twice) {
    case -1:
      return pref * std::cos(x);
    case 1:
      return pref * std::sin(x);
    default:
      if (x < 1.0) return bessel_j_series(1.5, x);
      return pref * (std::sin(x) / x - std::cos(x));
  }
}

double i_scaled_closed_half(int twice, double x) {
  // e^{-x} cosh x and e^{-x} sinh x written without overflow.
  const double pref = std::sqrt(2.0 / (kPi * x));
  const double em2x = std::exp(-2.0 * x);
  const double ch = 0.5 * (1.0 + em2x);
  const double sh = -0.5 * std::expm1(-2.0 * x);
  switch (twice) {
    case -1:
      return pref * ch;
    case 1:
      return pref * sh;
    default:
      if (x < 1.0) return bessel_i_series(1.5, x) * std::exp(-x);
      return pref * (ch - sh / x);
  }
}

}  // namespace

double bessel_j_series(double nu, double x) {
  require_nonnegative(x);
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(series(nu, x, true));
}

double bessel_i_series(double nu, double x) {
  require_nonnegative(x);
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(series(nu, x, false));
}

double bessel_k_series(double nu, double x) {
  require_positive(x);
  const double s = std::sin(nu * kPi);
  if (std::fabs(s) < 1e-12) throw std::invalid_argument("reflection series needs a non-integer order");
  const ld diff = series(-nu, x, false) - series(nu, x, false);
  return static_cast<double>(kPi / 2.0 * diff / s);
}

double bessel_j(BesselOrder nu, double x) {
  require_jn_order(nu);
  require_nonnegative(x);
  if (x == 0.0) return bessel_j_series(nu.value(), 0.0);
  if (nu.half_integer()) return j_closed_half(nu.twice(), x);
  if (x < kJSeriesLimit) return static_cast<double>(series(nu.value(), x, true));
  return j_hankel(nu.value(), x);
}

double bessel_i_scaled(BesselOrder nu, double x) {
  require_jn_order(nu);
  require_nonnegative(x);
  if (x == 0.0) return bessel_i_series(nu.value(), 0.0);
  if (nu.half_integer()) return i_scaled_closed_half(nu.twice(), x);
  if (x <= kISeriesLimit) return static_cast<double>(series(nu.value(), x, false) * std::exp(-ld(x)));
  return i_scaled_asymptotic(nu.value(), x);
}

double bessel_i(BesselOrder nu, double x) {
  require_jn_order(nu);
  require_nonnegative(x);
  if (x == 0.0) return bessel_i_series(nu.value(), 0.0);
  if (nu.half_integer()) {
    const double pref = std::sqrt(2.0 / (kPi * x));
    switch (nu.twice()) {
      case -1:
        return pref * std::cosh(x);
      case 1:
        return pref * std::sinh(x);
      default:
        if (x < 1.0) return bessel_i_series(1.5, x);
        return pref * (std::cosh(x) - std::sinh(x) / x);
    }
  }
  if (x <= kISeriesLimit) return static_cast<double>(series(nu.value(), x, false));
  return i_scaled_asymptotic(nu.value(), x) * std::exp(x);
}

double bessel_k_scaled(BesselOrder nu, double x) {
  const BesselOrder a = nu.abs();  // K_{-nu} = K_nu
  if (a.twice() > 3) unsupported(nu);
  require_positive(x);
  const double pref = std::sqrt(kPi / (2.0 * x));
  switch (a.twice()) {
    case 1:
      return pref;
    case 3:
      return pref * (1.0 + 1.0 / x);
    case 0:
      return k01_scaled(x).k0;
    default:
      return k01_scaled(x).k1;
  }
}

double bessel_k(BesselOrder nu, double x) {
  return bessel_k_scaled(nu, x) * std::exp(-x);
}

double bessel_deriv(BesselKind kind, BesselOrder nu, double x) {
  if (nu.twice() < -1 || nu.twice() > 1) unsupported(nu);
  const double v = nu.value();
  switch (kind) {
    case BesselKind::J:
      require_nonnegative(x);
      if (x == 0.0) {
        if (nu.twice() == 0) return 0.0;
        return nu.twice() < 0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return (v / x) * bessel_j(nu, x) - bessel_j(nu.plus_one(), x);
    case BesselKind::I:
      require_nonnegative(x);
      if (x == 0.0) {
        if (nu.twice() == 0) return 0.0;
        return nu.twice() < 0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return (v / x) * bessel_i(nu, x) + bessel_i(nu.plus_one(), x);
    case BesselKind::K:
      require_positive(x);
      return (v / x) * bessel_k(nu, x) - bessel_k(nu.plus_one(), x);
  }
  return 0.0;
}

double bessel_j_first_zero(BesselOrder nu) {
  require_jn_order(nu);
  double lo = 0.5;
  double step = 0.05;
  double flo = bessel_j(nu, lo);
  double hi = lo + step;
  while (bessel_j(nu, hi) * flo > 0.0) {
    lo = hi;
    hi += step;
    if (hi > 10.0) throw std::runtime_error("first zero of J not bracketed");
  }
  flo = bessel_j(nu, lo);
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_j(nu, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bbeig
