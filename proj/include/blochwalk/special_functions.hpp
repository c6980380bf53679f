#pragma once

// Theta function at zero argument and integer-order Bessel functions of the
// first kind.  The Bessel routines use Miller's backward recurrence
// normalized with J_0(x) + 2 * sum_{m>=1} J_{2m}(x) = 1.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace blochwalk {

/// theta_3(0, q) = 1 + 2 * sum_{n>=1} q^{n^2}, for 0 <= q < 1.
inline double theta3(double q) {
  if (!(q >= 0.0 && q < 1.0))
    throw std::domain_error("theta3: q must lie in [0, 1), got " + std::to_string(q));
  if (q == 0.0) return 1.0;
  double sum = 1.0;
  for (long n = 1;; ++n) {
    const double term = 2.0 * std::pow(q, static_cast<double>(n * n));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

/// Values J_p(x) for p in [p_min, p_max].
struct BesselRow {
  double x = 0.0;
  int p_min = 0;
  int p_max = 0;
  std::vector<double> values;

  double operator()(int p) const { return values[static_cast<std::size_t>(p - p_min)]; }
  std::size_t size() const { return values.size(); }
};

namespace detail {

inline constexpr double kBesselMaxArgument = 1e4;

inline void check_bessel_argument(double x) {
  if (!std::isfinite(x)) throw std::domain_error("bessel: non-finite argument");
  if (std::abs(x) > kBesselMaxArgument)
    throw std::domain_error("bessel: |x| = " + std::to_string(std::abs(x)) +
                            " exceeds the supported range 1e4");
}

// J_0 .. J_{p_top} for x >= 0.
inline std::vector<double> bessel_nonnegative_orders(int p_top, double x) {
  std::vector<double> out(static_cast<std::size_t>(p_top) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  // Start far enough above both p_top and x that the seeded error is
  // negligible; the x^{1/3} term covers the Airy transition region.
  const double reach = std::max(40.0, 12.0 * std::cbrt(x));
  int start = static_cast<int>(std::ceil(std::max<double>(p_top, x) + reach));
  if (start % 2 != 0) ++start;

  constexpr double kRescale = 1e250;
  double above = 0.0;
  double current = 1e-300;
  double norm = 0.0;  // J_0 + 2 * sum of even orders, in recurrence units
  for (int p = start; p > 0; --p) {
    const double below = (2.0 * p / x) * current - above;
    above = current;
    current = below;  // order p - 1
    const int order = p - 1;
    if (order <= p_top) out[static_cast<std::size_t>(order)] = current;
    if (order % 2 == 0) norm += (order == 0 ? 1.0 : 2.0) * current;
    if (std::abs(current) > kRescale) {
      current /= kRescale;
      above /= kRescale;
      norm /= kRescale;
      for (int q = order; q <= p_top; ++q) out[static_cast<std::size_t>(q)] /= kRescale;
    }
  }
  for (double& v : out) v /= norm;
  return out;
}

}  // namespace detail

/// Bessel functions J_p(x) for every integer order in [p_min, p_max].
/// Negative orders are filled by reflection, J_{-p} = (-1)^p J_p.
inline BesselRow bessel_row(double x, int p_min, int p_max) {
  if (p_min > p_max) throw std::invalid_argument("bessel_row: p_min > p_max");
  detail::check_bessel_argument(x);
  const int p_top = std::max(std::abs(p_min), std::abs(p_max));
  std::vector<double> base = detail::bessel_nonnegative_orders(p_top, std::abs(x));
  if (x < 0.0)
    for (std::size_t p = 1; p < base.size(); p += 2) base[p] = -base[p];

  BesselRow row{x, p_min, p_max, {}};
  row.values.resize(static_cast<std::size_t>(p_max - p_min) + 1);
  for (int p = p_min; p <= p_max; ++p) {
    const double v = base[static_cast<std::size_t>(std::abs(p))];
    row.values[static_cast<std::size_t>(p - p_min)] = (p < 0 && (-p) % 2 != 0) ? -v : v;
  }
  return row;
}

/// J_p(x) for a single integer order.
inline double bessel_j(int p, double x) {
  return bessel_row(x, p, p).values.front();
}

}  // namespace blochwalk
