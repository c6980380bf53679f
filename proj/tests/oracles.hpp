#pragma once

// Reference values computed independently of the library: truncated power
// series in 100-digit binary floating point.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_100;

/// J_p(x) = sum_m (-1)^m (x/2)^(2m+p) / (m! (m+p)!), p >= 0.
inline double bessel_j(int p, double x) {
  const big half = big(x) / 2;
  big term = 1;
  for (int i = 1; i <= p; ++i) term *= half / i;
  big sum = term;
  const big h2 = half * half;
  for (int m = 1; m < 2000; ++m) {
    term *= -h2 / (big(m) * (m + p));
    sum += term;
    if (abs(term) < big("1e-80") * (abs(sum) + big("1e-300"))) break;
  }
  return sum.convert_to<double>();
}

/// theta3(q) = 1 + 2 sum_{n>=1} q^(n^2).
inline double theta3(double q) {
  big sum = 1, qq = q;
  for (long n = 1; n < 100000; ++n) {
    big term = pow(qq, n * n);
    sum += 2 * term;
    if (term < big("1e-60")) break;
  }
  return sum.convert_to<double>();
}

}  // namespace oracle
