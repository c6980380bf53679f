#pragma once

// Weak-field, wide-packet approximation of the electric walk: two
// counter-propagating tight-binding Bloch solutions, weighted by the coin
// eigenspace projectors Lambda^{+-} = (1 +- C)/2,
//
//   Psi_n(t) = [F+_n(t) Lambda+ + (-1)^t F-_n(t) Lambda-] |s>,
//   F+-_n(t) = sum_l c_l exp(i (n+l) phi t / 2) J_{+-(n-l)}(2 gamma sin(phi t / 2)),
//
// with gamma = cos(theta)/phi.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochwalk/lattice.hpp"
#include "blochwalk/observables.hpp"
#include "blochwalk/special_functions.hpp"
#include "blochwalk/walk.hpp"

namespace blochwalk {

/// f(k) = cos(theta) (1 - cos k).
inline double f_of_k(double k, double theta) { return std::cos(theta) * (1.0 - std::cos(k)); }

/// <s|C|s> for the coin of coin_matrix(theta); real because C is Hermitian.
inline double kappa(const CoinVector& s, double theta) {
  detail::require_normalized_coin(s, "kappa");
  return (s.adjoint() * coin_matrix(theta) * s)(0, 0).real();
}

struct AnalyticSolution {
  WalkParams params;
  GaussianSpec spec;
  std::vector<int> sites;           // support of the initial packet
  std::vector<double> init_coeffs;  // c_l on `sites`, |c_l| >= 1e-16
  CoinVector coin_state;
  Eigen::Matrix2d lambda_plus;
  Eigen::Matrix2d lambda_minus;
  double gamma = 0.0;
  double kappa = 0.0;
  std::vector<std::string> warnings;

  /// <s|Lambda+|s>, <s|Lambda-|s>.
  double weight_plus() const { return 0.5 * (1.0 + kappa); }
  double weight_minus() const { return 0.5 * (1.0 - kappa); }

  /// Argument 2 gamma sin(phi t / 2) of the Bessel functions.
  double bessel_argument(int t) const {
    return 2.0 * gamma * std::sin(params.phi * t / 2.0);
  }
};

inline AnalyticSolution build(const WalkParams& params, const GaussianSpec& spec) {
  if (params.phi == 0.0)
    throw std::domain_error(
        "analytic build: phi = 0 is singular; use free_limits for the field-free moments");
  detail::require_normalized_coin(spec.coin, "analytic build");

  AnalyticSolution sol{params, spec, {}, {}, spec.coin, {}, {}, 0.0, 0.0, {}};
  if (std::abs(params.phi) > std::numbers::pi / 8)
    sol.warnings.push_back("|phi| > pi/8: the weak-field approximation may be poor");
  if (spec.beta > 0.2)
    sol.warnings.push_back("beta > 0.2: the initial packet is not wide");

  const auto c = gaussian_coefficients(params, spec.beta, spec.center);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) < 1e-16) continue;
    sol.sites.push_back(params.site(i));
    sol.init_coeffs.push_back(c[i]);
  }

  const double th = params.theta;
  const double c2 = std::cos(th / 2), s2 = std::sin(th / 2), half_s = std::sin(th) / 2;
  sol.lambda_plus << c2 * c2, half_s, half_s, s2 * s2;
  sol.lambda_minus << s2 * s2, -half_s, -half_s, c2 * c2;
  sol.gamma = std::cos(th) / params.phi;
  sol.kappa = kappa(spec.coin, th);
  return sol;
}

namespace detail {

struct Branches {
  std::vector<Complex> plus, minus;  // F+_n(t), F-_n(t) per storage index
};

inline Branches branch_amplitudes(const AnalyticSolution& sol, int t) {
  if (t < 0) throw std::invalid_argument("analytic: t must be a non-negative integer");
  const WalkParams& p = sol.params;
  const auto n_sites = static_cast<std::size_t>(p.n_sites);
  const int l_min = sol.sites.front(), l_max = sol.sites.back();
  const int order_lo = p.min_site() - l_max, order_hi = p.max_site() - l_min;
  const int reach = std::max(std::abs(order_lo), std::abs(order_hi));
  const BesselRow row = bessel_row(sol.bessel_argument(t), -reach, reach);
  const double half_phase = p.phi * t / 2.0;

  Branches b{std::vector<Complex>(n_sites), std::vector<Complex>(n_sites)};
  for (std::size_t i = 0; i < n_sites; ++i) {
    const int n = p.site(i);
    Complex fp = 0.0, fm = 0.0;
    for (std::size_t q = 0; q < sol.sites.size(); ++q) {
      const int l = sol.sites[q];
      const Complex weight = sol.init_coeffs[q] * std::polar(1.0, (n + l) * half_phase);
      fp += weight * row(n - l);
      fm += weight * row(l - n);
    }
    b.plus[i] = fp;
    b.minus[i] = fm;
  }
  return b;
}

}  // namespace detail

/// Approximate two-component wavefunction at integer time t.
inline std::vector<CoinVector> psi_approx(const AnalyticSolution& sol, int t) {
  const auto b = detail::branch_amplitudes(sol, t);
  const CoinVector up_branch = sol.lambda_plus.cast<Complex>() * sol.coin_state;
  const CoinVector down_branch = sol.lambda_minus.cast<Complex>() * sol.coin_state;
  const double sign = (t % 2 == 0) ? 1.0 : -1.0;
  std::vector<CoinVector> out(b.plus.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = b.plus[i] * up_branch + (sign * b.minus[i]) * down_branch;
  return out;
}

inline WalkerState psi_approx_state(const AnalyticSolution& sol, int t) {
  return WalkerState(psi_approx(sol, t), Representation::position, t);
}

/// |F+_n|^2 <s|Lambda+|s> + |F-_n|^2 <s|Lambda-|s>.
inline Distribution p_approx(const AnalyticSolution& sol, int t) {
  const auto b = detail::branch_amplitudes(sol, t);
  const double wp = sol.weight_plus(), wm = sol.weight_minus();
  Distribution p(b.plus.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = std::norm(b.plus[i]) * wp + std::norm(b.minus[i]) * wm;
  return p;
}

/// <n>_t = kappa exp(-beta/2) cos(theta) sin(phi t)/phi, shifted by the packet center.
inline double mean_closed(const AnalyticSolution& sol, double t) {
  const double phi = sol.params.phi;
  return sol.spec.center +
         sol.kappa * std::exp(-sol.spec.beta / 2) * std::cos(sol.params.theta) *
             std::sin(phi * t) / phi;
}

/// <n^2>_t.  The full form is
///   1/(4 beta) + 2 cos^2(theta) sin^2(phi t/2)/phi^2 (1 + exp(-2 beta) cos(phi t));
/// `simplified` drops exp(-2 beta): 1/(4 beta) + cos^2(theta) sin^2(phi t)/phi^2.
inline double msq_closed(const AnalyticSolution& sol, double t, bool simplified = false) {
  const double phi = sol.params.phi, beta = sol.spec.beta;
  const double c = std::cos(sol.params.theta);
  double about_center;
  if (simplified) {
    const double s = std::sin(phi * t) / phi;
    about_center = 1.0 / (4 * beta) + c * c * s * s;
  } else {
    const double s = std::sin(phi * t / 2) / phi;
    about_center = 1.0 / (4 * beta) + 2 * c * c * s * s * (1 + std::exp(-2 * beta) * std::cos(phi * t));
  }
  const double x0 = sol.spec.center;
  return about_center + 2 * x0 * (mean_closed(sol, t) - x0) + x0 * x0;
}

struct FreeMoments {
  double mean;
  double msq;
};

/// phi -> 0 limits of the closed-form moments for a packet centered at 0.
inline FreeMoments free_limits(const GaussianSpec& spec, double theta, double t) {
  const double c = std::cos(theta);
  return {kappa(spec.coin, theta) * std::exp(-spec.beta / 2) * t * c,
          1.0 / (4 * spec.beta) + t * t * c * c};
}

}  // namespace blochwalk
