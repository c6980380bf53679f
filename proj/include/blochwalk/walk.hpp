#pragma once

// One-step electric walk W_phi = exp(i x phi) S(k) C, in position and in
// quasimomentum space, and the spectral objects of the free walk
// W_0(k) = diag(exp(-ik), exp(ik)) C.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochwalk/lattice.hpp"

namespace blochwalk {

using CoinMatrix = Eigen::Matrix2cd;

/// [[cos t, sin t], [sin t, -cos t]]; theta = pi/4 is the Hadamard coin.
inline CoinMatrix coin_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  CoinMatrix m;
  m << c, s, s, -c;
  return m;
}

/// Special-unitary coin [[cos t, i sin t], [i sin t, cos t]].
inline CoinMatrix coin_su2(double theta) {
  const Complex c = std::cos(theta), is = Complex(0.0, std::sin(theta));
  CoinMatrix m;
  m << c, is, is, c;
  return m;
}

inline bool is_unitary(const CoinMatrix& m, double tol = 1e-14) {
  return ((m.adjoint() * m) - CoinMatrix::Identity()).cwiseAbs().maxCoeff() <= tol;
}

/// W_0(k) = S(k) C with S(k) = diag(exp(-ik), exp(ik)).
inline Eigen::Matrix2cd free_walk(double k, const CoinMatrix& coin) {
  Eigen::Matrix2cd w = coin;
  w.row(0) *= std::polar(1.0, -k);
  w.row(1) *= std::polar(1.0, k);
  return w;
}

/// Delta_phi(k) = W_0(k) - W_0^dagger(k - phi).
inline Eigen::Matrix2cd delta_phi(double k, double phi, const CoinMatrix& coin) {
  return free_walk(k, coin) - free_walk(k - phi, coin).adjoint();
}

/// Two-step Hamiltonian H_2(k) = (i/2) [W_0(k) - W_0^dagger(k)].
inline Eigen::Matrix2cd h2(double k, const CoinMatrix& coin) {
  const Eigen::Matrix2cd w = free_walk(k, coin);
  return Complex(0.0, 0.5) * (w - w.adjoint());
}

class DegenerateSpectrumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Eigen-decomposition of an SU(2) free walk: W_0 = U diag(e^{-i w}, e^{i w}) U^dagger.
struct FreeWalkSpectrum {
  double omega = 0.0;          // in (0, pi)
  Eigen::Matrix2cd projector;  // onto the e^{-i omega} eigenvector
};

inline FreeWalkSpectrum free_walk_spectrum(double k, const CoinMatrix& coin) {
  const Eigen::Matrix2cd w = free_walk(k, coin);
  if (std::abs(w.determinant() - Complex(1.0)) > 1e-12)
    throw std::invalid_argument("h1: W_0(k) is not special unitary; use coin_su2");
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(w);
  if (solver.info() != Eigen::Success) throw std::runtime_error("h1: eigen-solve failed");
  // The eigenvalue with negative phase is e^{-i omega}.
  const int neg = std::arg(solver.eigenvalues()[0]) <= std::arg(solver.eigenvalues()[1]) ? 0 : 1;
  const double omega = -std::arg(solver.eigenvalues()[neg]);
  if (std::abs(std::sin(omega)) <= 1e-8 || omega <= 0.0)
    throw DegenerateSpectrumError("h1: |sin omega(k)| <= 1e-8 at k = " + std::to_string(k) +
                                  "; the logarithm branch is ambiguous");
  Eigen::Vector2cd v = solver.eigenvectors().col(neg);
  v.normalize();
  return {omega, v * v.adjoint()};
}

/// Effective Hamiltonian with W_0(k) = exp(-i tau H_1(k)), principal branch.
inline Eigen::Matrix2cd h1(double k, const CoinMatrix& coin) {
  const auto spec = free_walk_spectrum(k, coin);
  const Eigen::Matrix2cd sigma = 2.0 * spec.projector - Eigen::Matrix2cd::Identity();
  return (spec.omega / WalkParams::tau) * sigma;
}

// ---------------------------------------------------------------------------
// Time stepping

/// Position-space stepper with cached electric phases.  Each step applies
/// the coin at every site, moves up components n -> n+1 and down components
/// n -> n-1 (periodically), then multiplies site n by exp(i n phi).
class PositionEvolver {
 public:
  PositionEvolver(const WalkParams& params, const CoinMatrix& coin)
      : coin_(coin), phases_(static_cast<std::size_t>(params.n_sites)) {
    for (std::size_t i = 0; i < phases_.size(); ++i)
      phases_[i] = std::polar(1.0, params.site(i) * params.phi);
  }

  void step(std::span<const CoinVector> in, std::span<CoinVector> out) const {
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const CoinVector mixed = coin_ * in[i];
      const std::size_t right = (i + 1 == n) ? 0 : i + 1;
      const std::size_t left = (i == 0) ? n - 1 : i - 1;
      out[right][0] = mixed[0];
      out[left][1] = mixed[1];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] *= phases_[i];
  }

  WalkerState step(const WalkerState& state) const {
    if (state.representation() != Representation::position)
      throw RepresentationError("step", Representation::position);
    if (state.size() != phases_.size())
      throw std::invalid_argument("step: state size does not match the lattice");
    std::vector<CoinVector> out(state.size());
    step(state.amplitudes(), out);
    return WalkerState(std::move(out), Representation::position, state.time_index() + 1);
  }

 private:
  CoinMatrix coin_;
  std::vector<Complex> phases_;
};

inline WalkerState step(const WalkerState& state, const WalkParams& params,
                        const CoinMatrix& coin) {
  return PositionEvolver(params, coin).step(state);
}

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline int require_grid_shift(const WalkParams& params, const char* op) {
  const auto s = params.phi_grid_shift();
  if (!s)
    throw GridError(std::string(op) + ": phi = " + std::to_string(params.phi) +
                    " is not an integer multiple of 2*pi/N with N = " +
                    std::to_string(params.n_sites) + "; momentum-space stepping needs a grid shift");
  return *s;
}

/// Momentum-space stepper: psi_{j+1}(k_m) = W_0(k_{m-s}) psi_j(k_{m-s}), phi = 2*pi*s/N.
class MomentumEvolver {
 public:
  MomentumEvolver(const WalkParams& params, const CoinMatrix& coin)
      : shift_(require_grid_shift(params, "step_momentum")),
        walk_(static_cast<std::size_t>(params.n_sites)) {
    for (std::size_t i = 0; i < walk_.size(); ++i) walk_[i] = free_walk(params.momentum(i), coin);
  }

  int grid_shift() const { return shift_; }

  void step(std::span<const CoinVector> in, std::span<CoinVector> out) const {
    const long n = static_cast<long>(in.size());
    for (long i = 0; i < n; ++i) {
      const auto src = static_cast<std::size_t>(((i - shift_) % n + n) % n);
      out[static_cast<std::size_t>(i)] = walk_[src] * in[src];
    }
  }

  WalkerState step(const WalkerState& state) const {
    if (state.representation() != Representation::momentum)
      throw RepresentationError("step_momentum", Representation::momentum);
    if (state.size() != walk_.size())
      throw std::invalid_argument("step_momentum: state size does not match the lattice");
    std::vector<CoinVector> out(state.size());
    step(state.amplitudes(), out);
    return WalkerState(std::move(out), Representation::momentum, state.time_index() + 1);
  }

 private:
  int shift_;
  std::vector<Eigen::Matrix2cd> walk_;
};

inline WalkerState step_momentum(const WalkerState& state, const WalkParams& params,
                                 const CoinMatrix& coin) {
  return MomentumEvolver(params, coin).step(state);
}

/// Largest single-site probability at the two lattice ends.
inline double boundary_probability(const WalkerState& state) {
  if (state.representation() != Representation::position)
    throw RepresentationError("boundary_probability", Representation::position);
  return std::max(state[0].squaredNorm(), state[state.size() - 1].squaredNorm());
}

// ---------------------------------------------------------------------------
// Two-step dynamics

/// Auxiliary partial states with psi_j(k) = A+_j(k) + (-1)^j A-_j(k).
struct TwoStepDecomposition {
  std::vector<CoinVector> a_plus;
  std::vector<CoinVector> a_minus;
  int time_index = 0;

  WalkerState reconstruct() const {
    const double sign = (time_index % 2 == 0) ? 1.0 : -1.0;
    std::vector<CoinVector> out(a_plus.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a_plus[i] + sign * a_minus[i];
    return WalkerState(std::move(out), Representation::momentum, time_index);
  }
};

/// A^{+-}(0,k) = (1/2)[1 +- W_0(k)] psi(0,k).
inline TwoStepDecomposition initial_branches(const WalkerState& initial, const WalkParams& params,
                                             const CoinMatrix& coin) {
  if (initial.representation() != Representation::momentum)
    throw RepresentationError("initial_branches", Representation::momentum);
  if (initial.time_index() != 0)
    throw std::invalid_argument("initial_branches: expects the state at j = 0");
  TwoStepDecomposition d;
  d.a_plus.resize(initial.size());
  d.a_minus.resize(initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const CoinVector w = free_walk(params.momentum(i), coin) * initial[i];
    d.a_plus[i] = 0.5 * (initial[i] + w);
    d.a_minus[i] = 0.5 * (initial[i] - w);
  }
  return d;
}

namespace detail {

inline void require_consecutive(const WalkerState& prev, const WalkerState& curr,
                                const WalkerState& next, const char* op) {
  if (prev.size() != curr.size() || curr.size() != next.size())
    throw std::invalid_argument(std::string(op) + ": states differ in size");
  if (curr.time_index() != prev.time_index() + 1 || next.time_index() != curr.time_index() + 1)
    throw std::invalid_argument(std::string(op) + ": states are not consecutive in time");
}

}  // namespace detail

/// max over k_m of |psi_{j+1}(k+phi) - psi_{j-1}(k-phi) - Delta_phi(k) psi_j(k)|.
inline double two_step_residual(const WalkerState& prev, const WalkerState& curr,
                                const WalkerState& next, const WalkParams& params,
                                const CoinMatrix& coin) {
  for (const WalkerState* s : {&prev, &curr, &next})
    if (s->representation() != Representation::momentum)
      throw RepresentationError("two_step_residual", Representation::momentum);
  detail::require_consecutive(prev, curr, next, "two_step_residual");
  const long shift = require_grid_shift(params, "two_step_residual");
  const long n = static_cast<long>(curr.size());
  double worst = 0.0;
  for (long i = 0; i < n; ++i) {
    const auto fwd = static_cast<std::size_t>(((i + shift) % n + n) % n);
    const auto bwd = static_cast<std::size_t>(((i - shift) % n + n) % n);
    const auto ui = static_cast<std::size_t>(i);
    const CoinVector lhs = next[fwd] - prev[bwd];
    const CoinVector rhs = delta_phi(params.momentum(ui), params.phi, coin) * curr[ui];
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Per-site test of the continuous-time condition
/// |psi^u_{j+1,n} - psi^u_{j-1,n}| << |psi^u_{j-1,n}|.
struct CtResidual {
  std::vector<double> up;    // ratio per site, up component
  std::vector<double> down;  // ratio per site, down component
  double median = 0.0;       // probability-weighted median
  double max = 0.0;
  bool field_warning = false;  // the condition is derived for phi = 0
};

/// Ratios |psi_{j+1} - psi_{j-1}| / max(|psi_{j-1}|, 1e-30) per component and
/// site.  `median` weights each ratio by |psi^u_{j-1,n}|^2; `max` runs over
/// entries whose |psi^u_{j-1,n}| exceeds `support_fraction` times the largest.
inline CtResidual ct_residual(const WalkerState& prev, const WalkerState& curr,
                              const WalkerState& next, const WalkParams& params,
                              double support_fraction = 1e-6) {
  detail::require_consecutive(prev, curr, next, "ct_residual");
  auto in_position = [](const WalkerState& s) {
    return s.representation() == Representation::position ? s : to_position(s);
  };
  const WalkerState before = in_position(prev);
  const WalkerState after = in_position(next);

  constexpr double eps = 1e-30;
  CtResidual out;
  out.field_warning = params.phi != 0.0;
  out.up.resize(before.size());
  out.down.resize(before.size());
  double largest = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i)
    largest = std::max({largest, std::abs(before[i][0]), std::abs(before[i][1])});

  struct Weighted {
    double ratio, weight;
  };
  std::vector<Weighted> entries;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    for (int u = 0; u < 2; ++u) {
      const double base = std::abs(before[i][u]);
      const double ratio = std::abs(after[i][u] - before[i][u]) / std::max(base, eps);
      (u == 0 ? out.up : out.down)[i] = ratio;
      if (base > support_fraction * largest) {
        entries.push_back({ratio, base * base});
        total_weight += base * base;
        out.max = std::max(out.max, ratio);
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Weighted& a, const Weighted& b) { return a.ratio < b.ratio; });
  double acc = 0.0;
  for (const auto& e : entries) {
    acc += e.weight;
    if (acc >= 0.5 * total_weight) {
      out.median = e.ratio;
      break;
    }
  }
  return out;
}

}  // namespace blochwalk
