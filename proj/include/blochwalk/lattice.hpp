#pragma once

// Walker states on a finite periodic lattice of N sites.  Storage index i
// maps to the signed site label n = i - N/2, so sites run over
// {-N/2, ..., N/2 - 1}; the same convention labels the momentum grid
// k_m = 2*pi*m/N.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochwalk/special_functions.hpp"

namespace blochwalk {

using Complex = std::complex<double>;

/// Coin components: index 0 is the up (R) amplitude, index 1 the down (L).
using CoinVector = Eigen::Vector2cd;

enum class Representation { position, momentum };

inline const char* to_string(Representation r) {
  return r == Representation::position ? "position" : "momentum";
}

class RepresentationError : public std::logic_error {
 public:
  RepresentationError(const char* op, Representation expected)
      : std::logic_error(std::string(op) + ": expected a state in " + to_string(expected) +
                         " representation") {}
};

/// Walk constants.  The time step and lattice spacing are both 1.
struct WalkParams {
  static constexpr double tau = 1.0;
  static constexpr double spacing = 1.0;

  double theta = 0.0;
  double phi = 0.0;
  int n_sites = 0;

  WalkParams(double theta_, double phi_, int n_sites_)
      : theta(theta_), phi(phi_), n_sites(n_sites_) {
    constexpr double pi = std::numbers::pi;
    if (!std::isfinite(theta) || !std::isfinite(phi))
      throw std::invalid_argument("WalkParams: theta and phi must be finite");
    if (!(phi >= -pi && phi < pi))
      throw std::invalid_argument("WalkParams: phi must lie in [-pi, pi), got " +
                                  std::to_string(phi));
    if (n_sites < 16 || n_sites % 2 != 0)
      throw std::invalid_argument("WalkParams: n_sites must be even and >= 16, got " +
                                  std::to_string(n_sites));
  }

  int min_site() const { return -n_sites / 2; }
  int max_site() const { return n_sites / 2 - 1; }
  int site(std::size_t index) const { return static_cast<int>(index) - n_sites / 2; }

  /// Storage index of a site label, wrapped periodically.
  std::size_t index(long site) const {
    long i = (site + n_sites / 2) % n_sites;
    if (i < 0) i += n_sites;
    return static_cast<std::size_t>(i);
  }

  double momentum(std::size_t index) const {
    return 2.0 * std::numbers::pi * static_cast<double>(site(index)) / n_sites;
  }

  /// The integer s with phi = 2*pi*s/N, if phi lies on the momentum grid.
  std::optional<int> phi_grid_shift() const {
    const double s = phi * n_sites / (2.0 * std::numbers::pi);
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9) return std::nullopt;
    return static_cast<int>(r);
  }
};

/// Two-component amplitudes on every lattice site at one time instant.
class WalkerState {
 public:
  WalkerState(std::vector<CoinVector> amplitudes, Representation rep, int time_index = 0)
      : amplitudes_(std::move(amplitudes)), rep_(rep), time_index_(time_index) {
    if (time_index_ < 0) throw std::invalid_argument("WalkerState: negative time index");
  }

  std::span<const CoinVector> amplitudes() const { return amplitudes_; }
  const CoinVector& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::size_t size() const { return amplitudes_.size(); }
  Representation representation() const { return rep_; }
  int time_index() const { return time_index_; }

 private:
  std::vector<CoinVector> amplitudes_;
  Representation rep_;
  int time_index_;
};

/// Squared norm; momentum states use sum_n |psi_n|^2 = (1/N) sum_m |psi(k_m)|^2.
inline double norm_squared(const WalkerState& state) {
  double total = 0.0;
  for (const auto& a : state.amplitudes()) total += a.squaredNorm();
  if (state.representation() == Representation::momentum)
    total /= static_cast<double>(state.size());
  return total;
}

struct GaussianSpec {
  double beta = 0.05;
  CoinVector coin = CoinVector(1.0, 0.0);
  int center = 0;
};

namespace detail {

inline void require_normalized_coin(const CoinVector& coin, const char* op) {
  if (!coin.allFinite() || std::abs(coin.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(op) + ": coin state must be normalized");
}

}  // namespace detail

/// Walker sitting on one site with the given coin state.
inline WalkerState localized_state(const WalkParams& params, int site, const CoinVector& coin) {
  detail::require_normalized_coin(coin, "localized_state");
  std::vector<CoinVector> amps(static_cast<std::size_t>(params.n_sites), CoinVector::Zero());
  amps[params.index(site)] = coin;
  return WalkerState(std::move(amps), Representation::position, 0);
}

/// Lattice coefficients c_n = exp(-beta (n - center)^2) / sqrt(theta3(exp(-2 beta))),
/// one per storage index.
inline std::vector<double> gaussian_coefficients(const WalkParams& params, double beta,
                                                 int center) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("gaussian_state: beta must be positive");
  if (center < params.min_site() || center > params.max_site())
    throw std::invalid_argument("gaussian_state: center outside the lattice");
  const double reach = std::min<double>(center - params.min_site(), params.max_site() + 1 - center);
  if (!(std::exp(-beta * reach * reach) < 1e-14))
    throw std::length_error("gaussian_state: lattice of " + std::to_string(params.n_sites) +
                            " sites is too small for beta = " + std::to_string(beta));
  const double norm = std::sqrt(theta3(std::exp(-2.0 * beta)));
  std::vector<double> c(static_cast<std::size_t>(params.n_sites));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = params.site(i) - center;
    c[i] = std::exp(-beta * d * d) / norm;
  }
  return c;
}

inline WalkerState gaussian_state(const WalkParams& params, const GaussianSpec& spec) {
  detail::require_normalized_coin(spec.coin, "gaussian_state");
  const auto c = gaussian_coefficients(params, spec.beta, spec.center);
  std::vector<CoinVector> amps(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) amps[i] = c[i] * spec.coin;
  return WalkerState(std::move(amps), Representation::position, 0);
}

/// Discrete Fourier transform between position and momentum on the lattice:
///   psi(k_m) = sum_n exp(-i k_m n) psi_n,  psi_n = (1/N) sum_m exp(+i k_m n) psi(k_m).
/// Plain O(N^2) with a precomputed twiddle table.
class LatticeDft {
 public:
  explicit LatticeDft(int n_sites) : n_(n_sites), twiddle_(static_cast<std::size_t>(n_sites)) {
    for (int r = 0; r < n_; ++r)
      twiddle_[static_cast<std::size_t>(r)] =
          std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) / n_);
  }

  int size() const { return n_; }

  WalkerState forward(const WalkerState& state) const {
    if (state.representation() != Representation::position)
      throw RepresentationError("to_momentum", Representation::position);
    return WalkerState(transform(state.amplitudes(), false), Representation::momentum,
                       state.time_index());
  }

  WalkerState inverse(const WalkerState& state) const {
    if (state.representation() != Representation::momentum)
      throw RepresentationError("to_position", Representation::momentum);
    auto amps = transform(state.amplitudes(), true);
    const double scale = 1.0 / n_;
    for (auto& a : amps) a *= scale;
    return WalkerState(std::move(amps), Representation::position, state.time_index());
  }

 private:
  std::vector<CoinVector> transform(std::span<const CoinVector> in, bool inverse) const {
    if (static_cast<int>(in.size()) != n_)
      throw std::invalid_argument("LatticeDft: state size does not match the lattice");
    const long half = n_ / 2;
    std::vector<long> wrapped(in.size());
    for (long i = 0; i < n_; ++i) wrapped[static_cast<std::size_t>(i)] = ((i - half) % n_ + n_) % n_;
    std::vector<CoinVector> out(in.size(), CoinVector::Zero());
    for (long i = 0; i < n_; ++i) {
      const long m = wrapped[static_cast<std::size_t>(i)];
      Complex up = 0.0, down = 0.0;
      for (long l = 0; l < n_; ++l) {
        Complex w = twiddle_[static_cast<std::size_t>((m * wrapped[static_cast<std::size_t>(l)]) % n_)];
        if (inverse) w = std::conj(w);
        up += w * in[static_cast<std::size_t>(l)][0];
        down += w * in[static_cast<std::size_t>(l)][1];
      }
      out[static_cast<std::size_t>(i)] = CoinVector(up, down);
    }
    return out;
  }

  int n_;
  std::vector<Complex> twiddle_;
};

inline WalkerState to_momentum(const WalkerState& state) {
  return LatticeDft(static_cast<int>(state.size())).forward(state);
}

inline WalkerState to_position(const WalkerState& state) {
  return LatticeDft(static_cast<int>(state.size())).inverse(state);
}

/// CSV with header n,re_up,im_up,re_down,im_down (position representation).
inline void write_state_csv(std::ostream& os, const WalkerState& state) {
  if (state.representation() != Representation::position)
    throw RepresentationError("write_state_csv", Representation::position);
  const long half = static_cast<long>(state.size()) / 2;
  os << "n,re_up,im_up,re_down,im_down\n";
  char buf[160];
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& a = state[i];
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g\n", static_cast<long>(i) - half,
                  a[0].real(), a[0].imag(), a[1].real(), a[1].imag());
    os << buf;
  }
}

/// Reads a state written by write_state_csv.  Rows must cover sites
/// -N/2 .. N/2-1 in order.
inline WalkerState read_state_csv(std::istream& is, int time_index = 0) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("n,re_up,im_up,re_down,im_down", 0) != 0)
    throw std::runtime_error("read_state_csv: missing header");
  std::vector<long> sites;
  std::vector<CoinVector> amps;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long n = 0;
    double v[4];
    char sep = 0;
    row >> n;
    for (double& x : v) {
      row >> sep >> x;
      if (!row || sep != ',') throw std::runtime_error("read_state_csv: malformed row: " + line);
    }
    sites.push_back(n);
    amps.emplace_back(Complex(v[0], v[1]), Complex(v[2], v[3]));
  }
  const long half = static_cast<long>(amps.size()) / 2;
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i] != static_cast<long>(i) - half)
      throw std::runtime_error("read_state_csv: site labels must run from -N/2 in order");
  return WalkerState(std::move(amps), Representation::position, time_index);
}

}  // namespace blochwalk
