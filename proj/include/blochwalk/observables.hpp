#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blochwalk/lattice.hpp"

namespace blochwalk {

/// A probability distribution over lattice sites, indexed like WalkerState
/// storage (site n = index - N/2).
using Distribution = std::vector<double>;

inline Distribution probability(const WalkerState& state) {
  if (state.representation() != Representation::position)
    throw RepresentationError("probability", Representation::position);
  Distribution p(state.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = state[i].squaredNorm();
  return p;
}

inline long site_label(std::size_t index, std::size_t size) {
  return static_cast<long>(index) - static_cast<long>(size / 2);
}

inline double mean_position(std::span<const double> dist) {
  double m = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    m += static_cast<double>(site_label(i, dist.size())) * dist[i];
  return m;
}

inline double mean_square(std::span<const double> dist) {
  double m = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double n = static_cast<double>(site_label(i, dist.size()));
    m += n * n * dist[i];
  }
  return m;
}

inline double std_dev(std::span<const double> dist) {
  const double mu = mean_position(dist);
  // Central second moment directly; avoids cancellation in <n^2> - <n>^2.
  double var = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double d = static_cast<double>(site_label(i, dist.size())) - mu;
    var += d * d * dist[i];
  }
  return std::sqrt(std::max(var, 0.0));
}

namespace detail {

inline constexpr double kNegativeClamp = -1e-15;

inline Distribution clamped(std::span<const double> p, const char* op) {
  Distribution out(p.begin(), p.end());
  double total = 0.0;
  for (double& v : out) {
    if (v < 0.0) {
      if (v < kNegativeClamp)
        throw std::invalid_argument(std::string(op) + ": negative probability " +
                                    std::to_string(v));
      v = 0.0;
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(op) + ": distribution is not normalized (sum = " +
                                std::to_string(total) + ")");
  return out;
}

inline void require_same_size(std::span<const double> p, std::span<const double> q,
                              const char* op) {
  if (p.size() != q.size())
    throw std::invalid_argument(std::string(op) + ": distributions differ in length (" +
                                std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                                ")");
}

}  // namespace detail

/// sqrt(1 - sum_n sqrt(p_n q_n)).
inline double hellinger(std::span<const double> p, std::span<const double> q) {
  detail::require_same_size(p, q, "hellinger");
  const auto a = detail::clamped(p, "hellinger");
  const auto b = detail::clamped(q, "hellinger");
  double overlap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::sqrt(a[i] * b[i]);
  return std::sqrt(std::clamp(1.0 - overlap, 0.0, 1.0));
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  detail::require_same_size(p, q, "total_variation");
  const auto a = detail::clamped(p, "total_variation");
  const auto b = detail::clamped(q, "total_variation");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return std::min(0.5 * sum, 1.0);
}

/// Largest gap between the two CDFs accumulated in site order.
inline double ks_distance(std::span<const double> p, std::span<const double> q) {
  detail::require_same_size(p, q, "ks_distance");
  const auto a = detail::clamped(p, "ks_distance");
  const auto b = detail::clamped(q, "ks_distance");
  double cp = 0.0, cq = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cp += a[i];
    cq += b[i];
    worst = std::max(worst, std::abs(cp - cq));
  }
  return std::min(worst, 1.0);
}

struct Extremum {
  std::size_t index;
  double value;
  friend bool operator==(const Extremum&, const Extremum&) = default;
};

/// Interior local minima; a flat bottom is reported at its first index.
inline std::vector<Extremum> local_minima(std::span<const double> v) {
  std::vector<Extremum> out;
  if (v.size() < 3) return out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    if (j < v.size() && v[j] > v[i]) out.push_back({i, v[i]});
  }
  return out;
}

inline double bloch_period(double phi) {
  if (phi == 0.0) throw std::domain_error("bloch_period: phi = 0 has an infinite Bloch period");
  return 2.0 * std::numbers::pi / std::abs(phi);
}

enum class SeriesSource { exact, analytic };

/// Probability distributions at a sequence of time instants.
struct ProbabilitySeries {
  std::vector<int> times;
  std::vector<Distribution> dists;
  SeriesSource source = SeriesSource::exact;

  std::size_t size() const { return times.size(); }

  void push(int t, Distribution d) {
    for (double& v : d) {
      if (v < detail::kNegativeClamp)
        throw std::invalid_argument("ProbabilitySeries: negative probability at t = " +
                                    std::to_string(t));
      if (v < 0.0) v = 0.0;
    }
    times.push_back(t);
    dists.push_back(std::move(d));
  }

  std::vector<double> means() const { return map(mean_position); }
  std::vector<double> mean_squares() const { return map(mean_square); }
  std::vector<double> std_devs() const { return map(std_dev); }

 private:
  template <class F>
  std::vector<double> map(F f) const {
    std::vector<double> out;
    out.reserve(dists.size());
    for (const auto& d : dists) out.push_back(f(d));
    return out;
  }
};

}  // namespace blochwalk
