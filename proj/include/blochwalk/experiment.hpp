#pragma once

// Declarative experiments: a JSON document names the walk parameters, the
// initial state, the duration and which CSV artifacts to write.
//
//   {
//     "name": "fig8-top",
//     "theta": "pi/4",
//     "phi": "2pi/60",              // or a list for one run per field value
//     "beta": 0.05,                 // or "localized"
//     "coin_state": [0.7071067811865476, -0.7071067811865476],
//     "steps": 180,
//     "n_sites": "auto",
//     "outputs": ["hellinger", {"snapshots": [15, 30, 60]}]
//   }
//
// Angles are numbers or strings of the form [-][a][*]pi[/b] or a plain
// decimal.  Coin components are reals or [re, im] pairs.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "blochwalk/analytic.hpp"
#include "blochwalk/lattice.hpp"
#include "blochwalk/observables.hpp"
#include "blochwalk/walk.hpp"

namespace blochwalk {

using json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class NoWrapViolation : public std::runtime_error {
 public:
  NoWrapViolation(int step, double probability)
      : std::runtime_error("probability " + format_probability(probability) +
                           " reached the lattice boundary at step " + std::to_string(step)),
        step_(step) {}
  int step() const { return step_; }

 private:
  static std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", p);
    return buf;
  }
  int step_;
};

inline constexpr double kNoWrapThreshold = 1e-12;

// ---------------------------------------------------------------------------
// Parsing helpers

/// Parses "pi/4", "2pi/60", "-2*pi/60", "pi", "0.1".
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(ch));
  if (s.empty()) throw std::invalid_argument("empty angle");
  const auto bad = [&] { return std::invalid_argument("cannot parse angle '" + text + "'"); };

  std::size_t pos = 0;
  double sign = 1.0;
  if (s[pos] == '+' || s[pos] == '-') sign = (s[pos++] == '-') ? -1.0 : 1.0;

  auto read_number = [&](double& out) {
    const std::size_t start = pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                              s[pos] == 'e' ||
                              ((s[pos] == '-' || s[pos] == '+') && pos > start && s[pos - 1] == 'e')))
      ++pos;
    if (pos == start) return false;
    std::size_t used = 0;
    try {
      out = std::stod(s.substr(start, pos - start), &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != pos - start) throw bad();
    return true;
  };

  double value = 1.0;
  const bool has_coeff = read_number(value);
  bool has_pi = false;
  if (pos < s.size() && s[pos] == '*') {
    if (!has_coeff) throw bad();
    ++pos;
  }
  if (s.compare(pos, 2, "pi") == 0) {
    has_pi = true;
    pos += 2;
    value *= std::numbers::pi;
  } else if (has_coeff && pos > 0 && s[pos - 1] == '*') {
    throw bad();
  }
  if (!has_coeff && !has_pi) throw bad();
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    double denom = 0.0;
    if (!read_number(denom) || denom == 0.0) throw bad();
    value /= denom;
  }
  if (pos != s.size()) throw bad();
  return sign * value;
}

inline double angle_from_json(const json& j, const std::string& field) {
  try {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_angle(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  throw ConfigError(field, "expected a number or an angle string such as \"2pi/60\"");
}

/// Smallest q <= 100000 with phi/(2 pi) = p/q, if any.
inline std::optional<long> field_denominator(double phi) {
  const double r = phi / (2.0 * std::numbers::pi);
  for (long q = 1; q <= 100000; ++q)
    if (std::abs(q * r - std::round(q * r)) < 1e-9 * std::max(1.0, std::abs(q * r))) return q;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Configuration

struct OutputSpec {
  bool probability_map = false;
  bool amplitude_map = false;
  bool analytic_probability_map = false;
  bool mean = false;
  bool sigma = false;
  bool minima = false;
  bool hellinger = false;
  bool moments = false;
  bool final_state = false;
  std::vector<int> snapshots;

  bool needs_analytic() const {
    return analytic_probability_map || hellinger || moments;
  }
};

struct ExperimentConfig {
  std::string name;
  double theta = 0.0;
  std::vector<double> phis;
  std::optional<double> beta;  // nullopt: localized initial state
  CoinVector coin = CoinVector(1.0, 0.0);
  int center = 0;
  int steps = 0;
  std::optional<int> n_sites;  // nullopt: auto
  OutputSpec outputs;
  json source;  // the document this config was parsed from
};

inline CoinVector coin_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("coin_state", "expected two components");
  CoinVector v;
  for (int i = 0; i < 2; ++i) {
    const json& c = j[static_cast<std::size_t>(i)];
    const std::string field = "coin_state[" + std::to_string(i) + "]";
    if (c.is_number()) {
      v[i] = Complex(c.get<double>(), 0.0);
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      v[i] = Complex(c[0].get<double>(), c[1].get<double>());
    } else {
      throw ConfigError(field, "expected a real number or a [re, im] pair");
    }
  }
  if (std::abs(v.squaredNorm() - 1.0) > 1e-12)
    throw ConfigError("coin_state", "must be normalized (|up|^2 + |down|^2 = 1 within 1e-12)");
  return v;
}

inline OutputSpec outputs_from_json(const json& j, int steps) {
  OutputSpec out;
  if (!j.is_array()) throw ConfigError("outputs", "expected a list");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string field = "outputs[" + std::to_string(i) + "]";
    const json& item = j[i];
    if (item.is_object()) {
      if (!item.contains("snapshots") || item.size() != 1)
        throw ConfigError(field, "object outputs must be {\"snapshots\": [t, ...]}");
      const json& ts = item["snapshots"];
      if (!ts.is_array() || ts.empty()) throw ConfigError(field, "snapshots must be a non-empty list");
      for (const json& t : ts) {
        if (!t.is_number_integer()) throw ConfigError(field, "snapshot times must be integers");
        const int v = t.get<int>();
        if (v < 0 || v > steps)
          throw ConfigError(field, "snapshot time " + std::to_string(v) + " outside [0, steps]");
        out.snapshots.push_back(v);
      }
      continue;
    }
    if (!item.is_string()) throw ConfigError(field, "expected an output name");
    const std::string name = item.get<std::string>();
    if (name == "probability_map") out.probability_map = true;
    else if (name == "amplitude_map") out.amplitude_map = true;
    else if (name == "analytic_probability_map") out.analytic_probability_map = true;
    else if (name == "mean") out.mean = true;
    else if (name == "sigma") out.sigma = true;
    else if (name == "minima") out.minima = true;
    else if (name == "hellinger") out.hellinger = true;
    else if (name == "moments") out.moments = true;
    else if (name == "final_state") out.final_state = true;
    else throw ConfigError(field, "unknown output '" + name + "'");
  }
  std::sort(out.snapshots.begin(), out.snapshots.end());
  out.snapshots.erase(std::unique(out.snapshots.begin(), out.snapshots.end()), out.snapshots.end());
  return out;
}

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  static const std::set<std::string> known = {"name",  "theta",   "phi",     "beta",   "coin_state",
                                              "steps", "n_sites", "outputs", "center"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(key, "unknown field");

  ExperimentConfig cfg;
  cfg.source = j;
  if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty())
    throw ConfigError("name", "required non-empty string");
  cfg.name = j["name"].get<std::string>();
  if (cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." || cfg.name == "..")
    throw ConfigError("name", "must be usable as a directory name");

  if (!j.contains("theta")) throw ConfigError("theta", "required");
  cfg.theta = angle_from_json(j["theta"], "theta");

  if (!j.contains("phi")) throw ConfigError("phi", "required");
  if (j["phi"].is_array()) {
    if (j["phi"].empty()) throw ConfigError("phi", "list must not be empty");
    for (std::size_t i = 0; i < j["phi"].size(); ++i)
      cfg.phis.push_back(angle_from_json(j["phi"][i], "phi[" + std::to_string(i) + "]"));
  } else {
    cfg.phis.push_back(angle_from_json(j["phi"], "phi"));
  }
  for (std::size_t i = 0; i < cfg.phis.size(); ++i)
    if (!(cfg.phis[i] >= -std::numbers::pi && cfg.phis[i] < std::numbers::pi))
      throw ConfigError(cfg.phis.size() == 1 ? "phi" : "phi[" + std::to_string(i) + "]",
                        "must lie in [-pi, pi)");

  if (!j.contains("beta")) throw ConfigError("beta", "required (a positive number or \"localized\")");
  if (j["beta"].is_string()) {
    if (j["beta"].get<std::string>() != "localized")
      throw ConfigError("beta", "the only string value is \"localized\"");
  } else if (j["beta"].is_number()) {
    cfg.beta = j["beta"].get<double>();
    if (!(*cfg.beta > 0.0) || !std::isfinite(*cfg.beta)) throw ConfigError("beta", "must be positive");
  } else {
    throw ConfigError("beta", "expected a positive number or \"localized\"");
  }

  if (!j.contains("coin_state")) throw ConfigError("coin_state", "required");
  cfg.coin = coin_from_json(j["coin_state"]);

  if (j.contains("center")) {
    if (!j["center"].is_number_integer()) throw ConfigError("center", "expected an integer");
    cfg.center = j["center"].get<int>();
  }

  if (!j.contains("steps") || !j["steps"].is_number_integer())
    throw ConfigError("steps", "required integer");
  cfg.steps = j["steps"].get<int>();
  if (cfg.steps < 1) throw ConfigError("steps", "must be >= 1");

  if (j.contains("n_sites")) {
    const json& n = j["n_sites"];
    if (n.is_string()) {
      if (n.get<std::string>() != "auto") throw ConfigError("n_sites", "expected an integer or \"auto\"");
    } else if (n.is_number_integer()) {
      const int v = n.get<int>();
      if (v < 16 || v % 2 != 0) throw ConfigError("n_sites", "must be even and >= 16");
      cfg.n_sites = v;
    } else {
      throw ConfigError("n_sites", "expected an integer or \"auto\"");
    }
  }

  cfg.outputs = j.contains("outputs") ? outputs_from_json(j["outputs"], cfg.steps) : OutputSpec{};
  if (cfg.outputs.needs_analytic()) {
    if (!cfg.beta)
      throw ConfigError("outputs", "hellinger, moments and analytic_probability_map need a Gaussian initial state");
    for (double phi : cfg.phis)
      if (phi == 0.0)
        throw ConfigError("outputs", "hellinger, moments and analytic_probability_map need phi != 0");
  }
  return cfg;
}

/// Lattice size for "auto": N = L * ceil(2 (steps + margin) / L), with
/// L = lcm(denominator of phi/2pi, 2) and margin = 8/sqrt(beta) + 16.  The
/// half-width then exceeds the light cone of the walk plus the packet tail.
inline int auto_lattice_size(double phi, int steps, std::optional<double> beta) {
  const long denom = field_denominator(phi).value_or(1);
  const long unit = std::lcm(denom, 2L);
  const double margin = (beta ? 8.0 / std::sqrt(*beta) : 0.0) + 16.0;
  const double wanted = 2.0 * (steps + margin);
  long n = unit * static_cast<long>(std::ceil(wanted / static_cast<double>(unit)));
  while (n < 16) n += unit;
  if (n > std::numeric_limits<int>::max()) throw ConfigError("n_sites", "auto lattice size overflows");
  return static_cast<int>(n);
}


// ---------------------------------------------------------------------------
// Running

struct RunResult {
  double phi = 0.0;
  int n_sites = 0;
  ProbabilitySeries exact;
  std::optional<ProbabilitySeries> analytic;
  std::optional<AnalyticSolution> solution;
  std::vector<double> hellinger, total_variation, ks;  // per time step, when analytic
  std::vector<std::vector<CoinVector>> frames;         // amplitudes, only for amplitude_map
  std::optional<WalkerState> final_state;
  std::vector<std::string> warnings;
};

/// Evolves one field value for cfg.steps steps.  The analytic series and the
/// distances are added when `with_analytic` is set and the initial state is
/// a Gaussian with phi != 0.  Throws NoWrapViolation if probability above
/// kNoWrapThreshold reaches either end of the lattice.
inline RunResult simulate(const ExperimentConfig& cfg, double phi, bool with_analytic) {
  RunResult r;
  r.phi = phi;
  r.n_sites = cfg.n_sites.value_or(auto_lattice_size(phi, cfg.steps, cfg.beta));
  const WalkParams params(cfg.theta, phi, r.n_sites);

  WalkerState initial = [&] {
    try {
      return cfg.beta ? gaussian_state(params, {*cfg.beta, cfg.coin, cfg.center})
                      : localized_state(params, cfg.center, cfg.coin);
    } catch (const std::length_error& e) {
      throw ConfigError("n_sites", e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("center", e.what());
    }
  }();

  const PositionEvolver evolver(params, coin_matrix(cfg.theta));
  r.exact.source = SeriesSource::exact;
  std::vector<CoinVector> current(initial.amplitudes().begin(), initial.amplitudes().end());
  std::vector<CoinVector> next(current.size());
  const int keep_frames = cfg.outputs.amplitude_map;
  for (int j = 0;; ++j) {
    Distribution p(current.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = current[i].squaredNorm();
    const double edge = std::max(p.front(), p.back());
    if (!(edge < kNoWrapThreshold)) throw NoWrapViolation(j, edge);
    r.exact.push(j, std::move(p));
    if (keep_frames) r.frames.push_back(current);
    if (j == cfg.steps) break;
    evolver.step(current, next);
    std::swap(current, next);
  }
  r.final_state.emplace(std::move(current), Representation::position, cfg.steps);

  if (with_analytic && cfg.beta && phi != 0.0) {
    r.solution = build(params, {*cfg.beta, cfg.coin, cfg.center});
    r.warnings = r.solution->warnings;
    ProbabilitySeries series;
    series.source = SeriesSource::analytic;
    for (int j = 0; j <= cfg.steps; ++j) series.push(j, p_approx(*r.solution, j));
    for (std::size_t t = 0; t < series.size(); ++t) {
      const auto& pe = r.exact.dists[t];
      const auto& pa = series.dists[t];
      r.hellinger.push_back(blochwalk::hellinger(pe, pa));
      r.total_variation.push_back(blochwalk::total_variation(pe, pa));
      r.ks.push_back(ks_distance(pe, pa));
    }
    r.analytic = std::move(series);
  }
  return r;
}

/// Bloch period estimated from the zero crossings of <n>_j.  The series is
/// first smoothed with weights (1/4, 1/2, 1/4), which cancels the (-1)^j
/// sublattice jitter of the walk; crossings are located by linear
/// interpolation and |<n>| below 1e-9 of its maximum counts as zero.  The
/// period is the mean gap between successive crossings of the same
/// direction, or twice the mean gap between any two when no direction
/// repeats.
inline std::optional<double> period_from_zero_crossings(std::span<const double> mean) {
  if (mean.size() < 3) return std::nullopt;
  std::vector<double> m(mean.size() - 2);
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = 0.25 * mean[j] + 0.5 * mean[j + 1] + 0.25 * mean[j + 2];
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::nullopt;
  const double tol = 1e-9 * scale;

  std::vector<double> down, up, all;
  std::optional<std::size_t> last;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (std::abs(m[j]) <= tol) continue;
    if (last && (m[*last] > 0) != (m[j] > 0)) {
      const double a = static_cast<double>(*last), b = static_cast<double>(j);
      const double c = 1.0 + a + (b - a) * m[*last] / (m[*last] - m[j]);  // +1: window center
      (m[*last] > 0 ? down : up).push_back(c);
      all.push_back(c);
    }
    last = j;
  }
  double gaps = 0.0;
  int count = 0;
  for (const auto* v : {&down, &up})
    for (std::size_t i = 1; i < v->size(); ++i, ++count) gaps += (*v)[i] - (*v)[i - 1];
  if (count > 0) return gaps / count;
  if (all.size() >= 2) return 2.0 * (all.back() - all.front()) / static_cast<double>(all.size() - 1);
  return std::nullopt;
}

/// Least-squares slope of the local minima of sigma_j against j.
inline double minima_slope(std::span<const double> sigma) {
  const auto minima = local_minima(sigma);
  if (minima.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(minima.size());
  for (const auto& m : minima) {
    const double x = static_cast<double>(m.index);
    sx += x;
    sy += m.value;
    sxx += x * x;
    sxy += x * m.value;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : os_(path) {
    if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os_ << header << '\n';
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
    os_ << line << '\n';
  }

 private:
  static std::string cell(double v) { return fmt_real(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  std::ofstream os_;
};

inline std::string run_directory_name(double phi, std::size_t index) {
  if (phi == 0.0) return "phi_0";
  const double period = bloch_period(phi);
  if (std::abs(period - std::round(period)) < 1e-9)
    return std::string(phi < 0 ? "phi_negT" : "phi_T") + std::to_string(std::lround(period));
  return "phi_" + std::to_string(index);
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

/// Writes the artifacts requested by cfg.outputs into `dir`; returns their
/// file names in write order.
inline std::vector<std::string> write_run(const ExperimentConfig& cfg, const RunResult& r,
                                          const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const OutputSpec& o = cfg.outputs;
  std::vector<std::string> names;
  auto open = [&](const std::string& name, const std::string& header) {
    names.push_back(name);
    return detail::CsvFile(dir / name, header);
  };
  const std::size_t n_sites = static_cast<std::size_t>(r.n_sites);
  const auto site = [&](std::size_t i) { return site_label(i, n_sites); };

  if (o.probability_map) {
    auto f = open("probability_map.csv", "j,n,p");
    for (std::size_t t = 0; t < r.exact.size(); ++t)
      for (std::size_t i = 0; i < n_sites; ++i) f.row(r.exact.times[t], site(i), r.exact.dists[t][i]);
  }
  if (o.amplitude_map) {
    auto f = open("amplitude_map.csv", "j,n,re_up,im_up,re_down,im_down");
    for (std::size_t t = 0; t < r.frames.size(); ++t)
      for (std::size_t i = 0; i < n_sites; ++i) {
        const CoinVector& a = r.frames[t][i];
        f.row(static_cast<int>(t), site(i), a[0].real(), a[0].imag(), a[1].real(), a[1].imag());
      }
  }
  if (o.analytic_probability_map && r.analytic) {
    auto f = open("analytic_probability_map.csv", "j,n,p");
    for (std::size_t t = 0; t < r.analytic->size(); ++t)
      for (std::size_t i = 0; i < n_sites; ++i)
        f.row(r.analytic->times[t], site(i), r.analytic->dists[t][i]);
  }
  const auto means = r.exact.means();
  const auto sigmas = r.exact.std_devs();
  if (o.mean) {
    auto f = open("mean.csv", "j,mean");
    for (std::size_t t = 0; t < means.size(); ++t) f.row(r.exact.times[t], means[t]);
  }
  if (o.sigma) {
    auto f = open("sigma.csv", "j,sigma");
    for (std::size_t t = 0; t < sigmas.size(); ++t) f.row(r.exact.times[t], sigmas[t]);
  }
  if (o.minima) {
    auto f = open("sigma_minima.csv", "j,sigma");
    for (const auto& m : local_minima(sigmas)) f.row(r.exact.times[m.index], m.value);
  }
  if (o.hellinger && r.analytic) {
    auto f = open("metrics.csv", "j,hellinger,total_variation,ks");
    for (std::size_t t = 0; t < r.hellinger.size(); ++t)
      f.row(r.exact.times[t], r.hellinger[t], r.total_variation[t], r.ks[t]);
  }
  if (o.moments && r.analytic && r.solution) {
    auto f = open("moments.csv", "j,mean_exact,mean_approx,mean_closed,msq_exact,msq_approx,msq_closed");
    const auto msq = r.exact.mean_squares();
    const auto mean_a = r.analytic->means();
    const auto msq_a = r.analytic->mean_squares();
    for (std::size_t t = 0; t < means.size(); ++t) {
      const int j = r.exact.times[t];
      f.row(j, means[t], mean_a[t], mean_closed(*r.solution, j), msq[t], msq_a[t],
            msq_closed(*r.solution, j));
    }
  }
  for (int t : o.snapshots) {
    const auto ti = static_cast<std::size_t>(t);
    if (r.analytic) {
      auto f = open("snapshot_t" + std::to_string(t) + ".csv", "n,p_exact,p_approx");
      for (std::size_t i = 0; i < n_sites; ++i)
        f.row(site(i), r.exact.dists[ti][i], r.analytic->dists[ti][i]);
    } else {
      auto f = open("snapshot_t" + std::to_string(t) + ".csv", "n,p_exact");
      for (std::size_t i = 0; i < n_sites; ++i) f.row(site(i), r.exact.dists[ti][i]);
    }
  }
  if (o.final_state && r.final_state) {
    names.push_back("final_state.csv");
    std::ofstream os(dir / "final_state.csv");
    if (!os) throw std::runtime_error("cannot open " + (dir / "final_state.csv").string());
    write_state_csv(os, *r.final_state);
  }
  return names;
}

struct ExperimentReport {
  std::filesystem::path directory;
  std::vector<RunResult> runs;
  json manifest;
};

inline void write_manifest(const std::filesystem::path& dir, const json& manifest) {
  std::ofstream os(dir / "manifest.json");
  if (!os) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << '\n';
}

/// Runs every field value of `cfg` and writes the artifacts under
/// out_root/<name>/ (one phi_* subdirectory per value when phi is a list)
/// together with manifest.json.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_root,
                                       bool keep_results = false) {
  ExperimentReport report;
  report.directory = out_root / cfg.name;
  std::filesystem::create_directories(report.directory);
  json runs = json::array();
  const bool with_analytic = cfg.outputs.needs_analytic() || !cfg.outputs.snapshots.empty();
  for (std::size_t i = 0; i < cfg.phis.size(); ++i) {
    const double phi = cfg.phis[i];
    RunResult r = simulate(cfg, phi, with_analytic);
    const std::string sub = cfg.phis.size() == 1 ? "." : detail::run_directory_name(phi, i);
    const auto artifacts = write_run(cfg, r, report.directory / sub);
    json entry = {{"phi", phi},
                  {"bloch_period", phi == 0.0 ? json(nullptr) : json(bloch_period(phi))},
                  {"n_sites", r.n_sites},
                  {"steps", cfg.steps},
                  {"directory", sub},
                  {"artifacts", artifacts},
                  {"warnings", r.warnings}};
    if (!r.hellinger.empty())
      entry["max_hellinger"] = *std::max_element(r.hellinger.begin(), r.hellinger.end());
    runs.push_back(std::move(entry));
    if (keep_results) report.runs.push_back(std::move(r));
  }
  report.manifest = {{"name", cfg.name}, {"config", cfg.source}, {"runs", std::move(runs)}};
  write_manifest(report.directory, report.manifest);
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { phi, beta, theta };

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "phi") return SweepAxis::phi;
  if (s == "beta") return SweepAxis::beta;
  if (s == "theta") return SweepAxis::theta;
  throw ConfigError("axis", "expected phi, beta or theta, got '" + s + "'");
}

inline const char* to_string(SweepAxis a) {
  return a == SweepAxis::phi ? "phi" : a == SweepAxis::beta ? "beta" : "theta";
}

/// Parses one sweep value; angles for phi and theta, plain numbers for beta.
inline double parse_sweep_value(SweepAxis axis, const std::string& text) {
  try {
    if (axis != SweepAxis::beta) return parse_angle(text);
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("values", "cannot parse '" + text + "'");
  }
}

struct SweepRow {
  double value = 0.0;
  double max_hellinger = std::numeric_limits<double>::quiet_NaN();
  double revival_hellinger = std::numeric_limits<double>::quiet_NaN();
  double sigma_minima_slope = std::numeric_limits<double>::quiet_NaN();
  double bloch_period_detected = std::numeric_limits<double>::quiet_NaN();
};

/// Summary statistics of one run.  revival_hellinger is the distance at
/// j = T_B when the Bloch period is an integer no larger than the run.
inline SweepRow summarize(const RunResult& r, double value) {
  SweepRow row;
  row.value = value;
  if (!r.hellinger.empty()) {
    row.max_hellinger = *std::max_element(r.hellinger.begin(), r.hellinger.end());
    if (r.phi != 0.0) {
      const double period = bloch_period(r.phi);
      const long tb = std::lround(period);
      if (std::abs(period - tb) < 1e-9 && tb < static_cast<long>(r.hellinger.size()))
        row.revival_hellinger = r.hellinger[static_cast<std::size_t>(tb)];
    }
  }
  row.sigma_minima_slope = minima_slope(r.exact.std_devs());
  if (const auto p = period_from_zero_crossings(r.exact.means())) row.bloch_period_detected = *p;
  return row;
}

inline std::filesystem::path sweep_directory(const std::filesystem::path& out_root,
                                             const ExperimentConfig& base, SweepAxis axis) {
  return out_root / base.name / (std::string("sweep_") + to_string(axis));
}

/// Re-runs `base` once per value of `axis` and writes sweep.csv and
/// manifest.json to out_root/<name>/sweep_<axis>/.  The base config must name a single phi when the axis
/// is not phi.
inline std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                                   const std::vector<double>& values,
                                   const std::filesystem::path& out_root) {
  if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
  if (axis != SweepAxis::phi && base.phis.size() != 1)
    throw ConfigError("phi", "a " + std::string(to_string(axis)) + " sweep needs a single phi");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig cfg = base;
    const double v = values[i];
    const std::string field = "values[" + std::to_string(i) + "]";
    switch (axis) {
      case SweepAxis::phi:
        if (!(v >= -std::numbers::pi && v < std::numbers::pi))
          throw ConfigError(field, "phi must lie in [-pi, pi)");
        cfg.phis = {v};
        break;
      case SweepAxis::beta:
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "beta must be positive");
        cfg.beta = v;
        break;
      case SweepAxis::theta:
        if (!std::isfinite(v)) throw ConfigError(field, "theta must be finite");
        cfg.theta = v;
        break;
    }
    rows.push_back(summarize(simulate(cfg, cfg.phis.front(), true), v));
  }

  const auto dir = sweep_directory(out_root, base, axis);
  std::filesystem::create_directories(dir);
  {
    detail::CsvFile f(dir / "sweep.csv",
                      "value,max_hellinger,revival_hellinger,sigma_minima_slope,bloch_period_detected");
    for (const auto& r : rows)
      f.row(r.value, r.max_hellinger, r.revival_hellinger, r.sigma_minima_slope,
            r.bloch_period_detected);
  }
  json rows_json = json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"value", r.value},
                         {"max_hellinger", detail::number_or_null(r.max_hellinger)},
                         {"revival_hellinger", detail::number_or_null(r.revival_hellinger)},
                         {"sigma_minima_slope", detail::number_or_null(r.sigma_minima_slope)},
                         {"bloch_period_detected", detail::number_or_null(r.bloch_period_detected)}});
  write_manifest(dir, {{"name", base.name},
                       {"config", base.source},
                       {"sweep", {{"axis", to_string(axis)}, {"values", values}}},
                       {"artifacts", {"sweep.csv"}},
                       {"rows", std::move(rows_json)}});
  return rows;
}

/// Parses a document holding one config object or a list of them.
inline std::vector<ExperimentConfig> parse_config_document(const json& doc) {
  std::vector<ExperimentConfig> out;
  if (doc.is_array()) {
    if (doc.empty()) throw ConfigError("<root>", "empty experiment list");
    for (std::size_t i = 0; i < doc.size(); ++i) {
      try {
        out.push_back(parse_config(doc[i]));
      } catch (const ConfigError& e) {
        throw ConfigError("[" + std::to_string(i) + "]." + e.field(),
                          std::string(e.what()).substr(e.field().size() + 2));
      }
    }
  } else {
    out.push_back(parse_config(doc));
  }
  return out;
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace blochwalk
