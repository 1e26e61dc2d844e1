#include "netmf/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "netmf/error.hpp"

namespace netmf {

std::vector<std::complex<double>> order_parameters(std::span<const double> positions, int K) {
  if (K < 1) throw ConfigError("order_parameters needs K >= 1");
  if (positions.empty()) throw ConfigError("order_parameters needs at least one position");
  std::vector<std::complex<double>> r(static_cast<std::size_t>(K));
  for (double x : positions)
    for (int k = 1; k <= K; ++k) r[k - 1] += std::polar(1.0, k * x);
  const double inv = 1.0 / static_cast<double>(positions.size());
  for (auto& v : r) v *= inv;
  return r;
}

double energy_order_parameter(std::span<const std::complex<double>> r, const MultichromaticPotential& pot) {
  if (r.size() < static_cast<std::size_t>(pot.harmonics()))
    throw ConfigError("order parameters do not cover every potential mode");
  double u = 0.0;
  for (int k = 1; k <= pot.harmonics(); ++k) u += std::abs(pot.amplitude(k)) * std::norm(r[k - 1]);
  return -0.5 * u;
}

double graph_interaction_energy(std::span<const double> positions, const WeightedGraph& graph,
                                const MultichromaticPotential& pot) {
  const std::size_t n = graph.n;
  if (positions.size() != n) throw ConfigError("positions do not match the graph size");
  std::vector<double> c(n), s(n);
  double total = 0.0;
  for (int k = 1; k <= pot.harmonics(); ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = std::cos(k * positions[j]);
      s[j] = std::sin(k * positions[j]);
    }
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = graph.weights.row(i);
      double wc = 0.0, ws = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        wc += row[j] * c[j];
        ws += row[j] * s[j];
      }
      quad += c[i] * wc + s[i] * ws;
    }
    total -= pot.amplitude(k) * quad;
  }
  const double nn = static_cast<double>(n);
  return total / (nn * nn * graph.alpha_n);
}

void EnergySeries::push(double t, double u, double e, std::vector<double> r) {
  times.push_back(t);
  U.push_back(u);
  E_graph.push_back(e);
  r_magnitudes.push_back(std::move(r));
}

EnergyAggregate aggregate_energy(std::span<const double> times, std::span<const double> values, double t_tr) {
  if (times.size() != values.size()) throw ConfigError("time and value series differ in length");
  const auto it = std::lower_bound(times.begin(), times.end(), t_tr);
  if (times.empty() || it == times.end() || !(t_tr < times.back()))
    throw DomainError("aggregation window after t_tr is empty");
  std::size_t k = static_cast<std::size_t>(it - times.begin());

  std::vector<double> t, v;
  if (k > 0 && times[k] > t_tr) {
    const double w = (t_tr - times[k - 1]) / (times[k] - times[k - 1]);
    t.push_back(t_tr);
    v.push_back(values[k - 1] + w * (values[k] - values[k - 1]));
  }
  for (; k < times.size(); ++k) {
    t.push_back(times[k]);
    v.push_back(values[k]);
  }
  if (t.size() < 2) throw DomainError("aggregation window holds fewer than two samples");

  EnergyAggregate out{0.0, v.front(), v.front()};
  double integral = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    integral += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    out.min = std::min(out.min, v[i]);
    out.max = std::max(out.max, v[i]);
  }
  out.mean = std::clamp(integral / (t.back() - t.front()), out.min, out.max);
  return out;
}

std::vector<double> empirical_histogram(std::span<const double> positions, std::size_t bins) {
  if (bins < 2) throw ConfigError("histogram needs at least 2 bins");
  if (positions.empty()) throw ConfigError("histogram needs at least one position");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> density(bins, 0.0);
  for (double x : positions) {
    const double u = wrap_angle(x);
    auto b = static_cast<std::size_t>(u / two_pi * static_cast<double>(bins));
    density[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = static_cast<double>(positions.size()) * two_pi / static_cast<double>(bins);
  for (double& d : density) d /= norm;
  return density;
}

int count_peaks(std::span<const double> density) {
  const double level = 2.0 / (2.0 * std::numbers::pi);
  const std::size_t n = density.size();
  int peaks = 0;
  bool all = true;
  for (std::size_t i = 0; i < n; ++i) {
    const bool here = density[i] > level;
    const bool prev = density[(i + n - 1) % n] > level;
    all = all && here;
    if (here && !prev) ++peaks;
  }
  return (all && n > 0) ? 1 : peaks;
}

std::vector<Plateau> find_plateaus(const EnergySeries& series, std::size_t window, double drop_threshold) {
  if (window < 2) throw ConfigError("transition window must be at least 2");
  const auto& u = series.U;
  const std::size_t n = u.size();
  std::vector<Plateau> raw;
  if (n < window) return raw;

  // prefix sums for O(1) window moments
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s1[i + 1] = s1[i] + u[i];
    s2[i + 1] = s2[i] + u[i] * u[i];
  }
  const double limit = drop_threshold / 4.0;
  std::vector<bool> calm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = std::min(i >= window / 2 ? i - window / 2 : 0, n - window);
    const double w = static_cast<double>(window);
    const double mean = (s1[start + window] - s1[start]) / w;
    const double var = std::max(0.0, (s2[start + window] - s2[start]) / w - mean * mean);
    calm[i] = std::sqrt(var * w / (w - 1.0)) < limit;
  }

  for (std::size_t i = 0; i < n;) {
    if (!calm[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && calm[j + 1]) ++j;
    Plateau p;
    p.first = i;
    p.last = j;
    p.samples = j - i + 1;
    p.t_start = series.times[i];
    p.t_end = series.times[j];
    p.level = (s1[j + 1] - s1[i]) / static_cast<double>(j - i + 1);
    raw.push_back(p);
    i = j + 1;
  }

  std::vector<Plateau> merged;
  for (const auto& p : raw) {
    if (!merged.empty() && std::abs(merged.back().level - p.level) < drop_threshold) {
      auto& q = merged.back();
      const double nq = static_cast<double>(q.samples);
      const double np = static_cast<double>(p.samples);
      // level over the calm samples of both runs
      q.level = (q.level * nq + p.level * np) / (nq + np);
      q.samples += p.samples;
      q.last = p.last;
      q.t_end = p.t_end;
      continue;
    }
    merged.push_back(p);
  }
  return merged;
}

std::vector<Transition> detect_transitions(const EnergySeries& series, std::size_t window, double drop_threshold) {
  const auto plateaus = find_plateaus(series, window, drop_threshold);
  std::vector<Transition> out;
  for (std::size_t k = 1; k < plateaus.size(); ++k) {
    const auto& a = plateaus[k - 1];
    const auto& b = plateaus[k];
    if (b.level < a.level - drop_threshold) out.push_back({a.t_end, b.t_start, a.level, b.level});
  }
  return out;
}

}  // namespace netmf
