#include "netmf/graphon.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "netmf/error.hpp"
#include "netmf/random.hpp"

namespace netmf {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

// Integral over [lo, hi] of the triangle max(0, d - |t - c|).
double triangle_mass(double lo, double hi, double c, double d) {
  auto G = [d](double s) {
    s = std::clamp(s, -d, d);
    return s <= 0.0 ? 0.5 * (d + s) * (d + s) : d * d - 0.5 * (d - s) * (d - s);
  };
  if (hi <= lo) return 0.0;
  return G(hi - c) - G(lo - c);
}

// Measure of {(x, y) in [a, a+d) x [b, b+d) : circular distance <= h}.
double sw_cell_measure(double a, double b, double d, double h) {
  const double c = a - b;
  double m = 0.0;
  for (int k = -1; k <= 1; ++k) m += triangle_mass(k - h, k + h, c, d);
  return m;
}

double pl_cell_average(double a, double b, double gamma) {
  const double e = 1.0 - gamma;
  return (std::pow(b, e) - std::pow(a, e)) / (e * (b - a));
}

}  // namespace

Graphon::Graphon(Family family) : family_(family) {
  std::visit(overloaded{
                 [](const ErdosRenyi& f) { check_unit(f.p, "graph.p"); },
                 [](const SmallWorld& f) {
                   check_unit(f.p, "graph.p");
                   if (!(f.h > 0.0 && f.h <= 0.5)) throw ConfigError("graph.h must lie in (0, 1/2]");
                 },
                 [](const PowerLaw& f) {
                   if (!(f.gamma > 0.0 && f.gamma < 0.5))
                     throw ConfigError("graph.gamma must lie in (0, 1/2)");
                   if (!(f.alpha > f.gamma && f.alpha < 1.0))
                     throw ConfigError("graph.alpha must lie in (gamma, 1)");
                 },
             },
             family_);
}

double Graphon::operator()(double x, double y) const {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw DomainError("graphon evaluated outside [0,1]^2");
  return std::visit(overloaded{
                        [](const ErdosRenyi& f) { return f.p; },
                        [&](const SmallWorld& f) {
                          const double d = std::abs(x - y);
                          const double circ = std::min(d, 1.0 - d);
                          return circ <= f.h ? 1.0 - f.p + 2.0 * f.p * f.h : 2.0 * f.p * f.h;
                        },
                        [&](const PowerLaw& f) {
                          if (x == 0.0 || y == 0.0)
                            throw DomainError("power-law graphon is singular on the axes");
                          return std::pow(x * y, -f.gamma);
                        },
                    },
                    family_);
}

double Graphon::scaling(std::size_t n) const {
  if (const auto* pl = std::get_if<PowerLaw>(&family_))
    return std::pow(static_cast<double>(n), -pl->alpha);
  return 1.0;
}

std::string Graphon::name() const {
  return std::visit(overloaded{[](const ErdosRenyi&) { return std::string("ER"); },
                               [](const SmallWorld&) { return std::string("SW"); },
                               [](const PowerLaw&) { return std::string("PL"); }},
                    family_);
}

std::string Graphon::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ErdosRenyi& f) { os << "ER(p=" << f.p << ")"; },
                 [&](const SmallWorld& f) { os << "SW(p=" << f.p << ", h=" << f.h << ")"; },
                 [&](const PowerLaw& f) { os << "PL(gamma=" << f.gamma << ", alpha=" << f.alpha << ")"; },
             },
             family_);
  return os.str();
}

Matrix discretize(const Graphon& g, std::size_t n) {
  if (n < 2) throw ConfigError("discretize needs n >= 2");
  Matrix w(n, n);
  const double d = 1.0 / static_cast<double>(n);
  std::visit(overloaded{
                 [&](const ErdosRenyi& f) {
                   for (double& v : w.data()) v = f.p;
                 },
                 [&](const SmallWorld& f) {
                   // depends on i - j only; compute one row per offset
                   std::vector<double> by_offset(n);
                   for (std::size_t k = 0; k < n; ++k) {
                     const double frac = sw_cell_measure(static_cast<double>(k) * d, 0.0, d, f.h) / (d * d);
                     by_offset[k] = 2.0 * f.p * f.h + (1.0 - f.p) * frac;
                   }
                   for (std::size_t i = 0; i < n; ++i)
                     for (std::size_t j = 0; j < n; ++j) w(i, j) = by_offset[(i + n - j) % n];
                 },
                 [&](const PowerLaw& f) {
                   std::vector<double> avg(n);
                   for (std::size_t i = 0; i < n; ++i)
                     avg[i] = pl_cell_average(static_cast<double>(i) * d, static_cast<double>(i + 1) * d, f.gamma);
                   for (std::size_t i = 0; i < n; ++i)
                     for (std::size_t j = 0; j < n; ++j) w(i, j) = avg[i] * avg[j];
                 },
             },
             g.family());
  return w;
}

double WeightedGraph::edge_density() const {
  if (n < 2) return 0.0;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && weights(i, j) != 0.0) ++nnz;
  return static_cast<double>(nnz) / static_cast<double>(n * (n - 1));
}

double WeightedGraph::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : weights.row(i)) s += v;
    best = std::max(best, s);
  }
  return best;
}

CsrAdjacency WeightedGraph::to_csr() const {
  CsrAdjacency csr;
  csr.offsets.reserve(n + 1);
  csr.offsets.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = weights.row(i);
    for (std::size_t j = 0; j < n; ++j)
      if (row[j] != 0.0) {
        csr.columns.push_back(static_cast<std::uint32_t>(j));
        csr.values.push_back(row[j]);
      }
    csr.offsets.push_back(csr.columns.size());
  }
  return csr;
}

void WeightedGraph::write_edge_list(std::ostream& os) const {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (weights(i, j) != 0.0) os << i << ' ' << j << ' ' << weights(i, j) << '\n';
  os.precision(old);
}

WeightedGraph sample_adjacency(const Graphon& g, std::size_t n, std::uint64_t seed, SamplingMode mode) {
  if (n < 2) throw ConfigError("graph.n must be at least 2");
  WeightedGraph out;
  out.n = n;
  out.weights = discretize(g, n);

  if (mode == SamplingMode::deterministic_weights) {
    if (g.is_power_law())
      throw ConfigError("deterministic_weights mode is not defined for the power-law family");
    for (std::size_t i = 0; i < n; ++i) out.weights(i, i) = 0.0;
    out.alpha_n = 1.0;
    out.seed = 0;
    return out;
  }

  out.alpha_n = g.scaling(n);
  out.seed = seed;
  std::size_t over_one = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.weights(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = out.weights(i, j);
      if (w > 1.0) ++over_one;
      const double prob = std::min(1.0, out.alpha_n * w);
      const double edge = rng::uniform(seed, i, j) < prob ? 1.0 : 0.0;
      out.weights(i, j) = edge;
      out.weights(j, i) = edge;
    }
  }
  if (over_one > 0)
    spdlog::debug("{}: {} discretized weights exceed 1 before sparse scaling", g.describe(), over_one);
  return out;
}

WeightedGraph ring_rewiring_graph(std::size_t n, std::size_t r, double p, std::uint64_t seed) {
  if (n < 3) throw ConfigError("ring graph needs n >= 3");
  if (r % 2 != 0 || r == 0 || r >= n) throw ConfigError("ring degree r must be even and in [2, n)");
  check_unit(p, "rewiring probability");
  WeightedGraph out;
  out.n = n;
  out.weights = Matrix(n, n);
  out.seed = seed;
  auto& w = out.weights;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t d = 1; d <= r / 2; ++d) {
      const std::size_t j = (k + d) % n;
      w(k, j) = w(j, k) = 1.0;
    }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t d = 1; d <= r / 2; ++d)
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = (k + d) % n;
      if (w(k, j) == 0.0 || coin(gen) >= p) continue;
      std::size_t degree = 0;
      for (double v : w.row(k)) degree += v != 0.0;
      if (degree >= n - 1) continue;
      std::size_t m = pick(gen);
      while (m == k || w(k, m) != 0.0) m = pick(gen);
      w(k, j) = w(j, k) = 0.0;
      w(k, m) = w(m, k) = 1.0;
    }
  return out;
}

}  // namespace netmf
