#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "netmf/matrix.hpp"

namespace netmf {

struct ErdosRenyi {
  double p = 0.5;
};

// W = 1 - p + 2ph within circular distance h, 2ph otherwise.
struct SmallWorld {
  double p = 0.0;
  double h = 0.01;
};

// W = (xy)^-gamma, sampled with sparsity alpha_N = N^-alpha.
struct PowerLaw {
  double gamma = 0.3;
  double alpha = 0.4;
};

class Graphon {
 public:
  using Family = std::variant<ErdosRenyi, SmallWorld, PowerLaw>;

  // Validates parameter ranges; throws ConfigError.
  explicit Graphon(Family family);
  static Graphon erdos_renyi(double p) { return Graphon(ErdosRenyi{p}); }
  static Graphon small_world(double p, double h) { return Graphon(SmallWorld{p, h}); }
  static Graphon power_law(double gamma, double alpha) { return Graphon(PowerLaw{gamma, alpha}); }

  const Family& family() const noexcept { return family_; }
  bool is_power_law() const noexcept { return std::holds_alternative<PowerLaw>(family_); }
  // Leading eigenfunction is constant (ER and SW).
  bool constant_degree() const noexcept { return !is_power_law(); }

  // W(x, y); DomainError for PL on the axes or for points outside [0,1].
  double operator()(double x, double y) const;

  // alpha_N for an n-vertex sample (1 for dense families).
  double scaling(std::size_t n) const;

  std::string name() const;
  std::string describe() const;

 private:
  Family family_;
};

// W_N[i][j] = N^2 * integral of W over cell i x cell j.
Matrix discretize(const Graphon& g, std::size_t n);

struct CsrAdjacency {
  std::vector<std::size_t> offsets;  // n + 1 entries
  std::vector<std::uint32_t> columns;
  std::vector<double> values;
};

struct WeightedGraph {
  std::size_t n = 0;
  Matrix weights;  // symmetric, zero diagonal
  double alpha_n = 1.0;
  std::uint64_t seed = 0;

  double edge_density() const;  // fraction of nonzero off-diagonal entries
  double max_row_sum() const;
  CsrAdjacency to_csr() const;
  void write_edge_list(std::ostream& os) const;  // "i j weight", i < j
};

enum class SamplingMode { deterministic_weights, bernoulli };

// Bernoulli edges with probability min(1, alpha_N W_N[i][j]), keyed by (seed, i, j).
WeightedGraph sample_adjacency(const Graphon& g, std::size_t n, std::uint64_t seed,
                               SamplingMode mode = SamplingMode::bernoulli);

// Watts-Strogatz style ring of r nearest neighbours with rewiring probability p.
WeightedGraph ring_rewiring_graph(std::size_t n, std::size_t r, double p, std::uint64_t seed);

}  // namespace netmf
