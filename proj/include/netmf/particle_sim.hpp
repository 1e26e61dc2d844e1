#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "netmf/graphon.hpp"
#include "netmf/potential.hpp"

namespace netmf {

struct ParticleState {
  std::vector<double> positions;  // angles in [0, 2 pi)
  double time = 0.0;
  std::uint64_t step = 0;         // noise counter
  std::uint64_t noise_seed = 0;   // noise stream key
};

struct UniformInit {};
struct PointMassInit {
  double u0 = 0.0;
};
struct CustomInit {
  std::vector<double> positions;
};
using InitDistribution = std::variant<UniformInit, PointMassInit, CustomInit>;

ParticleState init_state(std::size_t n, std::uint64_t seed, const InitDistribution& dist = UniformInit{});

struct SimParams {
  double theta = 0.0;
  double beta = 200.0;
  double dt = 0.01;
  double horizon = 1.0;
  MultichromaticPotential potential{{1.0}};
  std::shared_ptr<const WeightedGraph> graph;
  std::size_t record_stride = 100;

  double sigma() const;  // sqrt(2 / beta); beta = inf gives 0
  std::uint64_t total_steps() const;
  void validate() const;  // throws ConfigError
};

// Mode-decomposed drift: 2K weighted sums per step instead of N^2 pair terms.
class ForceKernel {
 public:
  ForceKernel(std::shared_ptr<const WeightedGraph> graph, int harmonics);

  bool sparse() const noexcept { return sparse_; }
  // out_i = -(theta / (N alpha_N)) sum_j W_ij D'(x_i - x_j)
  void drift(std::span<const double> x, const MultichromaticPotential& pot, double theta, std::span<double> out);

 private:
  std::shared_ptr<const WeightedGraph> graph_;
  int harmonics_;
  bool sparse_;
  CsrAdjacency csr_;
  std::vector<std::vector<double>> basis_;  // cos kx, sin kx interleaved by mode
  std::vector<double> sums_;               // n x 2K
};

class Simulator {
 public:
  explicit Simulator(SimParams params);

  const SimParams& params() const noexcept { return params_; }
  // One Euler-Maruyama step in place.
  void advance(ParticleState& state);

  using Observer = std::function<void(const ParticleState&)>;
  // Calls the observer at t = 0, every record_stride steps and at the horizon.
  void run(ParticleState& state, const Observer& observer);

 private:
  SimParams params_;
  ForceKernel kernel_;
  std::vector<double> drift_;
  double noise_scale_;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> positions;
};

// Pure single step: X <- wrap(X + drift dt + sigma sqrt(dt) xi).
ParticleState step(const ParticleState& state, const SimParams& params);

std::vector<Snapshot> run(const SimParams& params, const ParticleState& state0, std::uint64_t noise_seed);

}  // namespace netmf
