#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "netmf/error.hpp"
#include "netmf/observables.hpp"
#include "netmf/particle_sim.hpp"
#include "oracles.hpp"

using namespace netmf;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

std::shared_ptr<const WeightedGraph> complete(std::size_t n) {
  return std::make_shared<const WeightedGraph>(sample_adjacency(Graphon::erdos_renyi(1.0), n, 1));
}

std::vector<double> drift_of(const SimParams& p, const std::vector<double>& x) {
  ForceKernel k(p.graph, p.potential.harmonics());
  std::vector<double> out(x.size());
  k.drift(x, p.potential, p.theta, out);
  return out;
}

}  // namespace

TEST_CASE("initial states") {
  const auto pm = init_state(5, 1, PointMassInit{pi});
  for (double x : pm.positions) CHECK(x == pi);
  CHECK(pm.time == 0.0);

  const auto custom = init_state(2, 1, CustomInit{{0.0, pi}});
  CHECK(custom.positions == std::vector<double>{0.0, pi});
  CHECK_THROWS_AS(init_state(3, 1, CustomInit{{0.0}}), ConfigError);

  const std::size_t n = 10000;
  const auto u = init_state(n, 99);
  std::complex<double> m = 0.0;
  for (double x : u.positions) {
    CHECK(x >= 0.0);
    CHECK(x < 2 * pi);
    m += std::polar(1.0, x);
  }
  CHECK(std::abs(m) / n < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(init_state(50, 7).positions == init_state(50, 7).positions);
}

TEST_CASE("hand-evaluated two-particle drift") {
  SimParams p;
  p.theta = 0.3;
  p.graph = complete(2);
  p.potential = MultichromaticPotential({1.0});
  auto d = drift_of(p, {0.0, pi});
  CHECK(std::abs(d[0]) < 1e-15);
  d = drift_of(p, {0.0, pi / 2});
  CHECK(d[0] == Approx(0.3 / 2).epsilon(1e-14));
  CHECK(d[1] == Approx(-0.3 / 2).epsilon(1e-14));
}

TEST_CASE("synchronized state has zero drift") {
  SimParams p;
  p.theta = 1.0;
  p.beta = std::numeric_limits<double>::infinity();
  p.graph = complete(20);
  p.potential = MultichromaticPotential({1.0, 2.0, 3.0});
  p.horizon = 1.0;
  ParticleState s = init_state(20, 1, PointMassInit{1.234});
  const auto before = s.positions;
  const auto after = step(s, p);
  CHECK(after.positions == before);
}

TEST_CASE("mode-decomposed drift equals the pairwise sum") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 2 * pi);
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  for (const auto& g : {Graphon::erdos_renyi(0.5), Graphon::small_world(0.3, 0.05), Graphon::power_law(0.3, 0.4)}) {
    SimParams p;
    p.theta = 0.7;
    p.potential = MultichromaticPotential(a);
    p.graph = std::make_shared<const WeightedGraph>(sample_adjacency(g, 64, 3));
    std::vector<double> x(64);
    for (int rep = 0; rep < 5; ++rep) {
      for (double& v : x) v = u(gen);
      const auto fast = drift_of(p, x);
      const auto ref = oracle::pairwise_drift(x, p.graph->weights, p.graph->alpha_n, a, p.theta);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fast[i] - ref[i]) < 1e-10);
    }
  }
}

TEST_CASE("sparse and dense paths agree") {
  const auto g = std::make_shared<const WeightedGraph>(sample_adjacency(Graphon::small_world(0.1, 0.02), 300, 4));
  ForceKernel k(g, 2);
  CHECK(k.sparse());
  std::vector<double> x(300);
  for (std::size_t i = 0; i < 300; ++i) x[i] = std::fmod(0.37 * i * i, 2 * pi);
  std::vector<double> out(300);
  k.drift(x, MultichromaticPotential({1.0, 2.0}), 1.0, out);
  const auto ref = oracle::pairwise_drift(x, g->weights, 1.0, {1.0, 2.0}, 1.0);
  for (std::size_t i = 0; i < 300; ++i) CHECK(std::abs(out[i] - ref[i]) < 1e-12);
}

TEST_CASE("pure diffusion has variance 2 dt / beta per step") {
  SimParams p;
  p.theta = 0.0;
  p.beta = 200.0;
  p.dt = 0.01;
  p.horizon = 100.0;  // 1e4 steps
  p.graph = complete(10);
  Simulator sim(p);
  ParticleState s = init_state(10, 3);
  s.noise_seed = 17;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto prev = s.positions;
    sim.advance(s);
    for (std::size_t i = 0; i < 10; ++i) {
      const double d = std::remainder(s.positions[i] - prev[i], 2 * pi);
      sum += d;
      sum2 += d * d;
      ++count;
    }
  }
  const double var = sum2 / count - (sum / count) * (sum / count);
  CHECK(var == Approx(2.0 / 200.0 * 0.01).epsilon(0.05));
}

TEST_CASE("noiseless pair contracts monotonically") {
  SimParams p;
  p.theta = 1.0;
  p.beta = std::numeric_limits<double>::infinity();
  p.dt = 0.01;
  p.horizon = 50.0;
  p.graph = complete(2);
  Simulator sim(p);
  ParticleState s = init_state(2, 0, CustomInit{{1.0, 1.2}});
  double prev = 0.2;
  for (int k = 0; k < 5000; ++k) {
    sim.advance(s);
    const double sep = std::abs(std::remainder(s.positions[1] - s.positions[0], 2 * pi));
    CHECK(sep <= prev);
    prev = sep;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("trajectories are reproducible and snapshots regular") {
  SimParams p;
  p.theta = 0.05;
  p.horizon = 2.0;
  p.record_stride = 50;
  p.potential = MultichromaticPotential({1.0, 2.0});
  p.graph = std::make_shared<const WeightedGraph>(sample_adjacency(Graphon::erdos_renyi(0.5), 40, 2));
  const auto s0 = init_state(40, 8);
  const auto a = run(p, s0, 123);
  const auto b = run(p, s0, 123);
  const auto c = run(p, s0, 124);
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].t == Approx(0.5 * k));
    CHECK(a[k].positions == b[k].positions);
  }
  CHECK_FALSE(a.back().positions == c.back().positions);
  // stepping one at a time reproduces the stored trajectory
  ParticleState s = s0;
  s.noise_seed = 123;
  for (int k = 0; k < 200; ++k) s = step(s, p);
  CHECK(s.positions == a.back().positions);
}

TEST_CASE("parameter validation") {
  SimParams p;
  p.graph = complete(3);
  p.dt = -0.01;
  CHECK_THROWS_AS(Simulator(p), ConfigError);
  p.dt = 0.01;
  p.graph = nullptr;
  CHECK_THROWS_AS(Simulator(p), ConfigError);
  CHECK(SimParams{}.sigma() == Approx(0.1));
}

TEST_CASE("bichromatic ER run orders above threshold") {
  // theta = 2 theta_c = 0.02, N = 256, T = 200
  SimParams p;
  p.theta = 0.02;
  p.horizon = 200.0;
  p.record_stride = 100;
  p.potential = MultichromaticPotential({1.0, 2.0});
  p.graph = std::make_shared<const WeightedGraph>(sample_adjacency(Graphon::erdos_renyi(0.5), 256, 21));
  const auto snaps = run(p, init_state(256, 22), 23);
  std::vector<double> t, u;
  for (const auto& s : snaps) {
    t.push_back(s.t);
    u.push_back(energy_order_parameter(order_parameters(s.positions, 2), p.potential));
  }
  const auto agg = aggregate_energy(t, u, 160.0);
  CHECK(-agg.mean > 0.2);
}
