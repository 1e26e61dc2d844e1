#include "netmf/particle_sim.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "netmf/error.hpp"
#include "netmf/random.hpp"

namespace netmf {
namespace {

constexpr double kSparseDensity = 0.10;
constexpr std::size_t kLanes = 8;

// sums[i * C + c] = sum_j W_ij basis[c][j], C known at compile time.
// Fixed lane partial sums keep the reduction order deterministic while
// letting the compiler vectorize across j.
template <std::size_t C>
void dense_sums(const Matrix& w, const std::vector<std::vector<double>>& basis, double* sums) {
  const std::size_t n = w.rows();
  const double* b[C];
  for (std::size_t c = 0; c < C; ++c) b[c] = basis[c].data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = w.row(i).data();
    double lane[C][kLanes] = {};
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes)
      for (std::size_t c = 0; c < C; ++c)
        for (std::size_t l = 0; l < kLanes; ++l) lane[c][l] += row[j + l] * b[c][j + l];
    for (std::size_t c = 0; c < C; ++c) {
      double s = 0.0;
      for (std::size_t l = 0; l < kLanes; ++l) s += lane[c][l];
      for (std::size_t t = j; t < n; ++t) s += row[t] * b[c][t];
      sums[i * C + c] = s;
    }
  }
}

void dense_sums_dynamic(const Matrix& w, const std::vector<std::vector<double>>& basis, double* sums) {
  const std::size_t n = w.rows();
  const std::size_t cc = basis.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = w.row(i);
    for (std::size_t c = 0; c < cc; ++c) {
      double lane[kLanes] = {};
      std::size_t j = 0;
      for (; j + kLanes <= n; j += kLanes)
        for (std::size_t l = 0; l < kLanes; ++l) lane[l] += row[j + l] * basis[c][j + l];
      double s = 0.0;
      for (std::size_t l = 0; l < kLanes; ++l) s += lane[l];
      for (; j < n; ++j) s += row[j] * basis[c][j];
      sums[i * cc + c] = s;
    }
  }
}

}  // namespace

ParticleState init_state(std::size_t n, std::uint64_t seed, const InitDistribution& dist) {
  if (n < 1) throw ConfigError("particle count must be positive");
  ParticleState s;
  s.positions.resize(n);
  if (std::holds_alternative<UniformInit>(dist)) {
    for (std::size_t i = 0; i < n; ++i)
      s.positions[i] = wrap_angle(2.0 * std::numbers::pi * rng::uniform(seed, 0x1a17ULL, i));
  } else if (const auto* pm = std::get_if<PointMassInit>(&dist)) {
    std::fill(s.positions.begin(), s.positions.end(), wrap_angle(pm->u0));
  } else {
    const auto& custom = std::get<CustomInit>(dist).positions;
    if (custom.size() != n) throw ConfigError("custom initial positions do not match the particle count");
    for (std::size_t i = 0; i < n; ++i) s.positions[i] = wrap_angle(custom[i]);
  }
  return s;
}

double SimParams::sigma() const { return std::isinf(beta) ? 0.0 : std::sqrt(2.0 / beta); }

std::uint64_t SimParams::total_steps() const {
  return static_cast<std::uint64_t>(std::llround(horizon / dt));
}

void SimParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("sim.dt must be positive");
  if (!(horizon >= dt)) throw ConfigError("sim.T must be at least dt");
  if (!(beta > 0.0)) throw ConfigError("sim.beta must be positive");
  if (!std::isfinite(theta)) throw ConfigError("sim.theta must be finite");
  if (record_stride < 1) throw ConfigError("sim.record_stride must be positive");
  if (!graph) throw ConfigError("simulation needs a graph");
}

ForceKernel::ForceKernel(std::shared_ptr<const WeightedGraph> graph, int harmonics)
    : graph_(std::move(graph)), harmonics_(harmonics) {
  if (!graph_) throw ConfigError("force kernel needs a graph");
  sparse_ = graph_->edge_density() < kSparseDensity;
  if (sparse_) csr_ = graph_->to_csr();
  basis_.assign(2 * static_cast<std::size_t>(harmonics_), std::vector<double>(graph_->n));
  sums_.assign(graph_->n * basis_.size(), 0.0);
}

void ForceKernel::drift(std::span<const double> x, const MultichromaticPotential& pot, double theta,
                        std::span<double> out) {
  const std::size_t n = graph_->n;
  if (x.size() != n || out.size() != n) throw ConfigError("state size does not match the graph");
  if (pot.harmonics() > harmonics_) throw ConfigError("force kernel built for fewer harmonics");
  const std::size_t K = static_cast<std::size_t>(harmonics_);
  const std::size_t C = 2 * K;

  for (std::size_t j = 0; j < n; ++j) {
    const double c1 = std::cos(x[j]), s1 = std::sin(x[j]);
    double ck = c1, sk = s1;
    basis_[0][j] = c1;
    basis_[1][j] = s1;
    for (std::size_t k = 1; k < K; ++k) {
      const double cn = ck * c1 - sk * s1;
      const double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      basis_[2 * k][j] = ck;
      basis_[2 * k + 1][j] = sk;
    }
  }

  double* sums = sums_.data();
  if (sparse_) {
    for (std::size_t i = 0; i < n; ++i) {
      double* acc = sums + i * C;
      std::fill(acc, acc + C, 0.0);
      for (std::size_t e = csr_.offsets[i]; e < csr_.offsets[i + 1]; ++e) {
        const std::size_t j = csr_.columns[e];
        const double v = csr_.values[e];
        for (std::size_t c = 0; c < C; ++c) acc[c] += v * basis_[c][j];
      }
    }
  } else {
    switch (C) {
      case 2: dense_sums<2>(graph_->weights, basis_, sums); break;
      case 4: dense_sums<4>(graph_->weights, basis_, sums); break;
      case 6: dense_sums<6>(graph_->weights, basis_, sums); break;
      case 8: dense_sums<8>(graph_->weights, basis_, sums); break;
      default: dense_sums_dynamic(graph_->weights, basis_, sums);
    }
  }

  const double pref = -theta / (static_cast<double>(n) * graph_->alpha_n);
  const auto a = pot.amplitudes();
  for (std::size_t i = 0; i < n; ++i) {
    const double* acc = sums + i * C;
    double f = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double kk = static_cast<double>(k + 1);
      f += a[k] * kk * (basis_[2 * k + 1][i] * acc[2 * k] - basis_[2 * k][i] * acc[2 * k + 1]);
    }
    out[i] = pref * f;
  }
}

Simulator::Simulator(SimParams params)
    : params_(std::move(params)),
      kernel_((params_.validate(), params_.graph), params_.potential.harmonics()),
      drift_(params_.graph->n),
      noise_scale_(params_.sigma() * std::sqrt(params_.dt)) {
  double k2 = 0.0;
  for (int k = 1; k <= params_.potential.harmonics(); ++k)
    k2 += std::abs(params_.potential.amplitude(k)) * k * k;
  const auto& g = *params_.graph;
  const double guard = std::abs(params_.theta) * g.max_row_sum() / (static_cast<double>(g.n) * g.alpha_n) * k2 *
                       params_.dt;
  if (guard > 0.5)
    spdlog::warn("explicit step may be unstable: theta*maxrow/(N alpha)*sum a_k k^2*dt = {:.3g} > 0.5", guard);
}

void Simulator::advance(ParticleState& state) {
  auto& x = state.positions;
  kernel_.drift(x, params_.potential, params_.theta, drift_);
  const double dt = params_.dt;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = noise_scale_ == 0.0 ? 0.0 : rng::normal(state.noise_seed, state.step, i);
    x[i] = wrap_angle(x[i] + drift_[i] * dt + noise_scale_ * xi);
  }
  ++state.step;
  state.time = static_cast<double>(state.step) * dt;
}

void Simulator::run(ParticleState& state, const Observer& observer) {
  const std::uint64_t steps = params_.total_steps();
  if (observer) observer(state);
  for (std::uint64_t s = 1; s <= steps; ++s) {
    advance(state);
    if (observer && (s % params_.record_stride == 0 || s == steps)) observer(state);
  }
}

ParticleState step(const ParticleState& state, const SimParams& params) {
  Simulator sim(params);
  ParticleState next = state;
  sim.advance(next);
  return next;
}

std::vector<Snapshot> run(const SimParams& params, const ParticleState& state0, std::uint64_t noise_seed) {
  Simulator sim(params);
  ParticleState s = state0;
  s.noise_seed = noise_seed;
  std::vector<Snapshot> out;
  sim.run(s, [&](const ParticleState& st) { out.push_back({st.time, st.positions}); });
  return out;
}

}  // namespace netmf
