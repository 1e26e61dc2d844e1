#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "netmf/graphon.hpp"
#include "netmf/potential.hpp"

namespace netmf {

// r_k = (1/N) sum_j exp(i k x_j), k = 1..K.
std::vector<std::complex<double>> order_parameters(std::span<const double> positions, int K);

// U = -1/2 sum_k |a_k| |r_k|^2.
double energy_order_parameter(std::span<const std::complex<double>> r, const MultichromaticPotential& pot);

// (1/(N^2 alpha_N)) sum_ij W_ij D(x_i - x_j).
double graph_interaction_energy(std::span<const double> positions, const WeightedGraph& graph,
                                const MultichromaticPotential& pot);

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> U;
  std::vector<double> E_graph;
  std::vector<std::vector<double>> r_magnitudes;  // per time, |r_1|..|r_K|

  void push(double t, double u, double e, std::vector<double> r);
  std::size_t size() const noexcept { return times.size(); }
};

struct EnergyAggregate {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Trapezoid time average and extrema of U over [t_tr, T]. The window starts
// with a linearly interpolated value at t_tr. Throws DomainError if empty.
EnergyAggregate aggregate_energy(std::span<const double> times, std::span<const double> values, double t_tr);
inline EnergyAggregate aggregate_energy(const EnergySeries& s, double t_tr) {
  return aggregate_energy(s.times, s.U, t_tr);
}

// Density on bin centres, normalized so that sum density * (2 pi / bins) = 1.
std::vector<double> empirical_histogram(std::span<const double> positions, std::size_t bins);

// Circular runs of bins whose density exceeds twice the uniform level 1/(2 pi).
int count_peaks(std::span<const double> density);

struct Plateau {
  std::size_t first = 0;  // sample indices, inclusive
  std::size_t last = 0;
  std::size_t samples = 0;  // calm samples, excluding merged gaps
  double t_start = 0.0;
  double t_end = 0.0;
  double level = 0.0;     // mean U over the plateau
};

struct Transition {
  double t_start = 0.0;
  double t_end = 0.0;
  double U_before = 0.0;
  double U_after = 0.0;
};

// Maximal runs where the centred rolling std of U is below drop_threshold / 4.
// Neighbouring runs whose levels differ by less than drop_threshold are merged.
std::vector<Plateau> find_plateaus(const EnergySeries& series, std::size_t window, double drop_threshold);

// Consecutive plateaus whose level falls by more than drop_threshold.
std::vector<Transition> detect_transitions(const EnergySeries& series, std::size_t window, double drop_threshold);

}  // namespace netmf
