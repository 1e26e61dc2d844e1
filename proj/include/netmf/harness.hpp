#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netmf/graphon.hpp"
#include "netmf/observables.hpp"
#include "netmf/particle_sim.hpp"
#include "netmf/potential.hpp"

namespace netmf {

enum class OutputFormat { csv, json };

struct PdeConfig {
  std::size_t nodes = 64;
  int modes = 16;
  double dt = 0.01;
  double T = 100.0;
  double damping = 0.5;
  int init_mode = 2;             // perturbed Fourier mode of the initial density
  double init_amplitude = 0.01;  // A_j of the perturbation
};

struct SweepConfig {
  Graphon graphon = Graphon::erdos_renyi(0.5);
  std::size_t n = 1000;
  SamplingMode mode = SamplingMode::bernoulli;
  std::optional<std::uint64_t> graph_seed;  // fixes the graph stream independently of base_seed

  MultichromaticPotential potential{{1.0}};

  double beta = 200.0;
  double dt = 0.01;
  double T = 1000.0;
  double t_tr = 900.0;
  std::size_t record_stride = 100;

  double theta_c = 0.0;                     // analytic, for the theta axis
  std::vector<double> theta_values;         // absolute
  std::vector<double> theta_over_theta_c;   // same grid, normalized

  std::size_t n_graph = 5;
  std::size_t n_noise = 3;
  std::uint64_t base_seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency

  std::size_t transition_window = 100;  // recorded snapshots
  double drop_threshold = 0.0;          // 0: one tenth of sum |a_k| / 2
  std::size_t histogram_bins = 32;

  std::string output_path;
  OutputFormat format = OutputFormat::csv;

  PdeConfig pde;

  double effective_drop_threshold() const;
  // Throws ConfigError naming the offending field.
  void validate() const;
  void describe(std::ostream& os) const;
};

// Parse a TOML document. Errors carry the source name and line.
SweepConfig parse_config_string(std::string_view text, std::string_view source = "<string>");
SweepConfig parse_config(const std::string& path);

struct PhaseDiagramRow {
  double theta = 0.0;
  double theta_over_theta_c = 0.0;
  std::uint64_t graph_seed = 0;
  std::uint64_t noise_seed = 0;
  double U_mean = 0.0;
  double U_min = 0.0;
  double U_max = 0.0;
  double E_graph_mean = 0.0;
  int transition_count = 0;
  int final_peak_count = 0;

  bool operator==(const PhaseDiagramRow&) const = default;
};

struct EnsembleSummary {
  double theta = 0.0;
  double theta_over_theta_c = 0.0;
  std::size_t runs = 0;
  double U_mean = 0.0;
  double U_min = 0.0;
  double U_max = 0.0;
  double E_graph_mean = 0.0;
  double transition_count = 0.0;
  double final_peak_count = 0.0;
};

struct SweepResult {
  std::vector<PhaseDiagramRow> rows;  // theta-major, then graph, then noise
  std::vector<EnsembleSummary> summary;
};

struct RunSeeds {
  std::uint64_t graph = 0;
  std::uint64_t noise = 0;
  std::uint64_t init = 0;
};

RunSeeds derive_seeds(const SweepConfig& cfg, std::size_t theta_index, std::size_t graph_index,
                      std::size_t noise_index);

struct RunOutput {
  EnergySeries series;
  std::vector<int> peak_counts;  // per recorded snapshot
  std::vector<double> final_positions;
  EnergyAggregate U;
  EnergyAggregate E_graph;
  std::vector<Transition> transitions;
  std::vector<Plateau> plateaus;
  int final_peak_count = 0;
};

using SnapshotSink = std::function<void(const ParticleState&)>;

// One trajectory on a given graph, observed every record_stride steps.
RunOutput simulate_run(const SweepConfig& cfg, double theta, std::shared_ptr<const WeightedGraph> graph,
                       std::uint64_t noise_seed, std::uint64_t init_seed, const SnapshotSink& sink = {});

SweepResult run_sweep(const SweepConfig& cfg);

void write_csv(const std::vector<PhaseDiagramRow>& rows, std::ostream& os);
std::vector<PhaseDiagramRow> read_csv(std::istream& is);
void write_json(const SweepResult& result, std::ostream& os);
void export_table(const SweepResult& result, const std::string& path, OutputFormat format);

// 12 significant digits, as used by every exported table.
std::string format_number(double v);

}  // namespace netmf
