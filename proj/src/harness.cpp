#include "netmf/harness.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "netmf/error.hpp"
#include "netmf/random.hpp"

namespace netmf {
namespace {

constexpr std::uint64_t graph_tag = 0x67726170;
constexpr std::uint64_t noise_tag = 0x6e6f6973;
constexpr std::uint64_t init_tag = 0x696e6974;

constexpr const char* csv_header =
    "theta,theta_over_theta_c,graph_seed,noise_seed,U_mean,U_min,U_max,E_graph_mean,transition_count,"
    "final_peak_count";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Re-throw a worker failure with its sweep coordinates, keeping the category.
[[noreturn]] void rethrow_annotated(std::exception_ptr ep, const std::string& where) {
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(where + ": " + e.what());
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

RunSeeds derive_seeds(const SweepConfig& cfg, std::size_t theta_index, std::size_t graph_index,
                      std::size_t noise_index) {
  RunSeeds s;
  // Graphs do not depend on theta: every theta sees the same realizations.
  s.graph = cfg.graph_seed ? rng::hash(*cfg.graph_seed, graph_index)
                           : rng::hash(cfg.base_seed, graph_tag, graph_index);
  s.noise = rng::hash(cfg.base_seed, noise_tag, theta_index, graph_index, noise_index);
  s.init = rng::hash(cfg.base_seed, init_tag, theta_index, graph_index, noise_index);
  return s;
}

RunOutput simulate_run(const SweepConfig& cfg, double theta, std::shared_ptr<const WeightedGraph> graph,
                       std::uint64_t noise_seed, std::uint64_t init_seed, const SnapshotSink& sink) {
  SimParams params;
  params.theta = theta;
  params.beta = cfg.beta;
  params.dt = cfg.dt;
  params.horizon = cfg.T;
  params.potential = cfg.potential;
  params.graph = graph;
  params.record_stride = cfg.record_stride;

  Simulator sim(params);
  ParticleState state = init_state(graph->n, init_seed);
  state.noise_seed = noise_seed;

  RunOutput out;
  const int K = cfg.potential.harmonics();
  sim.run(state, [&](const ParticleState& s) {
    const auto r = order_parameters(s.positions, K);
    std::vector<double> mags(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) mags[k] = std::abs(r[k]);
    out.series.push(s.time, energy_order_parameter(r, cfg.potential),
                    graph_interaction_energy(s.positions, *graph, cfg.potential), std::move(mags));
    out.peak_counts.push_back(count_peaks(empirical_histogram(s.positions, cfg.histogram_bins)));
    if (sink) sink(s);
  });

  out.final_positions = state.positions;
  out.U = aggregate_energy(out.series.times, out.series.U, cfg.t_tr);
  out.E_graph = aggregate_energy(out.series.times, out.series.E_graph, cfg.t_tr);
  const double drop = cfg.effective_drop_threshold();
  out.plateaus = find_plateaus(out.series, cfg.transition_window, drop);
  out.transitions = detect_transitions(out.series, cfg.transition_window, drop);
  out.final_peak_count = out.peak_counts.back();
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t n_theta = cfg.theta_values.size();
  const std::size_t jobs = n_theta * cfg.n_graph;
  const std::size_t per_job = cfg.n_noise;

  SweepResult result;
  result.rows.resize(jobs * per_job);
  std::vector<std::exception_ptr> failures(jobs);

  auto work = [&](std::size_t job) {
    const std::size_t ti = job / cfg.n_graph;
    const std::size_t gi = job % cfg.n_graph;
    try {
      const auto graph_seed = derive_seeds(cfg, ti, gi, 0).graph;
      auto graph = std::make_shared<const WeightedGraph>(sample_adjacency(cfg.graphon, cfg.n, graph_seed, cfg.mode));
      for (std::size_t ni = 0; ni < per_job; ++ni) {
        const auto seeds = derive_seeds(cfg, ti, gi, ni);
        const auto run = simulate_run(cfg, cfg.theta_values[ti], graph, seeds.noise, seeds.init);
        auto& row = result.rows[job * per_job + ni];
        row.theta = cfg.theta_values[ti];
        row.theta_over_theta_c = cfg.theta_over_theta_c[ti];
        row.graph_seed = seeds.graph;
        row.noise_seed = seeds.noise;
        row.U_mean = run.U.mean;
        row.U_min = run.U.min;
        row.U_max = run.U.max;
        row.E_graph_mean = run.E_graph.mean;
        row.transition_count = static_cast<int>(run.transitions.size());
        row.final_peak_count = run.final_peak_count;
      }
    } catch (...) {
      failures[job] = std::current_exception();
    }
  };

  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) work(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) work(j);
      });
  }

  for (std::size_t j = 0; j < jobs; ++j)
    if (failures[j]) {
      std::ostringstream where;
      where << "theta=" << format_number(cfg.theta_values[j / cfg.n_graph]) << " graph #" << j % cfg.n_graph
            << " (seed " << derive_seeds(cfg, j / cfg.n_graph, j % cfg.n_graph, 0).graph << ")";
      rethrow_annotated(failures[j], where.str());
    }

  for (std::size_t ti = 0; ti < n_theta; ++ti) {
    EnsembleSummary s;
    s.theta = cfg.theta_values[ti];
    s.theta_over_theta_c = cfg.theta_over_theta_c[ti];
    const std::size_t first = ti * cfg.n_graph * per_job;
    s.runs = cfg.n_graph * per_job;
    for (std::size_t k = first; k < first + s.runs; ++k) {
      const auto& r = result.rows[k];
      s.U_mean += r.U_mean;
      s.U_min += r.U_min;
      s.U_max += r.U_max;
      s.E_graph_mean += r.E_graph_mean;
      s.transition_count += r.transition_count;
      s.final_peak_count += r.final_peak_count;
    }
    const double runs = static_cast<double>(s.runs);
    s.U_mean /= runs;
    s.U_min /= runs;
    s.U_max /= runs;
    s.E_graph_mean /= runs;
    s.transition_count /= runs;
    s.final_peak_count /= runs;
    spdlog::debug("theta/theta_c={} -U_mean={}", s.theta_over_theta_c, -s.U_mean);
    result.summary.push_back(s);
  }
  return result;
}

void write_csv(const std::vector<PhaseDiagramRow>& rows, std::ostream& os) {
  os << csv_header << '\n';
  for (const auto& r : rows) {
    os << format_number(r.theta) << ',' << format_number(r.theta_over_theta_c) << ',' << r.graph_seed << ','
       << r.noise_seed << ',' << format_number(r.U_mean) << ',' << format_number(r.U_min) << ','
       << format_number(r.U_max) << ',' << format_number(r.E_graph_mean) << ',' << r.transition_count << ','
       << r.final_peak_count << '\n';
  }
}

std::vector<PhaseDiagramRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != csv_header) throw IoError("phase-diagram CSV has an unexpected header");
  std::vector<PhaseDiagramRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 10) throw IoError("phase-diagram CSV line " + std::to_string(lineno) + " has wrong field count");
    try {
      PhaseDiagramRow r;
      r.theta = std::stod(f[0]);
      r.theta_over_theta_c = std::stod(f[1]);
      r.graph_seed = std::stoull(f[2]);
      r.noise_seed = std::stoull(f[3]);
      r.U_mean = std::stod(f[4]);
      r.U_min = std::stod(f[5]);
      r.U_max = std::stod(f[6]);
      r.E_graph_mean = std::stod(f[7]);
      r.transition_count = std::stoi(f[8]);
      r.final_peak_count = std::stoi(f[9]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError("phase-diagram CSV line " + std::to_string(lineno) + " is malformed");
    }
  }
  return rows;
}

void write_json(const SweepResult& result, std::ostream& os) {
  // Numbers go through the same 12-digit rounding as the CSV.
  auto num = [](double v) { return std::stod(format_number(v)); };
  nlohmann::ordered_json doc;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : result.rows) {
    doc["rows"].push_back({{"theta", num(r.theta)},
                           {"theta_over_theta_c", num(r.theta_over_theta_c)},
                           {"graph_seed", r.graph_seed},
                           {"noise_seed", r.noise_seed},
                           {"U_mean", num(r.U_mean)},
                           {"U_min", num(r.U_min)},
                           {"U_max", num(r.U_max)},
                           {"E_graph_mean", num(r.E_graph_mean)},
                           {"transition_count", r.transition_count},
                           {"final_peak_count", r.final_peak_count}});
  }
  doc["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : result.summary) {
    doc["summary"].push_back({{"theta", num(s.theta)},
                              {"theta_over_theta_c", num(s.theta_over_theta_c)},
                              {"runs", s.runs},
                              {"U_mean", num(s.U_mean)},
                              {"U_min", num(s.U_min)},
                              {"U_max", num(s.U_max)},
                              {"E_graph_mean", num(s.E_graph_mean)},
                              {"transition_count", num(s.transition_count)},
                              {"final_peak_count", num(s.final_peak_count)}});
  }
  os << doc.dump(2) << '\n';
}

void export_table(const SweepResult& result, const std::string& path, OutputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (format == OutputFormat::csv)
    write_csv(result.rows, out);
  else
    write_json(result, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace netmf
