// netmf: thresholds, simulations, sweeps and mean-field PDE runs from a TOML config.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <memory>

#include "netmf/bifurcation.hpp"
#include "netmf/error.hpp"
#include "netmf/harness.hpp"
#include "netmf/pde.hpp"

namespace {

using namespace netmf;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

SweepConfig load(const Common& c) {
  SweepConfig cfg = c.config.empty() ? parse_config_string("[potential]\na = [1.0]\n", "<default>")
                                     : parse_config(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  if (!c.out.empty()) cfg.output_path = c.out;
  if (c.format == "json") cfg.format = OutputFormat::json;
  return cfg;
}

// Writes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string sign_name(BranchSign s) { return s == BranchSign::positive ? "positive" : "negative"; }

void cmd_thresholds(const Common& c, std::size_t grid, const std::string& trace_path) {
  const SweepConfig cfg = load(c);
  const auto& pot = cfg.potential;
  const auto spectrum = numeric_spectrum(discretize(cfg.graphon, grid), 4);
  const auto primary = primary_threshold(pot, cfg.graphon, cfg.beta);

  Output out(c.out);
  auto& os = out.stream();
  os << "family      " << cfg.graphon.describe() << '\n';
  os << "beta        " << format_number(cfg.beta) << '\n';
  os << "a_k        ";
  for (int k = 1; k <= pot.harmonics(); ++k) os << ' ' << format_number(pot.amplitude(k));
  os << '\n';
  os << "lambda_1    " << format_number(analytic_leading_eigenpair(cfg.graphon).eigenvalue) << " (analytic), "
     << format_number(spectrum.eigenvalues[0]) << " (grid " << grid << ")\n";
  os << "theta_c     " << format_number(primary.theta_c) << '\n';
  os << "(m*, l*)    (" << primary.critical_mode << ", " << primary.critical_eigen_index << ")"
     << (primary.degenerate() ? "  degenerate" : "") << '\n';

  const bool bichromatic = pot.harmonics() == 2 && pot.amplitude(2) > pot.amplitude(1) && pot.amplitude(1) > 0.0;
  if (!bichromatic) {
    os << "theta_c2    n/a (needs a_2 > a_1 > 0)\n";
    return;
  }
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path, std::ios::binary);
    if (!trace) throw IoError("cannot open " + trace_path + " for writing");
    trace << "sign,theta,lambda_max,phi\n";
  }
  for (BranchSign sign : {BranchSign::positive, BranchSign::negative}) {
    SecondaryReport rep;
    try {
      rep = secondary_threshold(pot, cfg.graphon, cfg.beta, sign, spectrum);
    } catch (const BracketingError& e) {
      os << "theta_c2    " << sign_name(sign) << " branch: no crossing (" << e.what() << ")\n";
      continue;
    }
    os << "theta_c2    " << sign_name(sign) << " branch: "
       << (rep.theta_c2 ? format_number(*rep.theta_c2) : std::string("none")) << "  bounds ("
       << format_number(rep.lower_bound) << ", " << format_number(rep.upper_bound) << ")\n";
    if (trace)
      for (const auto& [theta, lmax] : rep.lambda_max_trace)
        trace << sign_name(sign) << ',' << format_number(theta) << ',' << format_number(lmax) << ','
              << format_number(cfg.beta * theta * pot.amplitude(1) * lmax) << '\n';
  }
}

void cmd_simulate(const Common& c, const std::string& dump_path, const std::string& edges_path) {
  const SweepConfig cfg = load(c);
  const auto seeds = derive_seeds(cfg, 0, 0, 0);
  auto graph = std::make_shared<const WeightedGraph>(sample_adjacency(cfg.graphon, cfg.n, seeds.graph, cfg.mode));
  if (!edges_path.empty()) {
    std::ofstream e(edges_path, std::ios::binary);
    if (!e) throw IoError("cannot open " + edges_path + " for writing");
    graph->write_edge_list(e);
  }

  std::ofstream dump;
  if (!dump_path.empty()) {
    dump.open(dump_path, std::ios::binary);
    if (!dump) throw IoError("cannot open " + dump_path + " for writing");
    dump << 't';
    for (std::size_t i = 0; i < cfg.n; ++i) dump << ",x_" << i;
    dump << '\n';
  }
  SnapshotSink sink;
  if (dump.is_open())
    sink = [&dump](const ParticleState& s) {
      dump << format_number(s.time);
      for (double x : s.positions) dump << ',' << format_number(x);
      dump << '\n';
    };

  const auto run = simulate_run(cfg, cfg.theta_values.front(), graph, seeds.noise, seeds.init, sink);
  Output out(c.out);
  auto& os = out.stream();
  os << "t,U,E_graph";
  for (int k = 1; k <= cfg.potential.harmonics(); ++k) os << ",r" << k;
  os << '\n';
  const auto& s = run.series;
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << format_number(s.times[i]) << ',' << format_number(s.U[i]) << ',' << format_number(s.E_graph[i]);
    for (double r : s.r_magnitudes[i]) os << ',' << format_number(r);
    os << '\n';
  }
  spdlog::info("U_mean={} U_min={} U_max={} transitions={} final peaks={}", run.U.mean, run.U.min, run.U.max,
               run.transitions.size(), run.final_peak_count);
}

void cmd_sweep(const Common& c) {
  const SweepConfig cfg = load(c);
  const auto result = run_sweep(cfg);
  if (cfg.output_path.empty() || cfg.output_path == "-") {
    if (cfg.format == OutputFormat::csv)
      write_csv(result.rows, std::cout);
    else
      write_json(result, std::cout);
  } else {
    export_table(result, cfg.output_path, cfg.format);
  }
  for (const auto& s : result.summary)
    spdlog::info("theta/theta_c={} -U_mean={} peaks={}", format_number(s.theta_over_theta_c),
                 format_number(-s.U_mean), format_number(s.final_peak_count));
}

MeanFieldState perturbed_state(const SweepConfig& cfg) {
  MeanFieldState st(cfg.pde.nodes, cfg.pde.modes);
  for (std::size_t i = 0; i < st.nodes(); ++i) st.A(i, cfg.pde.init_mode) = cfg.pde.init_amplitude;
  return st;
}

void write_state(const MeanFieldState& st, const std::string& path) {
  if (path.empty()) return;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  st.write_csv(os);
}

void cmd_pde_evolve(const Common& c, const std::string& state_path) {
  const SweepConfig cfg = load(c);
  const MeanFieldModel model(cfg.theta_values.front(), cfg.beta, cfg.potential, cfg.graphon, cfg.pde.nodes);
  const auto traj = evolve(perturbed_state(cfg), model, cfg.pde.T, cfg.pde.dt);
  Output out(c.out);
  traj.write_energy_csv(out.stream());
  write_state(traj.final_state, state_path);
}

void cmd_pde_stationary(const Common& c, const std::string& state_path, bool even) {
  const SweepConfig cfg = load(c);
  const MeanFieldModel model(cfg.theta_values.front(), cfg.beta, cfg.potential, cfg.graphon, cfg.pde.nodes);
  FixedPointOptions opt;
  opt.damping = cfg.pde.damping;
  opt.symmetry = even ? Symmetry::pi_periodic : Symmetry::none;
  const auto st = stationary_fixed_point(model, perturbed_state(cfg), opt);
  const auto fe = free_energy(st, model);
  Output out(c.out);
  auto& os = out.stream();
  os << "x_index,x,R_1,R_2\n";
  // R_k = L[m_k] with m_k = A_k / 2
  const auto x = st.x_grid();
  const std::size_t m = st.nodes();
  for (std::size_t i = 0; i < m; ++i) {
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      r1 += model.kernel(i, j) * st.A(j, 1) / 2.0;
      if (st.modes() >= 2) r2 += model.kernel(i, j) * st.A(j, 2) / 2.0;
    }
    os << i << ',' << format_number(x[i]) << ',' << format_number(r1 / static_cast<double>(m)) << ','
       << format_number(r2 / static_cast<double>(m)) << '\n';
  }
  spdlog::info("free energy {} (entropy {}, interaction {})", fe.total, fe.entropy, fe.interaction);
  write_state(st, state_path);
}

void cmd_spectrum(const Common& c, std::size_t grid, std::size_t count) {
  const SweepConfig cfg = load(c);
  const auto spec = numeric_spectrum(discretize(cfg.graphon, grid), count);
  Output out(c.out);
  spec.write_csv(out.stream());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interacting diffusions on graphs: thresholds, simulation and mean-field PDE"};
  app.require_subcommand(1);
  Common common;
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "TOML config file");
    sub->add_option("--seed", common.seed, "base seed override");
    sub->add_option("--out", common.out, "output file (stdout if omitted)");
    sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  std::size_t grid = 256, count = 8;
  std::string trace_path, dump_path, edges_path, state_path;
  bool even = false;

  auto* th = app.add_subcommand("thresholds", "primary and secondary thresholds");
  add_common(th);
  th->add_option("--grid", grid, "quadrature grid for the numeric spectrum");
  th->add_option("--trace", trace_path, "CSV of the lambda_max(A) trace");

  auto* sim = app.add_subcommand("simulate", "one particle trajectory at the first theta");
  add_common(sim);
  sim->add_option("--dump-positions", dump_path, "CSV of positions at every recorded snapshot");
  sim->add_option("--edges", edges_path, "edge list of the sampled graph");

  auto* sw = app.add_subcommand("sweep", "phase-diagram sweep over theta, graphs and noise");
  add_common(sw);

  auto* pe = app.add_subcommand("pde-evolve", "integrate the mean-field PDE");
  add_common(pe);
  pe->add_option("--state", state_path, "final coefficient checkpoint");

  auto* ps = app.add_subcommand("pde-stationary", "stationary state by fixed-point iteration");
  add_common(ps);
  ps->add_option("--state", state_path, "coefficient checkpoint");
  ps->add_flag("--even", even, "restrict to pi-periodic densities");

  auto* sp = app.add_subcommand("spectrum", "numeric spectrum of the discretized graphon");
  add_common(sp);
  sp->add_option("--grid", grid, "quadrature grid");
  sp->add_option("--count", count, "number of eigenvalues");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("netmf"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*th) cmd_thresholds(common, grid, trace_path);
    if (*sim) cmd_simulate(common, dump_path, edges_path);
    if (*sw) cmd_sweep(common);
    if (*pe) cmd_pde_evolve(common, state_path);
    if (*ps) cmd_pde_stationary(common, state_path, even);
    if (*sp) cmd_spectrum(common, grid, count);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
