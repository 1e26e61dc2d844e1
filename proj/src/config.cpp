#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "netmf/bifurcation.hpp"
#include "netmf/error.hpp"
#include "netmf/harness.hpp"

namespace netmf {
namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"graph", {"family", "p", "h", "r", "gamma", "alpha", "n", "mode", "seed"}},
      {"potential", {"a"}},
      {"sim", {"theta", "theta_over_theta_c", "beta", "sigma", "dt", "T", "t_tr", "record_stride"}},
      {"sweep", {"n_graph", "n_noise", "base_seed", "output", "format", "threads"}},
      {"observables", {"window", "drop_threshold", "bins"}},
      {"pde", {"nodes", "modes", "dt", "T", "damping", "init_mode", "init_amplitude"}},
  };
  return s;
}

std::string where(const toml::node& n, std::string_view source) {
  std::ostringstream os;
  os << source << ':' << n.source().begin.line;
  return os.str();
}

class Reader {
 public:
  Reader(const toml::table& root, std::string_view source) : root_(root), source_(source) {}

  const toml::node* find(const std::string& section, const std::string& key) const {
    const auto* sec = root_.get_as<toml::table>(section);
    return sec ? sec->get(key) : nullptr;
  }
  bool has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

  std::optional<double> number(const std::string& section, const std::string& key) const {
    const auto* n = find(section, key);
    if (!n) return std::nullopt;
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
    fail(*n, section + "." + key + " must be a number");
  }

  std::optional<std::int64_t> integer(const std::string& section, const std::string& key) const {
    const auto* n = find(section, key);
    if (!n) return std::nullopt;
    if (n->is_integer()) return *n->value<std::int64_t>();
    fail(*n, section + "." + key + " must be an integer");
  }

  std::optional<std::size_t> count(const std::string& section, const std::string& key) const {
    auto v = integer(section, key);
    if (!v) return std::nullopt;
    if (*v < 0) fail(*find(section, key), section + "." + key + " must be nonnegative");
    return static_cast<std::size_t>(*v);
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    const auto* n = find(section, key);
    if (!n) return std::nullopt;
    if (n->is_string()) return std::string(*n->value<std::string_view>());
    fail(*n, section + "." + key + " must be a string");
  }

  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) const {
    const auto* n = find(section, key);
    if (!n) return std::nullopt;
    std::vector<double> out;
    if (const auto* arr = n->as_array()) {
      for (const auto& e : *arr) {
        if (!(e.is_floating_point() || e.is_integer())) fail(e, section + "." + key + " must hold numbers");
        out.push_back(*e.value<double>());
      }
      return out;
    }
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return std::vector<double>{*v};
    fail(*n, section + "." + key + " must be a number or an array of numbers");
  }

  [[noreturn]] void fail(const toml::node& n, const std::string& msg) const {
    throw ConfigError(where(n, source_) + ": " + msg);
  }

 private:
  const toml::table& root_;
  std::string_view source_;
};

void check_keys(const toml::table& root, std::string_view source) {
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    const auto it = schema().find(k);
    if (it == schema().end() || !node.is_table())
      throw ConfigError(where(node, source) + ": unknown section '" + k + "'");
    for (const auto& [sub, subnode] : *node.as_table())
      if (!it->second.contains(std::string(sub.str())))
        throw ConfigError(where(subnode, source) + ": unknown field '" + k + "." + std::string(sub.str()) + "'");
  }
}

Graphon read_graphon(const Reader& r, std::size_t n) {
  const std::string family = r.text("graph", "family").value_or("ER");
  if (family == "ER" || family == "erdos_renyi") return Graphon::erdos_renyi(r.number("graph", "p").value_or(0.5));
  if (family == "SW" || family == "small_world") {
    double h = 0.0;
    if (auto v = r.number("graph", "h")) {
      h = *v;
    } else if (auto rr = r.count("graph", "r")) {
      h = static_cast<double>(*rr) / (2.0 * static_cast<double>(n));
    } else {
      throw ConfigError("graph.h (or graph.r) is required for the small-world family");
    }
    return Graphon::small_world(r.number("graph", "p").value_or(0.0), h);
  }
  if (family == "PL" || family == "power_law")
    return Graphon::power_law(r.number("graph", "gamma").value_or(0.3), r.number("graph", "alpha").value_or(0.4));
  throw ConfigError("graph.family must be one of ER, SW, PL (got '" + family + "')");
}

}  // namespace

double SweepConfig::effective_drop_threshold() const {
  return drop_threshold > 0.0 ? drop_threshold : 0.05 * potential.total_weight();
}

void SweepConfig::validate() const {
  if (n < 2) throw ConfigError("graph.n must be at least 2");
  if (!(dt > 0.0)) throw ConfigError("sim.dt must be positive");
  if (!(T >= dt)) throw ConfigError("sim.T must be at least sim.dt");
  if (!(beta > 0.0)) throw ConfigError("sim.beta must be positive");
  if (!(t_tr >= 0.0 && t_tr < T)) throw ConfigError("sim.t_tr must lie in [0, T)");
  if (record_stride < 1) throw ConfigError("sim.record_stride must be positive");
  if (theta_values.empty()) throw ConfigError("sim.theta grid is empty");
  for (double t : theta_values)
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("sim.theta values must be positive");
  if (n_graph < 1) throw ConfigError("sweep.n_graph must be at least 1");
  if (n_noise < 1) throw ConfigError("sweep.n_noise must be at least 1");
  if (transition_window < 2) throw ConfigError("observables.window must be at least 2");
  if (drop_threshold < 0.0) throw ConfigError("observables.drop_threshold must be nonnegative");
  if (histogram_bins < 2) throw ConfigError("observables.bins must be at least 2");
  if (mode == SamplingMode::deterministic_weights && graphon.is_power_law())
    throw ConfigError("graph.mode deterministic_weights is not defined for the power-law family");
  if (pde.nodes < 2) throw ConfigError("pde.nodes must be at least 2");
  if (pde.modes < 1) throw ConfigError("pde.modes must be positive");
  if (!(pde.dt > 0.0)) throw ConfigError("pde.dt must be positive");
  if (!(pde.T >= 0.0)) throw ConfigError("pde.T must be nonnegative");
  if (!(pde.damping > 0.0 && pde.damping <= 1.0)) throw ConfigError("pde.damping must lie in (0, 1]");
  if (pde.init_mode < 1 || pde.init_mode > pde.modes) throw ConfigError("pde.init_mode must lie in [1, pde.modes]");
}

void SweepConfig::describe(std::ostream& os) const {
  os << "graph      " << graphon.describe() << "  n=" << n
     << "  mode=" << (mode == SamplingMode::bernoulli ? "bernoulli" : "deterministic_weights") << '\n';
  os << "potential  a=[";
  for (int k = 1; k <= potential.harmonics(); ++k) os << (k > 1 ? ", " : "") << potential.amplitude(k);
  os << "]\n";
  os << "sim        beta=" << beta << "  dt=" << dt << "  T=" << T << "  t_tr=" << t_tr
     << "  record_stride=" << record_stride << '\n';
  os << "theta_c    " << theta_c << "\ntheta      ";
  for (std::size_t i = 0; i < theta_values.size(); ++i)
    os << (i ? ", " : "") << theta_values[i] << " (" << theta_over_theta_c[i] << " theta_c)";
  os << "\nsweep      n_graph=" << n_graph << "  n_noise=" << n_noise << "  base_seed=" << base_seed << '\n';
  os << "observables window=" << transition_window << "  drop_threshold=" << effective_drop_threshold()
     << "  bins=" << histogram_bins << '\n';
}

SweepConfig parse_config_string(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ':' << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  check_keys(root, source);
  const Reader r(root, source);
  SweepConfig cfg;

  if (auto v = r.count("graph", "n")) cfg.n = *v;
  cfg.graphon = read_graphon(r, cfg.n);
  if (auto m = r.text("graph", "mode")) {
    if (*m == "bernoulli") cfg.mode = SamplingMode::bernoulli;
    else if (*m == "deterministic_weights") cfg.mode = SamplingMode::deterministic_weights;
    else throw ConfigError("graph.mode must be 'bernoulli' or 'deterministic_weights'");
  }
  if (auto s = r.integer("graph", "seed")) cfg.graph_seed = static_cast<std::uint64_t>(*s);

  if (auto a = r.numbers("potential", "a")) cfg.potential = MultichromaticPotential(*a);

  if (r.has("sim", "beta") && r.has("sim", "sigma")) throw ConfigError("give either sim.beta or sim.sigma, not both");
  if (auto b = r.number("sim", "beta")) cfg.beta = *b;
  if (auto s = r.number("sim", "sigma")) {
    if (!(*s > 0.0)) throw ConfigError("sim.sigma must be positive");
    cfg.beta = 2.0 / (*s * *s);
  }
  if (auto v = r.number("sim", "dt")) cfg.dt = *v;
  if (auto v = r.number("sim", "T")) cfg.T = *v;
  cfg.t_tr = r.number("sim", "t_tr").value_or(0.9 * cfg.T);
  if (auto v = r.count("sim", "record_stride")) cfg.record_stride = *v;

  if (!(cfg.beta > 0.0)) throw ConfigError("sim.beta must be positive");
  cfg.theta_c = primary_threshold(cfg.potential, cfg.graphon, cfg.beta).theta_c;
  if (r.has("sim", "theta") && r.has("sim", "theta_over_theta_c"))
    throw ConfigError("give either sim.theta or sim.theta_over_theta_c, not both");
  if (auto t = r.numbers("sim", "theta")) {
    cfg.theta_values = *t;
    for (double v : cfg.theta_values) cfg.theta_over_theta_c.push_back(v / cfg.theta_c);
  } else {
    cfg.theta_over_theta_c = r.numbers("sim", "theta_over_theta_c")
                                 .value_or(std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0});
    for (double v : cfg.theta_over_theta_c) cfg.theta_values.push_back(v * cfg.theta_c);
  }

  if (auto v = r.count("sweep", "n_graph")) cfg.n_graph = *v;
  if (auto v = r.count("sweep", "n_noise")) cfg.n_noise = *v;
  if (auto v = r.integer("sweep", "base_seed")) cfg.base_seed = static_cast<std::uint64_t>(*v);
  if (auto v = r.count("sweep", "threads")) cfg.threads = *v;
  if (auto v = r.text("sweep", "output")) cfg.output_path = *v;
  if (auto f = r.text("sweep", "format")) {
    if (*f == "csv") cfg.format = OutputFormat::csv;
    else if (*f == "json") cfg.format = OutputFormat::json;
    else throw ConfigError("sweep.format must be 'csv' or 'json'");
  }

  if (auto v = r.count("observables", "window")) cfg.transition_window = *v;
  if (auto v = r.number("observables", "drop_threshold")) cfg.drop_threshold = *v;
  if (auto v = r.count("observables", "bins")) cfg.histogram_bins = *v;

  if (auto v = r.count("pde", "nodes")) cfg.pde.nodes = *v;
  if (auto v = r.integer("pde", "modes")) cfg.pde.modes = static_cast<int>(*v);
  if (auto v = r.number("pde", "dt")) cfg.pde.dt = *v;
  if (auto v = r.number("pde", "T")) cfg.pde.T = *v;
  if (auto v = r.number("pde", "damping")) cfg.pde.damping = *v;
  if (auto v = r.integer("pde", "init_mode")) cfg.pde.init_mode = static_cast<int>(*v);
  if (auto v = r.number("pde", "init_amplitude")) cfg.pde.init_amplitude = *v;

  cfg.validate();
  return cfg;
}

SweepConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str(), path);
}

}  // namespace netmf
