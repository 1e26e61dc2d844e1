#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netmf/bifurcation.hpp"
#include "netmf/error.hpp"
#include "netmf/harness.hpp"

using namespace netmf;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "netmf_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SweepConfig tiny(std::size_t thetas, std::size_t graphs, std::size_t noises) {
  std::ostringstream doc;
  doc << "[graph]\nfamily = \"ER\"\np = 0.5\nn = 8\n[potential]\na = [1.0, 2.0]\n"
      << "[sim]\nT = 1.0\nrecord_stride = 10\ntheta_over_theta_c = [";
  for (std::size_t i = 0; i < thetas; ++i) doc << (i ? ", " : "") << 0.5 + 0.25 * i;
  doc << "]\n[sweep]\nn_graph = " << graphs << "\nn_noise = " << noises << "\nbase_seed = 5\n"
      << "[observables]\nwindow = 2\n";
  return parse_config_string(doc.str());
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto cfg = parse_config_string("[graph]\nfamily = \"ER\"\n[potential]\na = [1.0]\n");
  CHECK(cfg.dt == 0.01);
  CHECK(cfg.beta == 200.0);
  CHECK(cfg.n == 1000);
  CHECK(cfg.T == 1000.0);
  CHECK(cfg.t_tr == Approx(0.9 * cfg.T));
  CHECK(cfg.n_graph == 5);
  CHECK(cfg.n_noise == 3);
  CHECK(cfg.theta_c == Approx(0.02));
  CHECK(cfg.theta_values.size() == 10);
  std::ostringstream echo;
  cfg.describe(echo);
  CHECK(echo.str().find("beta=200") != std::string::npos);
  CHECK(echo.str().find("dt=0.01") != std::string::npos);
  CHECK(echo.str().find("n=1000") != std::string::npos);
}

TEST_CASE("sigma sets beta") {
  const auto cfg = parse_config_string("[sim]\nsigma = 0.1\nT = 50\n");
  CHECK(cfg.beta == Approx(200.0));
  CHECK(cfg.t_tr == Approx(45.0));
}

TEST_CASE("config validation errors") {
  CHECK_THROWS_AS(parse_config_string("[sim]\ndt = -0.01\n"), ConfigError);
  CHECK_THROWS_WITH(parse_config_string("[graph]\nfamily = \"ER\"\n\n[sim]\nbogus = 1\n", "cfg.toml"),
                    Catch::Matchers::ContainsSubstring("cfg.toml:5") &&
                        Catch::Matchers::ContainsSubstring("sim.bogus"));
  CHECK_THROWS_WITH(parse_config_string("[sim\n", "x.toml"), Catch::Matchers::ContainsSubstring("x.toml:1"));
  CHECK_THROWS_AS(parse_config_string("[graph]\nfamily = \"XX\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[graph]\nn = \"many\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[sweep]\nn_graph = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[sim]\ntheta = [0.1, -0.2]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[sim]\ntheta = 0.1\ntheta_over_theta_c = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[graph]\nfamily = \"PL\"\nmode = \"deterministic_weights\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/netmf.toml"), ConfigError);
}

TEST_CASE("theta multiples resolve against the primary threshold") {
  const auto cfg = parse_config_string(
      "[graph]\nfamily = \"PL\"\ngamma = 0.3\nalpha = 0.4\n[potential]\na = [1, 2]\n"
      "[sim]\ntheta_over_theta_c = [0.5, 1.0, 2.0]\n");
  const double tc = primary_threshold(cfg.potential, cfg.graphon, cfg.beta).theta_c;
  CHECK(tc == Approx(0.002));
  REQUIRE(cfg.theta_values.size() == 3);
  CHECK(cfg.theta_values[0] == Approx(0.5 * tc));
  CHECK(cfg.theta_values[2] == Approx(2.0 * tc));

  const auto sw = parse_config_string("[graph]\nfamily = \"SW\"\np = 0.4\nr = 20\nn = 250\n");
  CHECK(std::get<SmallWorld>(sw.graphon.family()).h == Approx(0.04));
}

TEST_CASE("CSV export: header, roundtrip and number format") {
  std::ostringstream empty;
  write_csv({}, empty);
  CHECK(empty.str() ==
        "theta,theta_over_theta_c,graph_seed,noise_seed,U_mean,U_min,U_max,E_graph_mean,transition_count,"
        "final_peak_count\n");

  PhaseDiagramRow r{0.0123456789012345, 1.5, 18446744073709551615ull, 42, -0.3, -0.4, -0.2, -0.61, 2, 1};
  std::ostringstream os;
  write_csv({r}, os);
  CHECK(os.str().find("0.0123456789012,1.5,18446744073709551615,42,") != std::string::npos);
  std::istringstream is(os.str());
  const auto back = read_csv(is);
  REQUIRE(back.size() == 1);
  PhaseDiagramRow expect = r;
  expect.theta = 0.0123456789012;
  CHECK(back[0] == expect);

  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.0) == "-2");
  std::istringstream bad("not,a,header\n");
  CHECK_THROWS_AS(read_csv(bad), IoError);
}

TEST_CASE("export to files") {
  SweepResult res;
  res.rows.push_back({0.01, 0.5, 1, 2, -0.1, -0.2, -0.05, -0.2, 0, 1});
  res.summary.push_back({0.01, 0.5, 1, -0.1, -0.2, -0.05, -0.2, 0.0, 1.0});
  const auto csv = scratch("t.csv");
  export_table(res, csv.string(), OutputFormat::csv);
  std::ifstream in(csv);
  CHECK(read_csv(in) == res.rows);

  const auto js = scratch("t.json");
  export_table(res, js.string(), OutputFormat::json);
  const auto text = slurp(js);
  CHECK(text.find("\"U_mean\": -0.1") != std::string::npos);
  CHECK(text.find("\"final_peak_count\": 1") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  CHECK_THROWS_AS(export_table(res, "/nonexistent/dir/out.csv", OutputFormat::csv), IoError);
}

TEST_CASE("sweep rows are ordered theta-major, then graph, then noise") {
  const auto cfg = tiny(10, 10, 10);
  const auto res = run_sweep(cfg);
  REQUIRE(res.rows.size() == 1000);
  std::size_t k = 0;
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t g = 0; g < 10; ++g)
      for (std::size_t n = 0; n < 10; ++n, ++k) {
        const auto seeds = derive_seeds(cfg, t, g, n);
        CHECK(res.rows[k].theta == cfg.theta_values[t]);
        CHECK(res.rows[k].graph_seed == seeds.graph);
        CHECK(res.rows[k].noise_seed == seeds.noise);
        CHECK(res.rows[k].U_min <= res.rows[k].U_mean);
        CHECK(res.rows[k].U_mean <= res.rows[k].U_max);
      }
  // ensemble mean is the arithmetic mean of the rows
  for (std::size_t t = 0; t < 10; ++t) {
    double s = 0.0;
    for (std::size_t j = 0; j < 100; ++j) s += res.rows[t * 100 + j].U_mean;
    CHECK(res.summary[t].U_mean == s / 100.0);
    CHECK(res.summary[t].runs == 100);
  }
}

TEST_CASE("sweeps are deterministic and independent of the thread count") {
  auto cfg = tiny(3, 2, 2);
  cfg.threads = 1;
  const auto serial = run_sweep(cfg);
  cfg.threads = 4;
  const auto parallel = run_sweep(cfg);
  std::ostringstream a, b, c;
  write_csv(serial.rows, a);
  write_csv(parallel.rows, b);
  write_csv(run_sweep(cfg).rows, c);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());

  cfg.base_seed = 6;
  std::ostringstream d;
  write_csv(run_sweep(cfg).rows, d);
  CHECK(a.str() != d.str());
}

TEST_CASE("Kuramoto ensembles on both sides of the threshold") {
  // desk scale: N = 256 instead of 1000
  const std::string base =
      "[graph]\nfamily = \"ER\"\np = 0.5\nn = 256\n[potential]\na = [1.0]\n[sweep]\nn_graph = 1\nn_noise = 2\n";
  const auto below = run_sweep(parse_config_string(base + "[sim]\nT = 200\nt_tr = 160\ntheta_over_theta_c = [0.5]\n"));
  CHECK(-below.summary[0].U_mean < 5.0 * (1.0 / (2.0 * 256)) * 1.0);

  const auto above =
      run_sweep(parse_config_string(base + "[sim]\nT = 1000\nt_tr = 800\ntheta_over_theta_c = [2.0]\n"));
  CHECK(-above.summary[0].U_mean > 0.3);
  CHECK(above.summary[0].final_peak_count == 1.0);
}

TEST_CASE("command line interface") {
  const char* cli = std::getenv("NETMF_CLI");
  if (!cli) SKIP("NETMF_CLI not set");
  const std::string exe = cli;
  auto sh = [](const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };

  const auto cfg = scratch("cli.toml");
  {
    std::ofstream out(cfg);
    out << "[graph]\nfamily = \"ER\"\np = 0.5\nn = 16\n[potential]\na = [1.0, 2.0]\n"
           "[sim]\nT = 2.0\nt_tr = 1.0\ntheta_over_theta_c = [0.5, 2.0]\n"
           "[sweep]\nn_graph = 2\nn_noise = 2\n[observables]\nwindow = 2\n[pde]\nnodes = 4\nmodes = 8\nT = 5\n";
  }
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  CHECK(sh(exe + " sweep --config " + cfg.string() + " --out " + a.string()) == 0);
  CHECK(sh(exe + " sweep --config " + cfg.string() + " --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).size() > 100);

  const auto th = scratch("th.txt"), trace = scratch("trace.csv");
  CHECK(sh(exe + " thresholds --config " + cfg.string() + " --out " + th.string() + " --trace " + trace.string()) ==
        0);
  CHECK(slurp(th).find("theta_c     0.01") != std::string::npos);
  CHECK(slurp(trace).rfind("sign,theta,lambda_max,phi\n", 0) == 0);

  const auto ts = scratch("ts.csv"), pos = scratch("pos.csv");
  CHECK(sh(exe + " simulate --config " + cfg.string() + " --seed 3 --out " + ts.string() + " --dump-positions " +
           pos.string()) == 0);
  CHECK(slurp(ts).rfind("t,U,E_graph,r1,r2\n", 0) == 0);
  CHECK(slurp(pos).rfind("t,x_0,x_1,", 0) == 0);

  const auto sp = scratch("spec.csv");
  CHECK(sh(exe + " spectrum --config " + cfg.string() + " --count 2 --out " + sp.string()) == 0);
  CHECK(slurp(sp).rfind("index,eigenvalue\n1,0.5\n", 0) == 0);

  const auto fe = scratch("fe.csv");
  CHECK(sh(exe + " pde-evolve --config " + cfg.string() + " --out " + fe.string()) == 0);
  CHECK(slurp(fe).rfind("t,F,S,E_int\n", 0) == 0);
  CHECK(sh(exe + " pde-stationary --even --config " + cfg.string() + " --out " + scratch("st.csv").string()) == 0);

  const auto bad = scratch("bad.toml");
  {
    std::ofstream out(bad);
    out << "[sim]\ndt = -1\n";
  }
  CHECK(sh(exe + " sweep --config " + bad.string()) == 2);
  CHECK(sh(exe + " sweep --no-such-flag") == 2);
  CHECK(sh(exe + " sweep --config " + cfg.string() + " --format json --out " + scratch("s.json").string()) == 0);
  CHECK(slurp(scratch("s.json")).find("\"summary\"") != std::string::npos);
}
