#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "netmf/bifurcation.hpp"
#include "netmf/error.hpp"
#include "netmf/specialfn.hpp"
#include "oracles.hpp"

using namespace netmf;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("primary threshold from the analytic spectrum") {
  const auto er = Graphon::erdos_renyi(0.5);
  auto r = primary_threshold(MultichromaticPotential({1.0}), er, 200.0);
  CHECK(r.theta_c == Approx(0.02).epsilon(1e-15));
  CHECK(r.critical_mode == 1);
  CHECK(r.critical_eigen_index == 1);

  r = primary_threshold(MultichromaticPotential({1.0, 2.0}), er, 200.0);
  CHECK(r.theta_c == Approx(0.01).epsilon(1e-15));
  CHECK(r.critical_mode == 2);

  r = primary_threshold(MultichromaticPotential({1.0, 2.0}), Graphon::power_law(0.3, 0.4), 200.0);
  CHECK(r.theta_c == Approx(0.002).epsilon(1e-14));

  r = primary_threshold(MultichromaticPotential({1.0, 2.0}), Graphon::small_world(0.4, 0.04), 200.0);
  CHECK(r.theta_c == Approx(0.0625).epsilon(1e-14));
}

TEST_CASE("primary threshold over a numeric spectrum") {
  SpectrumResult s;
  s.eigenvalues = {0.5, 0.2, 0.2, -0.3};
  s.simple = {true, false, false, true};
  s.grid_size = 8;
  const auto r = primary_threshold(MultichromaticPotential({1.0, -1.0, 3.0}), 100.0, s);
  CHECK(r.critical_mode == 3);
  CHECK(r.critical_eigen_index == 1);
  CHECK(r.theta_c == Approx(2.0 / (100.0 * 0.5 * 3.0)).epsilon(1e-15));
  // the table lists positive modes against positive eigenvalues, flagging multiplets
  for (const auto& c : r.candidates) {
    CHECK(c.mode != 2);
    CHECK(c.eigen_index != 4);
    CHECK(c.simple == (c.eigen_index == 1));
  }
  CHECK(r.candidates.size() == 6);
}

TEST_CASE("ties are reported") {
  const auto r = primary_threshold(MultichromaticPotential({2.0, 2.0}), Graphon::erdos_renyi(0.5), 200.0);
  CHECK(r.degenerate());
  CHECK(r.ties.size() == 2);
}

TEST_CASE("H-stable potentials have no threshold") {
  CHECK_THROWS_AS(primary_threshold(MultichromaticPotential({-1.0, -2.0}), Graphon::erdos_renyi(0.5), 200.0),
                  DomainError);
}

TEST_CASE("second variation crosses zero at the threshold") {
  CHECK(second_variation_eigenvalue(2, 0.5, 0.01, 200.0, 2.0) == Approx(0.0).margin(1e-16));
  CHECK(second_variation_eigenvalue(1, 0.5, 0.01, 200.0, 1.0) == Approx(pi * (0.01 - 0.005)).epsilon(1e-14));
  for (int m : {1, 2, 5}) CHECK(second_variation_eigenvalue(m, 0.5, 0.0, 200.0, 3.0) == Approx(2 * pi * m * m / 200.0));
}

TEST_CASE("threshold zeros the second variation for random triples") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ub(1.0, 500.0), ua(0.05, 5.0), ul(0.01, 3.0);
  for (int t = 0; t < 50; ++t) {
    const double beta = ub(gen), a = ua(gen), lam = ul(gen);
    SpectrumResult s;
    s.eigenvalues = {lam};
    s.simple = {true};
    s.grid_size = 1;
    const auto r = primary_threshold(MultichromaticPotential({a}), beta, s);
    CHECK(std::abs(second_variation_eigenvalue(1, lam, r.theta_c, beta, a)) <= 1e-14 * pi * 2.0 / beta);
  }
}

TEST_CASE("even branch: below onset only the trivial solution") {
  const auto b = solve_even_branch(MultichromaticPotential({1.0, 2.0}), Graphon::erdos_renyi(0.5), 200.0, 0.005,
                                   BranchSign::positive);
  CHECK(b.amplitude == 0.0);
  CHECK(b.onset == Approx(0.01));
}

TEST_CASE("even branch satisfies the self-consistency equation") {
  const auto pot = MultichromaticPotential({1.0, 2.0});
  for (double theta : {0.0101, 0.012, 0.02, 0.05}) {
    const auto b = solve_even_branch(pot, Graphon::erdos_renyi(0.5), 200.0, theta, BranchSign::positive);
    // ER: C = p * Gamma(beta theta a_2 C)
    CHECK(b.amplitude == Approx(0.5 * bessel_ratio(200.0 * theta * 2.0 * b.amplitude)).epsilon(1e-11));
    CHECK(b.amplitude > 0.0);
    CHECK(b.residual < 1e-10);
  }
  const auto big = solve_even_branch(pot, Graphon::erdos_renyi(0.5), 200.0, 10.0, BranchSign::positive);
  CHECK(big.amplitude == Approx(0.5).epsilon(1e-3));
}

TEST_CASE("even branch: square-root pitchfork") {
  const auto pot = MultichromaticPotential({1.0, 2.0});
  const auto g = Graphon::erdos_renyi(0.5);
  std::vector<double> lx, ly;
  for (double f = 1.001; f <= 1.05; f += 0.007) {
    const auto b = solve_even_branch(pot, g, 200.0, f * 0.01, BranchSign::positive);
    lx.push_back(std::log(f * 0.01 - 0.01));
    ly.push_back(std::log(b.amplitude));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope > 0.4);
  CHECK(slope < 0.6);
}

TEST_CASE("even branch on the power-law graphon") {
  const auto pot = MultichromaticPotential({1.0, 2.0});
  const auto g = Graphon::power_law(0.3, 0.4);
  const auto b = solve_even_branch(pot, g, 200.0, 0.003, BranchSign::positive);
  CHECK(b.amplitude > 0.0);
  // C = int y^-gamma Gamma(beta theta a_2 C y^-gamma) dy, evaluated here by brute force
  const double k = 200.0 * 0.003 * 2.0 * b.amplitude;
  double ref = 0.0;
  const std::size_t pts = 2'000'000;
  for (std::size_t i = 0; i < pts; ++i) {
    // y = s^{1/(1-gamma)} removes the endpoint singularity
    const double s = (i + 0.5) / pts;
    const double y = std::pow(s, 1.0 / 0.7);
    ref += std::pow(y, -0.3) * bessel_ratio(k * std::pow(y, -0.3)) * (1.0 / 0.7) * std::pow(s, 0.3 / 0.7);
  }
  ref /= pts;
  CHECK(b.amplitude == Approx(ref).epsilon(1e-6));
  CHECK(power_law_branch_map(0.3, 200.0 * 0.003 * 2.0, b.amplitude) == Approx(b.amplitude).epsilon(1e-10));
}

TEST_CASE("even branch preconditions") {
  const auto g = Graphon::erdos_renyi(0.5);
  CHECK_THROWS_AS(solve_even_branch(MultichromaticPotential({1.0}), g, 200.0, 0.1, BranchSign::positive),
                  DomainError);
  CHECK_THROWS_AS(solve_even_branch(MultichromaticPotential({1.0, -2.0}), g, 200.0, 0.1, BranchSign::positive),
                  DomainError);
  CHECK_THROWS_AS(solve_even_branch(MultichromaticPotential({2.0, 2.0}), g, 200.0, 0.1, BranchSign::positive),
                  DomainError);
}

TEST_CASE("susceptibility profile") {
  EvenBranch b;
  b.h2 = {0.0, 1.0, 1e6};
  const auto g = susceptibility_g(b);
  CHECK(g[0] == 0.5);
  CHECK(g[1] == Approx(0.7231949830).epsilon(1e-10));
  CHECK(g[2] == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("secondary threshold on ER") {
  const auto pot = MultichromaticPotential({1.0, 2.0});
  const auto g = Graphon::erdos_renyi(0.5);
  const auto spectrum = numeric_spectrum(discretize(g, 64), 1);
  const auto rep = secondary_threshold(pot, g, 200.0, BranchSign::positive, spectrum);
  REQUIRE(rep.theta_c2.has_value());
  CHECK(*rep.theta_c2 > 0.01);
  CHECK(*rep.theta_c2 < 0.02);
  CHECK(rep.lower_bound == Approx(0.01));
  CHECK(rep.upper_bound == Approx(0.02));
  CHECK(std::abs(rep.phi_at_root - 1.0) < 1e-8);

  // ER closed form: lambda_max = p * (1 + Gamma(h_2)) / 2
  const double th = *rep.theta_c2;
  const auto b = solve_even_branch(pot, g, 200.0, th, BranchSign::positive);
  const double phi = 200.0 * th * 1.0 * 0.5 * 0.5 * (1.0 + bessel_ratio(200.0 * th * 2.0 * b.amplitude));
  CHECK(phi == Approx(1.0).epsilon(1e-8));

  // Phi tends to a_1/a_2 at onset; the offset shrinks like sqrt(theta - theta_c)
  SecondaryProblem prob(pot, g, 200.0, BranchSign::positive, spectrum);
  const double d9 = prob.phi(prob.onset() * (1 + 1e-9)) - 0.5;
  const double d11 = prob.phi(prob.onset() * (1 + 1e-11)) - 0.5;
  CHECK(d9 > 0.0);
  CHECK(d9 < 1e-4);
  CHECK(d9 / d11 == Approx(10.0).epsilon(0.05));
  CHECK(prob.lambda_max(0.015) == Approx(prob.lambda_max_nonsymmetric(0.015)).epsilon(1e-9));
}

TEST_CASE("secondary threshold: negative branch never crosses on ER") {
  const auto pot = MultichromaticPotential({1.0, 2.0});
  const auto g = Graphon::erdos_renyi(0.5);
  const auto spectrum = numeric_spectrum(discretize(g, 64), 1);
  const auto rep = secondary_threshold(pot, g, 200.0, BranchSign::negative, spectrum);
  CHECK_FALSE(rep.theta_c2.has_value());
  REQUIRE(rep.lambda_max_trace.size() > 2);
  for (const auto& [theta, lmax] : rep.lambda_max_trace) CHECK(200.0 * theta * lmax < 1.0);
}

TEST_CASE("secondary threshold on the power-law graphon") {
  const auto pot = MultichromaticPotential({1.0, 2.0});
  const auto g = Graphon::power_law(0.3, 0.4);
  const auto spectrum = numeric_spectrum(discretize(g, 128), 1);
  const auto rep = secondary_threshold(pot, g, 200.0, BranchSign::positive, spectrum);
  REQUIRE(rep.theta_c2.has_value());
  const double l1 = spectrum.eigenvalues[0];
  CHECK(*rep.theta_c2 > 1.0 / (200.0 * l1));
  CHECK(*rep.theta_c2 < 2.0 / (200.0 * l1));
  CHECK(std::abs(rep.phi_at_root - 1.0) < 1e-8);
}
