#include "netmf/bifurcation.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <variant>

#include "netmf/error.hpp"
#include "netmf/specialfn.hpp"

namespace netmf {
namespace {

constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};
constexpr int kPanels = 32;

double sign_factor(BranchSign s) { return s == BranchSign::positive ? 1.0 : -1.0; }

void require_bichromatic(const MultichromaticPotential& pot) {
  if (pot.harmonics() != 2)
    throw DomainError("even-branch analysis is implemented for bichromatic potentials only");
  if (pot.mixed_sign()) throw DomainError("even-branch analysis rejects mixed-sign potentials");
  if (!(pot.amplitude(2) > 0.0)) throw DomainError("even-branch analysis needs a_2 > 0");
  if (pot.amplitude(1) == pot.amplitude(2))
    throw DomainError("degenerate bifurcation: modes 1 and 2 share the threshold");
}

template <class F>
double bisect_decreasing_root(F&& f, double lo, double hi, double tol, int cap, const char* what) {
  // f(lo) >= 0 >= f(hi)
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < cap; ++it) {
    mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::abs(hi)) return mid;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  if (hi - lo <= 1e3 * tol * std::abs(hi)) return mid;
  throw ConvergenceError(std::string(what) + " did not converge", f(mid));
}

}  // namespace

ThresholdReport primary_threshold(const MultichromaticPotential& pot, double beta, const SpectrumResult& spectrum) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!pot.any_positive()) throw DomainError("potential has no positive mode");
  ThresholdReport rep;
  bool any_eig = false;
  for (std::size_t l = 0; l < spectrum.eigenvalues.size(); ++l) {
    const double lam = spectrum.eigenvalues[l];
    if (!(lam > 0.0)) continue;
    const bool simple = l < spectrum.simple.size() ? spectrum.simple[l] : true;
    any_eig = any_eig || simple;
    for (int m = 1; m <= pot.harmonics(); ++m) {
      const double a = pot.amplitude(m);
      if (!(a > 0.0)) continue;
      rep.candidates.push_back({m, l + 1, 2.0 / (beta * lam * a), simple});
    }
  }
  if (!any_eig) throw DomainError("spectrum has no positive simple eigenvalue");
  double best = INFINITY;
  for (const auto& c : rep.candidates)
    if (c.simple && c.theta < best) {
      best = c.theta;
      rep.critical_mode = c.mode;
      rep.critical_eigen_index = c.eigen_index;
    }
  rep.theta_c = best;
  for (const auto& c : rep.candidates)
    if (c.simple && std::abs(c.theta - best) <= 1e-12 * best) rep.ties.push_back(c);
  return rep;
}

ThresholdReport primary_threshold(const MultichromaticPotential& pot, const Graphon& g, double beta) {
  const auto lead = analytic_leading_eigenpair(g);
  SpectrumResult s;
  s.eigenvalues = {lead.eigenvalue};
  s.simple = {true};
  return primary_threshold(pot, beta, s);
}

double second_variation_eigenvalue(int m, double lambda_l, double theta, double beta, double a_m) {
  if (m < 1) throw ConfigError("mode index must be positive");
  const double mm = static_cast<double>(m);
  return std::numbers::pi * mm * mm * (2.0 / beta - theta * a_m * lambda_l);
}

double power_law_branch_map(double gamma, double b, double c) {
  // y = t^{1/(1-2 gamma)} turns the integrand into t^nu Gamma(b c t^-nu) / (1 - 2 gamma),
  // which is bounded and exactly linear in c at small c.
  const double nu = gamma / (1.0 - 2.0 * gamma);
  double sum = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    // panels graded towards t = 0 where t^nu is not smooth
    const double t0 = std::pow(static_cast<double>(p) / kPanels, 2);
    const double t1 = std::pow(static_cast<double>(p + 1) / kPanels, 2);
    const double half = 0.5 * (t1 - t0), mid = 0.5 * (t1 + t0);
    for (std::size_t q = 0; q < kGaussX.size(); ++q)
      for (double s : {-1.0, 1.0}) {
        const double t = mid + s * half * kGaussX[q];
        const double tn = std::pow(t, nu);
        sum += half * kGaussW[q] * tn * bessel_ratio(b * c / tn);
      }
  }
  return sum / (1.0 - 2.0 * gamma);
}

EvenBranch solve_even_branch(const MultichromaticPotential& pot, const Graphon& g, double beta, double theta,
                             BranchSign sign, const EvenBranchOptions& options) {
  require_bichromatic(pot);
  if (!(beta > 0.0) || !(theta >= 0.0)) throw ConfigError("beta must be positive and theta nonnegative");
  if (options.grid_size < 2) throw ConfigError("even-branch grid needs at least 2 points");
  const double a2 = pot.amplitude(2);
  const auto lead = analytic_leading_eigenpair(g);
  const double lambda1 = lead.eigenvalue;

  EvenBranch br;
  br.theta = theta;
  br.beta = beta;
  br.sign = sign;
  br.onset = 2.0 / (beta * a2 * lambda1);
  const double b = beta * theta * a2;
  const std::size_t m = options.grid_size;

  // phi_1 on the grid: 1, or the cell average of x^-gamma
  std::vector<double> phi(m, 1.0);
  double gamma = 0.0;
  if (const auto* pl = std::get_if<PowerLaw>(&g.family())) {
    gamma = pl->gamma;
    const double e = 1.0 - gamma;
    for (std::size_t i = 0; i < m; ++i) {
      const double lo = static_cast<double>(i) / m, hi = static_cast<double>(i + 1) / m;
      phi[i] = (std::pow(hi, e) - std::pow(lo, e)) / (e * (hi - lo));
    }
  }
  auto rhs = [&](double c) {
    return g.is_power_law() ? power_law_branch_map(gamma, b, c) : lambda1 * bessel_ratio(b * c);
  };

  double c2 = 0.0;
  if (theta > br.onset && lambda1 > 0.0) {
    const double cmax = g.is_power_law() ? 1.0 / (1.0 - gamma) : lambda1;
    c2 = bisect_decreasing_root([&](double c) { return rhs(c) - c; }, 0.0, cmax, options.tolerance,
                                options.max_iterations, "even-branch amplitude");
  }
  br.amplitude = c2;
  br.residual = std::abs(c2 - rhs(c2));
  const double s = sign_factor(sign);
  br.x.resize(m);
  br.r2.resize(m);
  br.h2.resize(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    br.x[i] = (static_cast<double>(i) + 0.5) / m;
    br.r2[i] = s * c2 * phi[i];
    br.h2[i] = b * br.r2[i];
    worst = std::max(worst, phi[i]);
  }
  br.residual *= worst;
  return br;
}

std::vector<double> susceptibility_g(const EvenBranch& branch) {
  std::vector<double> out(branch.h2.size());
  std::transform(branch.h2.begin(), branch.h2.end(), out.begin(),
                 [](double h) { return 0.5 * (1.0 + bessel_ratio(h)); });
  return out;
}

SecondaryProblem::SecondaryProblem(const MultichromaticPotential& pot, const Graphon& g, double beta,
                                   BranchSign sign, const SpectrumResult& spectrum)
    : pot_(pot), graphon_(g), beta_(beta), sign_(sign), lambda1_(0.0), a1_(0.0), onset_(0.0), grid_(0) {
  require_bichromatic(pot);
  a1_ = pot.amplitude(1);
  if (!(a1_ > 0.0)) throw DomainError("secondary threshold needs a_1 > 0");
  if (spectrum.eigenvalues.empty() || !(spectrum.eigenvalues.front() > 0.0))
    throw DomainError("spectrum has no positive leading eigenvalue");
  lambda1_ = spectrum.eigenvalues.front();
  const double analytic = analytic_leading_eigenpair(g).eigenvalue;
  onset_ = 2.0 / (beta * pot.amplitude(2) * analytic);
  if (g.constant_degree()) {
    grid_ = 16;
    if (lambda1_ > analytic * (1.0 + 1e-9))
      spdlog::warn("{}: numeric top eigenvalue {} exceeds the constant-mode eigenvalue {}", g.describe(),
                   lambda1_, analytic);
  } else {
    grid_ = spectrum.grid_size;
    if (grid_ < 2) throw ConfigError("power-law secondary analysis needs a gridded spectrum");
    kernel_ = discretize(g, grid_);
  }
}

EvenBranch SecondaryProblem::branch(double theta) const {
  EvenBranchOptions opt;
  opt.grid_size = grid_;
  opt.tolerance = 1e-15;
  return solve_even_branch(pot_, graphon_, beta_, theta, sign_, opt);
}

std::vector<double> SecondaryProblem::g_profile(double theta) const { return susceptibility_g(branch(theta)); }

double SecondaryProblem::lambda_max(double theta) const {
  const auto g = g_profile(theta);
  if (graphon_.constant_degree()) return g.front() * lambda1_;
  Matrix sym(grid_, grid_);
  for (std::size_t i = 0; i < grid_; ++i)
    for (std::size_t j = 0; j < grid_; ++j) sym(i, j) = std::sqrt(g[i]) * kernel_(i, j) * std::sqrt(g[j]);
  SpectrumOptions opt;
  opt.tolerance = 1e-13;
  return numeric_spectrum(sym, 1, opt).eigenvalues.front();
}

double SecondaryProblem::lambda_max_nonsymmetric(double theta) const {
  const auto g = g_profile(theta);
  if (graphon_.constant_degree()) {
    // any grid works for a constant kernel row sum; use the discretized graphon
    const Matrix k = discretize(graphon_, 64);
    return dominant_eigenvalue_weighted(k, std::vector<double>(64, g.front()));
  }
  return dominant_eigenvalue_weighted(kernel_, g);
}

SecondaryReport secondary_threshold(const MultichromaticPotential& pot, const Graphon& g, double beta,
                                    BranchSign sign, const SpectrumResult& spectrum,
                                    const SecondaryOptions& options) {
  const SecondaryProblem prob(pot, g, beta, sign, spectrum);
  if (!(pot.amplitude(2) > pot.amplitude(1)))
    throw DomainError("secondary threshold needs a_2 > a_1 (the even branch must bifurcate first)");

  SecondaryReport rep;
  rep.sign = sign;
  rep.lower_bound = 1.0 / (beta * prob.a1() * prob.lambda1());
  rep.upper_bound = 2.0 / (beta * prob.a1() * prob.lambda1());
  const double lo = prob.onset() * options.lower_factor;
  const double hi = prob.onset() * options.upper_factor;
  const std::size_t n = std::max<std::size_t>(options.trace_points, 2);

  std::vector<double> phis;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    const double lm = prob.lambda_max(th);
    rep.lambda_max_trace.emplace_back(th, lm);
    phis.push_back(beta * th * prob.a1() * lm);
  }
  if (phis.front() >= 1.0)
    throw BracketingError("Phi already exceeds 1 at the start of the search interval");

  std::size_t k = 1;
  while (k < n && phis[k] < 1.0) ++k;
  if (k == n) {
    if (sign == BranchSign::negative) return rep;  // absent
    throw BracketingError("Phi(theta) stays below 1 on the positive branch search interval");
  }
  double a = rep.lambda_max_trace[k - 1].first;
  double b = rep.lambda_max_trace[k].first;
  for (int it = 0; it < options.max_iterations && b - a > options.tolerance * b; ++it) {
    const double mid = 0.5 * (a + b);
    (prob.phi(mid) < 1.0 ? a : b) = mid;
  }
  const double root = 0.5 * (a + b);
  rep.theta_c2 = root;
  rep.phi_at_root = prob.phi(root);
  return rep;
}

}  // namespace netmf
