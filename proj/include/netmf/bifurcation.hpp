#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "netmf/graphon.hpp"
#include "netmf/matrix.hpp"
#include "netmf/potential.hpp"
#include "netmf/spectral.hpp"

namespace netmf {

struct ThresholdCandidate {
  int mode = 0;                // m, 1-based
  std::size_t eigen_index = 0;  // l, 1-based
  double theta = 0.0;          // 2 / (beta lambda_l a_m)
  bool simple = true;
};

struct ThresholdReport {
  double theta_c = 0.0;
  int critical_mode = 0;
  std::size_t critical_eigen_index = 0;
  std::vector<ThresholdCandidate> candidates;
  std::vector<ThresholdCandidate> ties;  // every simple candidate attaining theta_c

  bool degenerate() const noexcept { return ties.size() > 1; }
};

// Minimum of 2/(beta lambda_l a_m) over a_m > 0 and simple lambda_l > 0.
// DomainError when no mode or no eigenvalue qualifies.
ThresholdReport primary_threshold(const MultichromaticPotential& pot, double beta,
                                  const SpectrumResult& spectrum);

// Same, using only the closed-form leading eigenvalue of the graphon.
ThresholdReport primary_threshold(const MultichromaticPotential& pot, const Graphon& g, double beta);

// xi_{m,l} = pi m^2 (2/beta - theta a_m lambda_l).
double second_variation_eigenvalue(int m, double lambda_l, double theta, double beta, double a_m);

enum class BranchSign { positive, negative };

struct EvenBranch {
  double theta = 0.0;
  double beta = 0.0;
  BranchSign sign = BranchSign::positive;
  double onset = 0.0;      // mode-2 threshold 2/(beta a_2 lambda_1)
  double amplitude = 0.0;  // C_2 >= 0; R_2 = +-C_2 phi_1
  std::vector<double> x;   // midpoint grid
  std::vector<double> r2;
  std::vector<double> h2;  // beta theta a_2 R_2
  double residual = 0.0;   // sup |R_2 - L[Gamma(h_2)]|
};

struct EvenBranchOptions {
  std::size_t grid_size = 256;
  double tolerance = 1e-12;  // relative bracket width
  int max_iterations = 200;
};

// Requires a bichromatic potential with a_2 > 0, a_1 >= 0 and a_1 != a_2.
EvenBranch solve_even_branch(const MultichromaticPotential& pot, const Graphon& g, double beta, double theta,
                             BranchSign sign, const EvenBranchOptions& options = {});

// g(x) = (1 + Gamma(h_2(x))) / 2.
std::vector<double> susceptibility_g(const EvenBranch& branch);

// Right-hand side C -> integral of y^-gamma Gamma(b C y^-gamma) over (0,1), by the quadrature used in
// solve_even_branch. Exposed for tests.
double power_law_branch_map(double gamma, double b, double c);

struct SecondaryOptions {
  double lower_factor = 1.0 + 1e-6;  // search starts at onset * lower_factor
  double upper_factor = 10.0;
  std::size_t trace_points = 32;
  double tolerance = 1e-14;  // relative bracket width
  int max_iterations = 200;
};

struct SecondaryReport {
  std::optional<double> theta_c2;
  BranchSign sign = BranchSign::positive;
  std::vector<std::pair<double, double>> lambda_max_trace;  // (theta, lambda_max(A))
  double lower_bound = 0.0;  // 1/(beta a_1 lambda_1)
  double upper_bound = 0.0;  // 2/(beta a_1 lambda_1)
  double phi_at_root = 0.0;
};

// Evaluates A(theta) = L o M_g along the even branch.
class SecondaryProblem {
 public:
  // The spectrum fixes lambda_1 and, for the power-law family, the kernel grid.
  SecondaryProblem(const MultichromaticPotential& pot, const Graphon& g, double beta, BranchSign sign,
                   const SpectrumResult& spectrum);

  double onset() const noexcept { return onset_; }
  double lambda1() const noexcept { return lambda1_; }
  double a1() const noexcept { return a1_; }

  EvenBranch branch(double theta) const;
  std::vector<double> g_profile(double theta) const;
  // Largest eigenvalue of the symmetrized kernel sqrt(g) W sqrt(g).
  double lambda_max(double theta) const;
  // Same eigenvalue by power iteration on the non-symmetric product L M_g.
  double lambda_max_nonsymmetric(double theta) const;
  double phi(double theta) const { return beta_ * theta * a1_ * lambda_max(theta); }

 private:
  MultichromaticPotential pot_;
  Graphon graphon_;
  double beta_;
  BranchSign sign_;
  double lambda1_;
  double a1_;
  double onset_;
  std::size_t grid_;
  Matrix kernel_;  // power-law family only
};

// Solves beta theta a_1 lambda_max(A(theta)) = 1 by bisection. Returns an empty
// theta_c2 when the negative branch never crosses; throws BracketingError when
// the positive branch does not cross on the search interval.
SecondaryReport secondary_threshold(const MultichromaticPotential& pot, const Graphon& g, double beta,
                                    BranchSign sign, const SpectrumResult& spectrum,
                                    const SecondaryOptions& options = {});

}  // namespace netmf
