#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "netmf/graphon.hpp"
#include "netmf/matrix.hpp"

namespace netmf {

// Eigenpairs of the midpoint quadrature L_m f = (1/m) K f, descending.
struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenfunctions;  // (1/m) sum phi^2 = 1
  std::vector<bool> simple;                         // false inside a multiplet
  std::size_t grid_size = 0;

  // Top eigenvalue that is positive and simple, with its 0-based index; -1 if none.
  std::ptrdiff_t leading_simple_positive() const;
  void write_csv(std::ostream& os) const;  // "index,eigenvalue"
};

struct LeadingEigenpair {
  enum class Shape { constant, power };
  double eigenvalue = 0.0;
  Shape shape = Shape::constant;
  double exponent = 0.0;  // phi(x) = x^-exponent for Shape::power

  // Unnormalized eigenfunction value.
  double operator()(double x) const;
};

LeadingEigenpair analytic_leading_eigenpair(const Graphon& g);

struct SpectrumOptions {
  double tolerance = 1e-10;           // residual relative to the spectral radius
  std::size_t max_iterations = 20000;
  double multiplet_tolerance = 1e-6;  // relative eigenvalue gap
};

// Block subspace iteration with Gram-Schmidt and Rayleigh-Ritz. Throws
// ConvergenceError when the residual target is not met within the cap.
SpectrumResult numeric_spectrum(const Matrix& kernel, std::size_t count,
                                const SpectrumOptions& options = {});

// (1/m) K f.
std::vector<double> apply_operator(const Matrix& kernel, std::span<const double> f);

// Dominant eigenvalue of the non-symmetric product f -> (1/m) K (w .* f) by power iteration.
double dominant_eigenvalue_weighted(const Matrix& kernel, std::span<const double> weights,
                                    double tolerance = 1e-13, std::size_t max_iterations = 100000);

// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues (unsorted) and overwrites `vectors` with column eigenvectors.
std::vector<double> jacobi_eigen(Matrix a, Matrix& vectors);

}  // namespace netmf
