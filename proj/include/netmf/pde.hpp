#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "netmf/graphon.hpp"
#include "netmf/matrix.hpp"
#include "netmf/potential.hpp"

namespace netmf {

// rho(u, x_i) = (1/2pi) (1 + sum_j A_j(x_i) cos(ju) + B_j(x_i) sin(ju)), j = 1..M.
class MeanFieldState {
 public:
  MeanFieldState() = default;
  // The uniform density on m nodes with M modes.
  MeanFieldState(std::size_t nodes, int modes);

  std::size_t nodes() const noexcept { return nodes_; }
  int modes() const noexcept { return modes_; }
  double& A(std::size_t i, int j) { return a_[i * modes_ + (j - 1)]; }
  double A(std::size_t i, int j) const { return a_[i * modes_ + (j - 1)]; }
  double& B(std::size_t i, int j) { return b_[i * modes_ + (j - 1)]; }
  double B(std::size_t i, int j) const { return b_[i * modes_ + (j - 1)]; }
  std::vector<double>& cos_coeffs() noexcept { return a_; }
  const std::vector<double>& cos_coeffs() const noexcept { return a_; }
  std::vector<double>& sin_coeffs() noexcept { return b_; }
  const std::vector<double>& sin_coeffs() const noexcept { return b_; }

  std::vector<double> x_grid() const;   // cell midpoints
  double density(std::size_t i, double u) const;
  double max_abs_coeff() const;
  void write_csv(std::ostream& os) const;  // x_index,j,A_j,B_j

  double time = 0.0;

 private:
  std::size_t nodes_ = 0;
  int modes_ = 0;
  std::vector<double> a_, b_;
};

// theta, beta, potential and the kernel W_N on the PDE's x-grid.
struct MeanFieldModel {
  MeanFieldModel(double theta, double beta, MultichromaticPotential potential, Matrix kernel);
  MeanFieldModel(double theta, double beta, MultichromaticPotential potential, const Graphon& g, std::size_t nodes);

  double theta;
  double beta;
  MultichromaticPotential potential;
  Matrix kernel;

  std::size_t nodes() const noexcept { return kernel.rows(); }
};

struct FreeEnergyParts {
  double total = 0.0;     // S / beta + E_int
  double entropy = 0.0;   // S = (1/m) sum_i integral rho log rho du
  double interaction = 0.0;
  std::size_t clamped = 0;  // grid values raised to the entropy floor
};

// Right-hand side of the Galerkin system, returned in state layout.
MeanFieldState rhs(const MeanFieldState& state, const MeanFieldModel& model);

FreeEnergyParts free_energy(const MeanFieldState& state, const MeanFieldModel& model);

struct EvolveOptions {
  std::size_t record_stride = 1;  // steps between free-energy samples
  double blowup = 1e3;
};

struct PdeTrajectory {
  std::vector<double> times;
  std::vector<FreeEnergyParts> energy;
  MeanFieldState final_state;
  void write_energy_csv(std::ostream& os) const;  // t,F,S,E_int
};

// Exponential-integrator Euler: exact diffusion, explicit transport.
PdeTrajectory evolve(const MeanFieldState& state0, const MeanFieldModel& model, double T, double dt,
                     const EvolveOptions& options = {});

// f(rho) = exp(-beta theta Phi[rho]) / Z per fibre, projected on the modes.
MeanFieldState gibbs_map(const MeanFieldState& state, const MeanFieldModel& model);

enum class Symmetry {
  none,
  pi_periodic,  // keep only even cosine modes, the invariant subspace of the even branch
};

struct FixedPointOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  std::size_t max_iterations = 200000;
  Symmetry symmetry = Symmetry::none;
};

// Damped iteration rho <- (1 - d) rho + d f(rho). Throws ConvergenceError at the cap.
MeanFieldState stationary_fixed_point(const MeanFieldModel& model, const MeanFieldState& init,
                                      const FixedPointOptions& options = {});

// Largest real part of the spectrum of the rhs Jacobian restricted to odd
// modes, linearized about a pi-periodic state (finite differences).
double odd_mode_growth_rate(const MeanFieldState& state, const MeanFieldModel& model);

}  // namespace netmf
