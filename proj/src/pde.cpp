#include "netmf/pde.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "netmf/error.hpp"
#include "netmf/spectral.hpp"

namespace netmf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNegativeTolerance = 1e-6;
constexpr double kEntropyFloor = 1e-12;

// cos(j u_p), sin(j u_p) on a uniform grid of the circle, j = 1..J.
struct Tables {
  int J = 0;
  std::size_t points = 0;
  std::vector<double> c, s;  // (j - 1) * points + p

  Tables(int J_, std::size_t points_) : J(J_), points(points_), c(J_ * points_), s(J_ * points_) {
    for (int j = 1; j <= J; ++j)
      for (std::size_t p = 0; p < points; ++p) {
        const double u = kTwoPi * static_cast<double>(p) / static_cast<double>(points);
        c[(j - 1) * points + p] = std::cos(j * u);
        s[(j - 1) * points + p] = std::sin(j * u);
      }
  }
  double cj(int j, std::size_t p) const { return c[(j - 1) * points + p]; }
  double sj(int j, std::size_t p) const { return s[(j - 1) * points + p]; }
};

void check_layout(const MeanFieldState& st, const MeanFieldModel& model) {
  if (st.nodes() != model.nodes()) throw ConfigError("state and kernel grids differ");
  if (st.modes() < 1) throw ConfigError("state needs at least one mode");
}

// L applied to the first n cosine and sine moments: rc[k-1][i], rs[k-1][i].
struct Coupling {
  std::vector<std::vector<double>> rc, rs;
};

Coupling couple(const MeanFieldState& st, const MeanFieldModel& model) {
  const int n = model.potential.harmonics();
  const std::size_t m = st.nodes();
  Coupling out;
  std::vector<double> mk(m), sk(m);
  for (int k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      mk[i] = k <= st.modes() ? 0.5 * st.A(i, k) : 0.0;
      sk[i] = k <= st.modes() ? 0.5 * st.B(i, k) : 0.0;
    }
    out.rc.push_back(apply_operator(model.kernel, mk));
    out.rs.push_back(apply_operator(model.kernel, sk));
  }
  return out;
}

class Galerkin {
 public:
  Galerkin(const MeanFieldModel& model, int modes)
      : model_(model),
        modes_(modes),
        n_(model.potential.harmonics()),
        tab_(std::max(modes, n_), std::max<std::size_t>(4 * modes, 2 * modes + n_ + 1)),
        flux_(tab_.points) {}

  // Transport part: dA_j = 2 theta j int F sin(ju), dB_j = -2 theta j int F cos(ju), F = rho dPhi/du.
  void nonlinear(const MeanFieldState& st, MeanFieldState& out) {
    check_layout(st, model_);
    const std::size_t m = st.nodes();
    const std::size_t P = tab_.points;
    const Coupling cp = couple(st, model_);
    const auto a = model_.potential.amplitudes();
    const double w = kTwoPi / static_cast<double>(P);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < P; ++p) {
        double r = 1.0;
        for (int j = 1; j <= modes_; ++j) r += st.A(i, j) * tab_.cj(j, p) + st.B(i, j) * tab_.sj(j, p);
        r /= kTwoPi;
        if (r < -kNegativeTolerance)
          throw RealizabilityError("density became negative beyond tolerance at node " + std::to_string(i));
        double dphi = 0.0;
        for (int k = 1; k <= n_; ++k)
          dphi += a[k - 1] * k * (tab_.sj(k, p) * cp.rc[k - 1][i] - tab_.cj(k, p) * cp.rs[k - 1][i]);
        flux_[p] = r * dphi;
      }
      for (int j = 1; j <= modes_; ++j) {
        double ic = 0.0, is = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
          ic += flux_[p] * tab_.cj(j, p);
          is += flux_[p] * tab_.sj(j, p);
        }
        out.A(i, j) = 2.0 * model_.theta * j * is * w;
        out.B(i, j) = -2.0 * model_.theta * j * ic * w;
      }
    }
  }

 private:
  const MeanFieldModel& model_;
  int modes_;
  int n_;
  Tables tab_;
  std::vector<double> flux_;
};

std::size_t fine_points(int modes) { return std::max<std::size_t>(256, 8 * static_cast<std::size_t>(modes)); }

}  // namespace

MeanFieldState::MeanFieldState(std::size_t nodes, int modes)
    : nodes_(nodes), modes_(modes), a_(nodes * modes, 0.0), b_(nodes * modes, 0.0) {
  if (nodes < 1 || modes < 1) throw ConfigError("mean-field state needs nodes >= 1 and modes >= 1");
}

std::vector<double> MeanFieldState::x_grid() const {
  std::vector<double> x(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) x[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(nodes_);
  return x;
}

double MeanFieldState::density(std::size_t i, double u) const {
  double r = 1.0;
  for (int j = 1; j <= modes_; ++j) r += A(i, j) * std::cos(j * u) + B(i, j) * std::sin(j * u);
  return r / kTwoPi;
}

double MeanFieldState::max_abs_coeff() const {
  double v = 0.0;
  for (double x : a_) v = std::max(v, std::abs(x));
  for (double x : b_) v = std::max(v, std::abs(x));
  return v;
}

void MeanFieldState::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "x_index,j,A_j,B_j\n";
  for (std::size_t i = 0; i < nodes_; ++i)
    for (int j = 1; j <= modes_; ++j) os << i << ',' << j << ',' << A(i, j) << ',' << B(i, j) << '\n';
  os.precision(old);
}

MeanFieldModel::MeanFieldModel(double theta_, double beta_, MultichromaticPotential potential_, Matrix kernel_)
    : theta(theta_), beta(beta_), potential(std::move(potential_)), kernel(std::move(kernel_)) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
  if (kernel.rows() != kernel.cols() || kernel.rows() < 1) throw ConfigError("kernel must be square");
}

MeanFieldModel::MeanFieldModel(double theta_, double beta_, MultichromaticPotential potential_, const Graphon& g,
                               std::size_t nodes)
    : MeanFieldModel(theta_, beta_, std::move(potential_), discretize(g, nodes)) {}

MeanFieldState rhs(const MeanFieldState& state, const MeanFieldModel& model) {
  MeanFieldState out(state.nodes(), state.modes());
  Galerkin(model, state.modes()).nonlinear(state, out);
  for (std::size_t i = 0; i < state.nodes(); ++i)
    for (int j = 1; j <= state.modes(); ++j) {
      const double c = j * j / model.beta;
      out.A(i, j) -= c * state.A(i, j);
      out.B(i, j) -= c * state.B(i, j);
    }
  out.time = state.time;
  return out;
}

FreeEnergyParts free_energy(const MeanFieldState& state, const MeanFieldModel& model) {
  check_layout(state, model);
  const std::size_t m = state.nodes();
  const int M = state.modes();
  const Tables tab(M, fine_points(M));
  const double w = kTwoPi / static_cast<double>(tab.points);
  FreeEnergyParts out;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t p = 0; p < tab.points; ++p) {
      double r = 1.0;
      for (int j = 1; j <= M; ++j) r += state.A(i, j) * tab.cj(j, p) + state.B(i, j) * tab.sj(j, p);
      r /= kTwoPi;
      if (r < -kNegativeTolerance) throw RealizabilityError("free energy of a negative density");
      if (r < kEntropyFloor) {
        r = kEntropyFloor;
        ++out.clamped;
      }
      s += r * std::log(r);
    }
    out.entropy += s * w;
  }
  out.entropy /= static_cast<double>(m);

  const Coupling cp = couple(state, model);
  double e = 0.0;
  for (int k = 1; k <= model.potential.harmonics(); ++k) {
    if (k > M) break;
    double q = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      q += 0.5 * state.A(i, k) * cp.rc[k - 1][i] + 0.5 * state.B(i, k) * cp.rs[k - 1][i];
    e -= model.potential.amplitude(k) * q / static_cast<double>(m);
  }
  out.interaction = 0.5 * model.theta * e;
  out.total = out.entropy / model.beta + out.interaction;
  return out;
}

void PdeTrajectory::write_energy_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "t,F,S,E_int\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    os << times[k] << ',' << energy[k].total << ',' << energy[k].entropy << ',' << energy[k].interaction << '\n';
  os.precision(old);
}

PdeTrajectory evolve(const MeanFieldState& state0, const MeanFieldModel& model, double T, double dt,
                     const EvolveOptions& options) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw ConfigError("pde dt must be positive and T nonnegative");
  if (options.record_stride < 1) throw ConfigError("pde record stride must be positive");
  check_layout(state0, model);
  const int M = state0.modes();
  const std::size_t m = state0.nodes();

  // transport CFL-like guard: theta * max|L| * sum a_k k * M * dt
  double row = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (double v : model.kernel.row(i)) s += std::abs(v);
    row = std::max(row, s / static_cast<double>(m));
  }
  double ak = 0.0;
  for (int k = 1; k <= model.potential.harmonics(); ++k) ak += std::abs(model.potential.amplitude(k)) * k;
  if (std::abs(model.theta) * row * ak * M * dt > 1.0)
    throw ConfigError("pde dt violates the transport stability guard");

  std::vector<double> decay(M), gain(M);
  for (int j = 1; j <= M; ++j) {
    const double c = j * j / model.beta;
    decay[j - 1] = std::exp(-c * dt);
    gain[j - 1] = -std::expm1(-c * dt) / c;
  }

  Galerkin gal(model, M);
  MeanFieldState st = state0;
  MeanFieldState nl(m, M);
  PdeTrajectory traj;
  traj.times.push_back(st.time);
  traj.energy.push_back(free_energy(st, model));
  const auto steps = static_cast<std::uint64_t>(std::llround(T / dt));
  const double t0 = st.time;
  for (std::uint64_t s = 1; s <= steps; ++s) {
    gal.nonlinear(st, nl);
    for (std::size_t i = 0; i < m; ++i)
      for (int j = 1; j <= M; ++j) {
        st.A(i, j) = decay[j - 1] * st.A(i, j) + gain[j - 1] * nl.A(i, j);
        st.B(i, j) = decay[j - 1] * st.B(i, j) + gain[j - 1] * nl.B(i, j);
      }
    st.time = t0 + static_cast<double>(s) * dt;
    const double norm = st.max_abs_coeff();
    if (!(norm <= options.blowup))
      throw NumericalError("pde coefficients blew up at t = " + std::to_string(st.time));
    if (s % options.record_stride == 0 || s == steps) {
      traj.times.push_back(st.time);
      traj.energy.push_back(free_energy(st, model));
    }
  }
  traj.final_state = std::move(st);
  return traj;
}

MeanFieldState gibbs_map(const MeanFieldState& state, const MeanFieldModel& model) {
  check_layout(state, model);
  const std::size_t m = state.nodes();
  const int M = state.modes();
  const int n = model.potential.harmonics();
  const Tables tab(std::max(M, n), fine_points(M));
  const Coupling cp = couple(state, model);
  const double bt = model.beta * model.theta;
  MeanFieldState out(m, M);
  out.time = state.time;
  std::vector<double> psi(tab.points);
  for (std::size_t i = 0; i < m; ++i) {
    double top = -INFINITY;
    for (std::size_t p = 0; p < tab.points; ++p) {
      double v = 0.0;
      for (int k = 1; k <= n; ++k)
        v += model.potential.amplitude(k) * (tab.cj(k, p) * cp.rc[k - 1][i] + tab.sj(k, p) * cp.rs[k - 1][i]);
      psi[p] = bt * v;
      top = std::max(top, psi[p]);
    }
    double z = 0.0;
    for (double& v : psi) {
      v = std::exp(v - top);
      z += v;
    }
    for (int j = 1; j <= M; ++j) {
      double c = 0.0, s = 0.0;
      for (std::size_t p = 0; p < tab.points; ++p) {
        c += psi[p] * tab.cj(j, p);
        s += psi[p] * tab.sj(j, p);
      }
      out.A(i, j) = 2.0 * c / z;
      out.B(i, j) = 2.0 * s / z;
    }
  }
  return out;
}

namespace {

void project(MeanFieldState& st, Symmetry sym) {
  if (sym == Symmetry::none) return;
  for (std::size_t i = 0; i < st.nodes(); ++i)
    for (int j = 1; j <= st.modes(); ++j) {
      st.B(i, j) = 0.0;
      if (j % 2 == 1) st.A(i, j) = 0.0;
    }
}

}  // namespace

MeanFieldState stationary_fixed_point(const MeanFieldModel& model, const MeanFieldState& init,
                                      const FixedPointOptions& options) {
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  check_layout(init, model);
  MeanFieldState st = init;
  project(st, options.symmetry);
  double change = INFINITY;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    MeanFieldState next = gibbs_map(st, model);
    project(next, options.symmetry);
    change = 0.0;
    auto blend = [&](std::vector<double>& cur, const std::vector<double>& f) {
      for (std::size_t q = 0; q < cur.size(); ++q) {
        const double upd = (1.0 - options.damping) * cur[q] + options.damping * f[q];
        change = std::max(change, std::abs(upd - cur[q]));
        cur[q] = upd;
      }
    };
    blend(st.cos_coeffs(), next.cos_coeffs());
    blend(st.sin_coeffs(), next.sin_coeffs());
    if (change < options.tolerance) return st;
  }
  throw ConvergenceError("stationary fixed point iteration hit the cap", change);
}

double odd_mode_growth_rate(const MeanFieldState& state, const MeanFieldModel& model) {
  check_layout(state, model);
  // About an even, pi-periodic state the reflection u -> -u decouples the
  // cosine and sine perturbations; each block is solved on its own.
  double growth = -std::numeric_limits<double>::infinity();
  for (bool sine : {false, true}) {
    std::vector<std::pair<std::size_t, int>> slots;
    for (std::size_t i = 0; i < state.nodes(); ++i)
      for (int j = 1; j <= state.modes(); j += 2) slots.emplace_back(i, j);
    auto ref = [sine](MeanFieldState& s, std::pair<std::size_t, int> q) -> double& {
      return sine ? s.B(q.first, q.second) : s.A(q.first, q.second);
    };

    const auto d = static_cast<Eigen::Index>(slots.size());
    Eigen::MatrixXd jac(d, d);
    constexpr double eps = 1e-6;
    for (Eigen::Index c = 0; c < d; ++c) {
      MeanFieldState plus = state, minus = state;
      ref(plus, slots[c]) += eps;
      ref(minus, slots[c]) -= eps;
      MeanFieldState fp = rhs(plus, model);
      MeanFieldState fm = rhs(minus, model);
      for (Eigen::Index r = 0; r < d; ++r) jac(r, c) = (ref(fp, slots[r]) - ref(fm, slots[r])) / (2 * eps);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
    if (solver.info() != Eigen::Success) throw NumericalError("odd-mode Jacobian eigenvalues failed");
    growth = std::max(growth, solver.eigenvalues().real().maxCoeff());
  }
  return growth;
}

}  // namespace netmf
