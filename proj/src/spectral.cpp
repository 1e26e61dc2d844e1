#include "netmf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <variant>

#include "netmf/error.hpp"
#include "netmf/random.hpp"

namespace netmf {
namespace {

constexpr std::uint64_t kStartSeed = 0x5eed5eedULL;

double dot_col(const Matrix& v, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) s += v(i, a) * v(i, b);
  return s;
}

void fill_random_col(Matrix& v, std::size_t c, std::uint64_t salt) {
  for (std::size_t i = 0; i < v.rows(); ++i) v(i, c) = rng::uniform(kStartSeed, salt, c, i) - 0.5;
}

// Modified Gram-Schmidt, two passes. Columns that collapse are refilled with
// fresh random directions, which happens for low-rank kernels.
void orthonormalize(Matrix& v, std::uint64_t& salt) {
  const std::size_t m = v.rows();
  for (std::size_t c = 0; c < v.cols(); ++c) {
    for (int attempt = 0;; ++attempt) {
      const double before = std::sqrt(dot_col(v, c, c));
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t p = 0; p < c; ++p) {
          const double r = dot_col(v, p, c);
          for (std::size_t i = 0; i < m; ++i) v(i, c) -= r * v(i, p);
        }
      const double norm = std::sqrt(dot_col(v, c, c));
      if (norm > 1e-10 * before && norm > 1e-300) {
        for (std::size_t i = 0; i < m; ++i) v(i, c) /= norm;
        break;
      }
      if (attempt > 8) throw NumericalError("orthonormalization failed");
      fill_random_col(v, c, ++salt);
    }
  }
}

// Z = (1/m) K V with V stored m x b row-major.
void multiply(const Matrix& k, const Matrix& v, Matrix& z) {
  const std::size_t m = k.rows();
  const std::size_t b = v.cols();
  const double scale = 1.0 / static_cast<double>(m);
  std::vector<double> acc(b);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto krow = k.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double kij = krow[j];
      const auto vrow = v.row(j);
      for (std::size_t c = 0; c < b; ++c) acc[c] += kij * vrow[c];
    }
    auto zrow = z.row(i);
    for (std::size_t c = 0; c < b; ++c) zrow[c] = acc[c] * scale;
  }
}

void check_symmetric(const Matrix& k) {
  if (k.rows() != k.cols() || k.rows() == 0) throw ConfigError("kernel must be a nonempty square matrix");
  double maxabs = 0.0;
  for (double x : k.data()) maxabs = std::max(maxabs, std::abs(x));
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = i + 1; j < k.rows(); ++j)
      if (std::abs(k(i, j) - k(j, i)) > 1e-12 * maxabs) throw ConfigError("kernel is not symmetric");
}

}  // namespace

std::ptrdiff_t SpectrumResult::leading_simple_positive() const {
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] > 0.0 && simple[i]) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

void SpectrumResult::write_csv(std::ostream& os) const {
  const auto old = os.precision(12);
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) os << i + 1 << ',' << eigenvalues[i] << '\n';
  os.precision(old);
}

double LeadingEigenpair::operator()(double x) const {
  return shape == Shape::constant ? 1.0 : std::pow(x, -exponent);
}

LeadingEigenpair analytic_leading_eigenpair(const Graphon& g) {
  LeadingEigenpair out;
  if (const auto* er = std::get_if<ErdosRenyi>(&g.family())) {
    out.eigenvalue = er->p;
  } else if (const auto* sw = std::get_if<SmallWorld>(&g.family())) {
    out.eigenvalue = 2.0 * sw->h;
  } else {
    const auto& pl = std::get<PowerLaw>(g.family());
    out.eigenvalue = 1.0 / (1.0 - 2.0 * pl.gamma);
    out.shape = LeadingEigenpair::Shape::power;
    out.exponent = pl.gamma;
  }
  return out;
}

std::vector<double> jacobi_eigen(Matrix a, Matrix& vectors) {
  const std::size_t n = a.rows();
  vectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) vectors(i, i) = 1.0;
  double total = 0.0;
  for (double x : a.data()) total += x * x;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * total || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vectors(k, p), vkq = vectors(k, q);
          vectors(k, p) = c * vkp - s * vkq;
          vectors(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  return eig;
}

SpectrumResult numeric_spectrum(const Matrix& kernel, std::size_t count, const SpectrumOptions& options) {
  check_symmetric(kernel);
  const std::size_t m = kernel.rows();
  if (count < 1 || count > m) throw ConfigError("requested eigenpair count must lie in [1, m]");

  std::size_t block = std::min(m, count + std::max<std::size_t>(count, 8));
  std::uint64_t salt = 0;
  double last_residual = 0.0;

  for (;;) {
    Matrix v(m, block);
    for (std::size_t c = 0; c < block; ++c) fill_random_col(v, c, salt);
    orthonormalize(v, salt);
    Matrix z(m, block);

    bool retry_bigger = false;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
      multiply(kernel, v, z);

      Matrix h(block, block);
      for (std::size_t a = 0; a < block; ++a)
        for (std::size_t b = a; b < block; ++b) {
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += v(i, a) * z(i, b) + v(i, b) * z(i, a);
          h(a, b) = h(b, a) = 0.5 * s;
        }
      Matrix q;
      const std::vector<double> ritz_raw = jacobi_eigen(h, q);
      std::vector<std::size_t> order(block);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto x, auto y) { return ritz_raw[x] > ritz_raw[y]; });

      // Ritz vectors X = V Q and images A X = Z Q, in descending order.
      Matrix x(m, block), ax(m, block);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < block; ++c) {
          double sx = 0.0, sz = 0.0;
          for (std::size_t k = 0; k < block; ++k) {
            sx += v(i, k) * q(k, order[c]);
            sz += z(i, k) * q(k, order[c]);
          }
          x(i, c) = sx;
          ax(i, c) = sz;
        }
      std::vector<double> ritz(block);
      double scale = 0.0, min_abs = INFINITY;
      for (std::size_t c = 0; c < block; ++c) {
        ritz[c] = ritz_raw[order[c]];
        scale = std::max(scale, std::abs(ritz[c]));
        min_abs = std::min(min_abs, std::abs(ritz[c]));
      }

      bool converged = true;
      last_residual = 0.0;
      for (std::size_t c = 0; c < count; ++c) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double d = ax(i, c) - ritz[c] * x(i, c);
          r2 += d * d;
        }
        last_residual = std::max(last_residual, std::sqrt(r2));
        if (std::sqrt(r2) > options.tolerance * scale) converged = false;
      }

      if (converged) {
        // Subspace iteration captures the largest magnitudes; an eigenvalue
        // outside the block could still exceed a negative Ritz value.
        const double slack = options.tolerance * scale;
        if (block < m && ritz[count - 1] + slack < min_abs) {
          retry_bigger = true;
          break;
        }
        SpectrumResult out;
        out.grid_size = m;
        const double root_m = std::sqrt(static_cast<double>(m));
        for (std::size_t c = 0; c < count; ++c) {
          out.eigenvalues.push_back(ritz[c]);
          std::vector<double> phi(m);
          double sum = 0.0;
          for (std::size_t i = 0; i < m; ++i) {
            phi[i] = root_m * x(i, c);
            sum += phi[i];
          }
          double sign = sum >= 0.0 ? 1.0 : -1.0;
          if (std::abs(sum) < 1e-6 * static_cast<double>(m)) {
            const auto first = std::find_if(phi.begin(), phi.end(), [](double p) { return std::abs(p) > 1e-6; });
            sign = (first == phi.end() || *first > 0.0) ? 1.0 : -1.0;
          }
          for (double& p : phi) p *= sign;
          out.eigenfunctions.push_back(std::move(phi));
          bool simple = true;
          for (std::size_t o = 0; o < block; ++o) {
            if (o == c) continue;
            const double gap = std::abs(ritz[c] - ritz[o]);
            if (gap <= options.multiplet_tolerance * std::max(std::abs(ritz[c]), std::abs(ritz[o])) +
                           1e-12 * scale)
              simple = false;
          }
          out.simple.push_back(simple);
        }
        return out;
      }

      v = ax;
      orthonormalize(v, salt);
    }
    if (!retry_bigger)
      throw ConvergenceError("numeric_spectrum did not reach the residual target", last_residual);
    block = std::min(m, 2 * block);
  }
}

std::vector<double> apply_operator(const Matrix& kernel, std::span<const double> f) {
  const std::size_t m = kernel.rows();
  if (f.size() != m) throw ConfigError("operator/function size mismatch");
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = kernel.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += row[j] * f[j];
    out[i] = s / static_cast<double>(m);
  }
  return out;
}

double dominant_eigenvalue_weighted(const Matrix& kernel, std::span<const double> weights, double tolerance,
                                    std::size_t max_iterations) {
  const std::size_t m = kernel.rows();
  if (weights.size() != m) throw ConfigError("weight/kernel size mismatch");
  std::vector<double> f(m, 1.0), wf(m);
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < m; ++i) wf[i] = weights[i] * f[i];
    std::vector<double> next = apply_operator(kernel, wf);
    double norm = 0.0, fnorm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      norm += next[i] * next[i];
      fnorm += f[i] * f[i];
    }
    norm = std::sqrt(norm);
    fnorm = std::sqrt(fnorm);
    if (norm == 0.0) return 0.0;
    const double estimate = norm / fnorm;
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] /= norm;
      change = std::max(change, std::abs(next[i] - f[i] / fnorm));
    }
    f = std::move(next);
    const bool done = std::abs(estimate - lambda) <= tolerance * estimate && change <= std::sqrt(tolerance);
    lambda = estimate;
    if (done) return lambda;
  }
  throw ConvergenceError("weighted power iteration did not converge", lambda);
}

}  // namespace netmf
