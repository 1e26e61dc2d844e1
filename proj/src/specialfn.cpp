#include "netmf/specialfn.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "netmf/error.hpp"

namespace netmf {
namespace {

constexpr double kSeriesLimit = 30.0;  // I_n series vs asymptotics
constexpr double kRatioSeries = 12.0;  // Gamma series vs continued fraction
constexpr double kRatioAsym = 50.0;    // continued fraction vs asymptotic ratio
constexpr double kOverflow = 700.0;

// Ascending series for x >= 0.
double series(int n, double x) {
  const double q = 0.25 * x * x;
  double term = n == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + n));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// sqrt(2 pi x) e^{-x} I_n(x) from the large-argument expansion, x > 0.
double asymptotic_sum(int n, double x) {
  const double mu = 4.0 * n * n;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;  // series starts to diverge
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double scaled_positive(int n, double x) {
  if (x <= kSeriesLimit) return series(n, x) * std::exp(-x);
  return asymptotic_sum(n, x) / std::sqrt(2.0 * std::numbers::pi * x);
}

// Gauss continued fraction I_1/I_0 = 1/(2/x + 1/(4/x + 1/(6/x + ...))), modified Lentz.
double ratio_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = 2.0 / x;
  double c = f;
  double d = 0.0;
  for (int j = 2; j < 100000; ++j) {
    const double b = 2.0 * j / x;
    d = b + d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

void check_order(int order) {
  if (order != 0 && order != 1) throw DomainError("bessel_i supports orders 0 and 1 only");
}

}  // namespace

double bessel_i_scaled(int order, double z) {
  check_order(order);
  if (!std::isfinite(z)) throw DomainError("bessel_i_scaled argument is not finite");
  const double v = scaled_positive(order, std::abs(z));
  return (order == 1 && z < 0.0) ? -v : v;
}

double bessel_i(int order, double z) {
  check_order(order);
  if (!(std::abs(z) <= kOverflow))
    throw OverflowError("bessel_i argument beyond overflow guard; use bessel_ratio");
  const double x = std::abs(z);
  const double v = x <= kSeriesLimit ? series(order, x)
                                     : asymptotic_sum(order, x) * std::exp(x) /
                                           std::sqrt(2.0 * std::numbers::pi * x);
  return (order == 1 && z < 0.0) ? -v : v;
}

double bessel_ratio(double z) {
  if (!std::isfinite(z)) throw DomainError("bessel_ratio argument is not finite");
  const double x = std::abs(z);
  if (x == 0.0) return 0.0;
  double r;
  if (x <= kRatioSeries)
    r = series(1, x) / series(0, x);
  else if (x <= kRatioAsym)
    r = ratio_continued_fraction(x);
  else
    r = asymptotic_sum(1, x) / asymptotic_sum(0, x);
  r = std::min(r, std::nextafter(1.0, 0.0));
  return z < 0.0 ? -r : r;
}

}  // namespace netmf
