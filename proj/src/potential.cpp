#include "netmf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "netmf/error.hpp"

namespace netmf {

double wrap_angle(double u) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = u - two_pi * std::floor(u / two_pi);
  // floor can leave r == 2*pi for tiny negative inputs
  if (r >= two_pi) r -= two_pi;
  if (r < 0.0) r = 0.0;
  return r;
}

MultichromaticPotential::MultichromaticPotential(std::vector<double> amplitudes)
    : a_(std::move(amplitudes)) {
  if (a_.empty()) throw ConfigError("potential needs at least one harmonic");
  for (double v : a_)
    if (!std::isfinite(v)) throw ConfigError("potential amplitude is not finite");
}

double MultichromaticPotential::value(double u) const noexcept {
  const double x = wrap_angle(u);
  double s = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) s += a_[k] * std::cos(static_cast<double>(k + 1) * x);
  return -s;
}

double MultichromaticPotential::derivative(double u) const noexcept {
  const double x = wrap_angle(u);
  double s = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double kk = static_cast<double>(k + 1);
    s += a_[k] * kk * std::sin(kk * x);
  }
  return s;
}

double MultichromaticPotential::total_weight() const noexcept {
  double s = 0.0;
  for (double v : a_) s += std::abs(v);
  return s;
}

bool MultichromaticPotential::all_positive() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return v > 0.0; });
}

bool MultichromaticPotential::any_positive() const noexcept {
  return std::any_of(a_.begin(), a_.end(), [](double v) { return v > 0.0; });
}

bool MultichromaticPotential::mixed_sign() const noexcept {
  const bool neg = std::any_of(a_.begin(), a_.end(), [](double v) { return v < 0.0; });
  return neg && any_positive();
}

HStabilitySplit h_stability_decomposition(const MultichromaticPotential& pot) {
  HStabilitySplit out;
  const auto a = pot.amplitudes();
  out.stable.assign(a.size(), 0.0);
  out.unstable.assign(a.size(), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) (a[k] <= 0.0 ? out.stable : out.unstable)[k] = a[k];
  out.h_stable = std::all_of(a.begin(), a.end(), [](double v) { return v <= 0.0; });
  return out;
}

}  // namespace netmf
