#pragma once

#include <span>
#include <vector>

namespace netmf {

// Reduce an angle to [0, 2*pi).
double wrap_angle(double u) noexcept;

// D(u) = -sum_k a_k cos(k u), k = 1..n.
class MultichromaticPotential {
 public:
  // Throws ConfigError when the list is empty or holds non-finite values.
  explicit MultichromaticPotential(std::vector<double> amplitudes);

  int harmonics() const noexcept { return static_cast<int>(a_.size()); }
  std::span<const double> amplitudes() const noexcept { return a_; }
  // 1-based mode index.
  double amplitude(int k) const { return a_.at(static_cast<std::size_t>(k - 1)); }

  double value(double u) const noexcept;       // D(u)
  double derivative(double u) const noexcept;  // D'(u) = sum a_k k sin(k u)

  // Sum of |a_k|, the energy scale of full synchrony.
  double total_weight() const noexcept;
  bool all_positive() const noexcept;
  bool any_positive() const noexcept;
  bool mixed_sign() const noexcept;

  bool operator==(const MultichromaticPotential&) const = default;

 private:
  std::vector<double> a_;
};

struct HStabilitySplit {
  std::vector<double> stable;    // modes with a_k <= 0, zero elsewhere
  std::vector<double> unstable;  // modes with a_k > 0, zero elsewhere
  bool h_stable = false;
};

// Mode-wise split by the sign of the Fourier coefficient -pi a_k.
HStabilitySplit h_stability_decomposition(const MultichromaticPotential& pot);

}  // namespace netmf
