#pragma once

namespace netmf {

// Modified Bessel function of the first kind, order 0 or 1.
// Throws OverflowError for |z| > 700 and DomainError for other orders.
double bessel_i(int order, double z);

// e^{-|z|} I_n(z); finite for every finite z.
double bessel_i_scaled(int order, double z);

// Gamma(z) = I_1(z) / I_0(z): odd, increasing, |Gamma| < 1. No overflow for any z.
double bessel_ratio(double z);

}  // namespace netmf
