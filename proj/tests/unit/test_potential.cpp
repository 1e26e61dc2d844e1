#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "netmf/error.hpp"
#include "netmf/potential.hpp"

using namespace netmf;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("potential values at special angles") {
  const MultichromaticPotential bi({1.0, 2.0});
  CHECK(bi.value(0.0) == Approx(-3.0).margin(1e-15));
  CHECK(bi.value(pi) == Approx(-1.0).margin(1e-14));
  CHECK(MultichromaticPotential({1.0}).value(pi / 2) == Approx(0.0).margin(1e-15));
}

TEST_CASE("potential derivative") {
  CHECK(MultichromaticPotential({1.0, 2.0}).derivative(0.0) == 0.0);
  CHECK(MultichromaticPotential({1.0}).derivative(pi / 2) == Approx(1.0).margin(1e-15));

  const MultichromaticPotential quad({1.0, 2.0, 3.0, 4.0});
  const double h = 1e-4;
  for (double u : {-2.7, -0.3, 0.0, 0.41, 1.3, 2.9, 5.5}) {
    const double fd = (quad.value(u + h) - quad.value(u - h)) / (2 * h);
    CHECK(std::abs(quad.derivative(u) - fd) < 1e-6);
  }
}

TEST_CASE("potential is 2 pi periodic and even") {
  const MultichromaticPotential p({0.3, -1.2, 2.0});
  for (double u : {0.1, 1.0, 2.5}) {
    CHECK(p.value(u) == Approx(p.value(u + 2 * pi)).margin(1e-12));
    CHECK(p.value(u) == Approx(p.value(-u)).margin(1e-15));
    CHECK(p.derivative(u) == Approx(-p.derivative(-u)).margin(1e-15));
  }
}

TEST_CASE("construction rejects empty and non-finite amplitudes") {
  CHECK_THROWS_AS(MultichromaticPotential({}), ConfigError);
  CHECK_THROWS_AS(MultichromaticPotential({1.0, std::numeric_limits<double>::quiet_NaN()}), ConfigError);
  CHECK_THROWS_AS(MultichromaticPotential({std::numeric_limits<double>::infinity()}), ConfigError);
}

TEST_CASE("H-stability split") {
  auto s = h_stability_decomposition(MultichromaticPotential({1.0, 2.0}));
  CHECK(s.stable == std::vector<double>{0.0, 0.0});
  CHECK(s.unstable == std::vector<double>{1.0, 2.0});
  CHECK_FALSE(s.h_stable);

  s = h_stability_decomposition(MultichromaticPotential({-1.0}));
  CHECK(s.stable == std::vector<double>{-1.0});
  CHECK(s.unstable == std::vector<double>{0.0});
  CHECK(s.h_stable);

  s = h_stability_decomposition(MultichromaticPotential({1.0, -2.0}));
  CHECK(s.stable == std::vector<double>{0.0, -2.0});
  CHECK(s.unstable == std::vector<double>{1.0, 0.0});
  CHECK_FALSE(s.h_stable);
}

TEST_CASE("sign classification") {
  const MultichromaticPotential mixed({1.0, -2.0});
  CHECK(mixed.mixed_sign());
  CHECK(mixed.any_positive());
  CHECK_FALSE(mixed.all_positive());
  CHECK(MultichromaticPotential({1.0, 2.0}).all_positive());
  CHECK_FALSE(MultichromaticPotential({-1.0}).any_positive());
  CHECK(mixed.total_weight() == 3.0);
}

TEST_CASE("wrap_angle maps into [0, 2 pi)") {
  for (double u : {-7.0, -2 * pi, -1e-17, 0.0, 3.0, 2 * pi, 13.0, 1e6}) {
    const double w = wrap_angle(u);
    CHECK(w >= 0.0);
    CHECK(w < 2 * pi);
    CHECK(std::abs(std::remainder(w - u, 2 * pi)) < 1e-9);
  }
}
