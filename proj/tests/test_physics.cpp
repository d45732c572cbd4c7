/// @file test_physics.cpp
/// @brief Pressure law, pressure potential, entropy integrand and stress:
///        worked values, the defining potential identity, convexity and
///        dissipativity by sampling, two-sided quadratic equivalence.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "thinns/physics.hpp"
#include "thinns/trig.hpp"

using namespace thinns;

TEST_CASE("pressure law values") {
  const PressureLaw law{1.0, 2.0};
  CHECK(pressure(0.0, law) == 0.0);
  CHECK(pressure(3.0, law) == doctest::Approx(9.0));
  CHECK(pressure_prime(3.0, law) == doctest::Approx(6.0));
  CHECK_THROWS_AS(pressure(-1.0, law), ConfigError);
  // monotone on samples
  const PressureLaw law14{0.7, 1.4};
  double prev = pressure(0.0, law14);
  for (int i = 1; i <= 100; ++i) {
    const double p = pressure(0.05 * i, law14);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("pressure potential and its defining identity") {
  CHECK(potential_h(2.0, PressureLaw{1.0, 2.0}) == doctest::Approx(4.0));
  CHECK(potential_h(0.0, PressureLaw{1.0, 2.0}) == 0.0);
  CHECK(potential_h(1.0, PressureLaw{2.0, 1.4}) == doctest::Approx(5.0));
  // H'(rho) rho - H(rho) = p(rho) on samples, two laws
  for (const PressureLaw& law : {PressureLaw{1.0, 2.0}, PressureLaw{2.3, 1.4}}) {
    for (double rho : {0.2, 0.5, 1.0, 2.0, 3.7}) {
      const double lhs = potential_h_prime(rho, law) * rho - potential_h(rho, law);
      CHECK(lhs == doctest::Approx(pressure(rho, law)).epsilon(1e-12));
    }
  }
}

TEST_CASE("entropy integrand worked values") {
  const PressureLaw law{1.0, 2.0};
  CHECK(relent_integrand(2.0, 1.0, law) == doctest::Approx(1.0));
  CHECK(relent_integrand(0.5, 1.0, law) == doctest::Approx(0.25));
  CHECK(relent_integrand(1.7, 1.7, law) == doctest::Approx(0.0));
  CHECK_THROWS_AS(relent_integrand(1.0, 0.0, law), ConfigError);
  CHECK_THROWS_AS(relent_integrand(1.0, -1.0, law), ConfigError);
}

TEST_CASE("entropy integrand is a Bregman divergence: nonnegative, zero iff equal") {
  std::mt19937_64 rng(7);
  for (const PressureLaw& law : {PressureLaw{1.0, 2.0}, PressureLaw{0.5, 1.4}}) {
    for (int n = 0; n < 20000; ++n) {
      const double rho = 4.0 * uniform01(rng);
      const double r = 0.05 + 4.0 * uniform01(rng);
      const double val = relent_integrand(rho, r, law);
      CHECK(val >= 0.0);
      if (std::abs(rho - r) > 1e-3) CHECK(val > 1e-12);
    }
    for (double r : {0.3, 1.0, 2.5}) CHECK(relent_integrand(r, r, law) <= 1e-12);
  }
}

TEST_CASE("quadratic equivalence near the base density") {
  // gamma = 2: the integrand is exactly a (rho - r)^2, so the scan must
  // return cmin = cmax = a.
  const QuadBounds b2 = relent_quadratic_bounds(PressureLaw{1.5, 2.0}, 0.5, 1.5, 1.0, 1.0);
  CHECK(b2.cmin == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(b2.cmax == doctest::Approx(1.5).epsilon(1e-9));

  // general law: brute-force constants bound the integrand on the window
  const PressureLaw law{1.0, 1.4};
  const double r = 1.0;
  const QuadBounds b = relent_quadratic_bounds(law, 0.5 * r, 1.5 * r, r, r, 400);
  CHECK(b.cmin > 0.0);
  CHECK(b.cmax >= b.cmin);
  for (int n = 0; n <= 1000; ++n) {
    const double rho = 0.5 + n * 0.001;
    const double s = rho - r;
    const double val = relent_integrand(rho, r, law);
    CHECK(val >= (b.cmin - 1e-9) * s * s);
    CHECK(val <= (b.cmax + 1e-9) * s * s);
  }
}

TEST_CASE("viscosity invariant") {
  const Viscosity visc(3.0, 1.0);
  CHECK(visc.nu == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_THROWS_AS(Viscosity(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Viscosity(1.0, -0.1), ConfigError);
}

TEST_CASE("stress worked values") {
  const Mat3d zero = Mat3d::Zero();
  CHECK(stress(zero, Viscosity(1.0, 0.0)).norm() == 0.0);

  const Mat3d eye = Mat3d::Identity();
  // isotropic dilation: deviatoric part vanishes
  CHECK(stress(eye, Viscosity(1.0, 0.0)).norm() == doctest::Approx(0.0).epsilon(1e-14));
  // bulk part: S = 6 I for eta = 2
  const Mat3d s = stress(eye, Viscosity(1.0, 2.0));
  CHECK((s - 6.0 * eye).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stress symmetry, trace and dissipativity on random gradients") {
  std::mt19937_64 rng(11);
  const Viscosity visc(0.8, 0.3);
  for (int n = 0; n < 500; ++n) {
    Mat3d grad;
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d) grad(c, d) = 2.0 * uniform01(rng) - 1.0;
    const Mat3d s = stress(grad, visc);
    CHECK((s - s.transpose()).norm() <= 1e-14 * std::max(1.0, s.norm()));
    CHECK(s.trace() == doctest::Approx(3.0 * visc.eta * grad.trace()).epsilon(1e-12));
    CHECK(stress_contract(grad, visc) >= -1e-14);
    // the contraction agrees with S : grad
    CHECK((s.array() * grad.array()).sum() ==
          doctest::Approx(stress_contract(grad, visc)).epsilon(1e-10));
  }
}
