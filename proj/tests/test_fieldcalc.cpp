/// @file test_fieldcalc.cpp
/// @brief Discrete calculus: gradient exactness and convergence, quadrature
///        norms against closed-form integrals, cross-sectional averaging and
///        the 1D lift round trip.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "thinns/fieldcalc.hpp"
#include "thinns/trig.hpp"

using namespace thinns;

namespace {

GridFieldD sample_scalar(const ThinDomain& dom, const std::function<double(double, double, double)>& f) {
  GridFieldD out(dom, 1);
  for (int k = 0; k < dom.nz; ++k)
    for (int j = 0; j < dom.ny; ++j)
      for (int i = 0; i < dom.nx; ++i) out.at(0, i, j, k) = f(dom.x(i), dom.y(j), dom.z(k));
  return out;
}

}  // namespace

TEST_CASE("gradient of constants and linears") {
  const ThinDomain dom = build_channel(1.0, 6, 5, 9);
  const GridFieldD c = sample_scalar(dom, [](double, double, double) { return 3.25; });
  CHECK(lp_norm(gradient(c, dom), std::numeric_limits<double>::infinity(), dom) == 0.0);

  const GridFieldD lin = sample_scalar(dom, [](double, double, double z) { return z; });
  const GridFieldD g = gradient(lin, dom);
  for (long q = 0; q < lin.cells(); ++q) {
    CHECK(g.comp(0)[q] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.comp(1)[q] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.comp(2)[q] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gradient converges at second order on a sine") {
  double prev_err = 0.0;
  std::vector<double> errs;
  for (int nz : {16, 32, 64}) {
    const ThinDomain dom = build_channel(1.0, 4, 4, nz);
    const GridFieldD f = sample_scalar(dom, [](double, double, double z) { return std::sin(pi * z); });
    const GridFieldD g = gradient(f, dom);
    double err = 0.0;
    for (int k = 0; k < dom.nz; ++k)
      err = std::max(err, std::abs(g.at(2, 1, 1, k) - pi * std::cos(pi * dom.z(k))));
    errs.push_back(err);
    (void)prev_err;
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("Lp norms against closed forms") {
  const ThinDomain half = build_channel(0.5, 8, 8, 16);
  const GridFieldD one = sample_scalar(half, [](double, double, double) { return 1.0; });
  CHECK(lp_norm(one, 2.0, half) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(lp_norm(one, std::numeric_limits<double>::infinity(), half) == 1.0);

  const ThinDomain unit = build_channel(1.0, 8, 8, 64);
  const GridFieldD s = sample_scalar(unit, [](double, double, double z) { return std::sin(pi * z); });
  CHECK(lp_norm(s, 2.0, unit) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  // L^{4/3} quadrature sanity on a constant (used by the momentum error norm)
  CHECK(lp_norm(one, 4.0 / 3.0, half) == doctest::Approx(std::pow(0.25, 0.75)).epsilon(1e-12));
  CHECK_THROWS_AS(lp_norm(one, 0.5, half), ConfigError);
}

TEST_CASE("Hoelder consistency of the discrete norms") {
  std::mt19937_64 rng(3);
  const ThinDomain dom = build_channel(0.5, 8, 8, 16);
  for (int n = 0; n < 50; ++n) {
    const GridFieldD v = TrigScalarField::random(rng()).eval(dom);
    CHECK(lp_norm(v, 2.0, dom) <=
          std::pow(dom.v, 0.25) * lp_norm(v, 4.0, dom) * (1.0 + 1e-12));
    CHECK(lp_norm(v, 1.0, dom) <= std::sqrt(dom.v) * lp_norm(v, 2.0, dom) * (1.0 + 1e-12));
  }
}

TEST_CASE("cross-sectional averages") {
  const ThinDomain dom = build_channel(0.5, 16, 16, 12);
  const GridFieldD c = sample_scalar(dom, [](double, double, double) { return 2.5; });
  const Array2Xd pc = cross_avg(c, dom);
  for (int k = 0; k < dom.nz; ++k) CHECK(pc(k, 0) == doctest::Approx(2.5).epsilon(1e-14));

  // purely axial field: averaging is exact
  const GridFieldD ax = sample_scalar(dom, [](double, double, double z) { return std::cos(pi * z); });
  const Array2Xd pa = cross_avg(ax, dom);
  for (int k = 0; k < dom.nz; ++k)
    CHECK(pa(k, 0) == doctest::Approx(std::cos(pi * dom.z(k))).epsilon(1e-13));

  // horizontally oscillating field averages to zero over full periods
  const double eps = dom.epsilon;
  const GridFieldD osc =
      sample_scalar(dom, [eps](double x, double, double) { return std::sin(2.0 * pi * x / eps); });
  const Array2Xd po = cross_avg(osc, dom);
  for (int k = 0; k < dom.nz; ++k) CHECK(std::abs(po(k, 0)) <= 1e-3);
}

TEST_CASE("lift round trip is exact and horizontal gradients vanish") {
  const ThinDomain dom = build_channel(0.5, 6, 7, 24);
  Profile1DD p;
  p.rho = ArrayXd(dom.nz);
  p.u = ArrayXd(dom.nz);
  for (int k = 0; k < dom.nz; ++k) {
    p.rho[k] = 1.0 + 0.1 * std::cos(pi * dom.z(k));
    p.u[k] = 0.1 * std::sin(pi * dom.z(k));
  }
  const FluidState3D s = lift1d(p, dom);
  CHECK(s.rho.all_finite());

  const Array2Xd rho_avg = cross_avg(s.rho, dom);
  const Array2Xd u_avg = cross_avg(s.u, dom);
  for (int k = 0; k < dom.nz; ++k) {
    CHECK(rho_avg(k, 0) == p.rho[k]);
    CHECK(u_avg(k, 0) == 0.0);
    CHECK(u_avg(k, 1) == 0.0);
    CHECK(u_avg(k, 2) == p.u[k]);
  }

  const GridFieldD g = gradient(s.u, dom);
  for (long q = 0; q < s.rho.cells(); ++q) {
    CHECK(g.comp(3 * 2 + 0)[q] == 0.0);  // d u3 / dx
    CHECK(g.comp(3 * 2 + 1)[q] == 0.0);  // d u3 / dy
  }

  CHECK_THROWS_AS(lift1d(Profile1DD{ArrayXd::Zero(5), ArrayXd::Zero(5), 0.0}, dom), ConfigError);
}

TEST_CASE("constant-profile lift is uniform") {
  const ThinDomain dom = build_channel(1.0, 4, 4, 6);
  Profile1DD p{ArrayXd::Constant(dom.nz, 1.0), ArrayXd::Zero(dom.nz), 0.0};
  const FluidState3D s = lift1d(p, dom);
  CHECK(s.rho.data.minCoeff() == 1.0);
  CHECK(s.rho.data.maxCoeff() == 1.0);
  CHECK(s.u.data.abs().maxCoeff() == 0.0);
}

TEST_CASE("norm report covers the canonical exponents") {
  const ThinDomain dom = build_channel(1.0, 6, 6, 6);
  const GridFieldD one = sample_scalar(dom, [](double, double, double) { return 1.0; });
  const NormReport nr = norm_report(one, dom);
  CHECK(nr.lp.at(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(nr.lp.at(2.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(nr.lp.at(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(nr.grad_lp.at(2.0) == 0.0);
}
