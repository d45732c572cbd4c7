/// @file test_inequalities.cpp
/// @brief Measured-ratio machinery: worked constants, degeneracy flags,
///        admissibility checks, uniformity across channel widths, the
///        elliptic solve with manufactured solutions, operator symmetry and
///        epsilon-exponent fitting.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "thinns/inequalities.hpp"
#include "thinns/trig.hpp"

using namespace thinns;

namespace {

GridFieldD sample_scalar(const ThinDomain& dom,
                         const std::function<double(double, double, double)>& f) {
  GridFieldD out(dom, 1);
  for (int k = 0; k < dom.nz; ++k)
    for (int j = 0; j < dom.ny; ++j)
      for (int i = 0; i < dom.nx; ++i) out.at(0, i, j, k) = f(dom.x(i), dom.y(j), dom.z(k));
  return out;
}

}  // namespace

TEST_CASE("korn ratio: constants and degenerate fields") {
  const ThinDomain dom = build_channel(0.5, 8, 8, 16);
  GridFieldD v(dom, 3);
  v.comp(2).setConstant(0.7);  // constant vector field
  const RatioSample s = korn_ratio(v, dom);
  CHECK_FALSE(s.degenerate);
  CHECK(s.lhs == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s.ratio == doctest::Approx(0.0).epsilon(1e-14));

  GridFieldD zero(dom, 3);
  CHECK(korn_ratio(zero, dom).degenerate);
}

TEST_CASE("korn ratios stay uniformly bounded as the channel thins") {
  double calib = 0.0;
  std::vector<double> maxima;
  for (double eps : {1.0, 0.5, 0.25, 0.125}) {
    const ThinDomain dom = build_channel(eps, 12, 12, 24);
    double worst = 0.0;
    for (int f = 0; f < 20; ++f) {
      const GridFieldD w = TrigVecField::random(100 + f).eval(dom);
      const RatioSample s = korn_ratio(w, dom);
      REQUIRE_FALSE(s.degenerate);
      worst = std::max(worst, s.ratio);
    }
    if (eps == 1.0) calib = worst;
    maxima.push_back(worst);
  }
  for (double m : maxima) CHECK(m <= 2.0 * calib);
}

TEST_CASE("poincare ratio: linear profile closed form") {
  const ThinDomain dom = build_channel(1.0, 4, 4, 64);
  const GridFieldD v = sample_scalar(dom, [](double, double, double z) { return z - 0.5; });
  const RatioSample s = poincare_ratio(v, 2.0, dom);
  // ||v||_2 -> sqrt(1/12), rhs = sqrt(3) * 1: ratio -> 1/6
  CHECK(s.ratio == doctest::Approx(1.0 / 6.0).epsilon(1e-3));

  const GridFieldD c = sample_scalar(dom, [](double, double, double) { return 4.0; });
  const RatioSample sc = poincare_ratio(c, 2.0, dom);
  CHECK(sc.degenerate);
  CHECK(sc.lhs <= 1e-12);
}

TEST_CASE("sobolev ratio: admissibility and constants on the unit box") {
  const ThinDomain dom = build_channel(1.0, 8, 8, 8);
  const GridFieldD c = sample_scalar(dom, [](double, double, double) { return 2.0; });
  // constants: lhs = 2 V^{1/6}, rhs = 2 V^{1/2}; V = 1 gives ratio 1
  const RatioSample s = sobolev_ratio(c, 2.0, 6.0, dom);
  CHECK(s.ratio == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(sobolev_ratio(c, 2.0, 12.0, dom), ConfigError);
  CHECK_THROWS_AS(sobolev_ratio(c, 3.5, 6.0, dom), ConfigError);
  CHECK_THROWS_AS(sobolev_ratio(c, 2.0, std::numeric_limits<double>::infinity(), dom),
                  ConfigError);
  CHECK_NOTHROW(sobolev_ratio(c, 4.0, std::numeric_limits<double>::infinity(), dom));
}

TEST_CASE("gn ratio: degenerate and constant closed form") {
  const ThinDomain dom = build_channel(1.0, 8, 8, 8);
  GridFieldD zero(dom, 1);
  CHECK(gn_ratio(zero, dom).degenerate);

  const GridFieldD c = sample_scalar(dom, [](double, double, double) { return 3.0; });
  // lhs = 3 V^{1/4}, rhs = 3 V^{1/2}: ratio V^{-1/4} = 1 on the unit box
  CHECK(gn_ratio(c, dom).ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaled ratios uniform across widths for the rescaled family") {
  for (const char* which : {"poincare", "sobolev", "gn"}) {
    double calib = 0.0;
    for (double eps : {1.0, 0.5, 0.25, 0.125}) {
      const ThinDomain dom = build_channel(eps, 12, 12, 24);
      double worst = 0.0;
      for (int f = 0; f < 20; ++f) {
        const GridFieldD v = TrigScalarField::random(200 + f).eval(dom);
        RatioSample s;
        if (std::string(which) == "poincare") s = poincare_ratio(v, 2.0, dom);
        if (std::string(which) == "sobolev") s = sobolev_ratio(v, 2.0, 6.0, dom);
        if (std::string(which) == "gn") s = gn_ratio(v, dom);
        REQUIRE_FALSE(s.degenerate);
        worst = std::max(worst, s.ratio);
      }
      if (eps == 1.0) calib = worst;
      CHECK(worst <= 2.0 * calib);
    }
  }
}

TEST_CASE("elliptic wall operator is symmetric to 1e-11") {
  const ThinDomain dom = build_channel(0.5, 8, 8, 12);
  const Viscosity visc(1.0, 0.5);
  for (int f = 0; f < 5; ++f) {
    const GridFieldD a = TrigVecField::random(300 + f).eval(dom);
    const GridFieldD b = TrigVecField::random(400 + f).eval(dom);
    const GridFieldD aa = lame_apply(a, visc, dom);
    const GridFieldD ab_f = lame_apply(b, visc, dom);
    const double ab = (aa.data * b.data).sum();
    const double ba = (ab_f.data * a.data).sum();
    const double scale = std::sqrt(aa.data.square().sum()) * std::sqrt(b.data.square().sum());
    CHECK(std::abs(ab - ba) <= 1e-11 * std::max(1.0, scale));
    // positive definiteness on nonzero fields
    CHECK((aa.data * a.data).sum() > 0.0);
  }
}

TEST_CASE("lame solve: zero data, manufactured recovery, convergence order") {
  const Viscosity visc(1.0, 0.5);
  const ThinDomain dom = build_channel(0.5, 8, 8, 12);
  GridFieldD zero(dom, 3);
  CHECK(lame_solve(zero, visc, dom, 1e-12).data.abs().maxCoeff() == 0.0);

  // analytic right-hand side of a single wall-compatible mode
  TrigVecField wf;
  wf.modes.push_back(TrigVecField::Mode{1, 1, 1, {0.4, -0.3, 0.2}});
  std::vector<double> errs;
  for (int n : {8, 16}) {
    const ThinDomain d2 = build_channel(0.5, n, n, 2 * n);
    const GridFieldD g = wf.eval_lame_rhs(d2, visc);
    const GridFieldD w = lame_solve(g, visc, d2, 1e-10);
    const GridFieldD wex = wf.eval(d2);
    GridFieldD diff = w;
    diff.data -= wex.data;
    errs.push_back(lp_norm(diff, 2.0, d2) / lp_norm(wex, 2.0, d2));
    // residual property in the quadrature-weighted norm
    GridFieldD res = lame_apply(w, visc, d2);
    res.data -= g.data;
    CHECK(lp_norm(res, 2.0, d2) <= 1e-10 * 1.0001);
  }
  INFO("relative errors ", errs[0], " ", errs[1]);
  CHECK(errs[0] <= 0.05);
  CHECK(errs[0] / errs[1] >= 3.0);
}

TEST_CASE("lame solve: iteration budget raises a numerical error") {
  const ThinDomain dom = build_channel(0.5, 8, 8, 12);
  const GridFieldD g = TrigVecField::random(77).eval(dom);
  CHECK_THROWS_AS(lame_solve(g, Viscosity(1.0, 0.0), dom, 1e-30, 10), NumericalError);
}

TEST_CASE("lame estimate ratio: degenerate pair and both exponents") {
  const ThinDomain dom = build_channel(0.5, 8, 8, 12);
  GridFieldD zero(dom, 3);
  CHECK(lame_estimate_ratio(zero, zero, dom, 2.0).degenerate);

  const Viscosity visc(1.0, 0.5);
  const TrigVecField wf = TrigVecField::random(11, 2, 2);
  const GridFieldD g = wf.eval_lame_rhs(dom, visc);
  const GridFieldD w = lame_solve(g, visc, dom, 1e-9);
  const RatioSample p2 = lame_estimate_ratio(w, g, dom, 2.0);
  const RatioSample p4 = lame_estimate_ratio(w, g, dom, 4.0);
  CHECK_FALSE(p2.degenerate);
  CHECK_FALSE(p4.degenerate);
  CHECK(p2.ratio > 0.0);
  CHECK(p4.ratio > 0.0);
}

TEST_CASE("lame estimate ratio uniform over widths on manufactured pairs") {
  const Viscosity visc(1.0, 0.5);
  double calib = 0.0;
  for (double eps : {1.0, 0.5, 0.25}) {
    const ThinDomain dom = build_channel(eps, 8, 8, 16);
    double worst = 0.0;
    for (int f = 0; f < 2; ++f) {
      const TrigVecField wf = TrigVecField::random(500 + f, 2, 2);
      const GridFieldD g = wf.eval_lame_rhs(dom, visc);
      const GridFieldD w = lame_solve(g, visc, dom, 1e-9);
      worst = std::max(worst, lame_estimate_ratio(w, g, dom, 2.0).ratio);
    }
    if (eps == 1.0) calib = worst;
    CHECK(worst <= 2.0 * calib);
  }
}

TEST_CASE("exponent fit: synthetic data and error paths") {
  std::vector<RatioSample> samples;
  for (double eps : {1.0, 0.5, 0.25, 0.125}) {
    RatioSample s;
    s.epsilon = eps;
    s.lhs = std::pow(eps, 0.75);
    s.rhs = 1.0;
    s.ratio = s.lhs;
    samples.push_back(s);
  }
  CHECK(fit_epsilon_exponent(samples) == doctest::Approx(0.75).epsilon(1e-10));

  samples.resize(1);
  CHECK_THROWS_AS(fit_epsilon_exponent(samples), ConfigError);
}

TEST_CASE("unscaled embedding family reproduces the predicted exponent") {
  std::vector<RatioSample> samples;
  for (double eps : {1.0, 0.5, 0.25, 0.125}) {
    const ThinDomain dom = build_channel(eps, 12, 12, 48);
    for (int f = 0; f < 10; ++f) {
      const GridFieldD v = TrigScalarField::random(600 + f, 3, 2, true).eval(dom);
      samples.push_back(sobolev_ratio(v, 2.0, 6.0, dom, false));
    }
  }
  const double slope = fit_epsilon_exponent(samples);
  INFO("fitted slope ", slope);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.3));
}
