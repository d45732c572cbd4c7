/// @file test_solver1d.cpp
/// @brief Axial solver: equilibrium, effective viscosity reduction, endpoint
///        compatibility checks, mass conservation, manufactured-solution
///        order, self-convergence and the guarded blow-up path.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mms.hpp"
#include "thinns/experiments.hpp"
#include "thinns/solver1d.hpp"

using namespace thinns;

TEST_CASE("uniform state is an equilibrium") {
  Profile1DD p{ArrayXd::Constant(32, 1.3), ArrayXd::Zero(32), 0.0};
  const Rhs1D r = rhs1d(p, PressureLaw{1.0, 2.0}, Viscosity(0.1, 0.0));
  CHECK(r.drho.abs().maxCoeff() <= 1e-14);
  CHECK(r.du.abs().maxCoeff() <= 1e-14);

  const Profile1DD q = step1d(p, 1e-3, PressureLaw{1.0, 2.0}, Viscosity(0.1, 0.0));
  CHECK((q.rho - p.rho).abs().maxCoeff() == 0.0);
  CHECK((q.u - p.u).abs().maxCoeff() == 0.0);
}

TEST_CASE("effective axial viscosity is 4 mu / 3 + eta") {
  // same nu through (mu, eta) = (3, 1) and (mu -> 0+, eta -> 5): the
  // diffusion term must agree because only nu enters the axial operator.
  const int nz = 64;
  Profile1DD p{canonical_rho0(1.0, 0.05, nz), canonical_u0(0.2, nz), 0.0};
  const Viscosity a(3.0, 1.0);
  CHECK(a.nu == doctest::Approx(5.0));
  const Viscosity b(1e-14, 5.0 - 4.0 * 1e-14 / 3.0);
  CHECK(b.nu == doctest::Approx(5.0).epsilon(1e-12));
  const Rhs1D ra = rhs1d(p, PressureLaw{}, a);
  const Rhs1D rb = rhs1d(p, PressureLaw{}, b);
  CHECK((ra.du - rb.du).abs().maxCoeff() <= 1e-9);
  CHECK((ra.drho - rb.drho).abs().maxCoeff() == 0.0);
}

TEST_CASE("endpoint compatibility checks") {
  const int nz = 512;
  // canonical family passes
  CHECK(check_compat1d(canonical_rho0(1.0, 0.1, nz), canonical_u0(0.1, nz)).ok);
  // parabola violates the second-derivative condition at the ends
  ArrayXd u_bad(nz);
  for (int k = 0; k < nz; ++k) {
    const double y = (k + 0.5) / nz;
    u_bad[k] = y * (1.0 - y);
  }
  const CompatReport bad = check_compat1d(canonical_rho0(1.0, 0.1, nz), u_bad);
  CHECK_FALSE(bad.ok);
  CHECK(bad.d2u_face > 1.0);
  // nonzero end velocity
  CHECK_FALSE(check_compat1d(canonical_rho0(1.0, 0.0, nz), ArrayXd::Constant(nz, 0.1)).ok);
  // coarse grids keep accepting the compatible family
  CHECK(check_compat1d(canonical_rho0(1.0, 0.1, 64), canonical_u0(0.1, 64)).ok);

  CHECK_THROWS_AS(solve1d(canonical_rho0(1.0, 0.1, nz), u_bad, 0.01, PressureLaw{},
                          Viscosity(0.1, 0.0), nz, 0.4),
                  ConfigError);
}

TEST_CASE("constant data give a constant trajectory") {
  const int nz = 64;
  const auto traj = solve1d(ArrayXd::Constant(nz, 1.0), ArrayXd::Zero(nz), 0.3, PressureLaw{},
                            Viscosity(0.1, 0.0), nz, 0.4, 3);
  CHECK(traj.size() == 4);
  for (const Profile1DD& p : traj) {
    CHECK((p.rho - 1.0).abs().maxCoeff() == 0.0);
    CHECK(p.u.abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("canonical run conserves mass to 1e-11") {
  const int nz = 256;
  const auto traj = solve1d(canonical_rho0(1.0, 0.1, nz), canonical_u0(0.1, nz), 0.5,
                            PressureLaw{1.0, 2.0}, Viscosity(0.1, 0.0), nz, 0.4, 5);
  const double m0 = mass1d(traj.front());
  // integral of the cosine bump vanishes: total mass equals rho_bar
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-12));
  for (const Profile1DD& p : traj) CHECK(std::abs(mass1d(p) - m0) / m0 <= 1e-11);
  // the raw endpoint interpolation stays small for the smooth solution
  const Profile1DD& last = traj.back();
  CHECK(std::abs(1.5 * last.u[0] - 0.5 * last.u[1]) <= 1e-4);
}

TEST_CASE("manufactured solution: observed order >= 1.9") {
  const thinns_test::Mms1D mms;
  const Source1D src = mms.source_fn();
  std::vector<double> errs;
  for (int nz : {64, 128, 256}) {
    Profile1DD p = mms.profile(0.0, nz);
    const double T = 0.05;
    const double dt0 = stable_dt1d(p, mms.law, mms.visc, 0.4);
    const int nsteps = static_cast<int>(std::ceil(T / dt0));
    const double dt = T / nsteps;
    for (int s = 0; s < nsteps; ++s) p = step1d(p, dt, mms.law, mms.visc, 0.01, &src);
    errs.push_back(mms.error_l2(p));
  }
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  INFO("orders ", o1, " ", o2);
  CHECK(0.5 * (o1 + o2) >= 1.9);
}

TEST_CASE("self-convergence against a finer reference") {
  // errors vs a 4x reference shrink by >= 3.6 when nz doubles
  const PressureLaw law{1.0, 2.0};
  const Viscosity visc(0.1, 0.0);
  const double T = 0.1;
  auto run = [&](int nz) {
    return solve1d(canonical_rho0(1.0, 0.1, nz), canonical_u0(0.1, nz), T, law, visc, nz, 0.3, 1)
        .back();
  };
  const Profile1DD fine = run(256);
  auto err_vs_fine = [&](const Profile1DD& p) {
    const ArrayXd r_ref = downsample(fine.rho, p.nz());
    const ArrayXd u_ref = downsample(fine.u, p.nz());
    return std::sqrt(((p.rho - r_ref).square().sum() + (p.u - u_ref).square().sum()) / p.nz());
  };
  const double e32 = err_vs_fine(run(32));
  const double e64 = err_vs_fine(run(64));
  INFO("e32 ", e32, " e64 ", e64, " ratio ", e32 / e64);
  CHECK(e32 / e64 >= 3.6);
}

TEST_CASE("density floor raises a blow-up signal, not NaNs") {
  const int nz = 32;
  // aggressive data plus an oversized step drive the density negative
  Profile1DD p{canonical_rho0(0.2, 0.19, nz), canonical_u0(2.0, nz), 0.0};
  const PressureLaw law{1.0, 2.0};
  const Viscosity visc(0.01, 0.0);
  const double dt = 10.0 * stable_dt1d(p, law, visc, 1.0);
  bool blew = false;
  try {
    for (int s = 0; s < 500; ++s) p = step1d(p, dt, law, visc, 0.0);
  } catch (const BlowupError& e) {
    blew = true;
    CHECK(std::isfinite(e.t));
  }
  CHECK(blew);
}
