/// @file solver3d.hpp
/// @brief Explicit time integrator for the 3D compressible barotropic system
///        on the thin channel with wall-slip boundary conditions.
///
/// Discretization: cell-centered collocated grid with two ghost layers.
/// Convective terms and the mass flux are central, conservative, with a small
/// fourth-order artificial dissipation scaled by the local |u| + c; wall-face
/// fluxes vanish identically so total mass is conserved to round-off.
/// Viscous terms use compact second-difference stencils of
/// mu Lap(u) + (mu/3 + eta) grad(div u). Time stepping is two-stage
/// (midpoint) Runge-Kutta.
///
/// Slip walls enter through ghost reflection: the wall-normal velocity
/// component is reflected odd (its face interpolant vanishes), tangential
/// components and the density are reflected even (zero normal derivative,
/// which on a flat face is exactly the zero-tangential-traction condition).
#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "thinns/errors.hpp"
#include "thinns/field.hpp"
#include "thinns/fieldcalc.hpp"
#include "thinns/geometry.hpp"
#include "thinns/physics.hpp"

namespace thinns {

/// Density positivity floor; reaching it raises BlowupError instead of
/// clipping, which would silently break conservation.
inline constexpr double density_floor = 1e-8;

/// Default coefficient of the fourth-order artificial dissipation.
inline constexpr double default_dissipation = 0.01;

/// Optional manufactured-solution sources: fills (srho, smom) at time t,
/// where srho forces the continuity equation and smom the conservative
/// momentum balance.
using SourceFn3D =
    std::function<void(double t, const ThinDomain&, GridFieldD& srho, GridFieldD& smom)>;

/// Ghost-padded component buffer with two ghost layers per side.
struct Padded3 {
  int nx = 0, ny = 0, nz = 0;
  ArrayXd a;

  static constexpr int ng = 2;

  Padded3() = default;
  Padded3(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_) {
    a = ArrayXd::Zero(static_cast<long>(nx + 4) * (ny + 4) * (nz + 4));
  }
  long id(int i, int j, int k) const {
    return (static_cast<long>(k + ng) * (ny + 4) + (j + ng)) * (nx + 4) + (i + ng);
  }
  double& at(int i, int j, int k) { return a[id(i, j, k)]; }
  double at(int i, int j, int k) const { return a[id(i, j, k)]; }
};

/// Ghost-padded (rho, u) state.
struct PaddedState3D {
  Padded3 rho;
  Padded3 u[3];
  double t = 0.0;
};

namespace detail3d {

enum class Parity { even, odd };

/// Fill ghost layers of one padded buffer, direction by direction, so that
/// edge and corner ghosts are consistent double reflections.
inline void reflect(Padded3& f, Parity px, Parity py, Parity pz) {
  const int nx = f.nx, ny = f.ny, nz = f.nz;
  const double sx = (px == Parity::odd) ? -1.0 : 1.0;
  const double sy = (py == Parity::odd) ? -1.0 : 1.0;
  const double sz = (pz == Parity::odd) ? -1.0 : 1.0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int m = 0; m < 2; ++m) {
        f.at(-1 - m, j, k) = sx * f.at(m, j, k);
        f.at(nx + m, j, k) = sx * f.at(nx - 1 - m, j, k);
      }
  for (int k = 0; k < nz; ++k)
    for (int i = -2; i < nx + 2; ++i)
      for (int m = 0; m < 2; ++m) {
        f.at(i, -1 - m, k) = sy * f.at(i, m, k);
        f.at(i, ny + m, k) = sy * f.at(i, ny - 1 - m, k);
      }
  for (int j = -2; j < ny + 2; ++j)
    for (int i = -2; i < nx + 2; ++i)
      for (int m = 0; m < 2; ++m) {
        f.at(i, j, -1 - m) = sz * f.at(i, j, m);
        f.at(i, j, nz + m) = sz * f.at(i, j, nz - 1 - m);
      }
}

}  // namespace detail3d

/// Copy interior values into a padded state and fill the slip ghost layers:
/// odd reflection of the wall-normal velocity component, even reflection of
/// tangential components and of the density.
inline PaddedState3D apply_slip_bc(const FluidState3D& s, const ThinDomain& dom) {
  using detail3d::Parity;
  PaddedState3D p;
  p.t = s.t;
  p.rho = Padded3(dom.nx, dom.ny, dom.nz);
  for (int c = 0; c < 3; ++c) p.u[c] = Padded3(dom.nx, dom.ny, dom.nz);
  for (int k = 0; k < dom.nz; ++k)
    for (int j = 0; j < dom.ny; ++j)
      for (int i = 0; i < dom.nx; ++i) {
        const long q = s.rho.idx(i, j, k);
        p.rho.at(i, j, k) = s.rho.data[q];
        for (int c = 0; c < 3; ++c) p.u[c].at(i, j, k) = s.u.data[c * s.u.cells() + q];
      }
  detail3d::reflect(p.rho, Parity::even, Parity::even, Parity::even);
  detail3d::reflect(p.u[0], Parity::odd, Parity::even, Parity::even);
  detail3d::reflect(p.u[1], Parity::even, Parity::odd, Parity::even);
  detail3d::reflect(p.u[2], Parity::even, Parity::even, Parity::odd);
  return p;
}

/// Max residual of the discrete wall conditions on a ghost-filled state:
/// face-interpolated normal velocity and the mismatch of the even reflection
/// of tangential components.
inline double slip_residual(const PaddedState3D& p, const ThinDomain& dom) {
  double r = 0.0;
  const int n[3] = {dom.nx, dom.ny, dom.nz};
  for (int d = 0; d < 3; ++d) {
    for (int k = 0; k < dom.nz; ++k)
      for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
          int c[3] = {i, j, k};
          if (c[d] != 0 && c[d] != n[d] - 1) continue;
          int g[3] = {i, j, k};
          g[d] = (c[d] == 0) ? -1 : n[d];
          // normal component face value
          r = std::max(r, 0.5 * std::abs(p.u[d].at(c[0], c[1], c[2]) + p.u[d].at(g[0], g[1], g[2])));
          // tangential components: ghost must mirror interior
          for (int tc = 0; tc < 3; ++tc) {
            if (tc == d) continue;
            r = std::max(r, std::abs(p.u[tc].at(g[0], g[1], g[2]) - p.u[tc].at(c[0], c[1], c[2])));
          }
        }
  }
  return r;
}

/// Semi-discrete right-hand side (d rho / dt, d u / dt).
struct Rhs3D {
  GridFieldD drho;
  GridFieldD du;
};

namespace detail3d {

struct Scratch {
  int nx = -1, ny = -1, nz = -1;
  PaddedState3D s;
  Padded3 p;       // pressure
  Padded3 lam;     // |u_d| + c, per direction, reused
  Padded3 lam2, lam3;
  Padded3 m[3];    // momentum rho*u
};

inline Scratch& scratch(const ThinDomain& dom) {
  thread_local Scratch sc;
  if (sc.nx != dom.nx || sc.ny != dom.ny || sc.nz != dom.nz) {
    sc.nx = dom.nx;
    sc.ny = dom.ny;
    sc.nz = dom.nz;
    sc.s.rho = Padded3(dom.nx, dom.ny, dom.nz);
    for (int c = 0; c < 3; ++c) sc.s.u[c] = Padded3(dom.nx, dom.ny, dom.nz);
    sc.p = Padded3(dom.nx, dom.ny, dom.nz);
    sc.lam = Padded3(dom.nx, dom.ny, dom.nz);
    sc.lam2 = Padded3(dom.nx, dom.ny, dom.nz);
    sc.lam3 = Padded3(dom.nx, dom.ny, dom.nz);
    for (int c = 0; c < 3; ++c) sc.m[c] = Padded3(dom.nx, dom.ny, dom.nz);
  }
  return sc;
}

/// accum += sign * div S(grad u), compact second differences for the
/// Laplacian and the diagonal of grad(div), 4-point cross stencils for the
/// mixed terms. Ghost layers of u must be filled.
inline void add_div_stress(const Padded3 u[3], const Viscosity& visc, const ThinDomain& dom,
                           GridFieldD& accum, double sign) {
  const int nx = dom.nx, ny = dom.ny, nz = dom.nz;
  const double h[3] = {dom.hx, dom.hy, dom.hz};
  const double mu = sign * visc.mu;
  const double lame2 = sign * (visc.mu / 3.0 + visc.eta);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const long q = accum.idx(i, j, k);
        for (int c = 0; c < 3; ++c) {
          const Padded3& uc = u[c];
          double lap = 0.0;
          for (int d = 0; d < 3; ++d) {
            int lo[3] = {i, j, k}, hi[3] = {i, j, k};
            lo[d] -= 1;
            hi[d] += 1;
            lap += (uc.at(hi[0], hi[1], hi[2]) - 2.0 * uc.at(i, j, k) +
                    uc.at(lo[0], lo[1], lo[2])) / (h[d] * h[d]);
          }
          double graddiv = 0.0;
          for (int d = 0; d < 3; ++d) {
            const Padded3& ud = u[d];
            if (d == c) {
              int lo[3] = {i, j, k}, hi[3] = {i, j, k};
              lo[c] -= 1;
              hi[c] += 1;
              graddiv += (ud.at(hi[0], hi[1], hi[2]) - 2.0 * ud.at(i, j, k) +
                          ud.at(lo[0], lo[1], lo[2])) / (h[c] * h[c]);
            } else {
              int pp[3] = {i, j, k}, pm[3] = {i, j, k}, mp[3] = {i, j, k}, mm[3] = {i, j, k};
              pp[c] += 1; pp[d] += 1;
              pm[c] += 1; pm[d] -= 1;
              mp[c] -= 1; mp[d] += 1;
              mm[c] -= 1; mm[d] -= 1;
              graddiv += (ud.at(pp[0], pp[1], pp[2]) - ud.at(pm[0], pm[1], pm[2]) -
                          ud.at(mp[0], mp[1], mp[2]) + ud.at(mm[0], mm[1], mm[2])) /
                         (4.0 * h[c] * h[d]);
            }
          }
          accum.data[c * accum.cells() + q] += mu * lap + lame2 * graddiv;
        }
      }
}

}  // namespace detail3d

/// Assemble the right-hand side of the semi-discrete system. Requires
/// rho > 0; `kappa4` is the artificial-dissipation coefficient.
inline Rhs3D rhs3d(const FluidState3D& s, const PressureLaw& law, const Viscosity& visc,
                   const ThinDomain& dom, double kappa4 = default_dissipation,
                   const SourceFn3D* src = nullptr) {
  using detail3d::Parity;
  const int nx = dom.nx, ny = dom.ny, nz = dom.nz;
  if (s.rho.data.minCoeff() <= 0.0)
    throw BlowupError(s.t, "rhs3d: nonpositive density at t = " + std::to_string(s.t));

  auto& sc = detail3d::scratch(dom);
  // interior copy + ghost fill
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const long q = s.rho.idx(i, j, k);
        sc.s.rho.at(i, j, k) = s.rho.data[q];
        for (int c = 0; c < 3; ++c) sc.s.u[c].at(i, j, k) = s.u.data[c * s.u.cells() + q];
      }
  detail3d::reflect(sc.s.rho, Parity::even, Parity::even, Parity::even);
  detail3d::reflect(sc.s.u[0], Parity::odd, Parity::even, Parity::even);
  detail3d::reflect(sc.s.u[1], Parity::even, Parity::odd, Parity::even);
  detail3d::reflect(sc.s.u[2], Parity::even, Parity::even, Parity::odd);

  // derived padded fields (valid on ghosts too, computed pointwise)
  const double a = law.a, g = law.gamma;
  const long np = sc.s.rho.a.size();
  for (long q = 0; q < np; ++q) {
    const double rho = sc.s.rho.a[q];
    sc.p.a[q] = a * std::pow(rho, g);
    const double cs = std::sqrt(a * g * std::pow(rho, g - 1.0));
    sc.lam.a[q] = std::abs(sc.s.u[0].a[q]) + cs;
    sc.lam2.a[q] = std::abs(sc.s.u[1].a[q]) + cs;
    sc.lam3.a[q] = std::abs(sc.s.u[2].a[q]) + cs;
    for (int c = 0; c < 3; ++c) sc.m[c].a[q] = rho * sc.s.u[c].a[q];
  }

  Rhs3D out;
  out.drho = GridFieldD(dom, 1);
  out.du = GridFieldD(dom, 3);

  const double h[3] = {dom.hx, dom.hy, dom.hz};
  const Padded3* lam[3] = {&sc.lam, &sc.lam2, &sc.lam3};

  // Convective and dissipative fluxes, direction by direction.
  // mom_rhs accumulates the conservative momentum right-hand side.
  GridFieldD mom_rhs(dom, 3);

  for (int d = 0; d < 3; ++d) {
    const int nd = (d == 0) ? nx : (d == 1) ? ny : nz;
    const double ih = 1.0 / h[d];
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const int c0[3] = {i, j, k};
          const int pd = c0[d];
          auto off = [&](int s_) {
            int cc[3] = {i, j, k};
            cc[d] += s_;
            return sc.s.rho.id(cc[0], cc[1], cc[2]);
          };
          const long qm2 = off(-2), qm1 = off(-1), q0 = off(0), qp1 = off(1), qp2 = off(2);

          const bool wall_lo = (pd == 0);
          const bool wall_hi = (pd == nd - 1);

          // mass flux rho*u_d at both faces
          const Padded3& md = sc.m[d];
          double fl = wall_lo ? 0.0 : 0.5 * (md.a[qm1] + md.a[q0]);
          double fr = wall_hi ? 0.0 : 0.5 * (md.a[q0] + md.a[qp1]);
          if (kappa4 > 0.0) {
            if (!wall_lo) {
              const double lf = 0.5 * (lam[d]->a[qm1] + lam[d]->a[q0]);
              fl += kappa4 * lf * (sc.s.rho.a[qp1] - 3.0 * sc.s.rho.a[q0] +
                                   3.0 * sc.s.rho.a[qm1] - sc.s.rho.a[qm2]);
            }
            if (!wall_hi) {
              const double lf = 0.5 * (lam[d]->a[q0] + lam[d]->a[qp1]);
              fr += kappa4 * lf * (sc.s.rho.a[qp2] - 3.0 * sc.s.rho.a[qp1] +
                                   3.0 * sc.s.rho.a[q0] - sc.s.rho.a[qm1]);
            }
          }
          out.drho.data[out.drho.idx(i, j, k)] -= (fr - fl) * ih;

          // momentum fluxes rho*u_d*u_c per component, plus face-average pressure
          for (int c = 0; c < 3; ++c) {
            const Padded3& uc = sc.s.u[c];
            double gl = wall_lo ? 0.5 * (md.a[qm1] * uc.a[qm1] + md.a[q0] * uc.a[q0])
                                : 0.5 * (md.a[qm1] * uc.a[qm1] + md.a[q0] * uc.a[q0]);
            double gr = 0.5 * (md.a[q0] * uc.a[q0] + md.a[qp1] * uc.a[qp1]);
            if (kappa4 > 0.0) {
              if (!wall_lo) {
                const double lf = 0.5 * (lam[d]->a[qm1] + lam[d]->a[q0]);
                gl += kappa4 * lf * (sc.m[c].a[qp1] - 3.0 * sc.m[c].a[q0] +
                                     3.0 * sc.m[c].a[qm1] - sc.m[c].a[qm2]);
              }
              if (!wall_hi) {
                const double lf = 0.5 * (lam[d]->a[q0] + lam[d]->a[qp1]);
                gr += kappa4 * lf * (sc.m[c].a[qp2] - 3.0 * sc.m[c].a[qp1] +
                                     3.0 * sc.m[c].a[q0] - sc.m[c].a[qm1]);
              }
            }
            double conv = -(gr - gl) * ih;
            if (c == d) conv -= (0.5 * (sc.p.a[q0] + sc.p.a[qp1]) -
                                 0.5 * (sc.p.a[qm1] + sc.p.a[q0])) * ih;
            mom_rhs.data[c * mom_rhs.cells() + mom_rhs.idx(i, j, k)] += conv;
          }
        }
  }

  // Viscous terms: mu Lap(u_c) + (mu/3 + eta) sum_d d_c d_d u_d.
  detail3d::add_div_stress(sc.s.u, visc, dom, mom_rhs, 1.0);

  // Optional manufactured sources (continuity and conservative momentum).
  if (src != nullptr) {
    GridFieldD srho(dom, 1), smom(dom, 3);
    (*src)(s.t, dom, srho, smom);
    out.drho.data += srho.data;
    for (int c = 0; c < 3; ++c) mom_rhs.comp(c) += smom.comp(c);
  }

  // Convert the conservative momentum balance to du/dt:
  // du/dt = (mom_rhs - u * drho/dt) / rho.
  for (int c = 0; c < 3; ++c)
    out.du.comp(c) = (mom_rhs.comp(c) - s.u.comp(c) * out.drho.data) / s.rho.data;

  return out;
}

/// Stable explicit step: cfl * min over cells of
/// min( h / (|u| + c), rho h^2 / (2 (2 mu + eta) dim) ), dim = 3.
inline double stable_dt(const FluidState3D& s, const PressureLaw& law, const Viscosity& visc,
                        const ThinDomain& dom, double cfl) {
  if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("stable_dt: cfl must lie in (0, 1]");
  const double h = std::min(dom.hx, std::min(dom.hy, dom.hz));
  const double diff = 2.0 * visc.mu + visc.eta;
  double dt = std::numeric_limits<double>::infinity();
  for (long q = 0; q < s.rho.cells(); ++q) {
    const double rho = s.rho.data[q];
    if (rho <= 0.0) throw BlowupError(s.t, "stable_dt: nonpositive density");
    const double umag = std::sqrt(s.u.comp(0)[q] * s.u.comp(0)[q] +
                                  s.u.comp(1)[q] * s.u.comp(1)[q] +
                                  s.u.comp(2)[q] * s.u.comp(2)[q]);
    const double c = sound_speed(rho, law);
    double cell_dt = h / (umag + c);
    if (diff > 0.0) cell_dt = std::min(cell_dt, rho * h * h / (2.0 * diff * 3.0));
    dt = std::min(dt, cell_dt);
  }
  return cfl * dt;
}

namespace detail3d {

inline void check_admissible(const FluidState3D& s) {
  if (!s.rho.all_finite() || !s.u.all_finite())
    throw BlowupError(s.t, "step3d: non-finite values at t = " + std::to_string(s.t));
  if (s.rho.data.minCoeff() <= density_floor)
    throw BlowupError(s.t, "step3d: density reached the positivity floor at t = " +
                               std::to_string(s.t));
}

}  // namespace detail3d

/// One midpoint Runge-Kutta step. Ghost layers are refilled inside each
/// stage's right-hand-side assembly. Raises BlowupError when the density
/// floor is breached or values stop being finite.
inline FluidState3D step3d(const FluidState3D& s, double dt, const PressureLaw& law,
                           const Viscosity& visc, const ThinDomain& dom,
                           double kappa4 = default_dissipation,
                           const SourceFn3D* src = nullptr) {
  const Rhs3D k1 = rhs3d(s, law, visc, dom, kappa4, src);
  FluidState3D mid;
  mid.rho = s.rho;
  mid.u = s.u;
  mid.t = s.t + 0.5 * dt;
  mid.rho.data += (0.5 * dt) * k1.drho.data;
  mid.u.data += (0.5 * dt) * k1.du.data;
  detail3d::check_admissible(mid);

  const Rhs3D k2 = rhs3d(mid, law, visc, dom, kappa4, src);
  FluidState3D out;
  out.rho = s.rho;
  out.u = s.u;
  out.t = s.t + dt;
  out.rho.data += dt * k2.drho.data;
  out.u.data += dt * k2.du.data;
  detail3d::check_admissible(out);
  return out;
}

/// Total discrete mass.
inline double total_mass(const FluidState3D& s, const ThinDomain& dom) {
  return integral(s.rho, dom);
}

/// Total discrete energy: integral of rho |u|^2 / 2 + H(rho).
inline double total_energy(const FluidState3D& s, const PressureLaw& law, const ThinDomain& dom) {
  double acc = 0.0;
  for (long q = 0; q < s.rho.cells(); ++q) {
    const double rho = s.rho.data[q];
    const double u2 = s.u.comp(0)[q] * s.u.comp(0)[q] + s.u.comp(1)[q] * s.u.comp(1)[q] +
                      s.u.comp(2)[q] * s.u.comp(2)[q];
    acc += 0.5 * rho * u2 + potential_h(rho, law);
  }
  return acc * dom.cell_volume();
}

}  // namespace thinns
