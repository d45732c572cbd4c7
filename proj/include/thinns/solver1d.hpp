/// @file solver1d.hpp
/// @brief Axial (1D) compressible flow solver with no-slip ends, used to
///        produce reference trajectories for the thin channel.
///
/// Same discretization family as the 3D solver: cell-centered conservative
/// central fluxes with fourth-order artificial dissipation, compact viscous
/// stencil with the effective coefficient nu = 4 mu / 3 + eta, midpoint
/// Runge-Kutta in time. No-slip ends enter through ghost reflection (odd in
/// u, even in rho), so the face value of u vanishes identically.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "thinns/errors.hpp"
#include "thinns/field.hpp"
#include "thinns/geometry.hpp"
#include "thinns/physics.hpp"
#include "thinns/solver3d.hpp"  // density_floor, default_dissipation

namespace thinns {

/// Optional manufactured sources for the 1D system: continuity and
/// conservative momentum forcing as functions of (t, y).
struct Source1D {
  std::function<double(double t, double y)> srho;
  std::function<double(double t, double y)> smom;
};

namespace detail1d {

struct Pad1 {
  int n = 0;
  ArrayXd a;
  explicit Pad1(int n_ = 0) : n(n_), a(ArrayXd::Zero(n_ + 4)) {}
  double& at(int i) { return a[i + 2]; }
  double at(int i) const { return a[i + 2]; }
};

inline void reflect(Pad1& f, bool odd) {
  const double s = odd ? -1.0 : 1.0;
  for (int m = 0; m < 2; ++m) {
    f.at(-1 - m) = s * f.at(m);
    f.at(f.n + m) = s * f.at(f.n - 1 - m);
  }
}

}  // namespace detail1d

/// Weights of a one-sided stencil approximating the m-th derivative at the
/// face y = 0 from the first `npts` cell-center values (centers at
/// (q + 1/2) h). Solved from the moment conditions with Eigen.
inline ArrayXd face_stencil_weights(int npts, int deriv, double h) {
  Eigen::MatrixXd vand(npts, npts);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(npts);
  double fact = 1.0;
  for (int j = 1; j <= deriv; ++j) fact *= j;
  rhs[deriv] = fact;
  for (int r = 0; r < npts; ++r)
    for (int q = 0; q < npts; ++q) vand(r, q) = std::pow((q + 0.5) * h, r);
  Eigen::VectorXd w = vand.fullPivLu().solve(rhs);
  return w.array();
}

/// Endpoint residuals of the admissible-data conditions for the 1D system:
/// u and its second derivative vanish at both ends, the density gradient
/// vanishes at both ends.
struct CompatReport {
  double u_face = 0.0;       ///< max |u| interpolated to the two ends
  double d2u_face = 0.0;     ///< max |u''| at the two ends
  double drho_face = 0.0;    ///< max |rho'| at the two ends
  double tol = 0.0;
  bool ok = false;
};

/// Checks the endpoint conditions with high-order one-sided stencils. The
/// tolerance carries an O(h^4) truncation allowance on coarse grids; at the
/// reference resolution the absolute floor 1e-8 is the binding figure.
inline CompatReport check_compat1d(const ArrayXd& rho0, const ArrayXd& u0, double tol_abs = 1e-8) {
  const int nz = static_cast<int>(rho0.size());
  if (u0.size() != nz) throw ConfigError("check_compat1d: profile length mismatch");
  const double h = 1.0 / nz;
  const int npts = std::min(6, nz);
  const ArrayXd w0 = face_stencil_weights(npts, 0, h);
  const ArrayXd w1 = face_stencil_weights(npts, 1, h);
  const ArrayXd w2 = face_stencil_weights(npts, 2, h);

  auto apply = [&](const ArrayXd& w, const ArrayXd& f, bool from_top) {
    double acc = 0.0;
    for (int q = 0; q < npts; ++q) acc += w[q] * (from_top ? f[nz - 1 - q] : f[q]);
    return acc;
  };

  CompatReport r;
  r.u_face = std::max(std::abs(apply(w0, u0, false)), std::abs(apply(w0, u0, true)));
  r.d2u_face = std::max(std::abs(apply(w2, u0, false)), std::abs(apply(w2, u0, true)));
  r.drho_face = std::max(std::abs(apply(w1, rho0, false)), std::abs(apply(w1, rho0, true)));
  const double scale = std::max(1.0, std::max(u0.abs().maxCoeff(), rho0.abs().maxCoeff()));
  r.tol = std::max(tol_abs, 100.0 * h * h * h * h * scale);
  r.ok = r.u_face <= r.tol && r.d2u_face <= r.tol && r.drho_face <= r.tol;
  return r;
}

/// Semi-discrete right-hand side of the 1D system.
struct Rhs1D {
  ArrayXd drho;
  ArrayXd du;
};

inline Rhs1D rhs1d(const Profile1DD& p, const PressureLaw& law, const Viscosity& visc,
                   double kappa4 = default_dissipation, const Source1D* src = nullptr) {
  const int nz = p.nz();
  const double h = 1.0 / nz;
  if (p.rho.minCoeff() <= 0.0)
    throw BlowupError(p.t, "rhs1d: nonpositive density at t = " + std::to_string(p.t));

  detail1d::Pad1 rho(nz), u(nz), m(nz), pr(nz), lam(nz);
  for (int k = 0; k < nz; ++k) {
    rho.at(k) = p.rho[k];
    u.at(k) = p.u[k];
  }
  detail1d::reflect(rho, false);
  detail1d::reflect(u, true);
  for (int k = -2; k < nz + 2; ++k) {
    m.at(k) = rho.at(k) * u.at(k);
    pr.at(k) = pressure(rho.at(k), law);
    lam.at(k) = std::abs(u.at(k)) + sound_speed(rho.at(k), law);
  }

  Rhs1D out;
  out.drho = ArrayXd::Zero(nz);
  ArrayXd mom = ArrayXd::Zero(nz);
  const double ih = 1.0 / h;
  for (int k = 0; k < nz; ++k) {
    const bool wall_lo = (k == 0), wall_hi = (k == nz - 1);
    double fl = wall_lo ? 0.0 : 0.5 * (m.at(k - 1) + m.at(k));
    double fr = wall_hi ? 0.0 : 0.5 * (m.at(k) + m.at(k + 1));
    double gl = 0.5 * (m.at(k - 1) * u.at(k - 1) + m.at(k) * u.at(k));
    double gr = 0.5 * (m.at(k) * u.at(k) + m.at(k + 1) * u.at(k + 1));
    if (kappa4 > 0.0) {
      if (!wall_lo) {
        const double lf = 0.5 * (lam.at(k - 1) + lam.at(k));
        const double d3r = rho.at(k + 1) - 3.0 * rho.at(k) + 3.0 * rho.at(k - 1) - rho.at(k - 2);
        const double d3m = m.at(k + 1) - 3.0 * m.at(k) + 3.0 * m.at(k - 1) - m.at(k - 2);
        fl += kappa4 * lf * d3r;
        gl += kappa4 * lf * d3m;
      }
      if (!wall_hi) {
        const double lf = 0.5 * (lam.at(k) + lam.at(k + 1));
        const double d3r = rho.at(k + 2) - 3.0 * rho.at(k + 1) + 3.0 * rho.at(k) - rho.at(k - 1);
        const double d3m = m.at(k + 2) - 3.0 * m.at(k + 1) + 3.0 * m.at(k) - m.at(k - 1);
        fr += kappa4 * lf * d3r;
        gr += kappa4 * lf * d3m;
      }
    }
    out.drho[k] = -(fr - fl) * ih;
    double conv = -(gr - gl) * ih;
    conv -= (0.5 * (pr.at(k) + pr.at(k + 1)) - 0.5 * (pr.at(k - 1) + pr.at(k))) * ih;
    const double viscous = visc.nu * (u.at(k + 1) - 2.0 * u.at(k) + u.at(k - 1)) * ih * ih;
    mom[k] = conv + viscous;
  }

  if (src != nullptr) {
    for (int k = 0; k < nz; ++k) {
      const double y = (k + 0.5) * h;
      out.drho[k] += src->srho(p.t, y);
      mom[k] += src->smom(p.t, y);
    }
  }

  // du/dt = (d(rho u)/dt - u drho/dt) / rho
  out.du = (mom - p.u * out.drho) / p.rho;
  return out;
}

/// Stable explicit step for the 1D system (dim = 1, diffusivity nu).
inline double stable_dt1d(const Profile1DD& p, const PressureLaw& law, const Viscosity& visc,
                          double cfl) {
  if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("stable_dt1d: cfl must lie in (0, 1]");
  const double h = 1.0 / p.nz();
  double dt = std::numeric_limits<double>::infinity();
  for (int k = 0; k < p.nz(); ++k) {
    const double rho = p.rho[k];
    if (rho <= 0.0) throw BlowupError(p.t, "stable_dt1d: nonpositive density");
    double cell = h / (std::abs(p.u[k]) + sound_speed(rho, law));
    if (visc.nu > 0.0) cell = std::min(cell, rho * h * h / (2.0 * visc.nu));
    dt = std::min(dt, cell);
  }
  return cfl * dt;
}

namespace detail1d {

inline void check_admissible(const Profile1DD& p) {
  if (!p.rho.isFinite().all() || !p.u.isFinite().all())
    throw BlowupError(p.t, "step1d: non-finite values at t = " + std::to_string(p.t));
  if (p.rho.minCoeff() <= density_floor)
    throw BlowupError(p.t, "step1d: density reached the positivity floor at t = " +
                               std::to_string(p.t));
}

}  // namespace detail1d

inline Profile1DD step1d(const Profile1DD& p, double dt, const PressureLaw& law,
                         const Viscosity& visc, double kappa4 = default_dissipation,
                         const Source1D* src = nullptr) {
  const Rhs1D k1 = rhs1d(p, law, visc, kappa4, src);
  Profile1DD mid{p.rho + (0.5 * dt) * k1.drho, p.u + (0.5 * dt) * k1.du, p.t + 0.5 * dt};
  detail1d::check_admissible(mid);
  const Rhs1D k2 = rhs1d(mid, law, visc, kappa4, src);
  Profile1DD out{p.rho + dt * k2.drho, p.u + dt * k2.du, p.t + dt};
  detail1d::check_admissible(out);
  return out;
}

/// Integrate to time T from admissible data; returns `n_samples + 1`
/// uniformly spaced snapshots including t = 0 and t = T. The step size is
/// recomputed per sample interval so samples land exactly.
inline std::vector<Profile1DD> solve1d(const ArrayXd& rho0, const ArrayXd& u0, double T,
                                       const PressureLaw& law, const Viscosity& visc, int nz,
                                       double cfl, int n_samples = 1,
                                       double kappa4 = default_dissipation,
                                       const Source1D* src = nullptr,
                                       bool check_compat = true) {
  if (rho0.size() != nz || u0.size() != nz)
    throw ConfigError("solve1d: initial profiles must have length nz");
  if (rho0.minCoeff() <= 0.0) throw ConfigError("solve1d: initial density must be positive");
  if (check_compat) {
    const CompatReport cr = check_compat1d(rho0, u0);
    if (!cr.ok)
      throw ConfigError("solve1d: initial data violate the endpoint conditions "
                        "(|u| face = " + std::to_string(cr.u_face) +
                        ", |u''| face = " + std::to_string(cr.d2u_face) +
                        ", |rho'| face = " + std::to_string(cr.drho_face) +
                        ", tol = " + std::to_string(cr.tol) + ")");
  }
  if (!(T >= 0.0)) throw ConfigError("solve1d: horizon must be nonnegative");
  if (n_samples < 1) throw ConfigError("solve1d: need at least one sample interval");

  std::vector<Profile1DD> traj;
  Profile1DD cur{rho0, u0, 0.0};
  traj.push_back(cur);
  for (int sIdx = 1; sIdx <= n_samples; ++sIdx) {
    const double t_target = T * sIdx / n_samples;
    const double span = t_target - cur.t;
    if (span <= 0.0) {
      traj.push_back(cur);
      continue;
    }
    const double dt0 = stable_dt1d(cur, law, visc, cfl);
    const int nsteps = std::max(1, static_cast<int>(std::ceil(span / dt0)));
    const double dt = span / nsteps;
    for (int step = 0; step < nsteps; ++step) cur = step1d(cur, dt, law, visc, kappa4, src);
    cur.t = t_target;  // guard against accumulated round-off in t
    traj.push_back(cur);
  }
  return traj;
}

/// Block-average a fine profile down to a coarser resolution (the fine
/// length must be an integer multiple of the coarse one).
inline ArrayXd downsample(const ArrayXd& fine, int nz_coarse) {
  const int nf = static_cast<int>(fine.size());
  if (nz_coarse <= 0 || nf % nz_coarse != 0)
    throw ConfigError("downsample: fine resolution must be a multiple of the coarse one");
  const int r = nf / nz_coarse;
  ArrayXd out(nz_coarse);
  for (int k = 0; k < nz_coarse; ++k) out[k] = fine.segment(k * r, r).mean();
  return out;
}

/// Total discrete mass of a profile on the unit interval.
inline double mass1d(const Profile1DD& p) { return p.rho.sum() / p.nz(); }

}  // namespace thinns
