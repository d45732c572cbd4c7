/// @file energetics.hpp
/// @brief Distance functionals between a reference and a perturbed solution:
///        the modulated energy E, dissipation D, the augmented E*, the seven
///        source integrals of the discrete energy balance, and the residual
///        of that balance along a trajectory.
///
/// Time derivatives of the difference fields are taken from the solvers'
/// semi-discrete right-hand sides, not from finite-differencing stored
/// states; the reference's second time derivative (needed by one source
/// term only) is approximated by differencing right-hand sides between
/// samples and is flagged as such by the callers.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "thinns/errors.hpp"
#include "thinns/field.hpp"
#include "thinns/fieldcalc.hpp"
#include "thinns/geometry.hpp"
#include "thinns/physics.hpp"
#include "thinns/solver3d.hpp"

namespace thinns {

/// Reference/perturbed states at one instant together with their
/// semi-discrete time derivatives.
struct PairSnapshot {
  FluidState3D ref;
  FluidState3D pert;
  Rhs3D ref_rhs;
  Rhs3D pert_rhs;
};

/// All functionals at one instant.
struct EnergyReport {
  double t = 0.0;
  double e = 0.0;              ///< modulated energy
  double d_diss = 0.0;         ///< dissipation functional
  double estar = 0.0;          ///< e + ||grad sigma||_4^2
  double grad_sigma_l4 = 0.0;
  std::array<double, 7> i{};   ///< source integrals
  double sigma_linf = 0.0;
  double w_linf = 0.0;
  // diagnostics used by the quadratic-equivalence check
  double sigma_l2sq = 0.0;     ///< int sigma^2
  double relent_int = 0.0;     ///< int of the entropy integrand
  double rho_ref_min = 0.0, rho_ref_max = 0.0;
  double rho_pert_min = 0.0, rho_pert_max = 0.0;

  double i_sum() const {
    double s = 0.0;
    for (double v : i) s += v;
    return s;
  }
};

namespace detail_en {

inline void check_aligned(const PairSnapshot& p) {
  if (!p.ref.rho.same_shape(p.pert.rho) || !p.ref.u.same_shape(p.pert.u))
    throw ConfigError("pair snapshot: grids do not match");
  if (p.ref.t != p.pert.t) throw ConfigError("pair snapshot: times do not match");
}

}  // namespace detail_en

/// Full functional evaluation. `d2u_ref` optionally supplies the reference's
/// second time derivative of velocity (3 components); when absent the
/// corresponding source contribution is evaluated with zero.
inline EnergyReport energy_report(const PairSnapshot& pair, const PressureLaw& law,
                                  const Viscosity& visc, const ThinDomain& dom,
                                  const GridFieldD* d2u_ref = nullptr) {
  detail_en::check_aligned(pair);
  const long n = pair.ref.rho.cells();
  const double eps = dom.epsilon;
  const double eps2 = eps * eps, eps4 = eps2 * eps2;
  const double vol = dom.cell_volume();

  const GridFieldD& rho_r = pair.ref.rho;
  const GridFieldD& rho_p = pair.pert.rho;
  const GridFieldD& u_r = pair.ref.u;
  const GridFieldD& u_p = pair.pert.u;

  GridFieldD sigma(dom, 1), w(dom, 3), dtw(dom, 3);
  sigma.data = rho_p.data - rho_r.data;
  w.data = u_p.data - u_r.data;
  dtw.data = pair.pert_rhs.du.data - pair.ref_rhs.du.data;

  const GridFieldD grad_w = gradient(w, dom);
  const GridFieldD grad_dtw = gradient(dtw, dom);
  const GridFieldD grad_sigma = gradient(sigma, dom);
  const GridFieldD grad_ur = gradient(u_r, dom);
  const GridFieldD grad_rhor = gradient(rho_r, dom);
  const GridFieldD grad_dtur = gradient(pair.ref_rhs.du, dom);

  EnergyReport rep;
  rep.t = pair.ref.t;
  rep.rho_ref_min = rho_r.data.minCoeff();
  rep.rho_ref_max = rho_r.data.maxCoeff();
  rep.rho_pert_min = rho_p.data.minCoeff();
  rep.rho_pert_max = rho_p.data.maxCoeff();

  double e_acc = 0.0, d_acc = 0.0, relent_acc = 0.0, sig2_acc = 0.0;
  std::array<double, 7> iacc{};
  double sig_linf = 0.0, w_linf = 0.0;

  Mat3d Jw, Jdtw, Ju, Jdtu;
  for (long q = 0; q < n; ++q) {
    const double rr = rho_r.data[q];
    const double rp = rho_p.data[q];
    const double sg = sigma.data[q];
    Vec3d wv, dtwv, urv, upv, dtur, dtup;
    for (int c = 0; c < 3; ++c) {
      wv[c] = w.comp(c)[q];
      dtwv[c] = dtw.comp(c)[q];
      urv[c] = u_r.comp(c)[q];
      upv[c] = u_p.comp(c)[q];
      dtur[c] = pair.ref_rhs.du.comp(c)[q];
      dtup[c] = pair.pert_rhs.du.comp(c)[q];
      for (int d = 0; d < 3; ++d) {
        Jw(c, d) = grad_w.comp(3 * c + d)[q];
        Jdtw(c, d) = grad_dtw.comp(3 * c + d)[q];
        Ju(c, d) = grad_ur.comp(3 * c + d)[q];
        Jdtu(c, d) = grad_dtur.comp(3 * c + d)[q];
      }
    }
    const double relent = relent_integrand(rp, rr, law);
    const double sw = stress_contract(Jw, visc);
    const double sdtw = stress_contract(Jdtw, visc);

    e_acc += 0.5 * (rp * wv.squaredNorm() + eps4 * rp * dtwv.squaredNorm() + eps2 * sw) + relent;
    d_acc += eps2 * rp * dtwv.squaredNorm() + sw + eps4 * sdtw;
    relent_acc += relent;
    sig2_acc += sg * sg;
    sig_linf = std::max(sig_linf, std::abs(sg));
    w_linf = std::max(w_linf, wv.norm());

    // shared factors of the source terms
    const double div_u = Ju.trace();
    const double div_dtw = Jdtw.trace();
    const Vec3d mom_diff = rp * upv - rr * urv;  // rho_p u_p - rho_r u_r
    Vec3d grad_hp;                               // grad H'(rho_r) = p'(rho_r)/rho_r grad rho_r
    const double hpp = pressure_prime(rr, law) / rr;
    for (int c = 0; c < 3; ++c) grad_hp[c] = hpp * grad_rhor.comp(c)[q];

    const Vec3d K = sg * dtur + Ju * mom_diff;
    const double p_diff = pressure(rp, law) - pressure(rr, law);

    // I1: first-order sources of the entropy balance
    iacc[0] -= wv.dot(sg * dtur + Ju * mom_diff + sg * grad_hp) +
               (p_diff - pressure_prime(rr, law) * sg) * div_u;
    // I2: advection of w tested with dt w
    iacc[1] -= eps2 * rp * (Jw * upv).dot(dtwv);
    // I3: K tested with dt w
    iacc[2] -= eps2 * K.dot(dtwv);
    // I4: pressure difference against div dt w
    iacc[3] += eps2 * p_diff * div_dtw;
    // I5: time derivative of the pressure difference against div dt w
    const double dtp_p = pressure_prime(rp, law) * pair.pert_rhs.drho.data[q];
    const double dtp_r = pressure_prime(rr, law) * pair.ref_rhs.drho.data[q];
    iacc[4] += eps4 * (dtp_p - dtp_r) * div_dtw;
    // I6: mass-rate and acceleration couplings
    const double dtrho_p = pair.pert_rhs.drho.data[q];
    iacc[5] -= eps4 * (dtrho_p * (dtwv + Jw * upv) + rp * (Jw * dtup)).dot(dtwv);
    // I7: time derivative of K
    const double dts = pair.pert_rhs.drho.data[q] - pair.ref_rhs.drho.data[q];
    Vec3d d2u = Vec3d::Zero();
    if (d2u_ref != nullptr)
      for (int c = 0; c < 3; ++c) d2u[c] = d2u_ref->comp(c)[q];
    const Vec3d dt_mom_diff =
        dtrho_p * upv + rp * dtup - (pair.ref_rhs.drho.data[q] * urv + rr * dtur);
    const Vec3d dtK = dts * dtur + sg * d2u + Jdtu * mom_diff + Ju * dt_mom_diff;
    iacc[6] -= eps4 * dtK.dot(dtwv);
  }

  rep.e = e_acc * vol;
  rep.d_diss = d_acc * vol;
  rep.relent_int = relent_acc * vol;
  rep.sigma_l2sq = sig2_acc * vol;
  rep.grad_sigma_l4 = lp_norm(grad_sigma, 4.0, dom);
  rep.estar = rep.e + rep.grad_sigma_l4 * rep.grad_sigma_l4;
  for (int j = 0; j < 7; ++j) rep.i[j] = iacc[j] * vol;
  rep.sigma_linf = sig_linf;
  rep.w_linf = w_linf;
  return rep;
}

inline double modulated_energy(const PairSnapshot& pair, const PressureLaw& law,
                               const Viscosity& visc, const ThinDomain& dom) {
  return energy_report(pair, law, visc, dom).e;
}

inline double dissipation(const PairSnapshot& pair, const Viscosity& visc,
                          const ThinDomain& dom) {
  // the dissipation functional does not involve the pressure law
  return energy_report(pair, PressureLaw{}, visc, dom).d_diss;
}

inline double estar(const PairSnapshot& pair, const PressureLaw& law, const Viscosity& visc,
                    const ThinDomain& dom) {
  return energy_report(pair, law, visc, dom).estar;
}

inline std::array<double, 7> source_integrals(const PairSnapshot& pair, const PressureLaw& law,
                                              const Viscosity& visc, const ThinDomain& dom,
                                              const GridFieldD* d2u_ref = nullptr) {
  return energy_report(pair, law, visc, dom, d2u_ref).i;
}

/// Residual of the discrete energy balance over uniform report intervals:
/// reports must be spaced dt_s/2 apart (odd count >= 3). Interval n uses the
/// endpoint energies and midpoint dissipation/sources:
///   r_n = (E_{n+1} - E_n) / dt_s + D_mid - sum_j I_j(mid).
struct ResidualSeries {
  std::vector<double> r;
  double max_abs = 0.0;
};

inline ResidualSeries identity_residual(const std::vector<EnergyReport>& reports, double dt_s) {
  if (reports.size() < 3 || reports.size() % 2 == 0)
    throw ConfigError("identity_residual: need an odd number (>= 3) of half-interval reports");
  ResidualSeries out;
  const int n_int = static_cast<int>(reports.size() / 2);
  for (int m = 0; m < n_int; ++m) {
    const EnergyReport& lo = reports[2 * m];
    const EnergyReport& mid = reports[2 * m + 1];
    const EnergyReport& hi = reports[2 * m + 2];
    const double r = (hi.e - lo.e) / dt_s + mid.d_diss - mid.i_sum();
    out.r.push_back(r);
    out.max_abs = std::max(out.max_abs, std::abs(r));
  }
  return out;
}

/// Flags of the uniform smallness assumptions given the infimum c1 of the
/// reference density over the run.
struct SmallnessFlags {
  double sigma_linf = 0.0;
  double w_linf = 0.0;
  bool density_ok = false;   ///< sigma_linf <= c1 / 2
  bool velocity_ok = false;  ///< w_linf <= 1
};

inline SmallnessFlags smallness_check(const PairSnapshot& pair, const ThinDomain& dom,
                                      double c1) {
  detail_en::check_aligned(pair);
  (void)dom;
  SmallnessFlags f;
  GridFieldD sigma(dom, 1), w(dom, 3);
  sigma.data = pair.pert.rho.data - pair.ref.rho.data;
  w.data = pair.pert.u.data - pair.ref.u.data;
  f.sigma_linf = sigma.data.abs().maxCoeff();
  f.w_linf = magnitude(w).maxCoeff();
  f.density_ok = f.sigma_linf <= 0.5 * c1;
  f.velocity_ok = f.w_linf <= 1.0;
  return f;
}

/// Monitored left/right pairs of the a-priori chain between the computed
/// norms and the functionals (diagnostic only; emitted as an optional CSV).
struct EstimatePair {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline std::vector<EstimatePair> estimate_diagnostics(const PairSnapshot& pair,
                                                      const PressureLaw& law,
                                                      const Viscosity& visc,
                                                      const ThinDomain& dom) {
  const EnergyReport rep = energy_report(pair, law, visc, dom);
  GridFieldD sigma(dom, 1), w(dom, 3), dtw(dom, 3);
  sigma.data = pair.pert.rho.data - pair.ref.rho.data;
  w.data = pair.pert.u.data - pair.ref.u.data;
  dtw.data = pair.pert_rhs.du.data - pair.ref_rhs.du.data;
  const GridFieldD gw = gradient(w, dom);
  const GridFieldD gdtw = gradient(dtw, dom);
  const GridFieldD gsig = gradient(sigma, dom);
  const double eps = dom.epsilon;
  const double sqe = std::sqrt(rep.e), sqd = std::sqrt(rep.d_diss);
  std::vector<EstimatePair> rows;
  rows.push_back({"w_l2", lp_norm(w, 2.0, dom), sqe});
  rows.push_back({"grad_w_l2", lp_norm(gw, 2.0, dom), sqe / eps});
  rows.push_back({"sigma_l2", std::sqrt(rep.sigma_l2sq), sqe});
  rows.push_back({"dtw_l2_e", lp_norm(dtw, 2.0, dom), sqe / (eps * eps)});
  rows.push_back({"dtw_l2_d", lp_norm(dtw, 2.0, dom), sqd / eps});
  rows.push_back({"dt_grad_w_l2", lp_norm(gdtw, 2.0, dom), sqd / (eps * eps)});
  rows.push_back({"w_l4", lp_norm(w, 4.0, dom), std::pow(eps, 3.0 / 4.0 - 3.0 / 2.0) * sqe});
  rows.push_back({"dtw_l4", lp_norm(dtw, 4.0, dom),
                  std::pow(eps, 3.0 / 4.0 - 5.0 / 2.0) * sqd});
  rows.push_back({"dtw_l4_interp", lp_norm(dtw, 4.0, dom),
                  std::pow(eps, -2.0) * std::pow(rep.e, 0.125) * std::pow(rep.d_diss, 0.375)});
  rows.push_back({"sigma_l4", lp_norm(sigma, 4.0, dom),
                  dom.d * lp_norm(gsig, 4.0, dom) +
                      std::pow(dom.v, -0.25) * std::sqrt(rep.e)});
  return rows;
}

}  // namespace thinns
