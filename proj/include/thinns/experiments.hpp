/// @file experiments.hpp
/// @brief Top-level experiments: the admissible-perturbation threshold, the
///        exponential stability envelope, robustness runs with verdicts,
///        critical-amplitude bisection, and the thin-limit sweep.
#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thinns/energetics.hpp"
#include "thinns/errors.hpp"
#include "thinns/field.hpp"
#include "thinns/fieldcalc.hpp"
#include "thinns/geometry.hpp"
#include "thinns/physics.hpp"
#include "thinns/solver1d.hpp"
#include "thinns/solver3d.hpp"
#include "thinns/trig.hpp"

namespace thinns {

/// Largest initial-data distance guaranteeing a stable run on [0, T]:
///   exp[-c (eps^{-16/5} + v^{-1/4} eps^{-1}) T] * min(eps^5, eps^{3/2} v^{1/2}).
inline double omega_threshold(double epsilon, double v, double t_horizon, double c) {
  if (!(epsilon > 0.0) || !(v > 0.0))
    throw ConfigError("omega_threshold: epsilon and v must be positive");
  if (t_horizon < 0.0) throw ConfigError("omega_threshold: horizon must be nonnegative");
  const double rate = std::pow(epsilon, -16.0 / 5.0) + std::pow(v, -0.25) / epsilon;
  const double cap = std::min(std::pow(epsilon, 5.0), std::pow(epsilon, 1.5) * std::sqrt(v));
  return std::exp(-c * rate * t_horizon) * cap;
}

/// Exponential envelope E*(0) exp[c (eps^{-16/5} + v^{-1/4} eps^{-1}) t].
inline double gronwall_envelope(double estar0, double t, double epsilon, double v, double c) {
  if (!(epsilon > 0.0) || !(v > 0.0))
    throw ConfigError("gronwall_envelope: epsilon and v must be positive");
  if (estar0 < 0.0 || t < 0.0)
    throw ConfigError("gronwall_envelope: estar0 and t must be nonnegative");
  const double rate = std::pow(epsilon, -16.0 / 5.0) + std::pow(v, -0.25) / epsilon;
  return estar0 * std::exp(c * rate * t);
}

/// Ceiling c_geom * min(eps^5, eps^{3/2} v^{1/2}) under which the uniform
/// smallness assumptions remain self-consistent.
inline double smallness_ceiling(double epsilon, double v, double c_geom) {
  if (!(epsilon > 0.0) || !(v > 0.0))
    throw ConfigError("smallness_ceiling: epsilon and v must be positive");
  return c_geom * std::min(std::pow(epsilon, 5.0), std::pow(epsilon, 1.5) * std::sqrt(v));
}

/// Canonical compatible data family rho0 = rho_bar + b cos(pi y),
/// u0 = s sin(pi y); satisfies the endpoint conditions exactly.
inline ArrayXd canonical_rho0(double rho_bar, double b, int nz) {
  ArrayXd out(nz);
  for (int k = 0; k < nz; ++k) out[k] = rho_bar + b * std::cos(pi * (k + 0.5) / nz);
  return out;
}

inline ArrayXd canonical_u0(double s, int nz) {
  ArrayXd out(nz);
  for (int k = 0; k < nz; ++k) out[k] = s * std::sin(pi * (k + 0.5) / nz);
  return out;
}

/// Shared run parameters of the experiment layer.
struct RunSetup {
  PressureLaw law;
  Viscosity visc;
  double epsilon = 0.5;
  int nx = 16, ny = 16, nz = 64;
  double t_end = 0.25;
  double cfl = 0.4;
  int sample_every = 10;
  double kappa4 = default_dissipation;
  double rho_bar = 1.0, b = 0.1, s = 0.1;
  int nz_ref = 512;

  ThinDomain domain() const { return build_channel(epsilon, nx, ny, nz); }
};

/// Lifted reference trajectory with attached time-derivative fields, built
/// from a high-resolution axial solve and block-averaged onto the 3D grid.
struct Reference3D {
  std::vector<double> times;
  std::vector<FluidState3D> states;
  std::vector<Rhs3D> rhs;
};

inline Reference3D make_reference(const RunSetup& setup, const ThinDomain& dom, int n_samples,
                                  const ArrayXd* rho0_in = nullptr,
                                  const ArrayXd* u0_in = nullptr) {
  if (setup.nz_ref % dom.nz != 0)
    throw ConfigError("make_reference: nz_ref must be a multiple of the grid nz");
  const ArrayXd rho0 =
      rho0_in != nullptr ? *rho0_in : canonical_rho0(setup.rho_bar, setup.b, setup.nz_ref);
  const ArrayXd u0 = u0_in != nullptr ? *u0_in : canonical_u0(setup.s, setup.nz_ref);
  const auto traj = solve1d(rho0, u0, setup.t_end, setup.law, setup.visc, setup.nz_ref,
                            setup.cfl, n_samples, setup.kappa4);
  Reference3D ref;
  for (const Profile1DD& fine : traj) {
    Profile1DD coarse{downsample(fine.rho, dom.nz), downsample(fine.u, dom.nz), fine.t};
    ref.times.push_back(fine.t);
    ref.states.push_back(lift1d(coarse, dom));
    const Rhs1D fr = rhs1d(fine, setup.law, setup.visc, setup.kappa4);
    Profile1DD coarse_rhs{downsample(fr.drho, dom.nz), downsample(fr.du, dom.nz), fine.t};
    const FluidState3D lifted_rhs = lift1d(coarse_rhs, dom);
    ref.rhs.push_back(Rhs3D{lifted_rhs.rho, lifted_rhs.u});
  }
  return ref;
}

/// Wall-compatible initial-data bumps with prescribed combined distance
/// ||drho||_{W^{1,4}} + ||du||_{W^{2,2}} = delta (exact by homogeneity).
struct Perturbation {
  GridFieldD drho;
  GridFieldD du;
  double w14 = 0.0;  ///< density part of the norm after scaling
  double w22 = 0.0;  ///< velocity part of the norm after scaling
};

inline Perturbation make_perturbation(double delta, std::uint64_t seed, const ThinDomain& dom,
                                      double rho_floor, int max_mode = 3) {
  if (delta < 0.0) throw ConfigError("make_perturbation: delta must be nonnegative");
  Perturbation p;
  p.drho = GridFieldD(dom, 1);
  p.du = GridFieldD(dom, 3);
  if (delta == 0.0) return p;
  const TrigScalarField fs = TrigScalarField::random(seed, 3, max_mode);
  const TrigVecField fv = TrigVecField::random(seed + 0x517cc1b727220a95ULL, 3, max_mode);
  GridFieldD drho = fs.eval(dom);
  GridFieldD du = fv.eval(dom);
  const double raw = w14_norm(drho, dom) + w22_norm(du, dom);
  if (!(raw > 0.0)) throw ConfigError("make_perturbation: degenerate bump fields");
  const double scale = delta / raw;
  drho.data *= scale;
  du.data *= scale;
  if (drho.data.abs().maxCoeff() > 0.5 * rho_floor)
    throw ConfigError("make_perturbation: delta too large to keep the density positive");
  p.drho = drho;
  p.du = du;
  p.w14 = w14_norm(p.drho, dom);
  p.w22 = w22_norm(p.du, dom);
  return p;
}

/// Lockstep evolution of a (reference, perturbed) pair, invoking `cb` with a
/// full snapshot (states plus right-hand sides) at t = 0, every
/// `sample_every` accepted steps, and at t_end.
inline void evolve_pair(const ThinDomain& dom, const PressureLaw& law, const Viscosity& visc,
                        FluidState3D ref, FluidState3D pert, double t_end, double cfl,
                        int sample_every, double kappa4,
                        const std::function<void(const PairSnapshot&)>& cb) {
  auto emit = [&]() {
    PairSnapshot snap;
    snap.ref_rhs = rhs3d(ref, law, visc, dom, kappa4);
    snap.pert_rhs = rhs3d(pert, law, visc, dom, kappa4);
    snap.ref = ref;
    snap.pert = pert;
    cb(snap);
  };
  emit();
  int steps_since = 0;
  while (ref.t < t_end) {
    const double dt0 = std::min(stable_dt(ref, law, visc, dom, cfl),
                                stable_dt(pert, law, visc, dom, cfl));
    const double dt = std::min(dt0, t_end - ref.t);
    pert = step3d(pert, dt, law, visc, dom, kappa4);
    ref = step3d(ref, dt, law, visc, dom, kappa4);
    if (++steps_since == sample_every || ref.t >= t_end) {
      emit();
      steps_since = 0;
    }
  }
}

/// Lockstep evolution hitting the given sample times exactly; `cb` receives
/// one snapshot per time (the first time must be 0).
inline void evolve_pair_at_times(const ThinDomain& dom, const PressureLaw& law,
                                 const Viscosity& visc, FluidState3D ref, FluidState3D pert,
                                 const std::vector<double>& times, double cfl, double kappa4,
                                 const std::function<void(const PairSnapshot&)>& cb) {
  if (times.empty() || times.front() != 0.0)
    throw ConfigError("evolve_pair_at_times: sample times must start at 0");
  auto emit = [&]() {
    PairSnapshot snap;
    snap.ref_rhs = rhs3d(ref, law, visc, dom, kappa4);
    snap.pert_rhs = rhs3d(pert, law, visc, dom, kappa4);
    snap.ref = ref;
    snap.pert = pert;
    cb(snap);
  };
  emit();
  for (std::size_t m = 1; m < times.size(); ++m) {
    const double span = times[m] - ref.t;
    if (span < 0.0) throw ConfigError("evolve_pair_at_times: times must be increasing");
    if (span > 0.0) {
      const double dt0 = std::min(stable_dt(ref, law, visc, dom, cfl),
                                  stable_dt(pert, law, visc, dom, cfl));
      const int nsteps = std::max(1, static_cast<int>(std::ceil(span / dt0)));
      const double dt = span / nsteps;
      for (int s_ = 0; s_ < nsteps; ++s_) {
        pert = step3d(pert, dt, law, visc, dom, kappa4);
        ref = step3d(ref, dt, law, visc, dom, kappa4);
      }
      ref.t = times[m];
      pert.t = times[m];
    }
    emit();
  }
}

/// Energy reports at uniform half-interval sampling plus the residual series
/// of the energy balance; the reference's second time derivative is central-
/// differenced from neighboring right-hand sides (one-sided at the ends).
struct PairEnergetics {
  std::vector<EnergyReport> reports;
  ResidualSeries residuals;
  double c1 = 0.0;  ///< infimum of the reference density over the run
};

inline PairEnergetics run_pair_energetics(const ThinDomain& dom, const PressureLaw& law,
                                          const Viscosity& visc, const FluidState3D& ref0,
                                          const FluidState3D& pert0, double t_end,
                                          int n_intervals, double cfl, double kappa4) {
  if (n_intervals < 1) throw ConfigError("run_pair_energetics: need at least one interval");
  const int n_half = 2 * n_intervals;
  std::vector<double> times(n_half + 1);
  for (int m = 0; m <= n_half; ++m) times[m] = t_end * m / n_half;
  const double dt_half = t_end / n_half;

  PairEnergetics out;
  out.c1 = std::numeric_limits<double>::infinity();
  std::deque<PairSnapshot> window;

  auto report_for = [&](const PairSnapshot& snap, const GridFieldD& d2u) {
    out.reports.push_back(energy_report(snap, law, visc, dom, &d2u));
  };
  auto flush_mid = [&]() {
    // central second derivative for the middle of a full 3-window
    GridFieldD d2u(dom, 3);
    d2u.data = (window[2].ref_rhs.du.data - window[0].ref_rhs.du.data) / (2.0 * dt_half);
    report_for(window[1], d2u);
  };

  evolve_pair_at_times(dom, law, visc, ref0, pert0, times, cfl, kappa4,
                       [&](const PairSnapshot& snap) {
                         out.c1 = std::min(out.c1, snap.ref.rho.data.minCoeff());
                         window.push_back(snap);
                         if (window.size() == 2) {
                           // first sample: one-sided derivative
                           GridFieldD d2u(dom, 3);
                           d2u.data = (window[1].ref_rhs.du.data - window[0].ref_rhs.du.data) /
                                      dt_half;
                           report_for(window[0], d2u);
                         } else if (window.size() == 3) {
                           flush_mid();
                           window.pop_front();
                         }
                       });
  // last sample: one-sided derivative
  if (window.size() == 2) {
    GridFieldD d2u(dom, 3);
    d2u.data = (window[1].ref_rhs.du.data - window[0].ref_rhs.du.data) / dt_half;
    report_for(window[1], d2u);
  }
  out.residuals = identity_residual(out.reports, 2.0 * dt_half);
  return out;
}

/// One point of the stability-verdict time series.
struct EstarSample {
  double t = 0.0;
  double estar = 0.0;
  double envelope = 0.0;
  double ceiling = 0.0;
  double sigma_linf = 0.0;
  double w_linf = 0.0;
};

struct RobustnessVerdict {
  double epsilon = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  bool envelope_ok = true;
  bool smallness_ok = true;
  bool ceiling_ok = true;
  std::optional<double> first_violation_t;
  std::vector<EstarSample> estar_series;
  double estar0 = 0.0;
  double c_used = 1.0;
  double c1 = 0.0;     ///< run infimum of the reference density
  double u_ref = 0.0;  ///< diagnostic: max of the tracked reference norms
  double mm1_norm = 0.0;  ///< reported initial-data distance of the bumps
  bool blew_up = false;

  bool pass() const { return envelope_ok && smallness_ok && ceiling_ok; }
};

/// Evolve reference and perturbed data on the same grid and check the
/// measured E*(t) against the exponential envelope, the geometric ceiling,
/// and the uniform smallness flags. A solver blow-up counts as a violation
/// at the blow-up time.
inline RobustnessVerdict robustness_run(const RunSetup& setup, double delta, std::uint64_t seed,
                                        double c_gronwall, double c_geom) {
  const ThinDomain dom = setup.domain();
  RobustnessVerdict v;
  v.epsilon = setup.epsilon;
  v.delta = delta;
  v.c_used = c_gronwall;
  v.omega = omega_threshold(dom.epsilon, dom.v, setup.t_end, c_gronwall);

  const ArrayXd rho0 = canonical_rho0(setup.rho_bar, setup.b, dom.nz);
  const ArrayXd u0 = canonical_u0(setup.s, dom.nz);
  FluidState3D ref0 = lift1d(Profile1DD{rho0, u0, 0.0}, dom);
  const Perturbation bump = make_perturbation(delta, seed, dom, rho0.minCoeff());
  v.mm1_norm = bump.w14 + bump.w22;
  FluidState3D pert0 = ref0;
  pert0.rho.data += bump.drho.data;
  pert0.u.data += bump.du.data;

  v.c1 = std::numeric_limits<double>::infinity();
  double u_ref = 0.0;
  GridFieldD prev_dtu;  // for the second-time-derivative proxy of U
  double prev_t = 0.0;
  bool have_estar0 = false;

  try {
    evolve_pair(dom, setup.law, setup.visc, ref0, pert0, setup.t_end, setup.cfl,
                setup.sample_every, setup.kappa4, [&](const PairSnapshot& snap) {
                  const EnergyReport rep = energy_report(snap, setup.law, setup.visc, dom);
                  if (!have_estar0) {
                    v.estar0 = rep.estar;
                    have_estar0 = true;
                  }
                  v.c1 = std::min(v.c1, rep.rho_ref_min);
                  EstarSample es;
                  es.t = rep.t;
                  es.estar = rep.estar;
                  es.envelope = gronwall_envelope(v.estar0, rep.t, dom.epsilon, dom.v, c_gronwall);
                  es.ceiling = smallness_ceiling(dom.epsilon, dom.v, c_geom);
                  es.sigma_linf = rep.sigma_linf;
                  es.w_linf = rep.w_linf;
                  v.estar_series.push_back(es);

                  // U diagnostic: sup norms of the reference and its rates
                  const GridFieldD grad_dtu = gradient(snap.ref_rhs.du, dom);
                  double u_now = std::max(rep.rho_ref_max, 1.0 / rep.rho_ref_min);
                  u_now = std::max(u_now, snap.ref_rhs.drho.data.abs().maxCoeff());
                  u_now = std::max(u_now, magnitude(snap.ref_rhs.du).maxCoeff());
                  u_now = std::max(u_now, magnitude(grad_dtu).maxCoeff());
                  if (prev_dtu.cells() > 0 && rep.t > prev_t) {
                    GridFieldD d2u(dom, 3);
                    d2u.data = (snap.ref_rhs.du.data - prev_dtu.data) / (rep.t - prev_t);
                    u_now = std::max(u_now, magnitude(d2u).maxCoeff());
                  }
                  prev_dtu = snap.ref_rhs.du;
                  prev_t = rep.t;
                  u_ref = std::max(u_ref, u_now);
                });
  } catch (const BlowupError& b) {
    v.blew_up = true;
    v.envelope_ok = false;
    v.smallness_ok = false;
    v.ceiling_ok = false;
    v.first_violation_t = b.t;
    v.u_ref = u_ref;
    return v;
  }
  v.u_ref = u_ref;

  // judge the series with the run-global density infimum
  for (const EstarSample& es : v.estar_series) {
    bool bad = false;
    if (es.estar > es.envelope) {
      v.envelope_ok = false;
      bad = true;
    }
    if (es.estar > es.ceiling) {
      v.ceiling_ok = false;
      bad = true;
    }
    if (es.sigma_linf > 0.5 * v.c1 || es.w_linf > 1.0) {
      v.smallness_ok = false;
      bad = true;
    }
    if (bad && !v.first_violation_t) v.first_violation_t = es.t;
  }
  return v;
}

/// Bisection of the largest passing amplitude inside a bracket whose low end
/// passes and high end fails.
inline double critical_amplitude(const std::function<bool(double)>& passes, double delta_lo,
                                 double delta_hi, int iters) {
  if (!(delta_lo >= 0.0) || !(delta_hi > delta_lo))
    throw ConfigError("critical_amplitude: invalid bracket");
  if (iters < 1) throw ConfigError("critical_amplitude: need at least one iteration");
  if (!passes(delta_lo)) throw ConfigError("critical_amplitude: lower bracket must pass");
  if (passes(delta_hi)) throw ConfigError("critical_amplitude: upper bracket must fail");
  double lo = delta_lo, hi = delta_hi;
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Calibration of the envelope constant from a pilot run at eps = 1: the
/// fitted minimal exponent rate is doubled for margin and floored at the
/// default 1 (a decaying pilot fits a nonpositive constant).
struct Calibration {
  double c_fit = 0.0;
  double c_used = 1.0;
};

inline Calibration calibrate_c(RunSetup setup, double delta_pilot, std::uint64_t seed) {
  setup.epsilon = 1.0;
  const ThinDomain dom = setup.domain();
  const RobustnessVerdict pilot = robustness_run(setup, delta_pilot, seed, 1.0, 1.0);
  Calibration cal;
  const double rate = std::pow(dom.epsilon, -16.0 / 5.0) + std::pow(dom.v, -0.25) / dom.epsilon;
  double c_fit = -std::numeric_limits<double>::infinity();
  for (const EstarSample& es : pilot.estar_series) {
    if (es.t <= 0.0 || pilot.estar0 <= 0.0 || es.estar <= 0.0) continue;
    c_fit = std::max(c_fit, std::log(es.estar / pilot.estar0) / (rate * es.t));
  }
  if (!std::isfinite(c_fit)) c_fit = 0.0;
  cal.c_fit = c_fit;
  cal.c_used = std::max(2.0 * c_fit, 1.0);
  return cal;
}

/// One row of the thin-limit error table.
struct ThinlimitRow {
  double epsilon = 0.0;
  double sup_rho_err = 0.0;  ///< sup over t > 0 of the cross-sectional L^gamma density error
  double sup_mom_err = 0.0;  ///< same with exponent 2 gamma / (gamma + 1) for the momentum
};

/// For each width in the (strictly decreasing) list, evolve lifted data plus
/// a fixed rescaled bump and measure the section-normalized distance to the
/// high-resolution axial solution; the sup excludes t = 0.
inline std::vector<ThinlimitRow> thinlimit_run(const RunSetup& base,
                                               const std::vector<double>& eps_list,
                                               double amplitude, std::uint64_t seed,
                                               int n_samples) {
  if (eps_list.size() < 1) throw ConfigError("thinlimit_run: empty epsilon list");
  for (std::size_t m = 1; m < eps_list.size(); ++m)
    if (!(eps_list[m] < eps_list[m - 1]))
      throw ConfigError("thinlimit_run: epsilon list must be strictly decreasing");

  // axial limit solution at reference resolution
  const ArrayXd rho0f = canonical_rho0(base.rho_bar, base.b, base.nz_ref);
  const ArrayXd u0f = canonical_u0(base.s, base.nz_ref);
  const auto fine = solve1d(rho0f, u0f, base.t_end, base.law, base.visc, base.nz_ref, base.cfl,
                            n_samples, base.kappa4);

  const double gamma = base.law.gamma;
  const double mom_p = 2.0 * gamma / (gamma + 1.0);

  std::vector<ThinlimitRow> rows;
  for (double eps : eps_list) {
    RunSetup setup = base;
    setup.epsilon = eps;
    const ThinDomain dom = setup.domain();

    FluidState3D state = lift1d(
        Profile1DD{canonical_rho0(base.rho_bar, base.b, dom.nz), canonical_u0(base.s, dom.nz), 0.0},
        dom);
    if (amplitude > 0.0) {
      const TrigScalarField fs = TrigScalarField::random(seed);
      const TrigVecField fv = TrigVecField::random(seed + 0x517cc1b727220a95ULL);
      GridFieldD drho = fs.eval(dom);
      GridFieldD du = fv.eval(dom);
      state.rho.data += amplitude * drho.data;
      state.u.data += amplitude * du.data;
      if (state.rho.data.minCoeff() <= 0.0)
        throw ConfigError("thinlimit_run: perturbation amplitude breaks positivity");
    }

    ThinlimitRow row;
    row.epsilon = eps;
    for (int m = 1; m <= n_samples; ++m) {
      const double t_target = fine[m].t;
      const double dt0 = stable_dt(state, setup.law, setup.visc, dom, setup.cfl);
      const double span = t_target - state.t;
      const int nsteps = std::max(1, static_cast<int>(std::ceil(span / dt0)));
      const double dt = span / nsteps;
      for (int s_ = 0; s_ < nsteps; ++s_)
        state = step3d(state, dt, setup.law, setup.visc, dom, setup.kappa4);
      state.t = t_target;

      const ArrayXd rho1 = downsample(fine[m].rho, dom.nz);
      const ArrayXd mom1 = downsample((fine[m].rho * fine[m].u).eval(), dom.nz);
      double rho_err = 0.0, mom_err = 0.0;
      const long slab = static_cast<long>(dom.nx) * dom.ny;
      for (int k = 0; k < dom.nz; ++k)
        for (long q = 0; q < slab; ++q) {
          const long idx = static_cast<long>(k) * slab + q;
          rho_err += std::pow(std::abs(state.rho.data[idx] - rho1[k]), gamma);
          const double m0 = state.rho.data[idx] * state.u.comp(0)[idx];
          const double m1_ = state.rho.data[idx] * state.u.comp(1)[idx];
          const double m2 = state.rho.data[idx] * state.u.comp(2)[idx] - mom1[k];
          const double mmag = std::sqrt(m0 * m0 + m1_ * m1_ + m2 * m2);
          mom_err += std::pow(mmag, mom_p);
        }
      rho_err *= dom.cell_volume() / (dom.epsilon * dom.epsilon);
      mom_err *= dom.cell_volume() / (dom.epsilon * dom.epsilon);
      row.sup_rho_err = std::max(row.sup_rho_err, rho_err);
      row.sup_mom_err = std::max(row.sup_mom_err, mom_err);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace thinns
