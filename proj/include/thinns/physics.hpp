/// @file physics.hpp
/// @brief Barotropic pressure law, pressure potential, relative-entropy
///        integrand and the Newtonian viscous stress.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thinns/errors.hpp"
#include "thinns/types.hpp"

namespace thinns {

/// Power pressure law p(rho) = a * rho^gamma, gamma > 1.
struct PressureLaw {
  double a = 1.0;
  double gamma = 2.0;
};

inline void validate(const PressureLaw& law) {
  if (!(law.a > 0.0)) throw ConfigError("pressure law: coefficient a must be positive");
  if (!(law.gamma > 1.0)) throw ConfigError("pressure law: gamma must exceed 1");
}

/// Shear and bulk viscosities; `nu` is the effective axial coefficient
/// 4 mu / 3 + eta of the 1D reduction.
struct Viscosity {
  double mu = 0.1;
  double eta = 0.0;
  double nu = 4.0 * 0.1 / 3.0;

  Viscosity() = default;
  Viscosity(double mu_, double eta_) : mu(mu_), eta(eta_), nu(4.0 * mu_ / 3.0 + eta_) {
    if (!(mu > 0.0)) throw ConfigError("viscosity: mu must be positive");
    if (eta < 0.0) throw ConfigError("viscosity: eta must be nonnegative");
  }
};

template <class S>
S pressure(S rho, const PressureLaw& law) {
  if (rho < S(0)) throw ConfigError("pressure: negative density");
  return S(law.a) * std::pow(rho, S(law.gamma));
}

template <class S>
S pressure_prime(S rho, const PressureLaw& law) {
  if (rho < S(0)) throw ConfigError("pressure_prime: negative density");
  return S(law.a) * S(law.gamma) * std::pow(rho, S(law.gamma) - S(1));
}

template <class S>
S sound_speed(S rho, const PressureLaw& law) {
  return std::sqrt(pressure_prime(rho, law));
}

/// Pressure potential H with H'(rho) rho - H(rho) = p(rho), gauge-fixed so
/// that H(0) = 0: H(rho) = a rho^gamma / (gamma - 1).
template <class S>
S potential_h(S rho, const PressureLaw& law) {
  if (rho < S(0)) throw ConfigError("potential_h: negative density");
  return S(law.a) * std::pow(rho, S(law.gamma)) / (S(law.gamma) - S(1));
}

template <class S>
S potential_h_prime(S rho, const PressureLaw& law) {
  if (rho < S(0)) throw ConfigError("potential_h_prime: negative density");
  return S(law.a) * S(law.gamma) * std::pow(rho, S(law.gamma) - S(1)) / (S(law.gamma) - S(1));
}

/// Bregman divergence of H: H(rho) - H'(r) (rho - r) - H(r).
/// Nonnegative by convexity, zero iff rho == r.
template <class S>
S relent_integrand(S rho, S r, const PressureLaw& law) {
  if (!(r > S(0))) throw ConfigError("relent_integrand: base density must be positive");
  return potential_h(rho, law) - potential_h_prime(r, law) * (rho - r) - potential_h(r, law);
}

/// Newtonian stress S = mu (J + J^T - 2/3 tr(J) I) + eta tr(J) I,
/// where J(c,d) = d u_c / d x_d.
template <class S>
Mat3<S> stress(const Mat3<S>& grad_u, const Viscosity& visc) {
  const S div = grad_u.trace();
  Mat3<S> out = S(visc.mu) * (grad_u + grad_u.transpose());
  const S iso = (S(visc.eta) - S(2) * S(visc.mu) / S(3)) * div;
  out.diagonal().array() += iso;
  return out;
}

/// Quadratic form S(grad_u) : grad_u = 2 mu |dev sym J|^2 + eta (tr J)^2 >= 0.
template <class S>
S stress_contract(const Mat3<S>& grad_u, const Viscosity& visc) {
  const S div = grad_u.trace();
  const Mat3<S> sym = (grad_u + grad_u.transpose()) / S(2);
  S dev2 = (sym - (div / S(3)) * Mat3<S>::Identity()).squaredNorm();
  return S(2) * S(visc.mu) * dev2 + S(visc.eta) * div * div;
}

/// Two-sided quadratic-equivalence constants of the relative entropy,
/// computed by brute-force scan: bounds on relent(rho, r) / (rho - r)^2
/// over r in [r_lo, r_hi] and rho in [rho_lo, rho_hi].
struct QuadBounds {
  double cmin = 0.0;
  double cmax = 0.0;
};

inline QuadBounds relent_quadratic_bounds(const PressureLaw& law, double rho_lo, double rho_hi,
                                          double r_lo, double r_hi, int n_scan = 256) {
  if (!(r_lo > 0.0) || r_hi < r_lo || rho_hi < rho_lo)
    throw ConfigError("relent_quadratic_bounds: invalid scan ranges");
  QuadBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (int a = 0; a <= n_scan; ++a) {
    const double r = r_lo + (r_hi - r_lo) * a / n_scan;
    for (int q = 0; q <= n_scan; ++q) {
      const double rho = rho_lo + (rho_hi - rho_lo) * q / n_scan;
      const double s = rho - r;
      double m;
      if (std::abs(s) < 1e-7 * std::max(1.0, r)) {
        m = pressure_prime(r, law) / (2.0 * r);  // limit value H''(r)/2
      } else {
        m = relent_integrand(rho, r, law) / (s * s);
      }
      b.cmin = std::min(b.cmin, m);
      b.cmax = std::max(b.cmax, m);
    }
  }
  return b;
}

}  // namespace thinns
