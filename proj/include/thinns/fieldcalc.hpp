/// @file fieldcalc.hpp
/// @brief Discrete calculus on grid fields: gradients, Lp norms, integrals,
///        cross-sectional averages and 1D-to-3D lifting.
///
/// Gradients use second-order central differences in the interior and
/// second-order one-sided stencils at the boundary cells; they assume no
/// boundary condition. Integrals are midpoint (cell-average) quadrature.
#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "thinns/errors.hpp"
#include "thinns/field.hpp"
#include "thinns/geometry.hpp"

namespace thinns {

namespace detail {

/// d/dx along one line of cell values; one-sided second order at the ends,
/// first order when only two cells are available. Stencils are written in
/// difference form so constant lines differentiate to exactly zero.
template <class S, class Get>
S line_deriv(const Get& f, int i, int n, S h) {
  if (i > 0 && i < n - 1) return (f(i + 1) - f(i - 1)) / (S(2) * h);
  if (n == 2) return (f(1) - f(0)) / h;
  if (i == 0) return (S(4) * (f(1) - f(0)) - (f(2) - f(0))) / (S(2) * h);
  return (S(4) * (f(n - 1) - f(n - 2)) - (f(n - 1) - f(n - 3))) / (S(2) * h);
}

}  // namespace detail

/// Gradient of an m-component field; output has 3m components with
/// J(c,d) = d f_c / d x_d stored at component index 3c + d.
template <class S>
GridField<S> gradient(const GridField<S>& f, const ThinDomain& dom) {
  GridField<S> g;
  g.nx = f.nx;
  g.ny = f.ny;
  g.nz = f.nz;
  g.comps = 3 * f.comps;
  g.data = Array<S>::Zero(static_cast<long>(g.comps) * g.cells());
  const S hx = S(dom.hx), hy = S(dom.hy), hz = S(dom.hz);
  for (int c = 0; c < f.comps; ++c) {
    for (int k = 0; k < f.nz; ++k)
      for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
          auto fx = [&](int q) { return f.at(c, q, j, k); };
          auto fy = [&](int q) { return f.at(c, i, q, k); };
          auto fz = [&](int q) { return f.at(c, i, j, q); };
          g.at(3 * c + 0, i, j, k) = detail::line_deriv<S>(fx, i, f.nx, hx);
          g.at(3 * c + 1, i, j, k) = detail::line_deriv<S>(fy, j, f.ny, hy);
          g.at(3 * c + 2, i, j, k) = detail::line_deriv<S>(fz, k, f.nz, hz);
        }
  }
  return g;
}

/// Midpoint-quadrature integral of a scalar field.
template <class S>
S integral(const GridField<S>& f, const ThinDomain& dom) {
  return f.data.sum() * S(dom.cell_volume());
}

/// Pointwise Euclidean magnitude across components.
template <class S>
Array<S> magnitude(const GridField<S>& f) {
  Array<S> m = Array<S>::Zero(f.cells());
  for (int c = 0; c < f.comps; ++c) m += f.comp(c).square();
  return m.sqrt();
}

/// Lp norm with midpoint quadrature; p = infinity gives the max magnitude.
/// Components are combined through the pointwise Euclidean magnitude.
template <class S>
S lp_norm(const GridField<S>& f, double p, const ThinDomain& dom) {
  if (std::isinf(p)) {
    if (f.comps == 1) return f.data.abs().maxCoeff();
    return magnitude(f).maxCoeff();
  }
  if (!(p >= 1.0)) throw ConfigError("lp_norm: exponent must be >= 1 or infinity");
  const S vol = S(dom.cell_volume());
  Array<S> m = (f.comps == 1) ? f.data.abs().eval() : magnitude(f);
  if (p == 2.0) return std::sqrt((m.square().sum()) * vol);
  return std::pow(m.pow(S(p)).sum() * vol, S(1) / S(p));
}

/// Norms over the canonical exponent set {1, 2, 4, 6, inf} for a field and
/// its discrete gradient.
struct NormReport {
  std::map<double, double> lp;
  std::map<double, double> grad_lp;
};

inline NormReport norm_report(const GridFieldD& f, const ThinDomain& dom) {
  static const double exps[] = {1.0, 2.0, 4.0, 6.0, std::numeric_limits<double>::infinity()};
  NormReport r;
  const GridFieldD g = gradient(f, dom);
  for (double p : exps) {
    r.lp[p] = lp_norm(f, p, dom);
    r.grad_lp[p] = lp_norm(g, p, dom);
  }
  return r;
}

/// W^{1,4}-type norm ||f||_4 + ||grad f||_4.
template <class S>
S w14_norm(const GridField<S>& f, const ThinDomain& dom) {
  return lp_norm(f, 4.0, dom) + lp_norm(gradient(f, dom), 4.0, dom);
}

/// W^{2,2}-type norm ||f||_2 + ||grad f||_2 + ||grad^2 f||_2.
template <class S>
S w22_norm(const GridField<S>& f, const ThinDomain& dom) {
  const GridField<S> g = gradient(f, dom);
  return lp_norm(f, 2.0, dom) + lp_norm(g, 2.0, dom) + lp_norm(gradient(g, dom), 2.0, dom);
}

/// Average over each horizontal slab: out(k, c) = mean over (i,j) of f_c.
/// Computed relative to the slab's first value so constant slabs (lifted
/// profiles in particular) average back exactly.
template <class S>
Array2<S> cross_avg(const GridField<S>& f, const ThinDomain& dom) {
  (void)dom;
  Array2<S> out(f.nz, f.comps);
  const long slab = static_cast<long>(f.nx) * f.ny;
  for (int c = 0; c < f.comps; ++c)
    for (int k = 0; k < f.nz; ++k) {
      const auto seg = f.comp(c).segment(static_cast<long>(k) * slab, slab);
      const S base = seg[0];
      out(k, c) = base + (seg - base).sum() / S(slab);
    }
  return out;
}

/// Lift of an axial profile: rho(i,j,k) = rho1d(k), u = (0, 0, u1d(k)).
/// The lifted state satisfies the wall conditions of the channel exactly.
inline FluidState3D lift1d(const Profile1DD& p, const ThinDomain& dom) {
  if (p.nz() != dom.nz)
    throw ConfigError("lift1d: profile length " + std::to_string(p.nz()) +
                      " does not match nz = " + std::to_string(dom.nz));
  FluidState3D s;
  s.rho = GridFieldD(dom, 1);
  s.u = GridFieldD(dom, 3);
  s.t = p.t;
  const long slab = static_cast<long>(dom.nx) * dom.ny;
  for (int k = 0; k < dom.nz; ++k) {
    s.rho.data.segment(static_cast<long>(k) * slab, slab).setConstant(p.rho[k]);
    s.u.comp(2).segment(static_cast<long>(k) * slab, slab).setConstant(p.u[k]);
  }
  return s;
}

}  // namespace thinns
