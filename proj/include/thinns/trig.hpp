/// @file trig.hpp
/// @brief Seeded trigonometric test fields with wall-compatible parity.
///
/// Scalar fields are cosine products (zero normal derivative on every face);
/// vector fields use a sine factor in the component's own direction and
/// cosines elsewhere, so the normal trace vanishes and the tangential
/// traction is zero on every flat face, exactly. Horizontal wavenumbers are
/// multiples of pi/epsilon, so one seed generates the same rescaled field on
/// every channel width.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "thinns/field.hpp"
#include "thinns/geometry.hpp"
#include "thinns/physics.hpp"
#include "thinns/types.hpp"

namespace thinns {

/// Deterministic uniform double in [0, 1) from the standard mt19937_64
/// stream (bit construction avoids distribution implementation differences).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Axial wavenumber of mode index mz: multiples of pi on the unit axis, or,
/// for isotropically rescaled families, the nearest wall-compatible multiple
/// of pi to mz/eps (exact at dyadic widths).
inline double axial_wavenumber(int mz, double eps, bool isotropic_z) {
  if (mz == 0) return 0.0;
  if (!isotropic_z) return mz * pi;
  return pi * std::max(1.0, std::round(mz / eps));
}

/// Scalar cosine-product field: sum of modes
///   amp * cos(mx pi x / eps) cos(my pi y / eps) cos(kz z),
/// with kz from axial_wavenumber. Zero normal derivative on every face.
struct TrigScalarField {
  struct Mode {
    int mx = 0, my = 0, mz = 0;
    double amp = 0.0;
  };
  std::vector<Mode> modes;
  bool isotropic_z = false;

  static TrigScalarField random(std::uint64_t seed, int n_modes = 3, int max_mode = 3,
                                bool isotropic_z = false) {
    std::mt19937_64 rng(seed);
    TrigScalarField f;
    f.isotropic_z = isotropic_z;
    for (int n = 0; n < n_modes; ++n) {
      Mode m;
      do {
        m.mx = static_cast<int>(uniform01(rng) * (max_mode + 1));
        m.my = static_cast<int>(uniform01(rng) * (max_mode + 1));
        m.mz = static_cast<int>(uniform01(rng) * (max_mode + 1));
      } while (m.mx == 0 && m.my == 0 && m.mz == 0);
      m.amp = 2.0 * uniform01(rng) - 1.0;
      f.modes.push_back(m);
    }
    return f;
  }

  double value(double x, double y, double z, double eps) const {
    double acc = 0.0;
    for (const Mode& m : modes)
      acc += m.amp * std::cos(m.mx * pi * x / eps) * std::cos(m.my * pi * y / eps) *
             std::cos(axial_wavenumber(m.mz, eps, isotropic_z) * z);
    return acc;
  }

  GridFieldD eval(const ThinDomain& dom) const {
    GridFieldD f(dom, 1);
    for (int k = 0; k < dom.nz; ++k)
      for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
          f.at(0, i, j, k) = value(dom.x(i), dom.y(j), dom.z(k), dom.epsilon);
    return f;
  }
};

/// Vector field of wall-compatible modes sharing one wavevector per mode:
///   w_c = amp_c * sin(k_c x_c) * prod_{d != c} cos(k_d x_d),
/// with k = pi (mx/eps, my/eps, mz). Components with zero mode index vanish.
struct TrigVecField {
  struct Mode {
    int mx = 1, my = 1, mz = 1;
    double amp[3] = {0.0, 0.0, 0.0};
  };
  std::vector<Mode> modes;

  static TrigVecField random(std::uint64_t seed, int n_modes = 3, int max_mode = 3) {
    std::mt19937_64 rng(seed);
    TrigVecField f;
    for (int n = 0; n < n_modes; ++n) {
      Mode m;
      m.mx = 1 + static_cast<int>(uniform01(rng) * max_mode);
      m.my = 1 + static_cast<int>(uniform01(rng) * max_mode);
      m.mz = 1 + static_cast<int>(uniform01(rng) * max_mode);
      for (double& a : m.amp) a = 2.0 * uniform01(rng) - 1.0;
      f.modes.push_back(m);
    }
    return f;
  }

  Vec3d wavevector(const Mode& m, double eps) const {
    return Vec3d(m.mx * pi / eps, m.my * pi / eps, m.mz * pi);
  }

  Vec3d value(double x, double y, double z, double eps) const {
    Vec3d v = Vec3d::Zero();
    for (const Mode& m : modes) {
      const Vec3d k = wavevector(m, eps);
      v[0] += m.amp[0] * std::sin(k[0] * x) * std::cos(k[1] * y) * std::cos(k[2] * z);
      v[1] += m.amp[1] * std::cos(k[0] * x) * std::sin(k[1] * y) * std::cos(k[2] * z);
      v[2] += m.amp[2] * std::cos(k[0] * x) * std::cos(k[1] * y) * std::sin(k[2] * z);
    }
    return v;
  }

  GridFieldD eval(const ThinDomain& dom) const {
    GridFieldD f(dom, 3);
    for (int k = 0; k < dom.nz; ++k)
      for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
          const Vec3d v = value(dom.x(i), dom.y(j), dom.z(k), dom.epsilon);
          for (int c = 0; c < 3; ++c) f.at(c, i, j, k) = v[c];
        }
    return f;
  }

  /// Analytic right-hand side g = -div S(grad w) of the elliptic wall
  /// problem. Modes are eigenfunctions: per mode, with k the wavevector,
  ///   g_c = mu |k|^2 amp_c + (mu/3 + eta) k_c (k . amp), same basis.
  GridFieldD eval_lame_rhs(const ThinDomain& dom, const Viscosity& visc) const {
    TrigVecField g;
    for (const Mode& m : modes) {
      const Vec3d k = wavevector(m, dom.epsilon);
      const double k2 = k.squaredNorm();
      const double kdota = k[0] * m.amp[0] + k[1] * m.amp[1] + k[2] * m.amp[2];
      Mode gm = m;
      for (int c = 0; c < 3; ++c)
        gm.amp[c] = visc.mu * k2 * m.amp[c] + (visc.mu / 3.0 + visc.eta) * k[c] * kdota;
      g.modes.push_back(gm);
    }
    return g.eval(dom);
  }
};

}  // namespace thinns
