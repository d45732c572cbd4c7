/// @file geometry.hpp
/// @brief Thin channel domain (0,eps)^2 x (0,1) and its structured grid.
#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "thinns/errors.hpp"
#include "thinns/types.hpp"

namespace thinns {

/// Rectangular channel with square cross-section of side `epsilon` and unit
/// axial length, discretized by a cell-centered collocated grid.
/// Immutable after construction; safe to share across threads.
struct ThinDomain {
  double epsilon = 1.0;  ///< cross-section scale, 0 < epsilon <= 1
  int nx = 0, ny = 0;    ///< cells per horizontal direction
  int nz = 0;            ///< cells along the channel axis

  double lx = 1.0, ly = 1.0, lz = 1.0;  ///< extents (eps, eps, 1)
  double d = 0.0;                       ///< diameter of the box
  double v = 0.0;                       ///< volume eps^2 * 1
  double hx = 0.0, hy = 0.0, hz = 0.0;  ///< grid spacings

  long cells() const { return static_cast<long>(nx) * ny * nz; }
  double cell_volume() const { return hx * hy * hz; }

  // Cell-center coordinates.
  double x(int i) const { return (i + 0.5) * hx; }
  double y(int j) const { return (j + 0.5) * hy; }
  double z(int k) const { return (k + 0.5) * hz; }
};

inline ThinDomain build_channel(double epsilon, int nx, int ny, int nz) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw ConfigError("build_channel: epsilon must satisfy 0 < epsilon <= 1, got " +
                      std::to_string(epsilon));
  if (nx < 2 || ny < 2 || nz < 2)
    throw ConfigError("build_channel: resolutions must be >= 2, got (" + std::to_string(nx) +
                      ", " + std::to_string(ny) + ", " + std::to_string(nz) + ")");
  ThinDomain dom;
  dom.epsilon = epsilon;
  dom.nx = nx;
  dom.ny = ny;
  dom.nz = nz;
  dom.lx = epsilon;
  dom.ly = epsilon;
  dom.lz = 1.0;
  dom.d = std::sqrt(2.0 * epsilon * epsilon + 1.0);
  dom.v = epsilon * epsilon;
  dom.hx = epsilon / nx;
  dom.hy = epsilon / ny;
  dom.hz = 1.0 / nz;
  return dom;
}

/// Returns the stored (diameter, volume) pair.
inline std::pair<double, double> domain_metrics(const ThinDomain& dom) {
  return {dom.d, dom.v};
}

}  // namespace thinns
