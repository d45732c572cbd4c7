/// @file field.hpp
/// @brief Dense cell-centered grid fields and 1D profiles.
#pragma once

#include <cmath>

#include "thinns/geometry.hpp"
#include "thinns/types.hpp"

namespace thinns {

/// Cell-centered field with `comps` interleaved component planes, stored
/// x-fastest so that each axial slab (fixed k) is contiguous.
/// Holds interior cells only; solvers keep their own ghost-padded buffers.
template <class S>
struct GridField {
  int nx = 0, ny = 0, nz = 0;
  int comps = 1;
  Array<S> data;  ///< size comps * nx*ny*nz, component planes back to back

  GridField() = default;
  GridField(const ThinDomain& dom, int comps_)
      : nx(dom.nx), ny(dom.ny), nz(dom.nz), comps(comps_) {
    data = Array<S>::Zero(static_cast<long>(comps) * cells());
  }

  long cells() const { return static_cast<long>(nx) * ny * nz; }
  long idx(int i, int j, int k) const {
    return (static_cast<long>(k) * ny + j) * nx + i;
  }

  S& at(int c, int i, int j, int k) { return data[c * cells() + idx(i, j, k)]; }
  const S& at(int c, int i, int j, int k) const { return data[c * cells() + idx(i, j, k)]; }

  /// View of one component plane.
  auto comp(int c) { return data.segment(c * cells(), cells()); }
  auto comp(int c) const { return data.segment(c * cells(), cells()); }

  bool all_finite() const { return data.isFinite().all(); }

  bool same_shape(const GridField& o) const {
    return nx == o.nx && ny == o.ny && nz == o.nz && comps == o.comps;
  }
};

using GridFieldD = GridField<double>;

/// Density/velocity profile of the axial (1D) system at one time instant.
template <class S>
struct Profile1D {
  Array<S> rho;
  Array<S> u;
  double t = 0.0;

  int nz() const { return static_cast<int>(rho.size()); }
};

using Profile1DD = Profile1D<double>;

/// Density and velocity on the 3D grid at one time instant.
struct FluidState3D {
  GridFieldD rho;  ///< scalar, must stay positive
  GridFieldD u;    ///< 3 components
  double t = 0.0;
};

}  // namespace thinns
