/// @file types.hpp
/// @brief Scalar-templated dense aliases shared across the library.
#pragma once

#include <Eigen/Dense>

namespace thinns {

template <class Scalar>
using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <class Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using ArrayXd  = Array<double>;
using Array2Xd = Array2<double>;
using Vec3d    = Vec3<double>;
using Mat3d    = Mat3<double>;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace thinns
