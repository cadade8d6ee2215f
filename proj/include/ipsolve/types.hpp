#pragma once

#include <Eigen/Core>

namespace ipsolve {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Column-major flattening, vec(F)[i + 3 j] = F(i, j).
inline Vec9 flatten(const Mat3& m) { return Eigen::Map<const Vec9>(m.data()); }
inline Mat3 unflatten(const Vec9& v) { return Eigen::Map<const Mat3>(v.data()); }

}  // namespace ipsolve
