#pragma once

#include <Eigen/Dense>

namespace pinch {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

// cheap reject sphere for elementary map supports
template <int N>
struct Ball {
  Vec<N> center = Vec<N>::Zero();
  double radius = 0.0;
  bool contains(const Vec<N>& x) const {
    return (x - center).squaredNorm() <= radius * radius;
  }
};

using Ball2 = Ball<2>;
using Ball3 = Ball<3>;

}  // namespace pinch
