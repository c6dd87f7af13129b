// Shared fixed-size matrix aliases for the alignment library.
#pragma once

#include <Eigen/Dense>

namespace align {

using Vec3 = Eigen::Vector3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Mat15x6 = Eigen::Matrix<double, 15, 6>;
using Mat3x15 = Eigen::Matrix<double, 3, 15>;

// Error-state block offsets: (attitude, velocity, position, gyro bias, accel bias).
inline constexpr int kAttIdx = 0;
inline constexpr int kVelIdx = 3;
inline constexpr int kPosIdx = 6;
inline constexpr int kBgIdx = 9;
inline constexpr int kBaIdx = 12;
inline constexpr int kErrorStateDim = 15;
inline constexpr int kNoiseDim = 6;

}  // namespace align
