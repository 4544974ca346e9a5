#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace pcad {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline Mat4 translation_matrix(const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.block<3, 1>(0, 3) = t;
  return m;
}

inline Mat4 scale_matrix(const Vec3& s) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = s.x();
  m(1, 1) = s.y();
  m(2, 2) = s.z();
  return m;
}

/// Rz * Ry * Rx, angles in radians.
inline Mat3 euler_rotation3(const Vec3& radians) {
  return (Eigen::AngleAxisd(radians.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(radians.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(radians.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

inline Mat4 euler_rotation(const Vec3& radians) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = euler_rotation3(radians);
  return m;
}

inline Vec3 transform_point(const Mat4& m, const Vec3& p) {
  return m.block<3, 3>(0, 0) * p + m.block<3, 1>(0, 3);
}

/// Whole-object placement. Rotation is in degrees; the matrix applies scale,
/// then rotation, then translation.
struct AffineParams {
  Vec3 translation = Vec3::Zero();
  Vec3 scale = Vec3::Ones();
  Vec3 rotation_deg = Vec3::Zero();

  Mat4 to_matrix() const {
    const Vec3 rad(deg2rad(rotation_deg.x()), deg2rad(rotation_deg.y()),
                   deg2rad(rotation_deg.z()));
    return translation_matrix(translation) * euler_rotation(rad) * scale_matrix(scale);
  }

  static AffineParams identity() { return {}; }
};

}  // namespace pcad
