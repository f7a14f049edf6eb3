#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace physaug::quatkin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Tolerance on |q| - 1 below which a quaternion counts as a rotation.
inline constexpr double kUnitTolerance = 1e-6;

/// Hamilton quaternion, scalar first. Rotates a vector v as q (0,v) q^-1
/// in right-handed frames.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
  static Quaternion from_vec(double scalar, const Vec3& v) { return {scalar, v.x(), v.y(), v.z()}; }

  Vec3 vec() const { return {x, y, z}; }
  double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  double norm() const;
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion inverse() const;
  bool is_unit(double tol = kUnitTolerance) const;

  /// Rotates `v` by this (unit) quaternion.
  Vec3 rotate(const Vec3& v) const;
  Mat3 to_matrix() const;

  Quaternion operator-() const { return {-w, -x, -y, -z}; }
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b);
  friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quaternion operator*(double s, const Quaternion& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }
  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

struct AxisAngle {
  double angle = 0.0;  // radians, [0, pi]
  Vec3 axis = Vec3::UnitZ();
};

/// Angles below this are reported as zero rotation about +z.
inline constexpr double kZeroAngle = 1e-8;

/// Splits a unit quaternion into angle in [0, pi] and unit axis.
/// Throws InvalidQuaternion when `q` is not unit-norm.
AxisAngle axis_angle_decompose(const Quaternion& q);

/// cos(angle/2) + sin(angle/2) (axis . ijk). Throws InvalidArgument for a non-unit axis.
Quaternion axis_angle_compose(double angle, const Vec3& axis);

/// Flips signs so consecutive samples have non-negative dot product and the
/// first sample has w >= 0. Represents the same rotations.
std::vector<Quaternion> hemisphere_align(std::span<const Quaternion> seq);

/// Constant-speed interpolation along the shorter arc; s in [0, 1].
Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double s);

/// Intrinsic z-y-x composition: Rz(yaw) Ry(pitch) Rx(roll), all in radians.
Quaternion from_euler_zyx(double yaw, double pitch, double roll);

}  // namespace physaug::quatkin
