#include "physaug/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "physaug/errors.hpp"

namespace physaug::quatkin {

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidQuaternion("cannot normalize a zero or non-finite quaternion");
  return (1.0 / n) * *this;
}

Quaternion Quaternion::inverse() const {
  const double n2 = w * w + x * x + y * y + z * z;
  if (!(n2 > 0.0)) throw InvalidQuaternion("zero quaternion has no inverse");
  return (1.0 / n2) * conjugate();
}

bool Quaternion::is_unit(double tol) const { return std::abs(norm() - 1.0) <= tol; }

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Vec3 Quaternion::rotate(const Vec3& v) const {
  // Expanded form of q (0,v) q*.
  const Vec3 u = vec();
  const Vec3 t = 2.0 * u.cross(v);
  return v + w * t + u.cross(t);
}

Mat3 Quaternion::to_matrix() const {
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

AxisAngle axis_angle_decompose(const Quaternion& q) {
  if (!q.is_unit()) {
    std::ostringstream os;
    os << "axis_angle_decompose: |q| = " << q.norm() << " is not unit";
    throw InvalidQuaternion(os.str());
  }
  // q and -q are the same rotation; w >= 0 keeps the angle in [0, pi].
  const Quaternion c = q.w < 0.0 ? -q : q;
  const Vec3 v = c.vec();
  const double s = v.norm();
  AxisAngle out;
  out.angle = 2.0 * std::atan2(s, c.w);
  if (out.angle < kZeroAngle || s == 0.0) {
    out.angle = 0.0;
    out.axis = Vec3::UnitZ();
    return out;
  }
  out.axis = v / s;
  return out;
}

Quaternion axis_angle_compose(double angle, const Vec3& axis) {
  if (!std::isfinite(angle)) throw InvalidArgument("axis_angle_compose: non-finite angle");
  if (std::abs(axis.norm() - 1.0) > kUnitTolerance) {
    throw InvalidArgument("axis_angle_compose: axis is not unit length");
  }
  const double half = 0.5 * angle;
  return Quaternion::from_vec(std::cos(half), std::sin(half) * axis.normalized()).normalized();
}

std::vector<Quaternion> hemisphere_align(std::span<const Quaternion> seq) {
  std::vector<Quaternion> out(seq.begin(), seq.end());
  if (out.empty()) return out;
  if (out.front().w < 0.0) out.front() = -out.front();
  for (std::size_t t = 1; t < out.size(); ++t) {
    if (out[t - 1].dot(out[t]) < 0.0) out[t] = -out[t];
  }
  return out;
}

Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double s) {
  Quaternion b = q1;
  double cos_omega = q0.dot(q1);
  if (cos_omega < 0.0) {
    b = -b;
    cos_omega = -cos_omega;
  }
  if (s <= 0.0) return q0;
  if (s >= 1.0) return b;
  cos_omega = std::min(cos_omega, 1.0);
  // Near-parallel inputs: the sin ratio is ill-conditioned, lerp is exact enough.
  if (cos_omega > 1.0 - 1e-12) return ((1.0 - s) * q0 + s * b).normalized();
  const double omega = std::acos(cos_omega);
  const double inv_sin = 1.0 / std::sin(omega);
  const double a0 = std::sin((1.0 - s) * omega) * inv_sin;
  const double a1 = std::sin(s * omega) * inv_sin;
  return (a0 * q0 + a1 * b).normalized();
}

Quaternion from_euler_zyx(double yaw, double pitch, double roll) {
  const Quaternion qz{std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
  const Quaternion qy{std::cos(0.5 * pitch), 0.0, std::sin(0.5 * pitch), 0.0};
  const Quaternion qx{std::cos(0.5 * roll), std::sin(0.5 * roll), 0.0, 0.0};
  return (qz * qy * qx).normalized();
}

}  // namespace physaug::quatkin
