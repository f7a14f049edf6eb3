#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "physaug/quaternion.hpp"

namespace physaug::quatkin {

/// Standard gravity, world z up.
inline constexpr double kGravity = 9.80665;

struct Joint {
  std::string name;
  std::optional<std::size_t> parent;  // empty for the root
  Vec3 bone_offset = Vec3::Zero();    // metres, in the parent's rest frame
};

/// Joints in topological order: exactly one root at index 0, parents precede children.
struct Skeleton {
  std::vector<Joint> joints;

  std::size_t size() const { return joints.size(); }
  std::optional<std::size_t> find(const std::string& name) const;
  void validate() const;
};

/// Per-frame joint orientations relative to the parent, plus root translation.
struct MotionSequence {
  double sample_rate_hz = 100.0;
  std::vector<Vec3> root_translation;                 // [t]
  std::vector<std::vector<Quaternion>> joint_orient;  // [t][j]

  std::size_t frames() const { return root_translation.size(); }
  std::size_t joints() const { return joint_orient.empty() ? 0 : joint_orient.front().size(); }

  /// Track of a single joint over time.
  std::vector<Quaternion> track(std::size_t joint) const;
  void set_track(std::size_t joint, std::span<const Quaternion> values);

  MotionSequence slice(std::size_t start, std::size_t length) const;

  /// Hemisphere-aligns every joint track in place.
  void canonicalize();

  /// Checks shapes and unit norms; `min_frames` guards the derivative stencil.
  void validate(std::size_t expected_joints, std::size_t min_frames = 3) const;
};

struct SensorPlacement {
  std::string sensor_id;
  std::size_t joint = 0;
  Vec3 rel_pos = Vec3::Zero();
  Quaternion rel_orient;
};

struct PlacementMap {
  std::vector<SensorPlacement> sensors;

  const SensorPlacement* find(const std::string& sensor_id) const;
  void validate(const Skeleton& skel) const;
};

struct ErrorModel {
  Vec3 sigma = Vec3::Zero();  // white-noise std per axis
  Vec3 bias = Vec3::Zero();   // constant offset per axis
};

struct SensorHardware {
  ErrorModel accel;  // m/s^2
  ErrorModel gyro;   // rad/s
};

/// Noise and bias per sensor id. Sensors without an entry are ideal.
struct HardwareProfile {
  std::map<std::string, SensorHardware> sensors;

  SensorHardware get(const std::string& sensor_id) const;
  void validate() const;
};

struct SensorTrace {
  std::string sensor_id;
  double sample_rate_hz = 100.0;
  std::vector<Vec3> accel;
  std::vector<Vec3> gyro;

  std::size_t frames() const { return accel.size(); }
};

struct JointPose {
  Vec3 position = Vec3::Zero();
  Quaternion orientation;
};

/// World pose of every joint at frame `t`.
std::vector<JointPose> forward_kinematics(const Skeleton& skel, const MotionSequence& motion, std::size_t t);

/// Analytic accelerometer (specific force) and gyroscope synthesis for every
/// placed sensor. Noise draws are keyed by (seed, sensor id, modality, frame)
/// so the result does not depend on evaluation order.
std::vector<SensorTrace> synthesize_imu(const Skeleton& skel, const MotionSequence& motion,
                                        const PlacementMap& placement, const HardwareProfile& hw,
                                        std::uint64_t seed);

}  // namespace physaug::quatkin
