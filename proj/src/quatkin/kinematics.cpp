#include "physaug/kinematics.hpp"

#include <cmath>
#include <string>

#include "physaug/errors.hpp"
#include "physaug/rng.hpp"

namespace physaug::quatkin {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

// Gravity as a world-frame acceleration vector.
const Vec3 kGravityWorld{0.0, 0.0, -kGravity};

void add_noise(Vec3& v, const Vec3& sigma, KeyedStream stream) {
  for (int axis = 0; axis < 3; ++axis) {
    const double n = stream.normal();
    if (sigma[axis] != 0.0) v[axis] += sigma[axis] * n;
  }
}

}  // namespace

std::optional<std::size_t> Skeleton::find(const std::string& name) const {
  for (std::size_t j = 0; j < joints.size(); ++j) {
    if (joints[j].name == name) return j;
  }
  return std::nullopt;
}

void Skeleton::validate() const {
  if (joints.empty()) throw InvalidArgument("skeleton has no joints");
  if (joints.front().parent) throw InvalidArgument("joint 0 must be the root");
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const Joint& jt = joints[j];
    if (j > 0) {
      if (!jt.parent) throw InvalidArgument("joint '" + jt.name + "' is a second root");
      if (*jt.parent >= j) throw InvalidArgument("joint '" + jt.name + "' has a parent that does not precede it");
    }
    if (!finite(jt.bone_offset)) throw InvalidArgument("joint '" + jt.name + "' has a non-finite bone offset");
  }
}

std::vector<Quaternion> MotionSequence::track(std::size_t joint) const {
  std::vector<Quaternion> out;
  out.reserve(frames());
  for (const auto& frame : joint_orient) out.push_back(frame.at(joint));
  return out;
}

void MotionSequence::set_track(std::size_t joint, std::span<const Quaternion> values) {
  if (values.size() != joint_orient.size()) throw LengthError("set_track: length mismatch");
  for (std::size_t t = 0; t < values.size(); ++t) joint_orient[t].at(joint) = values[t];
}

MotionSequence MotionSequence::slice(std::size_t start, std::size_t length) const {
  if (start + length > frames()) throw LengthError("MotionSequence::slice: span exceeds sequence");
  MotionSequence out;
  out.sample_rate_hz = sample_rate_hz;
  out.root_translation.assign(root_translation.begin() + start, root_translation.begin() + start + length);
  out.joint_orient.assign(joint_orient.begin() + start, joint_orient.begin() + start + length);
  return out;
}

void MotionSequence::canonicalize() {
  for (std::size_t j = 0; j < joints(); ++j) set_track(j, hemisphere_align(track(j)));
}

void MotionSequence::validate(std::size_t expected_joints, std::size_t min_frames) const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) throw InvalidArgument("sample rate must be positive");
  if (joint_orient.size() != root_translation.size()) {
    throw LengthError("joint_orient has " + std::to_string(joint_orient.size()) + " frames, root_translation has " +
                      std::to_string(root_translation.size()));
  }
  if (frames() < min_frames) {
    throw LengthError("motion has " + std::to_string(frames()) + " frames, need at least " +
                      std::to_string(min_frames));
  }
  for (std::size_t t = 0; t < frames(); ++t) {
    if (joint_orient[t].size() != expected_joints) {
      throw LengthError("frame " + std::to_string(t) + " has " + std::to_string(joint_orient[t].size()) +
                        " joint orientations, skeleton has " + std::to_string(expected_joints));
    }
    if (!finite(root_translation[t])) throw InvalidArgument("non-finite root translation at frame " + std::to_string(t));
    for (const Quaternion& q : joint_orient[t]) {
      if (!q.is_unit()) throw InvalidQuaternion("non-unit joint orientation at frame " + std::to_string(t));
    }
  }
}

const SensorPlacement* PlacementMap::find(const std::string& sensor_id) const {
  for (const auto& s : sensors) {
    if (s.sensor_id == sensor_id) return &s;
  }
  return nullptr;
}

void PlacementMap::validate(const Skeleton& skel) const {
  for (const auto& s : sensors) {
    if (s.joint >= skel.size()) {
      throw InvalidArgument("sensor '" + s.sensor_id + "' references unknown joint " + std::to_string(s.joint));
    }
    if (!s.rel_orient.is_unit()) throw InvalidQuaternion("sensor '" + s.sensor_id + "' rel_orient is not unit");
    if (!finite(s.rel_pos)) throw InvalidArgument("sensor '" + s.sensor_id + "' rel_pos is not finite");
  }
}

SensorHardware HardwareProfile::get(const std::string& sensor_id) const {
  const auto it = sensors.find(sensor_id);
  return it == sensors.end() ? SensorHardware{} : it->second;
}

void HardwareProfile::validate() const {
  for (const auto& [id, hw] : sensors) {
    for (const ErrorModel* m : {&hw.accel, &hw.gyro}) {
      if (!finite(m->sigma) || !finite(m->bias) || (m->sigma.array() < 0.0).any()) {
        throw InvalidArgument("hardware entry '" + id + "' has negative or non-finite parameters");
      }
    }
  }
}

std::vector<JointPose> forward_kinematics(const Skeleton& skel, const MotionSequence& motion, std::size_t t) {
  if (t >= motion.frames()) {
    throw InvalidArgument("forward_kinematics: frame " + std::to_string(t) + " out of range");
  }
  const auto& orient = motion.joint_orient[t];
  if (orient.size() != skel.size()) throw LengthError("forward_kinematics: joint count mismatch");
  std::vector<JointPose> poses(skel.size());
  poses[0].position = motion.root_translation[t];
  poses[0].orientation = orient[0];
  for (std::size_t j = 1; j < skel.size(); ++j) {
    const JointPose& parent = poses[*skel.joints[j].parent];
    poses[j].orientation = parent.orientation * orient[j];
    poses[j].position = parent.position + parent.orientation.rotate(skel.joints[j].bone_offset);
  }
  return poses;
}

std::vector<SensorTrace> synthesize_imu(const Skeleton& skel, const MotionSequence& motion,
                                        const PlacementMap& placement, const HardwareProfile& hw,
                                        std::uint64_t seed) {
  skel.validate();
  motion.validate(skel.size(), 3);
  placement.validate(skel);
  hw.validate();

  const std::size_t frames = motion.frames();
  const double dt = 1.0 / motion.sample_rate_hz;

  std::vector<std::vector<JointPose>> poses;
  poses.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) poses.push_back(forward_kinematics(skel, motion, t));

  const KeyedStream root(seed);
  std::vector<SensorTrace> traces;
  traces.reserve(placement.sensors.size());
  for (const SensorPlacement& s : placement.sensors) {
    std::vector<Vec3> pos(frames);
    std::vector<Quaternion> orient(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      const JointPose& jp = poses[t][s.joint];
      pos[t] = jp.position + jp.orientation.rotate(s.rel_pos);
      orient[t] = jp.orientation * s.rel_orient;
    }
    orient = hemisphere_align(orient);

    const SensorHardware err = hw.get(s.sensor_id);
    const KeyedStream sensor_stream = root.child(s.sensor_id);
    const KeyedStream accel_stream = sensor_stream.child("accel");
    const KeyedStream gyro_stream = sensor_stream.child("gyro");

    SensorTrace trace;
    trace.sensor_id = s.sensor_id;
    trace.sample_rate_hz = motion.sample_rate_hz;
    trace.accel.resize(frames);
    trace.gyro.resize(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      // Central differences inside, one-sided for q-dot at the ends, copied
      // acceleration at the ends.
      Quaternion qdot;
      if (t == 0) {
        qdot = (1.0 / dt) * (orient[1] - orient[0]);
      } else if (t + 1 == frames) {
        qdot = (1.0 / dt) * (orient[t] - orient[t - 1]);
      } else {
        qdot = (0.5 / dt) * (orient[t + 1] - orient[t - 1]);
      }
      const std::size_t c = t == 0 ? 1 : (t + 1 == frames ? frames - 2 : t);
      const Vec3 pdd = (pos[c + 1] - 2.0 * pos[c] + pos[c - 1]) / (dt * dt);

      const Quaternion inv = orient[t].conjugate();
      Vec3 gyro = 2.0 * (inv * qdot).vec();
      Vec3 accel = inv.rotate(pdd - kGravityWorld);

      accel += err.accel.bias;
      gyro += err.gyro.bias;
      add_noise(accel, err.accel.sigma, accel_stream.child(t));
      add_noise(gyro, err.gyro.sigma, gyro_stream.child(t));
      trace.accel[t] = accel;
      trace.gyro[t] = gyro;
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace physaug::quatkin
