#include "physaug/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "physaug/rng.hpp"

namespace physaug::fixtures {

namespace {

using quatkin::Quaternion;
using quatkin::Vec3;

constexpr double kPi = std::numbers::pi;

Vec3 random_unit(KeyedStream& s) {
  Vec3 v;
  do {
    v = {s.normal(), s.normal(), s.normal()};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

Quaternion random_rotation(KeyedStream& s) {
  return quatkin::axis_angle_compose(s.uniform(0.0, kPi), random_unit(s));
}

quatkin::MotionSequence empty_motion(std::size_t frames, std::size_t joints, double rate_hz) {
  quatkin::MotionSequence m;
  m.sample_rate_hz = rate_hz;
  m.root_translation.assign(frames, Vec3::Zero());
  m.joint_orient.assign(frames, std::vector<Quaternion>(joints, Quaternion::identity()));
  return m;
}

}  // namespace

dataio::LoadedBundle spin_bundle(double omega, double radius, double rate_hz, std::size_t frames) {
  dataio::LoadedBundle out;
  auto& b = out.bundle;
  b.subject_id = "spin";
  b.body.joints = {{"root", std::nullopt, Vec3::Zero()}};
  b.dynamics = empty_motion(frames, 1, rate_hz);
  for (std::size_t t = 0; t < frames; ++t) {
    const double angle = omega * static_cast<double>(t) / rate_hz;
    b.dynamics.joint_orient[t][0] = {std::cos(0.5 * angle), 0.0, 0.0, std::sin(0.5 * angle)};
  }
  b.dynamics.canonicalize();
  b.placement.sensors = {{"spin", 0, Vec3(radius, 0.0, 0.0), Quaternion::identity()}};
  out.labels.assign(frames, 0);
  return out;
}

dataio::LoadedBundle random_static_bundle(std::uint64_t seed, std::size_t frames) {
  KeyedStream s = KeyedStream(seed).child("static-bundle");
  dataio::LoadedBundle out;
  auto& b = out.bundle;
  b.subject_id = "static-" + std::to_string(seed);
  const std::size_t joints = 2 + static_cast<std::size_t>(s.uniform() * 6.0);
  for (std::size_t j = 0; j < joints; ++j) {
    quatkin::Joint jt;
    jt.name = "j" + std::to_string(j);
    if (j > 0) {
      jt.parent = static_cast<std::size_t>(s.uniform() * static_cast<double>(j));
      jt.bone_offset = {s.uniform(-0.4, 0.4), s.uniform(-0.4, 0.4), s.uniform(-0.4, 0.4)};
    }
    b.body.joints.push_back(jt);
  }
  b.dynamics = empty_motion(frames, joints, 50.0);
  const Vec3 root_pos{s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0), s.uniform(0.0, 2.0)};
  std::vector<Quaternion> pose(joints);
  for (auto& q : pose) q = random_rotation(s);
  for (std::size_t t = 0; t < frames; ++t) {
    b.dynamics.root_translation[t] = root_pos;
    b.dynamics.joint_orient[t] = pose;
  }
  const std::size_t sensors = 1 + static_cast<std::size_t>(s.uniform() * 3.0);
  for (std::size_t i = 0; i < sensors; ++i) {
    quatkin::SensorPlacement p;
    p.sensor_id = "imu" + std::to_string(i);
    p.joint = static_cast<std::size_t>(s.uniform() * static_cast<double>(joints));
    p.rel_pos = {s.uniform(-0.1, 0.1), s.uniform(-0.1, 0.1), s.uniform(-0.1, 0.1)};
    p.rel_orient = random_rotation(s);
    b.placement.sensors.push_back(p);
  }
  out.labels.assign(frames, 0);
  return out;
}

dataio::LoadedBundle swing_bundle(double amplitude_rad, std::size_t period, double rate_hz, std::size_t frames) {
  dataio::LoadedBundle out;
  auto& b = out.bundle;
  b.subject_id = "swing";
  b.body.joints = {{"pelvis", std::nullopt, Vec3::Zero()},
                   {"shoulder", 0, Vec3(0.0, -0.2, 0.5)},
                   {"forearm", 1, Vec3(0.0, 0.0, -0.3)}};
  b.dynamics = empty_motion(frames, 3, rate_hz);
  for (std::size_t t = 0; t < frames; ++t) {
    b.dynamics.root_translation[t] = Vec3(0.0, 0.0, 1.0);
    const double angle = amplitude_rad * std::sin(2.0 * kPi * static_cast<double>(t) / static_cast<double>(period));
    b.dynamics.joint_orient[t][2] = quatkin::axis_angle_compose(std::abs(angle), angle >= 0 ? Vec3::UnitX() : Vec3(-Vec3::UnitX()));
  }
  b.dynamics.canonicalize();
  b.placement.sensors = {{"RLA", 2, Vec3(0.0, 0.0, -0.1), quatkin::axis_angle_compose(kPi / 2.0, -Vec3::UnitX())}};
  out.labels.assign(frames, 1);
  return out;
}

dataio::LoadedBundle demo_bundle(std::uint64_t seed, std::size_t frames, double rate_hz) {
  KeyedStream s = KeyedStream(seed).child("demo-bundle");
  dataio::LoadedBundle out;
  auto& b = out.bundle;
  b.subject_id = "demo-" + std::to_string(seed);
  b.body.joints = {
      {"pelvis", std::nullopt, Vec3::Zero()},
      {"spine", 0, Vec3(0.0, 0.0, 0.45)},
      {"r_shoulder", 1, Vec3(0.0, -0.2, 0.05)},
      {"r_forearm", 2, Vec3(0.0, 0.0, -0.3)},
      {"l_shoulder", 1, Vec3(0.0, 0.2, 0.05)},
      {"l_forearm", 4, Vec3(0.0, 0.0, -0.3)},
  };
  b.dynamics = empty_motion(frames, b.body.size(), rate_hz);

  // Activity segments: 0 = stand, 1 = lateral bend, 2 = arm curls, 3 = walk-in-place.
  const std::size_t segment = std::max<std::size_t>(frames / 6, 1);
  const double phase_r = s.uniform(0.0, 2.0 * kPi);
  const double phase_l = s.uniform(0.0, 2.0 * kPi);
  const double tempo = s.uniform(0.8, 1.2);
  out.labels.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto label = static_cast<std::uint32_t>((t / segment) % 4);
    out.labels[t] = label;
    const double time = static_cast<double>(t) / rate_hz;
    auto& q = b.dynamics.joint_orient[t];
    Vec3 root(0.0, 0.0, 1.0);
    switch (label) {
      case 0:
        q[1] = quatkin::axis_angle_compose(0.02 * std::sin(0.5 * time), Vec3::UnitY());
        break;
      case 1: {
        const double bend = 0.4 * std::sin(2.0 * kPi * 0.4 * tempo * time);
        q[1] = quatkin::from_euler_zyx(0.0, 0.0, bend);
        q[2] = quatkin::from_euler_zyx(0.0, 0.0, -0.5 * bend - 0.3);
        q[4] = quatkin::from_euler_zyx(0.0, 0.0, -0.5 * bend + 0.3);
        break;
      }
      case 2: {
        const double curl_r = 0.9 + 0.8 * std::sin(2.0 * kPi * 0.7 * tempo * time + phase_r);
        const double curl_l = 0.9 + 0.8 * std::sin(2.0 * kPi * 0.7 * tempo * time + phase_l);
        q[3] = quatkin::from_euler_zyx(0.0, -curl_r, 0.0);
        q[5] = quatkin::from_euler_zyx(0.0, -curl_l, 0.0);
        break;
      }
      default: {
        const double stride = 2.0 * kPi * 0.9 * tempo * time;
        root += Vec3(0.0, 0.0, 0.03 * std::sin(2.0 * stride));
        q[2] = quatkin::from_euler_zyx(0.0, 0.5 * std::sin(stride), 0.0);
        q[4] = quatkin::from_euler_zyx(0.0, -0.5 * std::sin(stride), 0.0);
        q[3] = quatkin::from_euler_zyx(0.0, -0.4, 0.0);
        q[5] = quatkin::from_euler_zyx(0.0, -0.4, 0.0);
        break;
      }
    }
    b.dynamics.root_translation[t] = root;
  }
  b.dynamics.canonicalize();
  b.placement.sensors = {
      {"RLA", 3, Vec3(0.0, 0.0, -0.22), quatkin::from_euler_zyx(0.0, 0.0, kPi)},
      {"LLA", 5, Vec3(0.0, 0.0, -0.22), Quaternion::identity()},
  };
  b.hardware.sensors["RLA"] = {{Vec3::Constant(0.05), Vec3(0.1, -0.05, 0.02)}, {Vec3::Constant(0.01), Vec3::Zero()}};
  b.hardware.sensors["LLA"] = {{Vec3::Constant(0.05), Vec3::Zero()}, {Vec3::Constant(0.01), Vec3(0.0, 0.01, 0.0)}};
  return out;
}

}  // namespace physaug::fixtures
