#include "physaug/ppda.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "physaug/errors.hpp"
#include "physaug/rng.hpp"

namespace physaug::ppda {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::vector<bool> mask_bits(const JointMask& mask, std::size_t joints) {
  std::vector<bool> bits(joints, !mask.has_value());
  if (mask) {
    for (std::size_t j : *mask) {
      if (j >= joints) throw InvalidArgument("joint mask index " + std::to_string(j) + " out of range");
      bits[j] = true;
    }
  }
  return bits;
}

// Shared core of amplitude scaling and warping: factor(t) multiplies every
// masked joint's rotation angle at frame t.
template <typename Factor>
MotionSequence scale_angles(const MotionSequence& d, const JointMask& mask, Factor factor) {
  const auto bits = mask_bits(mask, d.joints());
  MotionSequence out = d;
  std::size_t clamped = 0;
  bool changed = false;
  for (std::size_t t = 0; t < d.frames(); ++t) {
    const double f = factor(t);
    if (f == 1.0) continue;
    changed = true;
    for (std::size_t j = 0; j < d.joints(); ++j) {
      if (!bits[j]) continue;
      const quatkin::AxisAngle aa = quatkin::axis_angle_decompose(d.joint_orient[t][j]);
      double angle = f * aa.angle;
      if (angle > std::numbers::pi || angle < 0.0) {
        ++clamped;
        angle = std::clamp(angle, 0.0, std::numbers::pi);
      }
      out.joint_orient[t][j] = quatkin::axis_angle_compose(angle, aa.axis);
    }
  }
  if (clamped > 0) spdlog::debug("amplitude scaling clamped {} joint angles to [0, pi]", clamped);
  if (changed) out.canonicalize();
  return out;
}

}  // namespace

void MotionBundle::validate() const {
  body.validate();
  dynamics.validate(body.size(), 3);
  placement.validate(body);
  hardware.validate();
}

std::vector<quatkin::SensorTrace> MotionBundle::synthesize(std::uint64_t seed) const {
  return quatkin::synthesize_imu(body, dynamics, placement, hardware, seed);
}

MotionSequence scale_amplitude(const MotionSequence& d, double alpha, const JointMask& mask) {
  if (!std::isfinite(alpha)) throw InvalidArgument("amplitude factor must be finite");
  if (alpha == 1.0) return d;
  return scale_angles(d, mask, [alpha](std::size_t) { return alpha; });
}

MotionSequence amplitude_scale(const MotionSequence& d, double sigma, std::uint64_t seed, const JointMask& mask) {
  return scale_amplitude(d, stda::sample_scale_factor(sigma, seed), mask);
}

MotionSequence warp_amplitude(const MotionSequence& d, const stda::WarpCurve& curve, const JointMask& mask) {
  if (curve.values.size() != d.frames()) throw LengthError("amplitude curve length differs from motion length");
  curve.validate();
  return scale_angles(d, mask, [&curve](std::size_t t) { return curve.values[t]; });
}

MotionSequence amplitude_warp(const MotionSequence& d, double sigma, int knots, std::uint64_t seed,
                              const JointMask& mask) {
  if (sigma == 0.0) return d;
  return warp_amplitude(d, stda::make_magnitude_curve(d.frames(), sigma, knots, seed), mask);
}

MotionSequence speed_resample(const MotionSequence& d, const SpeedProfile& profile) {
  const std::size_t frames = d.frames();
  if (frames == 0) return d;
  const double last = static_cast<double>(frames - 1);

  std::vector<double> source(frames);
  if (const auto* u = std::get_if<UniformSpeed>(&profile)) {
    if (!(u->beta > 0.0) || !std::isfinite(u->beta)) throw InvalidArgument("speed_resample: beta must be positive");
    if (u->beta == 1.0) return d;
    for (std::size_t t = 0; t < frames; ++t) source[t] = std::min(static_cast<double>(t) * u->beta, last);
  } else {
    const auto& w = std::get<stda::WarpCurve>(profile);
    if (w.kind != stda::CurveKind::Time) throw InvalidArgument("speed_resample: warp must be a time curve");
    if (w.values.size() != frames) throw InvalidArgument("speed_resample: warp length differs from motion length");
    w.validate();
    source = w.values;
  }

  MotionSequence out = d;
  for (std::size_t t = 0; t < frames; ++t) {
    const double s = source[t];
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(i0);
    if (frac == 0.0) {
      out.root_translation[t] = d.root_translation[i0];
      out.joint_orient[t] = d.joint_orient[i0];
      continue;
    }
    const std::size_t i1 = std::min(i0 + 1, frames - 1);
    out.root_translation[t] = (1.0 - frac) * d.root_translation[i0] + frac * d.root_translation[i1];
    for (std::size_t j = 0; j < d.joints(); ++j) {
      out.joint_orient[t][j] = quatkin::slerp(d.joint_orient[i0][j], d.joint_orient[i1][j], frac);
    }
  }
  out.canonicalize();
  return out;
}

Quaternion PlacementOffset::rotation() const {
  Quaternion q = quatkin::from_euler_zyx(euler_deg.z() * kDeg, euler_deg.y() * kDeg, euler_deg.x() * kDeg);
  if (axial_deg != 0.0) q = q * quatkin::axis_angle_compose(axial_deg * kDeg, Vec3::UnitX());
  for (int axis = 0; axis < 3; ++axis) {
    if (!flips[static_cast<std::size_t>(axis)]) continue;
    Quaternion half_turn{0.0, 0.0, 0.0, 0.0};
    (axis == 0 ? half_turn.x : axis == 1 ? half_turn.y : half_turn.z) = 1.0;
    q = q * half_turn;
  }
  return q;
}

PlacementOffset sample_placement_offset(const PlacementPerturbConfig& config, std::uint64_t seed,
                                        const std::string& sensor_id) {
  if ((config.orient_range_deg.array() < 0.0).any() || (config.axial_range_deg && *config.axial_range_deg < 0.0)) {
    throw InvalidArgument("placement ranges must be non-negative");
  }
  KeyedStream s = KeyedStream(seed).child("placement").child(sensor_id);
  PlacementOffset off;
  for (int axis = 0; axis < 3; ++axis) {
    const double r = config.orient_range_deg[axis];
    const double u = s.uniform(-r, r);
    off.euler_deg[axis] = r == 0.0 ? 0.0 : u;
  }
  const double axial = s.uniform();
  if (config.axial_range_deg && *config.axial_range_deg > 0.0) {
    const double r = *config.axial_range_deg;
    off.axial_deg = -r + 2.0 * r * axial;
  }
  for (int axis : config.flip_axes) {
    if (axis < 0 || axis > 2) throw InvalidArgument("flip axis must be 0, 1 or 2");
  }
  for (int axis = 0; axis < 3; ++axis) {
    const double u = s.uniform();
    const bool eligible = std::find(config.flip_axes.begin(), config.flip_axes.end(), axis) != config.flip_axes.end();
    off.flips[static_cast<std::size_t>(axis)] = eligible && u < config.flip_probability;
  }
  return off;
}

PlacementMap placement_perturb(const PlacementMap& p, const PlacementPerturbConfig& config, std::uint64_t seed) {
  PlacementMap out = p;
  for (auto& sensor : out.sensors) {
    const PlacementOffset off = sample_placement_offset(config, seed, sensor.sensor_id);
    if (off.euler_deg.isZero(0.0) && off.axial_deg == 0.0 && off.flips == std::array<bool, 3>{}) continue;
    sensor.rel_orient = (sensor.rel_orient * off.rotation()).normalized();
  }
  return out;
}

MotionBundle placement_swap(const MotionBundle& a, const MotionBundle& b) {
  MotionBundle out = a;
  std::vector<std::string> unmatched;
  for (auto& sensor : out.placement.sensors) {
    const quatkin::SensorPlacement* donor = b.placement.find(sensor.sensor_id);
    if (!donor) {
      unmatched.push_back(sensor.sensor_id + " (no sensor with this id)");
      continue;
    }
    if (donor->joint >= b.body.size()) {
      unmatched.push_back(sensor.sensor_id + " (donor joint index out of range)");
      continue;
    }
    const std::string& joint_name = b.body.joints[donor->joint].name;
    const auto joint = a.body.find(joint_name);
    if (!joint) {
      unmatched.push_back(sensor.sensor_id + " (joint '" + joint_name + "')");
      continue;
    }
    sensor.joint = *joint;
    sensor.rel_pos = donor->rel_pos;
    sensor.rel_orient = donor->rel_orient;
  }
  if (!unmatched.empty()) {
    std::string msg = "placement_swap: unmatched sensors:";
    for (const auto& u : unmatched) msg += " " + u;
    throw InvalidArgument(msg);
  }
  return out;
}

HardwareProfile hardware_perturb(const HardwareProfile& h, double sigma_choice, double bias_range,
                                 std::uint64_t seed) {
  if (!(sigma_choice >= 0.0) || !(bias_range >= 0.0)) {
    throw InvalidArgument("hardware_perturb: sigma and bias range must be non-negative");
  }
  HardwareProfile out = h;
  const KeyedStream root = KeyedStream(seed).child("hardware");
  for (auto& [id, hw] : out.sensors) {
    const KeyedStream sensor = root.child(id);
    KeyedStream accel = sensor.child("accel");
    KeyedStream gyro = sensor.child("gyro");
    hw.accel.sigma.setConstant(sigma_choice);
    hw.gyro.sigma.setConstant(sigma_choice);
    for (int axis = 0; axis < 3; ++axis) {
      hw.accel.bias[axis] = bias_range == 0.0 ? 0.0 : accel.uniform(-bias_range, bias_range);
      hw.gyro.bias[axis] = bias_range == 0.0 ? 0.0 : gyro.uniform(-bias_range, bias_range);
    }
  }
  return out;
}

HardwareProfile complete_hardware(const HardwareProfile& h, const PlacementMap& p) {
  HardwareProfile out = h;
  for (const auto& s : p.sensors) out.sensors.try_emplace(s.sensor_id);
  return out;
}

}  // namespace physaug::ppda
