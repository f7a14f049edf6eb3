#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "physaug/kinematics.hpp"
#include "physaug/stda.hpp"

namespace physaug::ppda {

using quatkin::HardwareProfile;
using quatkin::MotionSequence;
using quatkin::PlacementMap;
using quatkin::Quaternion;
using quatkin::Skeleton;
using quatkin::Vec3;

/// Body, dynamics, placement and hardware parameters for one subject/session.
struct MotionBundle {
  Skeleton body;
  MotionSequence dynamics;
  PlacementMap placement;
  HardwareProfile hardware;
  std::string subject_id;

  void validate() const;
  std::vector<quatkin::SensorTrace> synthesize(std::uint64_t seed) const;
};

/// Joints whose angles are scaled; empty means every joint.
using JointMask = std::optional<std::vector<std::size_t>>;

/// theta -> alpha * theta per masked joint, clamped to [0, pi], axis kept.
/// alpha == 1 returns the input unchanged.
MotionSequence scale_amplitude(const MotionSequence& d, double alpha, const JointMask& mask = std::nullopt);
MotionSequence amplitude_scale(const MotionSequence& d, double sigma, std::uint64_t seed,
                               const JointMask& mask = std::nullopt);

/// Same rule with a per-frame factor shared by every masked joint.
MotionSequence warp_amplitude(const MotionSequence& d, const stda::WarpCurve& curve,
                              const JointMask& mask = std::nullopt);
MotionSequence amplitude_warp(const MotionSequence& d, double sigma, int knots, std::uint64_t seed,
                              const JointMask& mask = std::nullopt);

struct UniformSpeed {
  double beta = 1.0;
};
using SpeedProfile = std::variant<UniformSpeed, stda::WarpCurve>;

/// Replays the dynamics at a different speed without changing the frame
/// count: frame t reads the source at min(t * beta, T-1) or at w(t).
/// Orientations are slerped, root translation is linearly interpolated.
MotionSequence speed_resample(const MotionSequence& d, const SpeedProfile& profile);

struct PlacementPerturbConfig {
  Vec3 orient_range_deg{25.0, 25.0, 25.0};  // per-axis half-width (x, y, z)
  std::optional<double> axial_range_deg;    // extra rotation about sensor x
  std::vector<int> flip_axes;               // axes eligible for a 180 deg flip
  double flip_probability = 0.5;
};

/// One sensor's sampled placement offset.
struct PlacementOffset {
  Vec3 euler_deg = Vec3::Zero();  // roll (x), pitch (y), yaw (z)
  double axial_deg = 0.0;
  std::array<bool, 3> flips{false, false, false};

  /// offset (z-y-x) then axial x-rotation then flips, all in the sensor frame.
  Quaternion rotation() const;
};

PlacementOffset sample_placement_offset(const PlacementPerturbConfig& config, std::uint64_t seed,
                                        const std::string& sensor_id);

/// rel_orient -> rel_orient * offset for every sensor; rel_pos unchanged.
PlacementMap placement_perturb(const PlacementMap& p, const PlacementPerturbConfig& config, std::uint64_t seed);

/// `a` with its placement taken from `b`, matched by sensor id and joint name.
MotionBundle placement_swap(const MotionBundle& a, const MotionBundle& b);

/// Every listed sensor gets noise std `sigma_choice` on all axes and a fresh
/// bias per axis from U[-bias_range, bias_range].
HardwareProfile hardware_perturb(const HardwareProfile& h, double sigma_choice, double bias_range,
                                 std::uint64_t seed);

/// Adds an ideal entry for every placed sensor that has none.
HardwareProfile complete_hardware(const HardwareProfile& h, const PlacementMap& p);

}  // namespace physaug::ppda
