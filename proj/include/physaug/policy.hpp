#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "physaug/ppda.hpp"
#include "physaug/stda.hpp"

namespace physaug::policy {

enum class Mode { Stda, Ppda };
enum class Kind { Binary, Combinatorial };

/// Augmentation categories. In STDA mode the slots hold the signal-space
/// counterparts: magnitude, time, rotation, jitter.
enum class Category : std::size_t { Amplitude = 0, Speed = 1, Placement = 2, Hardware = 3 };
inline constexpr std::size_t kCategoryCount = 4;

std::string category_name(Category c, Mode mode);
std::string mode_name(Mode mode);

// Amplitude (PPDA: joint angles, STDA: signal magnitude).
struct MagnitudeScale {
  double sigma = 0.0;
};
struct MagnitudeWarp {
  double sigma = 0.0;
  int knots = 4;
};
// Speed (PPDA: dynamics playback, STDA: signal time axis). beta ~ U[lo, hi].
struct TimeScale {
  double beta_lo = 1.0;
  double beta_hi = 1.0;
};
struct TimeWarp {
  int knots = 4;
  double max_speed_ratio = 1.5;
};
// Placement.
struct PlacementShift {
  ppda::PlacementPerturbConfig config;
};
struct Rotation {
  double range_deg = 180.0;
};
// Hardware.
struct NoiseBias {
  double sigma = 0.0;
  double bias_range = 1.0;
};
struct Jitter {
  double sigma = 0.0;
};

using Augmentation =
    std::variant<MagnitudeScale, MagnitudeWarp, TimeScale, TimeWarp, PlacementShift, Rotation, NoiseBias, Jitter>;

std::string describe(const Augmentation& a);

/// Concrete options per category; index `i` of a category is one method with
/// one parameter setting.
struct PolicySpace {
  Mode mode = Mode::Ppda;
  std::array<std::vector<Augmentation>, kCategoryCount> options;

  /// Throws InvalidArgument if an option does not belong to its category/mode.
  void validate() const;
};

/// One option index per category; empty = identity for that category.
struct SubPolicy {
  std::array<std::optional<std::size_t>, kCategoryCount> choice{};

  bool is_identity() const;
  friend bool operator==(const SubPolicy&, const SubPolicy&) = default;
};

std::string describe(const PolicySpace& space, const SubPolicy& sp);

inline constexpr double kDefaultLearningRate = 0.1;
inline constexpr double kDefaultFloor = 0.05;

struct PolicyState {
  Kind kind = Kind::Combinatorial;
  PolicySpace space;
  std::vector<SubPolicy> subpolicies;
  std::vector<double> weights;        // positive, normalized to sum 1
  std::vector<double> probabilities;  // sampling distribution, sums to 1
  double learning_rate = kDefaultLearningRate;
  double floor = kDefaultFloor;  // each probability stays >= floor / k

  std::size_t size() const { return subpolicies.size(); }
  /// Recomputes probabilities from weights: (1 - floor) w / sum(w) + floor / k.
  void refresh();
};

/// {identity, aug} with probabilities (0.5, 0.5).
PolicyState build_binary(const PolicySpace& space, const SubPolicy& aug);

/// Cartesian product of (identity + options) over the categories, in
/// row-major order with identity first; uniform probabilities.
PolicyState build_combinatorial(const PolicySpace& space);

/// Categorical draw from `state.probabilities`.
std::size_t sample(const PolicyState& state, std::uint64_t seed);
std::size_t sample_from(std::span<const double> probabilities, std::uint64_t seed);

struct Reward {
  std::size_t index = 0;
  double value = 0.0;
};

/// Exponentiated-gradient step: w_i <- w_i exp(lr * mean reward of i), then
/// renormalize and apply the probability floor. Unreported indices keep their weight.
PolicyState update_weights(const PolicyState& state, std::span<const Reward> rewards);

/// A slice of a bundle's timeline to be synthesized as one window.
struct BundleWindow {
  const ppda::MotionBundle* bundle = nullptr;
  std::size_t start = 0;
  std::size_t size = 0;
  std::uint32_t label = 0;
};

using ApplyInput = std::variant<stda::SignalWindow, BundleWindow>;

/// Seed handed to the transform of category `c` inside one application.
std::uint64_t category_seed(std::uint64_t seed, Category c);
/// Seed used for the synthesis noise inside one PPDA application.
std::uint64_t synthesis_seed(std::uint64_t seed);

/// Packs traces (frames [0, size)) into a window: per sensor accel xyz, gyro xyz.
stda::SignalWindow pack_traces(std::span<const quatkin::SensorTrace> traces, std::size_t size, std::uint32_t label);

/// Baseline synthesis of a bundle window with no augmentation.
stda::SignalWindow simulate_window(const BundleWindow& w, std::uint64_t seed);

/// Signal transforms in the order magnitude, time, rotation, jitter. The
/// result keeps the input length.
stda::SignalWindow apply_stda(const PolicySpace& space, const SubPolicy& sp, const stda::SignalWindow& x,
                              std::uint64_t seed);

/// Parameter transforms in the order amplitude, speed, placement, hardware on
/// a copy of the window's dynamics, followed by synthesis.
stda::SignalWindow apply_ppda(const PolicySpace& space, const SubPolicy& sp, const BundleWindow& w,
                              std::uint64_t seed);

/// Dispatches on the space mode; throws InvalidArgument if `input` is the wrong kind.
stda::SignalWindow apply(const PolicySpace& space, const SubPolicy& sp, const ApplyInput& input, std::uint64_t seed);

}  // namespace physaug::policy
