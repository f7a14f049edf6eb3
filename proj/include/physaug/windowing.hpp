#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "physaug/kinematics.hpp"
#include "physaug/stda.hpp"

namespace physaug::dataio {

struct WindowSpan {
  std::size_t start = 0;
  std::size_t size = 0;
  std::uint32_t label = 0;
};

/// floor((T - size) / stride) + 1 for T >= size, else 0.
std::size_t window_count(std::size_t frames, std::size_t size, std::size_t stride);

/// Most frequent label; ties go to the smallest class id.
std::uint32_t majority_label(std::span<const std::uint32_t> labels);

/// Sliding windows over a label track.
std::vector<WindowSpan> window_labels(std::span<const std::uint32_t> labels, std::size_t size, std::size_t stride);

/// Sliding windows over synchronized traces, packed as accel/gyro per sensor.
std::vector<stda::SignalWindow> window_traces(std::span<const quatkin::SensorTrace> traces,
                                              std::span<const std::uint32_t> labels, std::size_t size,
                                              std::size_t stride);

}  // namespace physaug::dataio
