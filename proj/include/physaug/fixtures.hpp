#pragma once

#include <cstdint>

#include "physaug/bundle_io.hpp"

namespace physaug::fixtures {

/// Single root joint spinning about world z at `omega` rad/s, one sensor
/// "spin" at (radius, 0, 0) in the root frame. Labels are all 0.
dataio::LoadedBundle spin_bundle(double omega, double radius, double rate_hz, std::size_t frames);

/// Random chain skeleton frozen in a random pose; ideal hardware.
dataio::LoadedBundle random_static_bundle(std::uint64_t seed, std::size_t frames);

/// Forearm swinging about its x axis, angle(t) = amplitude * sin(2 pi t / period).
/// Sensor "RLA" sits 10 cm below the elbow with its z axis along the forearm's
/// y axis, so its z accelerometer peaks a quarter period into each cycle.
dataio::LoadedBundle swing_bundle(double amplitude_rad, std::size_t period, double rate_hz, std::size_t frames);

/// Upper-body chain with two wrist sensors and labelled activity segments.
dataio::LoadedBundle demo_bundle(std::uint64_t seed, std::size_t frames = 1500, double rate_hz = 50.0);

}  // namespace physaug::fixtures
