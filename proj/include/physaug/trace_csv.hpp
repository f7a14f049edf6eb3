#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "physaug/kinematics.hpp"

namespace physaug::dataio {

/// One block per sensor:
///
///     # sensor_id=RLA
///     # sample_rate_hz=100
///     t,ax,ay,az,gx,gy,gz
///     0,0.1,...
///
/// Values are written with 17 significant digits.
std::string traces_to_csv(std::span<const quatkin::SensorTrace> traces);
std::vector<quatkin::SensorTrace> traces_from_csv(const std::string& text);

void write_trace_csv(std::span<const quatkin::SensorTrace> traces, const std::filesystem::path& path);
/// Throws ParseError citing the 1-based line of the first malformed row.
std::vector<quatkin::SensorTrace> read_trace_csv(const std::filesystem::path& path);

/// One unsigned class id per line.
std::vector<std::uint32_t> read_labels(const std::filesystem::path& path);

}  // namespace physaug::dataio
