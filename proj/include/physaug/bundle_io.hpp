#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "physaug/ppda.hpp"

namespace physaug::dataio {

inline constexpr const char* kBundleFormat = "physaug.bundle";
inline constexpr int kBundleVersion = 1;

struct LoadedBundle {
  ppda::MotionBundle bundle;
  std::vector<std::uint32_t> labels;  // one class id per frame
};

/// Bundle <-> JSON document. Layout is described by docs/bundle.schema.json.
/// Decoding throws SchemaError naming the offending field, or LengthError
/// when array lengths disagree with the frame or joint counts.
nlohmann::json bundle_to_json(const ppda::MotionBundle& bundle, std::span<const std::uint32_t> labels);
LoadedBundle bundle_from_json(const nlohmann::json& doc);

LoadedBundle load_bundle(const std::filesystem::path& path);
void save_bundle(const ppda::MotionBundle& bundle, std::span<const std::uint32_t> labels,
                 const std::filesystem::path& path);

}  // namespace physaug::dataio
