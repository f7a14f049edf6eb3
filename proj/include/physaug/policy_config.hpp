#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "physaug/policy.hpp"

namespace physaug::policy {

/// Parsed policy document.
///
/// ```json
/// {"mode": "ppda", "kind": "combinatorial", "learning_rate": 0.1, "floor": 0.05,
///  "categories": {"amplitude": [{"method": "scale", "sigma": [0.1, 0.2]}], ...},
///  "binary": {"amplitude": 0}}
/// ```
/// Each method entry expands to the Cartesian product of its parameter lists.
/// `binary` (only for kind "binary") names the option index per category.
struct PolicyConfig {
  Kind kind = Kind::Combinatorial;
  PolicySpace space;
  SubPolicy binary_choice;
  double learning_rate = kDefaultLearningRate;
  double floor = kDefaultFloor;
};

PolicyConfig parse_policy(const nlohmann::json& doc);
PolicyConfig load_policy(const std::filesystem::path& path);

/// Grids used in the published experiments for the given mode.
nlohmann::json default_policy_json(Mode mode);

PolicyState make_state(const PolicyConfig& config);

/// Short stable fingerprint of a policy document (CRC-32 of its compact dump, hex).
std::string policy_hash(const nlohmann::json& doc);

}  // namespace physaug::policy
