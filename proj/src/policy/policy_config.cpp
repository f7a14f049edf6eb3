#include "physaug/policy_config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <zlib.h>

#include "physaug/errors.hpp"

namespace physaug::policy {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(path + "." + key, "missing field");
  return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<int>();
}

// A scalar or a list of scalars.
std::vector<double> number_list(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a number or non-empty list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> int_list(const json& v, const std::string& path) {
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_array() || v.empty()) throw SchemaError(path, "expected an integer or non-empty list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

ppda::PlacementPerturbConfig placement_config(const json& m, const std::string& path) {
  ppda::PlacementPerturbConfig cfg;
  if (m.contains("orient_range_deg")) {
    const auto r = number_list(m.at("orient_range_deg"), path + ".orient_range_deg");
    if (r.size() == 1) {
      cfg.orient_range_deg.setConstant(r[0]);
    } else if (r.size() == 3) {
      cfg.orient_range_deg = {r[0], r[1], r[2]};
    } else {
      throw SchemaError(path + ".orient_range_deg", "expected 1 or 3 values");
    }
  }
  if (m.contains("axial_range_deg")) cfg.axial_range_deg = as_number(m.at("axial_range_deg"), path + ".axial_range_deg");
  if (m.contains("flip_axes")) cfg.flip_axes = int_list(m.at("flip_axes"), path + ".flip_axes");
  if (m.contains("flip_probability")) {
    cfg.flip_probability = as_number(m.at("flip_probability"), path + ".flip_probability");
  }
  return cfg;
}

void expand_method(const json& m, Category c, Mode mode, const std::string& path, std::vector<Augmentation>& out) {
  const json& method_v = require(m, "method", path);
  if (!method_v.is_string()) throw SchemaError(path + ".method", "expected a string");
  const std::string method = method_v.get<std::string>();

  switch (c) {
    case Category::Amplitude:
      if (method == "scale") {
        for (double s : number_list(require(m, "sigma", path), path + ".sigma")) out.push_back(MagnitudeScale{s});
        return;
      }
      if (method == "warp") {
        const auto sig = number_list(require(m, "sigma", path), path + ".sigma");
        const auto knots = int_list(require(m, "knots", path), path + ".knots");
        for (double s : sig) {
          for (int k : knots) out.push_back(MagnitudeWarp{s, k});
        }
        return;
      }
      break;
    case Category::Speed:
      if (method == "scale") {
        const json& ranges = require(m, "beta_range", path);
        if (!ranges.is_array() || ranges.empty()) throw SchemaError(path + ".beta_range", "expected a list of [lo, hi]");
        for (std::size_t i = 0; i < ranges.size(); ++i) {
          const auto r = number_list(ranges[i], path + ".beta_range[" + std::to_string(i) + "]");
          if (r.size() != 2 || !(r[0] > 0.0) || r[1] < r[0]) {
            throw SchemaError(path + ".beta_range[" + std::to_string(i) + "]", "expected [lo, hi] with 0 < lo <= hi");
          }
          out.push_back(TimeScale{r[0], r[1]});
        }
        return;
      }
      if (method == "warp") {
        const auto knots = int_list(require(m, "knots", path), path + ".knots");
        const auto ratios = number_list(require(m, "max_speed_ratio", path), path + ".max_speed_ratio");
        for (int k : knots) {
          for (double r : ratios) out.push_back(TimeWarp{k, r});
        }
        return;
      }
      break;
    case Category::Placement:
      if (mode == Mode::Ppda && method == "perturb") {
        out.push_back(PlacementShift{placement_config(m, path)});
        return;
      }
      if (mode == Mode::Stda && method == "rotate") {
        out.push_back(Rotation{m.contains("range_deg") ? as_number(m.at("range_deg"), path + ".range_deg") : 180.0});
        return;
      }
      break;
    case Category::Hardware:
      if (mode == Mode::Ppda && method == "noise_bias") {
        const double bias = m.contains("bias_range") ? as_number(m.at("bias_range"), path + ".bias_range") : 1.0;
        for (double s : number_list(require(m, "sigma", path), path + ".sigma")) out.push_back(NoiseBias{s, bias});
        return;
      }
      if (mode == Mode::Stda && method == "jitter") {
        for (double s : number_list(require(m, "sigma", path), path + ".sigma")) out.push_back(Jitter{s});
        return;
      }
      break;
  }
  throw SchemaError(path + ".method", "unknown method '" + method + "' for category " + category_name(c, mode));
}

}  // namespace

PolicyConfig parse_policy(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "policy document must be an object");
  PolicyConfig cfg;

  const json& mode_v = require(doc, "mode", "$");
  const std::string mode = mode_v.is_string() ? mode_v.get<std::string>() : "";
  if (mode == "ppda") {
    cfg.space.mode = Mode::Ppda;
  } else if (mode == "stda") {
    cfg.space.mode = Mode::Stda;
  } else {
    throw SchemaError("$.mode", "expected \"ppda\" or \"stda\"");
  }

  const std::string kind = doc.value("kind", std::string("combinatorial"));
  if (kind == "combinatorial") {
    cfg.kind = Kind::Combinatorial;
  } else if (kind == "binary") {
    cfg.kind = Kind::Binary;
  } else {
    throw SchemaError("$.kind", "expected \"combinatorial\" or \"binary\"");
  }
  if (doc.contains("learning_rate")) cfg.learning_rate = as_number(doc.at("learning_rate"), "$.learning_rate");
  if (doc.contains("floor")) cfg.floor = as_number(doc.at("floor"), "$.floor");
  if (!(cfg.learning_rate > 0.0)) throw SchemaError("$.learning_rate", "must be positive");
  if (!(cfg.floor >= 0.0 && cfg.floor < 1.0)) throw SchemaError("$.floor", "must lie in [0, 1)");

  const json& cats = require(doc, "categories", "$");
  if (!cats.is_object()) throw SchemaError("$.categories", "expected an object");
  for (const auto& [key, methods] : cats.items()) {
    std::optional<Category> cat;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      if (category_name(static_cast<Category>(c), cfg.space.mode) == key) cat = static_cast<Category>(c);
    }
    const std::string path = "$.categories." + key;
    if (!cat) throw SchemaError(path, "unknown category for " + mode_name(cfg.space.mode) + " mode");
    if (!methods.is_array()) throw SchemaError(path, "expected a list of methods");
    auto& opts = cfg.space.options[static_cast<std::size_t>(*cat)];
    for (std::size_t i = 0; i < methods.size(); ++i) {
      expand_method(methods[i], *cat, cfg.space.mode, path + "[" + std::to_string(i) + "]", opts);
    }
  }

  if (cfg.kind == Kind::Binary) {
    const json& bin = require(doc, "binary", "$");
    if (!bin.is_object()) throw SchemaError("$.binary", "expected an object of category -> option index");
    for (const auto& [key, idx] : bin.items()) {
      std::optional<std::size_t> cat;
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (category_name(static_cast<Category>(c), cfg.space.mode) == key) cat = c;
      }
      if (!cat) throw SchemaError("$.binary." + key, "unknown category");
      const int i = as_int(idx, "$.binary." + key);
      if (i < 0 || static_cast<std::size_t>(i) >= cfg.space.options[*cat].size()) {
        throw SchemaError("$.binary." + key, "option index out of range");
      }
      cfg.binary_choice.choice[*cat] = static_cast<std::size_t>(i);
    }
  }
  cfg.space.validate();
  return cfg;
}

PolicyConfig load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_policy(doc);
}

json default_policy_json(Mode mode) {
  json amplitude = json::array({{{"method", "scale"}, {"sigma", {0.1, 0.2, 0.4, 0.6}}},
                                {{"method", "warp"}, {"sigma", {0.2, 0.4}}, {"knots", {2, 4}}}});
  json speed = json::array({{{"method", "scale"}, {"beta_range", {{0.7, 0.9}, {1.1, 1.3}, {0.75, 1.5}, {0.5, 2.0}}}},
                            {{"method", "warp"}, {"knots", {2, 4}}, {"max_speed_ratio", {1.5, 2.0}}}});
  json doc;
  doc["mode"] = mode_name(mode);
  doc["kind"] = "combinatorial";
  doc["learning_rate"] = kDefaultLearningRate;
  doc["floor"] = kDefaultFloor;
  if (mode == Mode::Ppda) {
    doc["categories"] = {
        {"amplitude", amplitude},
        {"speed", speed},
        {"placement", json::array({{{"method", "perturb"}, {"orient_range_deg", {25.0, 25.0, 25.0}}}})},
        {"hardware", json::array({{{"method", "noise_bias"}, {"sigma", {0.05, 0.1, 0.15, 0.2}}, {"bias_range", 1.0}}})},
    };
  } else {
    doc["categories"] = {
        {"magnitude", amplitude},
        {"time", speed},
        {"rotation", json::array({{{"method", "rotate"}, {"range_deg", 180.0}}})},
        {"jitter", json::array({{{"method", "jitter"}, {"sigma", {0.05, 0.1, 0.15, 0.2}}}})},
    };
  }
  return doc;
}

PolicyState make_state(const PolicyConfig& config) {
  PolicyState st = config.kind == Kind::Binary ? build_binary(config.space, config.binary_choice)
                                               : build_combinatorial(config.space);
  st.learning_rate = config.learning_rate;
  st.floor = config.floor;
  st.refresh();
  return st;
}

std::string policy_hash(const json& doc) {
  const std::string text = doc.dump();
  const uLong crc = crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(text.data()),
                          static_cast<uInt>(text.size()));
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << crc;
  return os.str();
}

}  // namespace physaug::policy
