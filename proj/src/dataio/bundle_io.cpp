#include "physaug/bundle_io.hpp"

#include <fstream>

#include "physaug/errors.hpp"

namespace physaug::dataio {

namespace {

using nlohmann::json;
using quatkin::Quaternion;
using quatkin::Vec3;

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  if (!obj.contains(key)) throw SchemaError(path + "." + key, "missing field");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SchemaError(path, "expected [x, y, z]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

Quaternion quat(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) throw SchemaError(path, "expected [w, x, y, z]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]"),
          number(v[3], path + "[3]")};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }

json error_model(const quatkin::ErrorModel& m) { return {{"sigma", to_json(m.sigma)}, {"bias", to_json(m.bias)}}; }

quatkin::ErrorModel error_model(const json& v, const std::string& path) {
  quatkin::ErrorModel m;
  m.sigma = vec3(field(v, "sigma", path), path + ".sigma");
  m.bias = vec3(field(v, "bias", path), path + ".bias");
  return m;
}

}  // namespace

json bundle_to_json(const ppda::MotionBundle& b, std::span<const std::uint32_t> labels) {
  json doc;
  doc["format"] = kBundleFormat;
  doc["version"] = kBundleVersion;
  doc["subject_id"] = b.subject_id;

  json joints = json::array();
  for (const auto& j : b.body.joints) {
    joints.push_back({{"name", j.name},
                      {"parent", j.parent ? json(b.body.joints[*j.parent].name) : json(nullptr)},
                      {"offset", to_json(j.bone_offset)}});
  }
  doc["skeleton"] = {{"joints", joints}};

  json root = json::array();
  for (const auto& p : b.dynamics.root_translation) root.push_back(to_json(p));
  json orient = json::object();
  for (std::size_t j = 0; j < b.body.size(); ++j) {
    json track = json::array();
    for (const auto& frame : b.dynamics.joint_orient) track.push_back(to_json(frame.at(j)));
    orient[b.body.joints[j].name] = std::move(track);
  }
  doc["dynamics"] = {{"sample_rate_hz", b.dynamics.sample_rate_hz}, {"root_translation", root}, {"joint_orient", orient}};

  json sensors = json::array();
  for (const auto& s : b.placement.sensors) {
    sensors.push_back({{"id", s.sensor_id},
                       {"joint", b.body.joints.at(s.joint).name},
                       {"rel_pos", to_json(s.rel_pos)},
                       {"rel_orient", to_json(s.rel_orient)}});
  }
  doc["placement"] = {{"sensors", sensors}};

  json hw = json::object();
  for (const auto& [id, e] : b.hardware.sensors) hw[id] = {{"accel", error_model(e.accel)}, {"gyro", error_model(e.gyro)}};
  doc["hardware"] = hw;
  doc["labels"] = json(std::vector<std::uint32_t>(labels.begin(), labels.end()));
  return doc;
}

LoadedBundle bundle_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "bundle document must be an object");
  if (text(field(doc, "format", "$"), "$.format") != kBundleFormat) {
    throw SchemaError("$.format", std::string("expected \"") + kBundleFormat + "\"");
  }
  const json& version = field(doc, "version", "$");
  if (!version.is_number_integer() || version.get<int>() != kBundleVersion) {
    throw SchemaError("$.version", "unsupported version");
  }

  // Check every section exists up front so the error names the first missing one.
  for (const char* section : {"skeleton", "dynamics", "placement", "hardware", "labels"}) field(doc, section, "$");

  LoadedBundle out;
  ppda::MotionBundle& b = out.bundle;
  b.subject_id = doc.contains("subject_id") ? text(doc.at("subject_id"), "$.subject_id") : "";

  const json& joints = array(field(doc.at("skeleton"), "joints", "$.skeleton"), "$.skeleton.joints");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string path = "$.skeleton.joints[" + std::to_string(i) + "]";
    quatkin::Joint j;
    j.name = text(field(joints[i], "name", path), path + ".name");
    const json& parent = field(joints[i], "parent", path);
    if (!parent.is_null()) {
      const auto idx = b.body.find(text(parent, path + ".parent"));
      if (!idx) throw SchemaError(path + ".parent", "parent must name an earlier joint");
      j.parent = *idx;
    }
    j.bone_offset = vec3(field(joints[i], "offset", path), path + ".offset");
    b.body.joints.push_back(std::move(j));
  }
  try {
    b.body.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError("$.skeleton.joints", e.what());
  }

  const json& dyn = doc.at("dynamics");
  b.dynamics.sample_rate_hz = number(field(dyn, "sample_rate_hz", "$.dynamics"), "$.dynamics.sample_rate_hz");
  if (!(b.dynamics.sample_rate_hz > 0.0)) throw SchemaError("$.dynamics.sample_rate_hz", "must be positive");
  const json& root = array(field(dyn, "root_translation", "$.dynamics"), "$.dynamics.root_translation");
  const std::size_t frames = root.size();
  for (std::size_t t = 0; t < frames; ++t) {
    b.dynamics.root_translation.push_back(vec3(root[t], "$.dynamics.root_translation[" + std::to_string(t) + "]"));
  }
  const json& orient = field(dyn, "joint_orient", "$.dynamics");
  if (!orient.is_object()) throw SchemaError("$.dynamics.joint_orient", "expected an object keyed by joint name");
  b.dynamics.joint_orient.assign(frames, std::vector<Quaternion>(b.body.size()));
  for (std::size_t j = 0; j < b.body.size(); ++j) {
    const std::string& name = b.body.joints[j].name;
    const std::string path = "$.dynamics.joint_orient." + name;
    const json& track = array(field(orient, name, "$.dynamics.joint_orient"), path);
    if (track.size() != frames) {
      throw LengthError(path + " has " + std::to_string(track.size()) + " frames, root_translation has " +
                        std::to_string(frames));
    }
    for (std::size_t t = 0; t < frames; ++t) {
      b.dynamics.joint_orient[t][j] = quat(track[t], path + "[" + std::to_string(t) + "]");
    }
  }

  const json& sensors = array(field(doc.at("placement"), "sensors", "$.placement"), "$.placement.sensors");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string path = "$.placement.sensors[" + std::to_string(i) + "]";
    quatkin::SensorPlacement s;
    s.sensor_id = text(field(sensors[i], "id", path), path + ".id");
    const auto joint = b.body.find(text(field(sensors[i], "joint", path), path + ".joint"));
    if (!joint) throw SchemaError(path + ".joint", "unknown joint");
    s.joint = *joint;
    s.rel_pos = vec3(field(sensors[i], "rel_pos", path), path + ".rel_pos");
    s.rel_orient = quat(field(sensors[i], "rel_orient", path), path + ".rel_orient");
    b.placement.sensors.push_back(std::move(s));
  }

  const json& hw = doc.at("hardware");
  if (!hw.is_object()) throw SchemaError("$.hardware", "expected an object keyed by sensor id");
  for (const auto& [id, entry] : hw.items()) {
    const std::string path = "$.hardware." + id;
    quatkin::SensorHardware h;
    h.accel = error_model(field(entry, "accel", path), path + ".accel");
    h.gyro = error_model(field(entry, "gyro", path), path + ".gyro");
    b.hardware.sensors.emplace(id, h);
  }

  const json& labels = array(doc.at("labels"), "$.labels");
  if (labels.size() != frames) {
    throw LengthError("$.labels has " + std::to_string(labels.size()) + " entries, dynamics has " +
                      std::to_string(frames) + " frames");
  }
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!labels[t].is_number_unsigned()) throw SchemaError("$.labels[" + std::to_string(t) + "]", "expected a class id");
    out.labels.push_back(labels[t].get<std::uint32_t>());
  }

  b.validate();
  return out;
}

LoadedBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bundle " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return bundle_from_json(doc);
}

void save_bundle(const ppda::MotionBundle& bundle, std::span<const std::uint32_t> labels,
                 const std::filesystem::path& path) {
  if (labels.size() != bundle.dynamics.frames()) throw LengthError("label track length differs from frame count");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write bundle " + path.string());
  out << bundle_to_json(bundle, labels).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace physaug::dataio
