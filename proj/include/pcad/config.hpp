#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcad/affine.hpp"
#include "pcad/armature.hpp"
#include "pcad/error.hpp"

namespace pcad {

// Placement prior, per axis. Rotation bounds in degrees.
struct AffineRanges {
  Vec3 translation_lo = Vec3::Constant(-1.0);
  Vec3 translation_hi = Vec3::Constant(1.0);
  Vec3 scale_lo = Vec3::Constant(0.5);
  Vec3 scale_hi = Vec3::Constant(1.5);
  Vec3 rotation_lo = Vec3::Constant(-30.0);
  Vec3 rotation_hi = Vec3::Constant(30.0);
};

// Lathed object program. Heights and cuts are measured in stations; one
// station is `station_spacing` scene units.
struct ObjectConfig {
  double a0 = 4.0;   // first station, and lower bound of H
  double b0 = 16.0;  // upper bound of H
  double a1 = 1.0;   // GP bandwidth prior: a1 + b1 * Beta(2, 5)
  double b1 = 6.0;
  double cut_alpha = 2.0;  // cut fraction ~ Beta(cut_alpha, cut_beta)
  double cut_beta = 2.0;
  double r_base = 0.35;
  double s = 0.1;
  double r_min = 0.05;
  double jitter = 1e-8;
  double max_jitter = 1e-4;
  double station_spacing = 0.12;
  int segments = 24;

  int first_station() const { return static_cast<int>(std::lround(a0)); }
  int max_stations() const { return static_cast<int>(std::lround(b0)) - first_station() + 1; }
};

/// Default compositional body: 13 bones (pelvis root, spine, head, arms in
/// three segments, legs in two), y up, about 1.8 units tall.
inline std::vector<Joint> default_body_joints() {
  auto j = [](std::string name, int parent, Vec3 head, Vec3 tail, double r) {
    return Joint{std::move(name), parent, head, tail, r, true};
  };
  return {
      j("pelvis", -1, {0.0, -0.05, 0.0}, {0.0, 0.15, 0.0}, 0.13),
      j("spine", 0, {0.0, 0.15, 0.0}, {0.0, 0.55, 0.0}, 0.14),
      j("head", 1, {0.0, 0.62, 0.0}, {0.0, 0.8, 0.0}, 0.1),
      j("l_shoulder", 1, {0.2, 0.52, 0.0}, {0.36, 0.26, 0.0}, 0.05),
      j("l_elbow", 3, {0.36, 0.26, 0.0}, {0.46, 0.0, 0.0}, 0.045),
      j("l_wrist", 4, {0.46, 0.0, 0.0}, {0.5, -0.1, 0.0}, 0.04),
      j("r_shoulder", 1, {-0.2, 0.52, 0.0}, {-0.36, 0.26, 0.0}, 0.05),
      j("r_elbow", 6, {-0.36, 0.26, 0.0}, {-0.46, 0.0, 0.0}, 0.045),
      j("r_wrist", 7, {-0.46, 0.0, 0.0}, {-0.5, -0.1, 0.0}, 0.04),
      j("l_hip", 0, {0.09, -0.08, 0.0}, {0.12, -0.5, 0.0}, 0.07),
      j("l_knee", 9, {0.12, -0.5, 0.0}, {0.13, -0.92, 0.0}, 0.055),
      j("r_hip", 0, {-0.09, -0.08, 0.0}, {-0.12, -0.5, 0.0}, 0.07),
      j("r_knee", 11, {-0.12, -0.5, 0.0}, {-0.13, -0.92, 0.0}, 0.055),
  };
}

// Articulated body program. Per joint: scale ~ U(mu0 +- scale_halfwidth),
// rotation ~ N(mu_r, rotation_sd) radians, location ~ U(location_lo, hi).
struct BodyConfig {
  double mu0 = 1.0;
  double scale_halfwidth = 0.1;
  double mu_r = 0.0;
  double rotation_sd = 0.1;
  Vec3 location_lo = Vec3::Constant(-0.03);
  Vec3 location_hi = Vec3::Constant(0.03);
  std::vector<Joint> joints = default_body_joints();
  int segments = 8;
  int cap_rings = 1;
};

struct ModelConfig {
  AffineRanges affine;
  ObjectConfig object;
  BodyConfig body;

  void validate() const {
    const auto& o = object;
    if (!(o.a0 >= 0.0) || !(o.b0 >= o.a0 + 1.0)) throw InvalidParameter("object config needs 0 <= a0 <= b0 - 1");
    if (!(o.a1 > 0.0) || !(o.b1 > 0.0)) throw InvalidParameter("object config needs a1, b1 > 0");
    if (!(o.r_min > 0.0) || !(o.s >= 0.0)) throw InvalidParameter("object config needs r_min > 0, s >= 0");
    if (!(o.jitter > 0.0) || !(o.max_jitter >= o.jitter)) throw InvalidParameter("bad GP jitter schedule");
    if (o.segments < 3 || !(o.station_spacing > 0.0)) throw InvalidParameter("bad lathe resolution");
    const auto& b = body;
    if (!(b.scale_halfwidth > 0.0) || !(b.rotation_sd > 0.0)) throw InvalidParameter("bad body prior widths");
    if (!(b.location_lo.array() < b.location_hi.array()).all()) throw InvalidParameter("bad body location bounds");
    ArmatureTree probe{b.joints, std::vector<JointPose>(b.joints.size())};
    probe.validate();
    for (int k = 0; k < 3; ++k) {
      if (!(affine.translation_lo[k] < affine.translation_hi[k]) || !(affine.scale_lo[k] < affine.scale_hi[k]) ||
          !(affine.rotation_lo[k] < affine.rotation_hi[k]) || !(affine.scale_lo[k] > 0.0))
        throw InvalidParameter("bad affine ranges");
    }
  }
};

// --- JSON (human-readable key/value) ---

namespace detail {
inline nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }
inline Vec3 json_vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
inline void read_vec_if(const nlohmann::json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = json_vec(j.at(key));
}
}  // namespace detail

inline nlohmann::json to_json(const ModelConfig& c) {
  using detail::vec_json;
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& jt : c.body.joints)
    joints.push_back({{"name", jt.name},
                      {"parent", jt.parent},
                      {"head", vec_json(jt.head)},
                      {"tail", vec_json(jt.tail)},
                      {"radius", jt.radius},
                      {"inherit", jt.inherit}});
  return {
      {"affine",
       {{"translation_lo", vec_json(c.affine.translation_lo)},
        {"translation_hi", vec_json(c.affine.translation_hi)},
        {"scale_lo", vec_json(c.affine.scale_lo)},
        {"scale_hi", vec_json(c.affine.scale_hi)},
        {"rotation_lo_deg", vec_json(c.affine.rotation_lo)},
        {"rotation_hi_deg", vec_json(c.affine.rotation_hi)}}},
      {"object",
       {{"a0", c.object.a0},
        {"b0", c.object.b0},
        {"a1", c.object.a1},
        {"b1", c.object.b1},
        {"cut_alpha", c.object.cut_alpha},
        {"cut_beta", c.object.cut_beta},
        {"r_base", c.object.r_base},
        {"s", c.object.s},
        {"r_min", c.object.r_min},
        {"jitter", c.object.jitter},
        {"max_jitter", c.object.max_jitter},
        {"station_spacing", c.object.station_spacing},
        {"segments", c.object.segments}}},
      {"body",
       {{"mu0", c.body.mu0},
        {"scale_halfwidth", c.body.scale_halfwidth},
        {"mu_r", c.body.mu_r},
        {"rotation_sd", c.body.rotation_sd},
        {"location_lo", vec_json(c.body.location_lo)},
        {"location_hi", vec_json(c.body.location_hi)},
        {"segments", c.body.segments},
        {"cap_rings", c.body.cap_rings},
        {"joints", joints}}},
  };
}

/// Missing keys keep their defaults.
inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  using detail::read_if;
  using detail::read_vec_if;
  ModelConfig c;
  if (j.contains("affine")) {
    const auto& a = j.at("affine");
    read_vec_if(a, "translation_lo", c.affine.translation_lo);
    read_vec_if(a, "translation_hi", c.affine.translation_hi);
    read_vec_if(a, "scale_lo", c.affine.scale_lo);
    read_vec_if(a, "scale_hi", c.affine.scale_hi);
    read_vec_if(a, "rotation_lo_deg", c.affine.rotation_lo);
    read_vec_if(a, "rotation_hi_deg", c.affine.rotation_hi);
  }
  if (j.contains("object")) {
    const auto& o = j.at("object");
    read_if(o, "a0", c.object.a0);
    read_if(o, "b0", c.object.b0);
    read_if(o, "a1", c.object.a1);
    read_if(o, "b1", c.object.b1);
    read_if(o, "cut_alpha", c.object.cut_alpha);
    read_if(o, "cut_beta", c.object.cut_beta);
    read_if(o, "r_base", c.object.r_base);
    read_if(o, "s", c.object.s);
    read_if(o, "r_min", c.object.r_min);
    read_if(o, "jitter", c.object.jitter);
    read_if(o, "max_jitter", c.object.max_jitter);
    read_if(o, "station_spacing", c.object.station_spacing);
    read_if(o, "segments", c.object.segments);
  }
  if (j.contains("body")) {
    const auto& b = j.at("body");
    read_if(b, "mu0", c.body.mu0);
    read_if(b, "scale_halfwidth", c.body.scale_halfwidth);
    read_if(b, "mu_r", c.body.mu_r);
    read_if(b, "rotation_sd", c.body.rotation_sd);
    read_vec_if(b, "location_lo", c.body.location_lo);
    read_vec_if(b, "location_hi", c.body.location_hi);
    read_if(b, "segments", c.body.segments);
    read_if(b, "cap_rings", c.body.cap_rings);
    if (b.contains("joints")) {
      c.body.joints.clear();
      for (const auto& jt : b.at("joints")) {
        Joint joint;
        joint.name = jt.at("name").get<std::string>();
        joint.parent = jt.at("parent").get<int>();
        joint.head = detail::json_vec(jt.at("head"));
        joint.tail = detail::json_vec(jt.at("tail"));
        read_if(jt, "radius", joint.radius);
        read_if(jt, "inherit", joint.inherit);
        c.body.joints.push_back(std::move(joint));
      }
    }
  }
  c.validate();
  return c;
}

inline ModelConfig load_model_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  try {
    return model_config_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void save_model_config(const std::string& path, const ModelConfig& c) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << to_json(c).dump(2) << '\n';
}

}  // namespace pcad
