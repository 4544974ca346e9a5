#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "pcad/affine.hpp"
#include "pcad/armature.hpp"
#include "pcad/config.hpp"
#include "pcad/gp.hpp"
#include "pcad/lathe.hpp"
#include "pcad/mesh.hpp"
#include "pcad/render.hpp"
#include "pcad/trace.hpp"

namespace pcad {

inline const char* const kAffineSuffixes[9] = {"tx", "ty", "tz", "sx", "sy", "sz", "rx", "ry", "rz"};
inline constexpr const char* kPlacementGroup = "affine";

/// Nine latents `<group>.tx ... <group>.rz`, in that order.
inline void add_affine_latents(std::vector<LatentSpec>& specs, const std::string& group, const AffineRanges& r) {
  for (int k = 0; k < 3; ++k)
    specs.push_back({group + "." + kAffineSuffixes[k], Uniform{r.translation_lo[k], r.translation_hi[k]}, group});
  for (int k = 0; k < 3; ++k)
    specs.push_back({group + "." + kAffineSuffixes[3 + k], Uniform{r.scale_lo[k], r.scale_hi[k]}, group});
  for (int k = 0; k < 3; ++k)
    specs.push_back({group + "." + kAffineSuffixes[6 + k], Uniform{r.rotation_lo[k], r.rotation_hi[k]}, group});
}

inline AffineParams read_affine(const SceneTrace& trace, std::size_t first) {
  AffineParams a;
  for (int k = 0; k < 3; ++k) {
    a.translation[k] = trace.value(first + static_cast<std::size_t>(k));
    a.scale[k] = trace.value(first + 3 + static_cast<std::size_t>(k));
    a.rotation_deg[k] = trace.value(first + 6 + static_cast<std::size_t>(k));
  }
  return a;
}

// ---------------------------------------------------------------- object

inline std::string profile_latent_name(int part, int k) {
  return "f" + std::to_string(part) + "[" + std::to_string(k) + "]";
}

/// Latents of the lathed-object program: H, cut, L1, L2, the whitened GP
/// draws of both sub-parts (one per possible station) and the placement.
inline SchemaPtr make_object_schema(const ModelConfig& cfg) {
  const auto& o = cfg.object;
  std::vector<LatentSpec> specs;
  specs.push_back({"H", Uniform{o.a0, o.b0}, ""});
  specs.push_back({"cut", RescaledBeta{o.cut_alpha, o.cut_beta, 0.0, 1.0}, ""});
  specs.push_back({"L1", RescaledBeta{2.0, 5.0, o.a1, o.a1 + o.b1}, ""});
  specs.push_back({"L2", RescaledBeta{2.0, 5.0, o.a1, o.a1 + o.b1}, ""});
  for (int part = 1; part <= 2; ++part)
    for (int k = 0; k < o.max_stations(); ++k) specs.push_back({profile_latent_name(part, k), Gaussian{0.0, 1.0}, ""});
  add_affine_latents(specs, kPlacementGroup, cfg.affine);
  return std::make_shared<const TraceSchema>(Program::object, std::move(specs));
}

/// Decoded object program: station grids, GP draws, radii and placement.
struct ObjectLatents {
  double height = 0.0;  // H
  double cut = 0.0;     // C, on the station axis
  double bandwidth1 = 0.0;
  double bandwidth2 = 0.0;
  std::vector<double> stations1;  // [a0, floor(C)]
  std::vector<double> stations2;  // [floor(C) + 1, round(H)]
  std::vector<double> f1;         // zero-mean GP values
  std::vector<double> f2;
  std::vector<double> radii1;
  std::vector<double> radii2;
  AffineParams placement;
};

inline ObjectLatents decode_object(const SceneTrace& trace, const ModelConfig& cfg) {
  if (trace.program() != Program::object) throw InvalidParameter("not an object trace");
  const auto& o = cfg.object;
  const auto& schema = trace.schema();
  ObjectLatents out;
  out.height = trace.value(std::size_t{0});
  out.cut = o.a0 + trace.value(std::size_t{1}) * (out.height - o.a0);
  out.bandwidth1 = trace.value(std::size_t{2});
  out.bandwidth2 = trace.value(std::size_t{3});

  const int first = o.first_station();
  // a single station cannot be lathed; the grid always spans two
  const int top = std::max(static_cast<int>(std::lround(out.height)), first + 1);
  const int split = std::clamp(static_cast<int>(std::floor(out.cut)), first, top);
  for (int x = first; x <= split; ++x) out.stations1.push_back(x);
  for (int x = split + 1; x <= top; ++x) out.stations2.push_back(x);

  const auto nmax = static_cast<std::size_t>(o.max_stations());
  const std::size_t z1 = 4, z2 = 4 + nmax;
  const auto values = trace.values();
  const JitterSchedule js{o.jitter, o.max_jitter};
  out.f1 = gp_transform(out.stations1, out.bandwidth1, values.subspan(z1, nmax), js);
  out.f2 = gp_transform(out.stations2, out.bandwidth2, values.subspan(z2, nmax), js);
  const RadiusMap map{o.r_base, o.s, o.r_min};
  out.radii1 = to_radii(out.f1, map);
  out.radii2 = to_radii(out.f2, map);
  out.placement = read_affine(trace, schema.group_members(kPlacementGroup).front());
  return out;
}

inline TriangleMesh build_object_mesh(const SceneTrace& trace, const ModelConfig& cfg) {
  const ObjectLatents obj = decode_object(trace, cfg);
  LatheOptions opts;
  opts.station_spacing = cfg.object.station_spacing;
  opts.r_min = cfg.object.r_min;
  return lathe(obj.radii1, obj.radii2, cfg.object.segments, obj.placement, opts);
}

// ------------------------------------------------------------------ body

inline const char* const kJointSuffixes[9] = {"sx", "sy", "sz", "rx", "ry", "rz", "tx", "ty", "tz"};

/// Global placement followed by nine latents per joint:
/// `<joint>.sx..sz` scale, `.rx..rz` rotation, `.tx..tz` location.
inline SchemaPtr make_body_schema(const ModelConfig& cfg) {
  const auto& b = cfg.body;
  std::vector<LatentSpec> specs;
  add_affine_latents(specs, kPlacementGroup, cfg.affine);
  for (const auto& joint : b.joints) {
    for (int k = 0; k < 3; ++k)
      specs.push_back({joint.name + "." + kJointSuffixes[k],
                       Uniform{b.mu0 - b.scale_halfwidth, b.mu0 + b.scale_halfwidth}, joint.name});
    for (int k = 0; k < 3; ++k)
      specs.push_back({joint.name + "." + kJointSuffixes[3 + k], Gaussian{b.mu_r, b.rotation_sd}, joint.name});
    for (int k = 0; k < 3; ++k)
      specs.push_back(
          {joint.name + "." + kJointSuffixes[6 + k], Uniform{b.location_lo[k], b.location_hi[k]}, joint.name});
  }
  return std::make_shared<const TraceSchema>(Program::body, std::move(specs));
}

/// Armature posed by the trace's per-joint latents.
inline ArmatureTree decode_armature(const SceneTrace& trace, const ModelConfig& cfg) {
  if (trace.program() != Program::body) throw InvalidParameter("not a body trace");
  ArmatureTree tree;
  tree.joints = cfg.body.joints;
  tree.pose.resize(tree.joints.size());
  for (std::size_t j = 0; j < tree.joints.size(); ++j) {
    const std::size_t base = 9 + 9 * j;
    auto& p = tree.pose[j];
    for (int k = 0; k < 3; ++k) {
      p.scale[k] = trace.value(base + static_cast<std::size_t>(k));
      p.rotation[k] = trace.value(base + 3 + static_cast<std::size_t>(k));
      p.location[k] = trace.value(base + 6 + static_cast<std::size_t>(k));
    }
  }
  return tree;
}

inline AffineParams decode_body_placement(const SceneTrace& trace) { return read_affine(trace, 0); }

/// Posed joint heads in world space (placement applied).
inline std::vector<Vec3> body_keypoints(const SceneTrace& trace, const ModelConfig& cfg) {
  const ArmatureTree tree = decode_armature(trace, cfg);
  auto heads = posed_joint_heads(tree, joint_world_transforms(tree));
  const Mat4 g = decode_body_placement(trace).to_matrix();
  for (auto& h : heads) h = transform_point(g, h);
  return heads;
}

// ----------------------------------------------------------------- model

/// Both programs over one configuration, with schemas and the rest-pose
/// body mesh built once.
class SceneModel {
 public:
  explicit SceneModel(ModelConfig cfg = {})
      : cfg_(validated(std::move(cfg))),
        object_schema_(make_object_schema(cfg_)),
        body_schema_(make_body_schema(cfg_)),
        rest_body_(build_part_mesh(cfg_.body.joints, cfg_.body.segments, cfg_.body.cap_rings)) {}

  const ModelConfig& config() const { return cfg_; }

  const SchemaPtr& schema(Program p) const {
    if (p == Program::object) return object_schema_;
    if (p == Program::body) return body_schema_;
    throw InvalidParameter("scene model has no custom program");
  }

  const TriangleMesh& rest_body_mesh() const { return rest_body_; }

  template <typename R>
  SceneTrace sample_prior(Program p, R& rng) const {
    return sample_trace(schema(p), rng);
  }

  /// Trace with every latent at its prior mean.
  SceneTrace rest_trace(Program p) const { return mean_trace(schema(p)); }

  TriangleMesh build_mesh(const SceneTrace& trace) const {
    switch (trace.program()) {
      case Program::object:
        return build_object_mesh(trace, cfg_);
      case Program::body: {
        const TriangleMesh posed = apply_armature(rest_body_, decode_armature(trace, cfg_));
        return transformed(posed, decode_body_placement(trace).to_matrix());
      }
      default:
        throw InvalidParameter("cannot build a mesh for a custom trace");
    }
  }

 private:
  static ModelConfig validated(ModelConfig cfg) {
    cfg.validate();
    return cfg;
  }

  ModelConfig cfg_;
  SchemaPtr object_schema_;
  SchemaPtr body_schema_;
  TriangleMesh rest_body_;
};

template <typename R>
SceneTrace sample_object_prior(R& rng, const ModelConfig& cfg) {
  cfg.validate();
  return sample_trace(make_object_schema(cfg), rng);
}

template <typename R>
SceneTrace sample_body_prior(R& rng, const ModelConfig& cfg) {
  cfg.validate();
  return sample_trace(make_body_schema(cfg), rng);
}

/// Mesh construction, rasterization and contour extraction for one trace.
/// Stores the view in the trace's render cache.
inline std::shared_ptr<const RenderedView> render_trace(SceneTrace& trace, const SceneModel& model,
                                                        const RenderConfig& cfg) {
  auto view = std::make_shared<const RenderedView>(render_mesh(model.build_mesh(trace), cfg));
  trace.set_cache(view, trace.cached_log_likelihood());
  return view;
}

inline RenderedView render_view(const SceneTrace& trace, const SceneModel& model, const RenderConfig& cfg) {
  return render_mesh(model.build_mesh(trace), cfg);
}

}  // namespace pcad
