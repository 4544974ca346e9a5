#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pcad/affine.hpp"
#include "pcad/error.hpp"
#include "pcad/image.hpp"
#include "pcad/mesh.hpp"
#include "pcad/render.hpp"
#include "pcad/scene_model.hpp"

namespace pcad {

enum class DepthErrorMode {
  absolute_median,  // mean |a - b - c|, c = median(a - b)
  squared_mean,     // mean (a - b - c)^2, c = mean(a - b)
};

struct DepthError {
  double error = 0.0;
  double shift = 0.0;  // the optimal c
  std::size_t pixels = 0;
};

/// Shift-invariant depth error over the pixels where `mask` is set. The
/// median is the lower median for even counts.
inline DepthError depth_error(const DepthImage& a, const DepthImage& b, const BinaryImage& mask,
                              DepthErrorMode mode = DepthErrorMode::absolute_median) {
  if (!a.same_shape(b) || !a.same_shape(mask)) throw InvalidParameter("depth error: image sizes differ");
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask[i]) diff.push_back(a[i] - b[i]);
  if (diff.empty()) throw NoOverlap("depth error: the masks do not overlap");

  DepthError out;
  out.pixels = diff.size();
  const double n = static_cast<double>(diff.size());
  if (mode == DepthErrorMode::absolute_median) {
    auto mid = diff.begin() + static_cast<std::ptrdiff_t>((diff.size() - 1) / 2);
    std::nth_element(diff.begin(), mid, diff.end());
    out.shift = *mid;
    for (double d : diff) out.error += std::abs(d - out.shift);
  } else {
    for (double d : diff) out.shift += d;
    out.shift /= n;
    for (double d : diff) out.error += (d - out.shift) * (d - out.shift);
  }
  out.error /= n;
  return out;
}

inline double z_mae(const DepthImage& a, const DepthImage& b, const BinaryImage& mask) {
  return depth_error(a, b, mask).error;
}

/// Pixels covered (depth below `far`) in both buffers.
inline BinaryImage joint_mask(const DepthImage& a, const DepthImage& b, double far) {
  if (!a.same_shape(b)) throw InvalidParameter("joint mask: image sizes differ");
  BinaryImage m(a.width(), a.height(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] < far && b[i] < far;
  return m;
}

inline double z_mae(const DepthImage& a, const DepthImage& b, double far) {
  return z_mae(a, b, joint_mask(a, b, far));
}

using Correspondence = std::vector<std::pair<std::size_t, std::size_t>>;

/// Pairs every vertex of `a` with the nearest vertex of `b` after moving b
/// by `offset_b`. Ties go to the lower index.
inline Correspondence nearest_vertex_correspondence(const TriangleMesh& a, const TriangleMesh& b,
                                                    const Vec3& offset_b = Vec3::Zero()) {
  if (b.vertices.empty()) return {};
  Correspondence out;
  out.reserve(a.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.vertices.size(); ++j) {
      const double d = (a.vertices[i] - b.vertices[j] - offset_b).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.emplace_back(i, best);
  }
  return out;
}

/// Mean squared distance between paired unit normals, in [0, 4].
inline double n_mse(const TriangleMesh& a, const TriangleMesh& b, const Correspondence& pairs) {
  if (pairs.empty()) throw InvalidParameter("n_mse: empty correspondence");
  if (a.vertex_normals.size() != a.vertices.size() || b.vertex_normals.size() != b.vertices.size())
    throw InvalidParameter("n_mse: meshes need vertex normals");
  double sum = 0.0;
  for (const auto& [i, j] : pairs) {
    if (i >= a.vertices.size() || j >= b.vertices.size()) throw InvalidParameter("n_mse: pair out of range");
    sum += (a.vertex_normals[i] - b.vertex_normals[j]).squaredNorm();
  }
  return sum / static_cast<double>(pairs.size());
}

struct KeypointError {
  std::optional<double> mean_pixels;  // empty when every joint is missing
  std::size_t used = 0;
  std::size_t missing = 0;
};

/// Mean pixel distance between projected keypoints; a pair is missing when
/// either point is behind the camera.
inline KeypointError keypoint_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b, const RenderConfig& cfg) {
  if (a.size() != b.size()) throw InvalidParameter("keypoint error: keypoint counts differ");
  KeypointError out;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto pa = project_point(a[k], cfg);
    const auto pb = project_point(b[k], cfg);
    if (!pa || !pb) {
      ++out.missing;
      continue;
    }
    sum += std::hypot(pa->x - pb->x, pa->y - pb->y);
    ++out.used;
  }
  if (out.used > 0) out.mean_pixels = sum / static_cast<double>(out.used);
  return out;
}

inline KeypointError keypoint_error(const SceneTrace& trace, const SceneTrace& truth, const ModelConfig& model,
                                    const RenderConfig& cfg) {
  if (trace.program() != Program::body || truth.program() != Program::body)
    throw InvalidParameter("keypoint error needs body traces");
  return keypoint_error(body_keypoints(trace, model), body_keypoints(truth, model), cfg);
}

// ------------------------------------------------------------ reporting

struct ChainSummary {
  std::size_t chain = 0;
  std::size_t iterations = 0;
  double final_log_posterior = 0.0;
  double map_log_posterior = 0.0;
  double acceptance_rate = 0.0;
};

struct EvalReport {
  std::string name;
  double z_mae = 0.0;
  double n_mse = 0.0;
  std::optional<double> keypoint_err;
  std::size_t keypoints_missing = 0;
  std::vector<ChainSummary> chains;
};

/// Depth and normal errors of `estimate` against `truth` from a common
/// camera. Normals are paired after moving the estimate by the optimal
/// depth shift along the viewing axis.
inline EvalReport evaluate_traces(const SceneTrace& estimate, const SceneTrace& truth, const SceneModel& model,
                                  const RenderConfig& cfg, DepthErrorMode mode = DepthErrorMode::absolute_median) {
  if (estimate.program() != truth.program()) throw InvalidParameter("evaluate: traces use different programs");
  const TriangleMesh mesh_e = model.build_mesh(estimate);
  const TriangleMesh mesh_t = model.build_mesh(truth);
  const DepthImage depth_e = rasterize(mesh_e, cfg);
  const DepthImage depth_t = rasterize(mesh_t, cfg);
  const DepthError dz = depth_error(depth_t, depth_e, joint_mask(depth_t, depth_e, cfg.far), mode);

  EvalReport r;
  r.z_mae = dz.error;
  // Truth is dz.shift deeper than the estimate; push the estimate back by
  // that much along the viewing axis before pairing vertices.
  const Mat3 cam_to_world = cfg.view.topLeftCorner<3, 3>().transpose();
  const Vec3 offset = cam_to_world * Vec3(0.0, 0.0, -dz.shift);
  r.n_mse = n_mse(mesh_t, mesh_e, nearest_vertex_correspondence(mesh_t, mesh_e, offset));
  if (truth.program() == Program::body) {
    const auto k = keypoint_error(estimate, truth, model.config(), cfg);
    r.keypoint_err = k.mean_pixels;
    r.keypoints_missing = k.missing;
  }
  return r;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["z_mae"] = r.z_mae;
  j["n_mse"] = r.n_mse;
  j["keypoint_err"] = r.keypoint_err ? nlohmann::json(*r.keypoint_err) : nlohmann::json(nullptr);
  j["keypoints_missing"] = r.keypoints_missing;
  auto& chains = j["chains"] = nlohmann::json::array();
  for (const auto& c : r.chains)
    chains.push_back({{"chain", c.chain},
                      {"iterations", c.iterations},
                      {"final_log_posterior", c.final_log_posterior},
                      {"map_log_posterior", c.map_log_posterior},
                      {"acceptance_rate", c.acceptance_rate}});
  return j;
}

/// One JSON object per line.
inline void write_report(std::ostream& out, const EvalReport& r) { out << to_json(r).dump() << '\n'; }

inline void write_report_csv_header(std::ostream& out) {
  out << "name,z_mae,n_mse,keypoint_err,keypoints_missing,chains,best_map_log_posterior\n";
}

inline void write_report_csv_row(std::ostream& out, const EvalReport& r) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : r.chains) best = std::max(best, c.map_log_posterior);
  const auto old_precision = out.precision(17);
  out << r.name << ',' << r.z_mae << ',' << r.n_mse << ',';
  if (r.keypoint_err) out << *r.keypoint_err;
  out << ',' << r.keypoints_missing << ',' << r.chains.size() << ',';
  if (!r.chains.empty()) out << best;
  out << '\n';
  out.precision(old_precision);
}

}  // namespace pcad
