#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pcad/affine.hpp"
#include "pcad/error.hpp"
#include "pcad/image.hpp"
#include "pcad/mesh.hpp"

namespace pcad {

/// Pinhole camera and buffer settings. Camera space looks down -z; depth is
/// the distance along the view axis. Image rows grow downward.
struct RenderConfig {
  int width = 128;
  int height = 128;
  double focal = 200.0;  // pixels
  Mat4 view = translation_matrix(Vec3(0.0, 0.0, -8.0));
  double near = 4.0;
  double far = 12.0;
  // Depth jump (scene units) that marks a contour between covered pixels.
  double contour_threshold = 0.02 * (12.0 - 4.0);
  // Skip triangles facing away from the camera. Exact for closed,
  // outward-oriented meshes that do not cross the near plane.
  bool cull_back_faces = true;

  double cx() const { return 0.5 * width; }
  double cy() const { return 0.5 * height; }

  void validate() const {
    if (width <= 0 || height <= 0) throw InvalidParameter("render size must be positive");
    if (!(near > 0.0) || !(near < far)) throw InvalidParameter("render needs 0 < near < far");
    if (!(focal > 0.0)) throw InvalidParameter("focal length must be positive");
    if (!(contour_threshold >= 0.0)) throw InvalidParameter("contour threshold must be >= 0");
  }

  /// Default camera at a different resolution: focal length scales with
  /// width so the framed scene region is unchanged.
  static RenderConfig with_size(int width, int height) {
    RenderConfig cfg;
    cfg.focal = 200.0 * width / 128.0;
    cfg.width = width;
    cfg.height = height;
    return cfg;
  }
};

/// Camera-space depth and sub-pixel image position of a world point.
struct Projection {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;
};

inline std::optional<Projection> project_point(const Vec3& world, const RenderConfig& cfg) {
  const Vec3 c = transform_point(cfg.view, world);
  const double d = -c.z();
  if (!(d > 0.0)) return std::nullopt;
  return Projection{cfg.cx() + cfg.focal * c.x() / d, cfg.cy() - cfg.focal * c.y() / d, d};
}

/// Inclusive pixel rectangle; empty when x0 > x1.
struct PixelBounds {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  bool empty() const { return x0 > x1 || y0 > y1; }
  void include(int x, int y) {
    if (empty()) {
      x0 = x1 = x;
      y0 = y1 = y;
      return;
    }
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
};

namespace detail {

struct CamVertex {
  double x, y, d;  // camera x, y and depth (-z)
};

inline CamVertex lerp(const CamVertex& a, const CamVertex& b, double t) {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.d + t * (b.d - a.d)};
}

// Clips a triangle against depth >= near; returns 0, 3 or 4 vertices.
inline int clip_near(const std::array<CamVertex, 3>& in, double near, std::array<CamVertex, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const CamVertex& a = in[i];
    const CamVertex& b = in[(i + 1) % 3];
    const bool ain = a.d >= near, bin = b.d >= near;
    if (ain) out[n++] = a;
    if (ain != bin) out[n++] = lerp(a, b, (near - a.d) / (b.d - a.d));
  }
  return n;
}

inline void raster_triangle(const CamVertex& a, const CamVertex& b, const CamVertex& c,
                            const RenderConfig& cfg, DepthImage& depth, PixelBounds& covered) {
  const double f = cfg.focal, cx = cfg.cx(), cy = cfg.cy();
  const double x0 = cx + f * a.x / a.d, y0 = cy - f * a.y / a.d;
  const double x1 = cx + f * b.x / b.d, y1 = cy - f * b.y / b.d;
  const double x2 = cx + f * c.x / c.d, y2 = cy - f * c.y / c.d;

  const double area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  if (area == 0.0 || !std::isfinite(area)) return;
  const double inv_area = 1.0 / area;

  const int xmin = std::max(0, static_cast<int>(std::floor(std::min({x0, x1, x2}) - 0.5)));
  const int xmax = std::min(cfg.width - 1, static_cast<int>(std::ceil(std::max({x0, x1, x2}) - 0.5)));
  const int ymin = std::max(0, static_cast<int>(std::floor(std::min({y0, y1, y2}) - 0.5)));
  const int ymax = std::min(cfg.height - 1, static_cast<int>(std::ceil(std::max({y0, y1, y2}) - 0.5)));
  if (xmin > xmax || ymin > ymax) return;

  // normalized barycentrics as affine functions w = A x + B y + C
  const double a0 = (y1 - y2) * inv_area, b0 = (x2 - x1) * inv_area;
  const double c0 = (x1 * y2 - x2 * y1) * inv_area;
  const double a1 = (y2 - y0) * inv_area, b1 = (x0 - x2) * inv_area;
  const double c1 = (x2 * y0 - x0 * y2) * inv_area;
  // 1/depth is affine in screen space
  const double iz0 = 1.0 / a.d, iz1 = 1.0 / b.d, iz2 = 1.0 / c.d;

  for (int py = ymin; py <= ymax; ++py) {
    const double sy = py + 0.5;
    const double sx0 = xmin + 0.5;
    double w0 = a0 * sx0 + b0 * sy + c0;
    double w1 = a1 * sx0 + b1 * sy + c1;
    double* row = &depth(0, py);
    int lo = cfg.width, hi = -1;
    for (int px = xmin; px <= xmax; ++px, w0 += a0, w1 += a1) {
      const double w2 = 1.0 - w0 - w1;
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      const double d = 1.0 / (w0 * iz0 + w1 * iz1 + w2 * iz2);
      if (d < row[px] && d >= cfg.near) {
        row[px] = d;
        lo = std::min(lo, px);
        hi = px;
      }
    }
    if (hi >= 0) {
      covered.include(lo, py);
      covered.include(hi, py);
    }
  }
}

// Camera-space facing test; the eye is at the origin.
inline bool faces_away(const CamVertex& a, const CamVertex& b, const CamVertex& c) {
  const Vec3 pa(a.x, a.y, -a.d), pb(b.x, b.y, -b.d), pc(c.x, c.y, -c.d);
  return (pb - pa).cross(pc - pa).dot(pa) >= 0.0;
}

}  // namespace detail

/// Z-buffered rasterization of `mesh`. Pixel centers sit at half-integer
/// coordinates; uncovered pixels hold cfg.far. Geometry in front of the near
/// plane is clipped.
inline DepthImage rasterize(const TriangleMesh& mesh, const RenderConfig& cfg, PixelBounds* bounds = nullptr) {
  cfg.validate();
  DepthImage depth(cfg.width, cfg.height, cfg.far);
  PixelBounds covered;
  if (bounds) *bounds = covered;
  if (mesh.faces.empty()) return depth;

  std::vector<detail::CamVertex> cam(mesh.vertices.size());
  const Mat3 r = cfg.view.block<3, 3>(0, 0);
  const Vec3 t = cfg.view.block<3, 1>(0, 3);
  for (std::size_t i = 0; i < cam.size(); ++i) {
    const Vec3 c = r * mesh.vertices[i] + t;
    cam[i] = {c.x(), c.y(), -c.z()};
  }

  std::array<detail::CamVertex, 4> poly{};
  for (const auto& face : mesh.faces) {
    const std::array<detail::CamVertex, 3> tri{cam[face[0]], cam[face[1]], cam[face[2]]};
    if (tri[0].d < cfg.near && tri[1].d < cfg.near && tri[2].d < cfg.near) continue;
    if (tri[0].d > cfg.far && tri[1].d > cfg.far && tri[2].d > cfg.far) continue;
    if (cfg.cull_back_faces && detail::faces_away(tri[0], tri[1], tri[2])) continue;
    if (tri[0].d >= cfg.near && tri[1].d >= cfg.near && tri[2].d >= cfg.near) {
      detail::raster_triangle(tri[0], tri[1], tri[2], cfg, depth, covered);
      continue;
    }
    const int n = detail::clip_near(tri, cfg.near, poly);
    for (int k = 1; k + 1 < n; ++k) detail::raster_triangle(poly[0], poly[k], poly[k + 1], cfg, depth, covered);
  }
  if (bounds) *bounds = covered;
  return depth;
}

namespace detail {

inline void contours_in(const DepthImage& depth, double threshold, double far, const PixelBounds& b,
                        BinaryImage& out) {
  const int w = depth.width(), h = depth.height();
  auto differs = [&](double d, double nd) { return nd >= far || std::abs(nd - d) > threshold; };
  for (int y = b.y0; y <= b.y1; ++y) {
    const double* row = &depth(0, y);
    const double* up = y > 0 ? &depth(0, y - 1) : nullptr;
    const double* down = y + 1 < h ? &depth(0, y + 1) : nullptr;
    std::uint8_t* dst = &out(0, y);
    for (int x = b.x0; x <= b.x1; ++x) {
      const double d = row[x];
      if (d >= far) continue;
      dst[x] = (x + 1 < w && differs(d, row[x + 1])) || (x > 0 && differs(d, row[x - 1])) ||
               (down && differs(d, down[x])) || (up && differs(d, up[x]));
    }
  }
}

}  // namespace detail

/// Binary contour map of a depth buffer. A covered pixel is on when one of
/// its 4-neighbors is uncovered (silhouette) or differs in depth by more
/// than `threshold`. The frame border is not a silhouette.
inline BinaryImage extract_contours(const DepthImage& depth, double threshold, double far) {
  BinaryImage out(depth.width(), depth.height(), 0);
  detail::contours_in(depth, threshold, far, {0, 0, depth.width() - 1, depth.height() - 1}, out);
  return out;
}

struct RenderedView {
  DepthImage depth;
  BinaryImage contour;
  std::size_t on_count = 0;
  PixelBounds covered;  // bounding box of covered pixels
};

inline RenderedView render_mesh(const TriangleMesh& mesh, const RenderConfig& cfg) {
  RenderedView view;
  view.depth = rasterize(mesh, cfg, &view.covered);
  view.contour = BinaryImage(cfg.width, cfg.height, 0);
  if (view.covered.empty()) return view;
  detail::contours_in(view.depth, cfg.contour_threshold, cfg.far, view.covered, view.contour);
  for (int y = view.covered.y0; y <= view.covered.y1; ++y)
    for (int x = view.covered.x0; x <= view.covered.x1; ++x) view.on_count += view.contour(x, y);
  return view;
}

}  // namespace pcad
