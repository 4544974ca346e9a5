#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pcad/render.hpp"
#include "pcad/scene_model.hpp"

namespace pcad {
namespace {

TEST(Rasterize, SphereCenterDepthMatchesRay) {
  const RenderConfig cfg;
  const TriangleMesh sphere = uv_sphere(1.0, 128, 64);
  const DepthImage depth = rasterize(sphere, cfg);
  const double d = 8.0;
  // ray through the center of pixel (64, 64)
  const double px = (64.5 - cfg.cx()) / cfg.focal, py = -(64.5 - cfg.cy()) / cfg.focal;
  const Vec3 dir = Vec3(px, py, -1.0).normalized();
  const double b = dir.dot(Vec3(0, 0, -d));
  const double t = b - std::sqrt(b * b - (d * d - 1.0));
  const double expected = t * -dir.z();
  EXPECT_NEAR(depth(64, 64), expected, 1e-3 * d);
  EXPECT_NEAR(depth(64, 64), d - 1.0, 1e-3 * d);
}

TEST(Rasterize, EmptyAndBehindCameraGiveFarPlane) {
  const RenderConfig cfg;
  const DepthImage empty = rasterize(TriangleMesh{}, cfg);
  for (double v : empty.data()) ASSERT_EQ(v, cfg.far);
  const TriangleMesh behind = transformed(uv_sphere(1.0, 16, 8), translation_matrix(Vec3(0, 0, 20)));
  const DepthImage b = rasterize(behind, cfg);
  for (double v : b.data()) ASSERT_EQ(v, cfg.far);
}

TEST(Rasterize, MovingAwayNeverDecreasesDepth) {
  const RenderConfig cfg;
  const TriangleMesh near_sphere = uv_sphere(1.0, 32, 16);
  const TriangleMesh far_sphere = transformed(near_sphere, translation_matrix(Vec3(0, 0, -0.5)));
  const DepthImage a = rasterize(near_sphere, cfg);
  const DepthImage b = rasterize(far_sphere, cfg);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < cfg.far && b[i] < cfg.far) ASSERT_GE(b[i], a[i]);
}

TEST(Contours, FullFramePlaneHasNone) {
  const RenderConfig cfg;
  DepthImage plane(cfg.width, cfg.height, 7.0);
  EXPECT_EQ(count_on(extract_contours(plane, cfg.contour_threshold, cfg.far)), 0u);
}

TEST(Contours, SphereSilhouetteIsTheProjectedCircle) {
  const RenderConfig cfg = RenderConfig::with_size(256, 256);
  const RenderedView v = render_mesh(uv_sphere(1.0, 128, 64), cfg);
  const double radius = cfg.focal * 1.0 / std::sqrt(64.0 - 1.0);
  ASSERT_GT(v.on_count, 0u);
  for (int y = 0; y < cfg.height; ++y)
    for (int x = 0; x < cfg.width; ++x)
      if (v.contour(x, y)) {
        const double r = std::hypot(x + 0.5 - cfg.cx(), y + 0.5 - cfg.cy());
        ASSERT_NEAR(r, radius, 1.0) << x << "," << y;
      }
}

TEST(Contours, InfiniteThresholdKeepsOnlySilhouette) {
  const RenderConfig cfg;
  DepthImage d(16, 16, cfg.far);
  for (int y = 2; y < 14; ++y)
    for (int x = 2; x < 14; ++x) d(x, y) = x < 8 ? 5.0 : 9.0;
  const BinaryImage all = extract_contours(d, 0.5, cfg.far);
  const BinaryImage sil = extract_contours(d, std::numeric_limits<double>::infinity(), cfg.far);
  EXPECT_TRUE(all(7, 7));
  EXPECT_FALSE(sil(7, 7));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const bool border = (x == 2 || x == 13 || y == 2 || y == 13) && x >= 2 && x < 14 && y >= 2 && y < 14;
      EXPECT_EQ(sil(x, y) != 0, border) << x << "," << y;
    }
}

TEST(RenderTrace, DeterministicAndCountsContourPixels) {
  const SceneModel model;
  const RenderConfig cfg;
  Rng rng(3);
  const SceneTrace t = model.sample_prior(Program::object, rng);
  const RenderedView a = render_view(t, model, cfg);
  const RenderedView b = render_view(t, model, cfg);
  EXPECT_EQ(a.depth, b.depth);
  EXPECT_EQ(a.contour, b.contour);
  EXPECT_EQ(a.on_count, count_on(a.contour));
}

TEST(RenderTrace, HalfScaleHalvesTheSilhouette) {
  const SceneModel model;
  const RenderConfig cfg;
  SceneTrace t = model.rest_trace(Program::object);
  for (const char* r : {"affine.rx", "affine.ry", "affine.rz", "affine.tx", "affine.ty", "affine.tz"}) t.set_value(r, 0.0);
  auto width = [&](const SceneTrace& s) {
    const RenderedView v = render_view(s, model, cfg);
    return v.covered.x1 - v.covered.x0 + 1;
  };
  for (const char* s : {"affine.sx", "affine.sy", "affine.sz"}) t.set_value(s, 1.0);
  const int full = width(t);
  for (const char* s : {"affine.sx", "affine.sy", "affine.sz"}) t.set_value(s, 0.5);
  const int half = width(t);
  EXPECT_NEAR(half, 0.5 * full, 2.0);
}

TEST(RenderTrace, RestBodyIsVisible) {
  const SceneModel model;
  const RenderedView v = render_view(model.rest_trace(Program::body), model, RenderConfig{});
  EXPECT_GT(v.on_count, 0u);
}

TEST(RenderTrace, PriorSamplesAreVisible) {
  const SceneModel model;
  const RenderConfig cfg;
  Rng rng(77);
  for (Program p : {Program::object, Program::body})
    for (int i = 0; i < 1000; ++i) {
      const RenderedView v = render_view(model.sample_prior(p, rng), model, cfg);
      ASSERT_GT(v.on_count, 0u) << to_string(p) << " sample " << i;
    }
}

TEST(RenderTrace, CulledAndUnculledAgreeOnClosedMeshes) {
  const SceneModel model;
  RenderConfig culled, full;
  full.cull_back_faces = false;
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const SceneTrace t = model.sample_prior(i % 2 ? Program::body : Program::object, rng);
    const TriangleMesh m = model.build_mesh(t);
    ASSERT_EQ(rasterize(m, culled), rasterize(m, full));
  }
}

TEST(RenderConfig, RejectsBadCameras) {
  RenderConfig c;
  c.near = 5.0;
  c.far = 4.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  EXPECT_THROW(RenderConfig::with_size(0, 10).validate(), InvalidParameter);
}

}  // namespace
}  // namespace pcad
