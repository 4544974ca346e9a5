#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "pcad/armature.hpp"
#include "pcad/config.hpp"
#include "pcad/lathe.hpp"
#include "pcad/mesh.hpp"
#include "pcad/random.hpp"

namespace pcad {
namespace {

double lateral_area(const TriangleMesh& m) {
  double a = 0.0;
  for (const auto& f : m.faces)
    if (std::abs(face_cross(m, f).normalized().y()) < 1e-9) a += face_area(m, f);
  return a;
}

TriangleMesh cylinder(int segments, const AffineParams& affine = AffineParams::identity()) {
  const std::vector<double> p1(4, 1.0), p2(6, 1.0);
  return lathe(p1, p2, segments, affine);
}

TEST(Lathe, ConstantProfileIsACylinder) {
  const TriangleMesh m = cylinder(32);
  ASSERT_NO_THROW(validate(m));
  EXPECT_TRUE(is_watertight(m));
  for (std::size_t i = 1; i + 1 < m.vertices.size(); ++i)
    EXPECT_NEAR(std::hypot(m.vertices[i].x(), m.vertices[i].z()), 1.0, 1e-9);
  for (const auto& n : m.vertex_normals) EXPECT_NEAR(n.norm(), 1.0, 1e-6);
}

TEST(Lathe, CylinderAreaMatchesAnalytic) {
  const TriangleMesh m = cylinder(64);
  const double lateral = lateral_area(m);
  const double caps = surface_area(m) - lateral;
  EXPECT_NEAR(lateral / (2 * std::numbers::pi * 9.0), 1.0, 0.02);
  EXPECT_NEAR(caps / (2 * std::numbers::pi), 1.0, 0.02);
}

TEST(Lathe, LateralAreaErrorShrinksWithSegments) {
  const double exact = 2 * std::numbers::pi * 9.0;
  const double e16 = exact - lateral_area(cylinder(16));
  const double e32 = exact - lateral_area(cylinder(32));
  const double e64 = exact - lateral_area(cylinder(64));
  EXPECT_GT(e16, 0.0);
  EXPECT_LE(e32 / e16, 0.6);
  EXPECT_LE(e64 / e32, 0.6);
}

TEST(Lathe, TranslationShiftsEveryVertex) {
  AffineParams shifted = AffineParams::identity();
  shifted.translation = Vec3(0.5, 0.0, 0.0);
  const TriangleMesh a = cylinder(16);
  const TriangleMesh b = cylinder(16, shifted);
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_NEAR((b.vertices[i] - a.vertices[i] - Vec3(0.5, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(Lathe, RejectsRadiusBelowMinimum) {
  const std::vector<double> p1 = {1.0, 0.01}, p2 = {1.0};
  LatheOptions opts;
  opts.r_min = 0.05;
  EXPECT_THROW(lathe(p1, p2, 8, AffineParams::identity(), opts), InvalidProfile);
}

TEST(Lathe, VertexGroupsSplitAtTheCut) {
  const TriangleMesh m = cylinder(8);
  ASSERT_EQ(m.vertex_groups.size(), 2u);
  EXPECT_EQ(m.vertex_groups[0].size() + m.vertex_groups[1].size(), m.vertices.size());
  EXPECT_EQ(m.vertex_groups[0].size(), 4u * 8u + 1u);
}

TEST(Normals, SphereNormalsPointOutward) {
  const TriangleMesh s = icosphere(1.0, 7);
  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    ASSERT_NEAR((s.vertex_normals[i] - s.vertices[i].normalized()).norm(), 0.0, 1e-3);
}

TEST(Normals, PlanarPatch) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  m = compute_normals(m);
  for (const auto& n : m.vertex_normals) EXPECT_NEAR((n - Vec3::UnitZ()).norm(), 0.0, 1e-9);
}

TEST(Normals, MatchAreaWeightedFaceAverage) {
  Rng rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TriangleMesh m;
  for (int i = 0; i < 40; ++i) m.vertices.emplace_back(u(rng), u(rng), u(rng));
  for (std::uint32_t i = 0; i + 2 < 40; ++i) m.faces.push_back({i, i + 1, i + 2});
  m.faces.push_back({38, 39, 0});
  m.faces.push_back({39, 0, 1});
  m = compute_normals(m);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    Vec3 acc = Vec3::Zero();
    for (const auto& f : m.faces) {
      if (f[0] != v && f[1] != v && f[2] != v) continue;
      const Vec3 e1 = m.vertices[f[1]] - m.vertices[f[0]];
      const Vec3 e2 = m.vertices[f[2]] - m.vertices[f[0]];
      const double area = 0.5 * e1.cross(e2).norm();
      acc += area * e1.cross(e2).normalized();
    }
    EXPECT_NEAR((m.vertex_normals[v] - acc.normalized()).norm(), 0.0, 1e-9);
  }
}

TEST(Normals, IsolatedVertexIsDegenerate) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}};
  m.faces = {{0, 1, 2}};
  EXPECT_THROW(compute_normals(m), DegenerateGeometry);
}

TEST(Mesh, ObjRoundTrip) {
  const TriangleMesh m = cylinder(12);
  std::stringstream ss;
  write_obj(ss, m);
  const TriangleMesh back = read_obj(ss);
  ASSERT_EQ(back.faces, m.faces);
  ASSERT_EQ(back.vertices.size(), m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    EXPECT_EQ(back.vertices[i], m.vertices[i]);
    EXPECT_EQ(back.vertex_normals[i], m.vertex_normals[i]);
  }
}

ArmatureTree rest_tree() {
  ArmatureTree t;
  t.joints = default_body_joints();
  t.pose.resize(t.joints.size());
  return t;
}

std::size_t joint_index(const ArmatureTree& t, const std::string& name) {
  for (std::size_t i = 0; i < t.joints.size(); ++i)
    if (t.joints[i].name == name) return i;
  throw std::runtime_error("no joint " + name);
}

Vec3 centroid(const TriangleMesh& m, std::size_t group) {
  Vec3 c = Vec3::Zero();
  for (auto v : m.vertex_groups[group]) c += m.vertices[v];
  return c / static_cast<double>(m.vertex_groups[group].size());
}

TEST(Armature, IdentityPoseIsAFixedPoint) {
  const TriangleMesh rest = build_part_mesh(default_body_joints(), 8, 1);
  const TriangleMesh posed = apply_armature(rest, rest_tree());
  for (std::size_t i = 0; i < rest.vertices.size(); ++i)
    ASSERT_NEAR((posed.vertices[i] - rest.vertices[i]).norm(), 0.0, 1e-9);
}

TEST(Armature, ShoulderRotationSwingsTheArm) {
  const TriangleMesh rest = build_part_mesh(default_body_joints(), 8, 1);
  ArmatureTree tree = rest_tree();
  const auto sh = joint_index(tree, "l_shoulder");
  const auto wr = joint_index(tree, "l_wrist");
  const auto spine = joint_index(tree, "spine");
  const double angle = std::numbers::pi / 6;
  tree.pose[sh].rotation = Vec3(0, 0, angle);
  const TriangleMesh posed = apply_armature(rest, tree);

  const Vec3 pivot = tree.joints[sh].head;
  const Vec3 before = centroid(rest, wr) - pivot;
  const Vec3 expected =
      pivot + Vec3(std::cos(angle) * before.x() - std::sin(angle) * before.y(),
                   std::sin(angle) * before.x() + std::cos(angle) * before.y(), before.z());
  const Vec3 after = centroid(posed, wr);
  EXPECT_NEAR((after - expected).norm(), 0.0, 1e-6);
  EXPECT_NEAR((after - pivot).norm(), before.norm(), 1e-6);
  for (auto v : rest.vertex_groups[spine]) ASSERT_EQ(posed.vertices[v], rest.vertices[v]);
}

TEST(Armature, RotationsCompose) {
  const TriangleMesh rest = build_part_mesh(default_body_joints(), 8, 1);
  ArmatureTree half = rest_tree(), full = rest_tree();
  const auto el = joint_index(half, "r_elbow");
  half.pose[el].rotation = Vec3(0, 0, std::numbers::pi / 12);
  full.pose[el].rotation = Vec3(0, 0, std::numbers::pi / 6);
  const TriangleMesh twice = apply_armature(apply_armature(rest, half), half);
  const TriangleMesh once = apply_armature(rest, full);
  for (std::size_t i = 0; i < rest.vertices.size(); ++i)
    ASSERT_NEAR((twice.vertices[i] - once.vertices[i]).norm(), 0.0, 1e-6);
}

TEST(Armature, PlacementComposesWithJointFrames) {
  const TriangleMesh rest = build_part_mesh(default_body_joints(), 8, 1);
  ArmatureTree tree = rest_tree();
  tree.pose[joint_index(tree, "l_knee")].rotation = Vec3(0.3, 0, 0.1);
  AffineParams g = AffineParams::identity();
  g.translation = Vec3(0.2, -0.1, 0.3);
  g.rotation_deg = Vec3(10, -20, 5);
  const TriangleMesh posed = apply_armature(rest, tree);
  const TriangleMesh a = transformed(posed, g.to_matrix());
  EXPECT_EQ(apply_armature(rest, tree).vertices, posed.vertices);
  // placing the posed mesh is the same as placing each joint's world frame
  const auto world = joint_world_transforms(tree);
  for (std::size_t j = 0; j < rest.vertex_groups.size(); ++j)
    for (auto v : rest.vertex_groups[j]) {
      const Vec3 direct = transform_point(Mat4(g.to_matrix() * world[j]), rest.vertices[v]);
      ASSERT_NEAR((a.vertices[v] - direct).norm(), 0.0, 1e-12);
    }
}

TEST(Armature, StoppingNodeBlocksPropagation) {
  const TriangleMesh rest = build_part_mesh(default_body_joints(), 8, 1);
  ArmatureTree tree = rest_tree();
  const auto sh = joint_index(tree, "l_shoulder");
  const auto el = joint_index(tree, "l_elbow");
  tree.joints[el].inherit = false;
  tree.pose[sh].rotation = Vec3(0, 0, 0.5);
  const TriangleMesh posed = apply_armature(rest, tree);
  for (auto v : rest.vertex_groups[el]) ASSERT_NEAR((posed.vertices[v] - rest.vertices[v]).norm(), 0.0, 1e-12);
}

TEST(Armature, UnboundVertexIsAnError) {
  TriangleMesh rest = build_part_mesh(default_body_joints(), 8, 1);
  rest.vertex_groups[0].pop_back();
  EXPECT_THROW(apply_armature(rest, rest_tree()), InvalidBinding);
}

TEST(Armature, TreeValidation) {
  ArmatureTree t = rest_tree();
  t.joints[3].parent = 5;
  EXPECT_THROW(t.validate(), InvalidParameter);
  t = rest_tree();
  t.joints[2].parent = -1;
  EXPECT_THROW(t.validate(), InvalidParameter);
}

TEST(Armature, BodyMeshIsWatertightPerPart) {
  const TriangleMesh m = build_part_mesh(default_body_joints(), 8, 1);
  EXPECT_TRUE(is_watertight(m));
  EXPECT_NO_THROW(validate(m));
}

TEST(Normals, IcosphereIsClosedAndOutward) {
  const TriangleMesh s = icosphere(2.0, 2);
  EXPECT_EQ(s.vertices.size(), 162u);
  EXPECT_EQ(s.faces.size(), 320u);
  EXPECT_TRUE(is_watertight(s));
  for (const auto& f : s.faces) EXPECT_GT(face_cross(s, f).dot(s.vertices[f[0]]), 0.0);
}

}  // namespace
}  // namespace pcad
