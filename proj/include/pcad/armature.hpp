#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcad/affine.hpp"
#include "pcad/error.hpp"
#include "pcad/mesh.hpp"

namespace pcad {

struct Joint {
  std::string name;
  int parent = -1;  // -1 for the root
  Vec3 head = Vec3::Zero();
  Vec3 tail = Vec3::UnitY();
  double radius = 0.05;  // capsule radius of the bone
  // When false the joint ignores its parent's transform (a stopping node:
  // changes above it do not reach its subtree).
  bool inherit = true;
};

// Local transform of one joint, about its rest-pose head.
struct JointPose {
  Vec3 scale = Vec3::Ones();
  Vec3 rotation = Vec3::Zero();  // radians, applied as Rz * Ry * Rx
  Vec3 location = Vec3::Zero();
};

struct ArmatureTree {
  std::vector<Joint> joints;
  std::vector<JointPose> pose;

  /// Exactly one root, parents stored before children, one pose per joint.
  void validate() const {
    if (joints.empty()) throw InvalidParameter("armature has no joints");
    if (pose.size() != joints.size()) throw InvalidParameter("armature pose count mismatch");
    int roots = 0;
    for (std::size_t i = 0; i < joints.size(); ++i) {
      const int p = joints[i].parent;
      if (p < 0) {
        ++roots;
      } else if (p >= static_cast<int>(i)) {
        throw InvalidParameter("joint '" + joints[i].name + "' stored before its parent");
      }
    }
    if (roots != 1) throw InvalidParameter("armature needs exactly one root");
  }
};

inline Mat4 joint_local_transform(const Joint& joint, const JointPose& pose) {
  return translation_matrix(joint.head + pose.location) * euler_rotation(pose.rotation) *
         scale_matrix(pose.scale) * translation_matrix(-joint.head);
}

/// World transform of every joint, in rest-pose coordinates: a vertex bound
/// to joint i maps to world[i] * v.
inline std::vector<Mat4> joint_world_transforms(const ArmatureTree& tree) {
  tree.validate();
  std::vector<Mat4> world(tree.joints.size());
  for (std::size_t i = 0; i < tree.joints.size(); ++i) {
    const Mat4 local = joint_local_transform(tree.joints[i], tree.pose[i]);
    const int p = tree.joints[i].parent;
    world[i] = (p >= 0 && tree.joints[i].inherit) ? Mat4(world[static_cast<std::size_t>(p)] * local) : local;
  }
  return world;
}

/// Posed head of each joint under the given world transforms.
inline std::vector<Vec3> posed_joint_heads(const ArmatureTree& tree, const std::vector<Mat4>& world) {
  std::vector<Vec3> out;
  out.reserve(tree.joints.size());
  for (std::size_t i = 0; i < tree.joints.size(); ++i)
    out.push_back(transform_point(world[i], tree.joints[i].head));
  return out;
}

/// Deforms `mesh` part-wise: each vertex group follows its joint's world
/// transform, so moving a joint carries its whole subtree rigidly.
inline TriangleMesh apply_armature(const TriangleMesh& mesh, const ArmatureTree& tree) {
  const auto world = joint_world_transforms(tree);
  if (mesh.vertex_groups.size() > tree.joints.size())
    throw InvalidBinding("mesh has more vertex groups than joints");

  constexpr std::uint32_t unbound = ~std::uint32_t{0};
  std::vector<std::uint32_t> owner(mesh.vertices.size(), unbound);
  for (std::uint32_t g = 0; g < mesh.vertex_groups.size(); ++g)
    for (auto v : mesh.vertex_groups[g]) {
      if (v >= mesh.vertices.size()) throw InvalidBinding("vertex group index out of range");
      owner[v] = g;
    }

  TriangleMesh out = mesh;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (owner[v] == unbound) throw InvalidBinding("vertex " + std::to_string(v) + " is in no group");
    out.vertices[v] = transform_point(world[owner[v]], mesh.vertices[v]);
  }
  if (out.faces.empty()) return out;
  return compute_normals(std::move(out));
}

/// Capsule around the segment head -> tail: a cylinder with hemispherical
/// ends, `cap_rings` latitude rings per hemisphere.
inline TriangleMesh capsule(const Vec3& head, const Vec3& tail, double radius, int segments,
                            int cap_rings = 2) {
  const Vec3 axis = tail - head;
  const double length = axis.norm();
  if (!(length > 0.0) || !(radius > 0.0)) throw InvalidParameter("capsule needs positive length and radius");

  std::vector<ProfilePoint> profile;
  profile.push_back({-radius, 0.0});
  for (int k = 1; k <= cap_rings; ++k) {
    const double phi = -std::numbers::pi / 2 + (std::numbers::pi / 2) * k / (cap_rings + 1);
    profile.push_back({radius * std::sin(phi), radius * std::cos(phi)});
  }
  profile.push_back({0.0, radius});
  profile.push_back({length, radius});
  for (int k = cap_rings; k >= 1; --k) {
    const double phi = -std::numbers::pi / 2 + (std::numbers::pi / 2) * k / (cap_rings + 1);
    profile.push_back({length - radius * std::sin(phi), radius * std::cos(phi)});
  }
  profile.push_back({length + radius, 0.0});
  TriangleMesh mesh = revolve(profile, segments);

  // local +y -> bone direction
  const Vec3 dir = axis / length;
  const Mat3 rot = Eigen::Quaterniond::FromTwoVectors(Vec3::UnitY(), dir).toRotationMatrix();
  Mat4 place = Mat4::Identity();
  place.block<3, 3>(0, 0) = rot;
  place.block<3, 1>(0, 3) = head;
  return transformed(std::move(mesh), place);
}

/// One capsule per joint, bound to that joint's vertex group.
inline TriangleMesh build_part_mesh(const std::vector<Joint>& joints, int segments, int cap_rings = 2) {
  TriangleMesh mesh;
  for (std::size_t i = 0; i < joints.size(); ++i)
    append(mesh, capsule(joints[i].head, joints[i].tail, joints[i].radius, segments, cap_rings),
           static_cast<int>(i));
  mesh.vertex_groups.resize(joints.size());
  return mesh;
}

}  // namespace pcad
