#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pcad/affine.hpp"
#include "pcad/error.hpp"

namespace pcad {

using Face = std::array<std::uint32_t, 3>;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> vertex_normals;
  // vertex_groups[g] lists the vertices bound to group (joint) g.
  std::vector<std::vector<std::uint32_t>> vertex_groups;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool empty() const { return faces.empty(); }
};

inline Vec3 face_cross(const TriangleMesh& m, const Face& f) {
  const Vec3& a = m.vertices[f[0]];
  return (m.vertices[f[1]] - a).cross(m.vertices[f[2]] - a);
}

inline double face_area(const TriangleMesh& m, const Face& f) { return 0.5 * face_cross(m, f).norm(); }

inline double surface_area(const TriangleMesh& m) {
  double a = 0.0;
  for (const auto& f : m.faces) a += face_area(m, f);
  return a;
}

/// Area-weighted vertex normals. Throws DegenerateGeometry when a vertex
/// accumulates no area.
inline TriangleMesh compute_normals(TriangleMesh mesh) {
  std::vector<Vec3> acc(mesh.vertices.size(), Vec3::Zero());
  for (const auto& f : mesh.faces) {
    const Vec3 n = face_cross(mesh, f);  // |n| = 2 * area
    for (auto v : f) acc[v] += n;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = acc[i].norm();
    if (!(len > 0.0) || !std::isfinite(len))
      throw DegenerateGeometry("vertex " + std::to_string(i) + " has no surrounding area");
    acc[i] /= len;
  }
  mesh.vertex_normals = std::move(acc);
  return mesh;
}

/// Throws on out-of-range indices or zero-area faces.
inline void validate(const TriangleMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    for (auto v : mesh.faces[i])
      if (v >= n) throw InvalidParameter("face " + std::to_string(i) + " index out of range");
    if (!(face_area(mesh, mesh.faces[i]) > 0.0))
      throw DegenerateGeometry("face " + std::to_string(i) + " has zero area");
  }
}

/// True when every undirected edge is shared by exactly two faces.
inline bool is_watertight(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      auto a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  }
  for (const auto& [e, count] : edges)
    if (count != 2) return false;
  return !edges.empty();
}

/// Applies `m` to positions and recomputes normals.
inline TriangleMesh transformed(TriangleMesh mesh, const Mat4& m) {
  for (auto& v : mesh.vertices) v = transform_point(m, v);
  if (mesh.faces.empty()) return mesh;
  return compute_normals(std::move(mesh));
}

/// Appends `part` to `into`, binding all of its vertices to `group` when
/// group >= 0.
inline void append(TriangleMesh& into, const TriangleMesh& part, int group = -1) {
  const auto base = static_cast<std::uint32_t>(into.vertices.size());
  into.vertices.insert(into.vertices.end(), part.vertices.begin(), part.vertices.end());
  into.vertex_normals.insert(into.vertex_normals.end(), part.vertex_normals.begin(),
                             part.vertex_normals.end());
  for (const auto& f : part.faces) into.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  if (group >= 0) {
    if (into.vertex_groups.size() <= static_cast<std::size_t>(group))
      into.vertex_groups.resize(static_cast<std::size_t>(group) + 1);
    auto& g = into.vertex_groups[static_cast<std::size_t>(group)];
    for (std::uint32_t i = 0; i < part.vertices.size(); ++i) g.push_back(base + i);
  }
}

// One ring of a surface of revolution about the local y axis. A ring with
// zero radius collapses to a single pole vertex.
struct ProfilePoint {
  double y = 0.0;
  double radius = 0.0;
};

/// Sweeps `profile` (ordered bottom to top) around the y axis. Interior
/// points must have positive radius; the end points may be poles. The result
/// is a closed, outward-oriented mesh with a welded seam when both ends are
/// poles.
inline TriangleMesh revolve(std::span<const ProfilePoint> profile, int segments) {
  if (segments < 3) throw InvalidParameter("revolve needs at least 3 segments");
  if (profile.size() < 2) throw InvalidParameter("revolve needs at least 2 profile points");
  for (std::size_t k = 1; k + 1 < profile.size(); ++k)
    if (!(profile[k].radius > 0.0)) throw InvalidProfile("interior profile radius must be positive");

  TriangleMesh mesh;
  const auto nseg = static_cast<std::uint32_t>(segments);
  // first vertex index of each ring; poles occupy one vertex
  std::vector<std::uint32_t> start(profile.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    start[k] = static_cast<std::uint32_t>(mesh.vertices.size());
    const auto& p = profile[k];
    if (p.radius > 0.0) {
      for (std::uint32_t j = 0; j < nseg; ++j) {
        const double t = 2.0 * std::numbers::pi * j / segments;
        mesh.vertices.emplace_back(p.radius * std::cos(t), p.y, p.radius * std::sin(t));
      }
    } else {
      mesh.vertices.emplace_back(0.0, p.y, 0.0);
    }
  }

  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    const bool lo_pole = !(profile[k].radius > 0.0);
    const bool hi_pole = !(profile[k + 1].radius > 0.0);
    if (lo_pole && hi_pole) throw InvalidProfile("adjacent poles in profile");
    for (std::uint32_t j = 0; j < nseg; ++j) {
      const std::uint32_t jn = (j + 1) % nseg;
      if (lo_pole) {
        mesh.faces.push_back({start[k], start[k + 1] + j, start[k + 1] + jn});
      } else if (hi_pole) {
        mesh.faces.push_back({start[k + 1], start[k] + jn, start[k] + j});
      } else {
        const std::uint32_t a = start[k] + j, b = start[k] + jn;
        const std::uint32_t c = start[k + 1] + jn, d = start[k + 1] + j;
        mesh.faces.push_back({a, c, b});
        mesh.faces.push_back({a, d, c});
      }
    }
  }
  return compute_normals(std::move(mesh));
}

inline TriangleMesh uv_sphere(double radius, int segments, int rings) {
  if (rings < 2) throw InvalidParameter("sphere needs at least 2 rings");
  std::vector<ProfilePoint> profile;
  for (int k = 0; k <= rings; ++k) {
    const double phi = -std::numbers::pi / 2 + std::numbers::pi * k / rings;
    const double r = (k == 0 || k == rings) ? 0.0 : radius * std::cos(phi);
    profile.push_back({radius * std::sin(phi), r});
  }
  return revolve(profile, segments);
}

/// Geodesic sphere: an icosahedron with each face split into four
/// `subdivisions` times, new vertices pushed onto the sphere.
inline TriangleMesh icosphere(double radius, int subdivisions) {
  if (subdivisions < 0) throw InvalidParameter("icosphere subdivisions must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto [it, fresh] = mid.try_emplace({key.first, key.second}, static_cast<std::uint32_t>(v.size()));
      if (fresh) v.push_back((v[a] + v[b]).normalized());
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const auto ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  TriangleMesh mesh;
  mesh.vertices.reserve(v.size());
  for (const auto& p : v) mesh.vertices.push_back(radius * p);
  mesh.faces = std::move(faces);
  return compute_normals(std::move(mesh));
}

// --- Wavefront subset: v / vn / f (1-based, "f a//a b//b c//c") ---

inline void write_obj(std::ostream& os, const TriangleMesh& mesh) {
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& n : mesh.vertex_normals) os << "vn " << n.x() << ' ' << n.y() << ' ' << n.z() << '\n';
  const bool with_normals = mesh.vertex_normals.size() == mesh.vertices.size();
  for (const auto& f : mesh.faces) {
    os << 'f';
    for (auto v : f) {
      os << ' ' << (v + 1);
      if (with_normals) os << "//" << (v + 1);
    }
    os << '\n';
  }
}

inline TriangleMesh read_obj(std::istream& is) {
  TriangleMesh mesh;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v" || tag == "vn") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw FormatError("bad vector on obj line " + std::to_string(lineno));
      (tag == "v" ? mesh.vertices : mesh.vertex_normals).emplace_back(x, y, z);
    } else if (tag == "f") {
      Face f{};
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        if (!(ls >> tok)) throw FormatError("face needs 3 vertices on obj line " + std::to_string(lineno));
        const long idx = std::stol(tok.substr(0, tok.find('/')));
        if (idx < 1) throw FormatError("bad face index on obj line " + std::to_string(lineno));
        f[k] = static_cast<std::uint32_t>(idx - 1);
      }
      std::string extra;
      if (ls >> extra) throw FormatError("only triangles supported, obj line " + std::to_string(lineno));
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

inline void save_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_obj(os, mesh);
}

inline TriangleMesh load_obj(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  return read_obj(is);
}

}  // namespace pcad
