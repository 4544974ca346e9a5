#pragma once

#include <span>
#include <vector>

#include "pcad/affine.hpp"
#include "pcad/error.hpp"
#include "pcad/mesh.hpp"

namespace pcad {

struct LatheOptions {
  // Distance between consecutive stations along the medial axis.
  double station_spacing = 1.0;
  double r_min = 1e-9;
  // Center the axis on the origin so rotations pivot about mid-height.
  bool center = true;
};

/// Surface of revolution through one circular ring per station. The radii
/// of both sub-parts are concatenated bottom to top, the ends are closed with
/// flat caps and `affine` is applied last. Vertex group 0 holds the rings of
/// the first part (the stations below the cut), group 1 the rest; cap
/// centers follow the ring they close.
inline TriangleMesh lathe(std::span<const double> profile1, std::span<const double> profile2,
                          int segments, const AffineParams& affine,
                          const LatheOptions& opts = {}) {
  const std::size_t n = profile1.size() + profile2.size();
  if (n < 2) throw InvalidProfile("lathe needs at least two stations");
  if (segments < 3) throw InvalidParameter("lathe needs at least 3 segments");
  if (!(opts.station_spacing > 0.0)) throw InvalidParameter("station spacing must be positive");

  std::vector<double> radii(profile1.begin(), profile1.end());
  radii.insert(radii.end(), profile2.begin(), profile2.end());
  for (double r : radii)
    if (!(r >= opts.r_min) || !(r > 0.0)) throw InvalidProfile("profile radius below r_min");

  const double y0 = opts.center ? -0.5 * opts.station_spacing * static_cast<double>(n - 1) : 0.0;
  std::vector<ProfilePoint> profile;
  profile.reserve(n + 2);
  profile.push_back({y0, 0.0});
  for (std::size_t k = 0; k < n; ++k)
    profile.push_back({y0 + opts.station_spacing * static_cast<double>(k), radii[k]});
  profile.push_back({profile.back().y, 0.0});

  TriangleMesh mesh = revolve(profile, segments);

  // ring k of the sweep starts at 1 + k * segments (vertex 0 is the bottom cap)
  mesh.vertex_groups.assign(2, {});
  const auto nseg = static_cast<std::uint32_t>(segments);
  const std::size_t split = profile1.size();
  mesh.vertex_groups[split > 0 ? 0 : 1].push_back(0);
  for (std::size_t k = 0; k < n; ++k) {
    auto& g = mesh.vertex_groups[k < split ? 0 : 1];
    for (std::uint32_t j = 0; j < nseg; ++j) g.push_back(1 + static_cast<std::uint32_t>(k) * nseg + j);
  }
  mesh.vertex_groups[split < n ? 1 : 0].push_back(static_cast<std::uint32_t>(mesh.vertices.size() - 1));

  return transformed(std::move(mesh), affine.to_matrix());
}

}  // namespace pcad
