#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pcad/error.hpp"
#include "pcad/image.hpp"

namespace pcad {

namespace detail {

// Lower envelope of parabolas (q - p)^2 + f[p] over the finite entries of f.
// Entries of f are read with stride `step` starting at `f0`.
class SquaredDistance1D {
 public:
  explicit SquaredDistance1D(int n) : v_(static_cast<std::size_t>(n)), z_(static_cast<std::size_t>(n) + 1) {}

  void run(const double* f0, double* d0, int n, std::ptrdiff_t step) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto f = [&](int i) { return f0[i * step]; };
    int k = -1;
    for (int q = 0; q < n; ++q) {
      const double fq = f(q);
      if (fq == inf) continue;
      if (k < 0) {
        k = 0;
        v_[0] = q;
        z_[0] = -inf;
        z_[1] = inf;
        continue;
      }
      double s = 0.0;
      for (;;) {
        const int p = v_[static_cast<std::size_t>(k)];
        s = ((fq + double(q) * q) - (f(p) + double(p) * p)) / (2.0 * q - 2.0 * p);
        if (s <= z_[static_cast<std::size_t>(k)]) {
          --k;  // z_[0] is -inf, so k stays >= 0
        } else {
          break;
        }
      }
      ++k;
      v_[static_cast<std::size_t>(k)] = q;
      z_[static_cast<std::size_t>(k)] = s;
      z_[static_cast<std::size_t>(k) + 1] = inf;
    }
    if (k < 0) {
      for (int q = 0; q < n; ++q) d0[q * step] = inf;
      return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      while (z_[static_cast<std::size_t>(k) + 1] < q) ++k;
      const int p = v_[static_cast<std::size_t>(k)];
      d0[q * step] = double(q - p) * (q - p) + f(p);
    }
  }

 private:
  std::vector<int> v_;
  std::vector<double> z_;
};

}  // namespace detail

/// Exact Euclidean distance (pixels) from every pixel to the nearest on
/// pixel, by two separable lower-envelope passes. Throws EmptyObservation
/// for an all-off map.
inline DepthImage distance_transform(const BinaryImage& on) {
  const int w = on.width(), h = on.height();
  if (count_on(on) == 0) throw EmptyObservation("distance transform of an empty contour map");
  constexpr double inf = std::numeric_limits<double>::infinity();

  DepthImage sq(w, h);
  for (std::size_t i = 0; i < on.size(); ++i) sq[i] = on[i] ? 0.0 : inf;

  DepthImage tmp(w, h);
  detail::SquaredDistance1D cols(h);
  for (int x = 0; x < w; ++x) cols.run(&sq(x, 0), &tmp(x, 0), h, w);
  detail::SquaredDistance1D rows(w);
  for (int y = 0; y < h; ++y) rows.run(&tmp(0, y), &sq(0, y), w, 1);

  for (auto& v : sq.data()) v = std::sqrt(v);
  return sq;
}

}  // namespace pcad
