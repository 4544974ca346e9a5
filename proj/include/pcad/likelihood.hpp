#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "pcad/distance_transform.hpp"
#include "pcad/error.hpp"
#include "pcad/image.hpp"
#include "pcad/render.hpp"

namespace pcad {

/// Log likelihood assigned to renders with no contour pixels (object out of
/// frame), so such proposals are rejected rather than fatal.
inline constexpr double kEmptyRenderLogLikelihood = -1e9;

/// Default comparator width: 2 pixels at 128 wide, linear in resolution.
inline double default_sigma0(int width) { return 2.0 * width / 128.0; }

/// Observed contour map with its distance transform. Immutable.
class ObservationImage {
 public:
  explicit ObservationImage(BinaryImage contour)
      : contour_(std::move(contour)), dt_(distance_transform(contour_)) {}

  const BinaryImage& contour() const { return contour_; }
  const DepthImage& dt() const { return dt_; }
  int width() const { return contour_.width(); }
  int height() const { return contour_.height(); }

 private:
  BinaryImage contour_;
  DepthImage dt_;
};

/// Mean observation distance over the rendered contour pixels (rendered map
/// is the template).
inline double chamfer(const ObservationImage& obs, const BinaryImage& rendered) {
  if (!obs.contour().same_shape(rendered)) throw InvalidParameter("chamfer: image sizes differ");
  const auto& dt = obs.dt();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    if (rendered[i]) {
      sum += dt[i];
      ++n;
    }
  }
  if (n == 0) throw EmptyRender("chamfer: rendered contour is empty");
  return sum / static_cast<double>(n);
}

inline double chamfer(const ObservationImage& obs, const RenderedView& view) {
  if (view.on_count == 0) throw EmptyRender("chamfer: rendered contour is empty");
  if (!obs.contour().same_shape(view.contour)) throw InvalidParameter("chamfer: image sizes differ");
  const auto& b = view.covered;
  if (b.empty()) return chamfer(obs, view.contour);
  // contour pixels are covered pixels, so the covered box holds all of them
  double sum = 0.0;
  for (int y = b.y0; y <= b.y1; ++y) {
    const std::uint8_t* on = &view.contour(0, y);
    const double* dt = &obs.dt()(0, y);
    for (int x = b.x0; x <= b.x1; ++x)
      if (on[x]) sum += dt[x];
  }
  return sum / static_cast<double>(view.on_count);
}

/// log N(rho; 0, sigma0^2).
inline double log_likelihood_of_distance(double rho, double sigma0) {
  if (!(sigma0 > 0.0)) throw InvalidParameter("sigma0 must be positive");
  return -rho * rho / (2.0 * sigma0 * sigma0) - 0.5 * std::log(2.0 * std::numbers::pi * sigma0 * sigma0);
}

inline double log_likelihood(const ObservationImage& obs, const RenderedView& view, double sigma0) {
  return log_likelihood_of_distance(chamfer(obs, view), sigma0);
}

}  // namespace pcad
