#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "pcad/error.hpp"
#include "pcad/random.hpp"

namespace pcad {

/// Product-Gaussian kernel density estimate: an equal-weight mixture of
/// diagonal Gaussians centered on the samples, one bandwidth per dimension.
class Kde {
 public:
  Kde() = default;

  Kde(std::vector<std::vector<double>> centers, std::vector<double> bandwidth)
      : centers_(std::move(centers)), bandwidth_(std::move(bandwidth)) {
    if (centers_.empty()) throw InvalidParameter("KDE needs at least one sample");
    for (const auto& c : centers_)
      if (c.size() != bandwidth_.size()) throw InvalidParameter("KDE sample dimension mismatch");
    for (double h : bandwidth_)
      if (!(h > 0.0)) throw InvalidParameter("KDE bandwidth must be positive");
    log_norm_ = -std::log(static_cast<double>(centers_.size()));
    for (double h : bandwidth_) log_norm_ -= std::log(h) + 0.5 * std::log(2.0 * std::numbers::pi);
  }

  /// Silverman's multivariate rule of thumb for a diagonal Gaussian kernel,
  /// sd * (4 / (d + 2))^(1 / (d + 4)) * n^(-1 / (d + 4)) per dimension,
  /// floored at `floor[d]`. For d = 1 this is the familiar 1.06 * sd * n^(-1/5).
  static Kde silverman(std::vector<std::vector<double>> samples, std::span<const double> floor) {
    if (samples.empty()) throw InvalidParameter("KDE needs at least one sample");
    const std::size_t dim = samples.front().size();
    if (floor.size() != dim) throw InvalidParameter("KDE floor dimension mismatch");
    const double n = static_cast<double>(samples.size());
    const double dd = static_cast<double>(dim);
    const double factor = std::pow(4.0 / (dd + 2.0), 1.0 / (dd + 4.0)) * std::pow(n, -1.0 / (dd + 4.0));
    std::vector<double> h(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      double mean = 0.0;
      for (const auto& s : samples) mean += s[d];
      mean /= n;
      double var = 0.0;
      for (const auto& s : samples) var += (s[d] - mean) * (s[d] - mean);
      const double sd = samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      h[d] = std::max(factor * sd, floor[d]);
    }
    return Kde(std::move(samples), std::move(h));
  }

  std::size_t dimension() const { return bandwidth_.size(); }
  std::size_t size() const { return centers_.size(); }
  const std::vector<double>& bandwidth() const { return bandwidth_; }
  const std::vector<std::vector<double>>& centers() const { return centers_; }

  double log_density(std::span<const double> x) const {
    if (x.size() != dimension()) throw InvalidParameter("KDE query dimension mismatch");
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(centers_.size());
    for (std::size_t k = 0; k < centers_.size(); ++k) {
      double q = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double z = (x[d] - centers_[k][d]) / bandwidth_[d];
        q -= 0.5 * z * z;
      }
      terms[k] = q;
      best = std::max(best, q);
    }
    if (!std::isfinite(best)) return -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - best);
    return log_norm_ + best + std::log(sum);
  }

  template <typename R>
  std::vector<double> sample(R& rng) const {
    const auto k = std::uniform_int_distribution<std::size_t>(0, centers_.size() - 1)(rng);
    std::vector<double> x(dimension());
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = centers_[k][d] + bandwidth_[d] * standard_normal(rng);
    return x;
  }

 private:
  std::vector<std::vector<double>> centers_;
  std::vector<double> bandwidth_;
  double log_norm_ = 0.0;
};

}  // namespace pcad
