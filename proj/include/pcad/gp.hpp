#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "pcad/error.hpp"
#include "pcad/random.hpp"

namespace pcad {

/// Squared-exponential covariance between two stations.
inline double gp_kernel(double xi, double xj, double bandwidth) {
  if (!(bandwidth > 0.0)) throw InvalidParameter("GP bandwidth must be positive");
  const double d = xi - xj;
  return std::exp(-(d * d) / (2.0 * bandwidth * bandwidth));
}

inline Eigen::MatrixXd gram_matrix(std::span<const double> stations, double bandwidth, double jitter = 0.0) {
  const auto n = static_cast<Eigen::Index>(stations.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + jitter;
    for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = gp_kernel(stations[i], stations[j], bandwidth);
  }
  return k;
}

struct JitterSchedule {
  double initial = 1e-8;
  double max = 1e-4;
};

struct GpFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

/// Lower Cholesky factor of the Gram matrix plus diagonal jitter, raising
/// the jitter tenfold until the factorization succeeds or exceeds the cap.
/// A pivot below half the jitter counts as a failure.
inline GpFactor gp_factor(std::span<const double> stations, double bandwidth, const JitterSchedule& js = {}) {
  if (stations.empty()) throw InvalidParameter("GP needs at least one station");
  const Eigen::MatrixXd k = gram_matrix(stations, bandwidth);
  for (double jitter = js.initial; jitter <= js.max * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    if (lower.diagonal().array().square().minCoeff() >= 0.5 * jitter) return {std::move(lower), jitter};
  }
  throw NumericalError("GP Gram matrix not positive definite at jitter " + std::to_string(js.max));
}

/// Maps standard-normal draws `whitened` (only the first stations.size()
/// are used) to a zero-mean GP draw over `stations`.
inline std::vector<double> gp_transform(std::span<const double> stations, double bandwidth,
                                        std::span<const double> whitened, const JitterSchedule& js = {}) {
  if (whitened.size() < stations.size()) throw InvalidParameter("not enough whitened draws for GP");
  if (stations.empty()) return {};
  const GpFactor f = gp_factor(stations, bandwidth, js);
  const auto n = static_cast<Eigen::Index>(stations.size());
  const Eigen::Map<const Eigen::VectorXd> z(whitened.data(), n);
  const Eigen::VectorXd g = f.lower.triangularView<Eigen::Lower>() * z;
  return {g.data(), g.data() + n};
}

// GP values are offsets around a base radius: r = max(r_min, base + gain * f).
struct RadiusMap {
  double base = 0.35;
  double gain = 0.1;
  double r_min = 0.05;

  double operator()(double f) const { return std::max(r_min, base + gain * f); }
};

struct GpProfile {
  std::vector<double> values;  // zero-mean GP draw
  std::vector<double> radii;
};

inline std::vector<double> to_radii(std::span<const double> values, const RadiusMap& map) {
  std::vector<double> r;
  r.reserve(values.size());
  for (double v : values) r.push_back(map(v));
  return r;
}

template <typename R>
GpProfile sample_gp_profile(std::span<const double> stations, double bandwidth, R& rng,
                            const RadiusMap& map = {}, const JitterSchedule& js = {}) {
  if (stations.empty()) throw InvalidParameter("GP needs at least one station");
  std::vector<double> z(stations.size());
  for (auto& v : z) v = standard_normal(rng);
  GpProfile p;
  p.values = gp_transform(stations, bandwidth, z, js);
  p.radii = to_radii(p.values, map);
  return p;
}

}  // namespace pcad
