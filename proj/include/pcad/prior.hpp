#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>

#include <boost/math/special_functions/beta.hpp>

#include "pcad/error.hpp"
#include "pcad/random.hpp"

namespace pcad {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

// lo + (hi - lo) * Beta(alpha, beta)
struct RescaledBeta {
  double alpha = 1.0;
  double beta = 1.0;
  double lo = 0.0;
  double hi = 1.0;
};

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};

// Integers lo..hi inclusive, equal mass.
struct DiscreteUniform {
  int lo = 0;
  int hi = 1;
};

using Prior = std::variant<Uniform, RescaledBeta, Gaussian, DiscreteUniform>;

inline void validate(const Prior& prior) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          if (!(p.lo < p.hi)) throw InvalidParameter("uniform prior needs lo < hi");
        } else if constexpr (std::is_same_v<T, RescaledBeta>) {
          if (!(p.lo < p.hi) || !(p.alpha > 0) || !(p.beta > 0))
            throw InvalidParameter("rescaled beta prior needs lo < hi and positive shapes");
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          if (!(p.stddev > 0)) throw InvalidParameter("gaussian prior needs stddev > 0");
        } else {
          if (p.lo > p.hi) throw InvalidParameter("discrete prior needs lo <= hi");
        }
      },
      prior);
}

inline bool is_discrete(const Prior& prior) {
  return std::holds_alternative<DiscreteUniform>(prior);
}

inline bool in_support(const Prior& prior, double x) {
  if (!std::isfinite(x)) return false;
  return std::visit(
      [x](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return true;
        } else if constexpr (std::is_same_v<T, DiscreteUniform>) {
          return x == std::round(x) && x >= p.lo && x <= p.hi;
        } else {
          return x >= p.lo && x <= p.hi;
        }
      },
      prior);
}

/// Log density (log mass for discrete priors); -inf outside the support.
inline double log_density(const Prior& prior, double x) {
  if (!in_support(prior, x)) return kNegInf;
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return -std::log(p.hi - p.lo);
        } else if constexpr (std::is_same_v<T, RescaledBeta>) {
          const double width = p.hi - p.lo;
          const double t = (x - p.lo) / width;
          const double log_norm = std::lgamma(p.alpha + p.beta) - std::lgamma(p.alpha) -
                                  std::lgamma(p.beta) - std::log(width);
          double lp = log_norm;
          if (p.alpha != 1.0) lp += (p.alpha - 1.0) * std::log(t);
          if (p.beta != 1.0) lp += (p.beta - 1.0) * std::log1p(-t);
          return std::isnan(lp) ? kNegInf : lp;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double z = (x - p.mean) / p.stddev;
          return -0.5 * z * z - std::log(p.stddev) - 0.5 * std::log(2.0 * std::numbers::pi);
        } else {
          return -std::log(static_cast<double>(p.hi - p.lo + 1));
        }
      },
      prior);
}

template <typename R>
double sample(const Prior& prior, R& rng) {
  return std::visit(
      [&rng](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return p.lo + (p.hi - p.lo) * uniform01(rng);
        } else if constexpr (std::is_same_v<T, RescaledBeta>) {
          return p.lo + (p.hi - p.lo) * sample_beta(p.alpha, p.beta, rng);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return p.mean + p.stddev * standard_normal(rng);
        } else {
          return static_cast<double>(std::uniform_int_distribution<int>(p.lo, p.hi)(rng));
        }
      },
      prior);
}

inline double cdf(const Prior& prior, double x) {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          if (x <= p.lo) return 0.0;
          if (x >= p.hi) return 1.0;
          return (x - p.lo) / (p.hi - p.lo);
        } else if constexpr (std::is_same_v<T, RescaledBeta>) {
          if (x <= p.lo) return 0.0;
          if (x >= p.hi) return 1.0;
          return boost::math::ibeta(p.alpha, p.beta, (x - p.lo) / (p.hi - p.lo));
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return 0.5 * std::erfc(-(x - p.mean) / (p.stddev * std::numbers::sqrt2));
        } else {
          if (x < p.lo) return 0.0;
          if (x >= p.hi) return 1.0;
          return (std::floor(x) - p.lo + 1.0) / (p.hi - p.lo + 1.0);
        }
      },
      prior);
}

inline double mean(const Prior& prior) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return 0.5 * (p.lo + p.hi);
        } else if constexpr (std::is_same_v<T, RescaledBeta>) {
          return p.lo + (p.hi - p.lo) * p.alpha / (p.alpha + p.beta);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return p.mean;
        } else {
          return 0.5 * (p.lo + p.hi);
        }
      },
      prior);
}

// Affine map between a continuous prior's natural coordinates and a unit
// coordinate: [lo, hi] -> [0, 1] for bounded priors, standardization for
// gaussians.
struct UnitMap {
  double offset = 0.0;
  double scale = 1.0;
  bool bounded = true;

  double to_unit(double x) const { return (x - offset) / scale; }
  double from_unit(double u) const { return offset + scale * u; }
};

inline UnitMap unit_map(const Prior& prior) {
  return std::visit(
      [](const auto& p) -> UnitMap {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return {p.mean, p.stddev, false};
        } else {
          return {static_cast<double>(p.lo), static_cast<double>(p.hi - p.lo), true};
        }
      },
      prior);
}

/// Width of the support for bounded priors, stddev for gaussians.
inline double prior_range(const Prior& prior) { return unit_map(prior).scale; }

inline std::string describe(const Prior& prior) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return "uniform(" + std::to_string(p.lo) + "," + std::to_string(p.hi) + ")";
        } else if constexpr (std::is_same_v<T, RescaledBeta>) {
          return "rescaled-beta(" + std::to_string(p.alpha) + "," + std::to_string(p.beta) + "," +
                 std::to_string(p.lo) + "," + std::to_string(p.hi) + ")";
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return "gaussian(" + std::to_string(p.mean) + "," + std::to_string(p.stddev) + ")";
        } else {
          return "discrete-uniform(" + std::to_string(p.lo) + "," + std::to_string(p.hi) + ")";
        }
      },
      prior);
}

}  // namespace pcad
