#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pcad/distance_transform.hpp"
#include "pcad/likelihood.hpp"
#include "pcad/random.hpp"
#include "support/oracles.hpp"

namespace pcad {
namespace {

BinaryImage random_map(Rng& rng, int w, int h, double density) {
  BinaryImage img(w, h, 0);
  std::bernoulli_distribution on(density);
  for (auto& v : img.data()) v = on(rng);
  if (count_on(img) == 0) img[static_cast<std::size_t>(rng() % img.size())] = 1;
  return img;
}

TEST(DistanceTransform, MatchesBruteForceExactly) {
  Rng rng(101);
  for (int i = 0; i < 100; ++i) {
    const double density = std::array{0.002, 0.02, 0.2, 0.6}[static_cast<std::size_t>(i % 4)];
    const BinaryImage img = random_map(rng, 32, 32, density);
    ASSERT_EQ(testing::edt_mismatches(distance_transform(img), img), 0u) << "map " << i;
  }
}

TEST(DistanceTransform, NonSquareImages) {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const BinaryImage img = random_map(rng, 23, 9, 0.05);
    ASSERT_EQ(testing::edt_mismatches(distance_transform(img), img), 0u);
  }
}

TEST(DistanceTransform, SimpleCases) {
  BinaryImage one(8, 8, 0);
  one(0, 0) = 1;
  EXPECT_EQ(distance_transform(one)(3, 4), 5.0);
  BinaryImage all(5, 4, 1);
  const DepthImage zero = distance_transform(all);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(distance_transform(BinaryImage(4, 4, 0)), EmptyObservation);
}

TEST(Chamfer, IdenticalContoursGiveZero) {
  Rng rng(3);
  const BinaryImage img = random_map(rng, 32, 32, 0.05);
  const ObservationImage obs(img);
  EXPECT_EQ(chamfer(obs, img), 0.0);
}

TEST(Chamfer, ThreeFourFive) {
  BinaryImage o(8, 8, 0), r(8, 8, 0);
  o(0, 0) = 1;
  r(3, 4) = 1;
  EXPECT_EQ(chamfer(ObservationImage(o), r), 5.0);
}

TEST(Chamfer, MatchesDirectSummation) {
  Rng rng(19);
  for (int i = 0; i < 50; ++i) {
    const BinaryImage o = random_map(rng, 16, 16, 0.1);
    const BinaryImage r = random_map(rng, 16, 16, 0.1);
    const DepthImage dt = testing::brute_force_edt(o);
    double sum = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < r.size(); ++k)
      if (r[k]) {
        sum += dt[k];
        ++n;
      }
    ASSERT_NEAR(chamfer(ObservationImage(o), r), sum / n, 1e-12);
  }
}

TEST(Chamfer, OneSidedMonotonicity) {
  Rng rng(4);
  BinaryImage o = random_map(rng, 24, 24, 0.03);
  const BinaryImage r = random_map(rng, 24, 24, 0.05);
  const double before = chamfer(ObservationImage(o), r);
  o(23, 23) = 1;
  o(0, 12) = 1;
  EXPECT_LE(chamfer(ObservationImage(o), r), before);
}

TEST(Chamfer, Errors) {
  BinaryImage o(8, 8, 0);
  o(1, 1) = 1;
  const ObservationImage obs(o);
  EXPECT_THROW(chamfer(obs, BinaryImage(8, 8, 0)), EmptyRender);
  EXPECT_THROW(chamfer(obs, BinaryImage(9, 8, 1)), InvalidParameter);
  EXPECT_THROW(ObservationImage(BinaryImage(8, 8, 0)), EmptyObservation);
}

TEST(Likelihood, GaussianOverDistance) {
  EXPECT_NEAR(log_likelihood_of_distance(0.0, 1.0), -0.9189385332046727, 1e-9);
  const double base = log_likelihood_of_distance(0.0, 2.0);
  EXPECT_NEAR(log_likelihood_of_distance(2.0, 2.0), base - 0.5, 1e-12);
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  double prev = log_likelihood_of_distance(0.0, 1.5);
  for (int i = 0; i < 100; ++i) {
    const double rho = u(rng), s = 0.2 + u(rng);
    const double direct = std::exp(-rho * rho / (2 * s * s)) / std::sqrt(2 * std::numbers::pi * s * s);
    ASSERT_NEAR(std::exp(log_likelihood_of_distance(rho, s)), direct, 1e-12);
  }
  for (double rho = 0.1; rho < 5; rho += 0.1) {
    const double cur = log_likelihood_of_distance(rho, 1.5);
    ASSERT_LT(cur, prev);
    prev = cur;
  }
  EXPECT_DOUBLE_EQ(default_sigma0(128), 2.0);
  EXPECT_DOUBLE_EQ(default_sigma0(256), 4.0);
}

}  // namespace
}  // namespace pcad
