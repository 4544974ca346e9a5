#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "pcad/prior.hpp"
#include "pcad/random.hpp"
#include "support/oracles.hpp"

namespace pcad {
namespace {

TEST(Prior, UniformDensityAndSupport) {
  const Prior p = Uniform{-1.0, 3.0};
  EXPECT_DOUBLE_EQ(log_density(p, 0.5), -std::log(4.0));
  EXPECT_EQ(log_density(p, 3.5), kNegInf);
  EXPECT_TRUE(in_support(p, -1.0));
  EXPECT_FALSE(in_support(p, -1.0001));
  EXPECT_DOUBLE_EQ(cdf(p, 1.0), 0.5);
}

TEST(Prior, RescaledBetaMatchesBoost) {
  const Prior p = RescaledBeta{2.0, 5.0, 1.0, 7.0};
  boost::math::beta_distribution<> ref(2.0, 5.0);
  for (double x : {1.3, 2.0, 4.4, 6.9}) {
    const double u = (x - 1.0) / 6.0;
    EXPECT_NEAR(log_density(p, x), std::log(boost::math::pdf(ref, u) / 6.0), 1e-12);
    EXPECT_NEAR(cdf(p, x), boost::math::cdf(ref, u), 1e-12);
  }
  EXPECT_EQ(log_density(p, 0.5), kNegInf);
}

TEST(Prior, GaussianMatchesClosedForm) {
  const Prior p = Gaussian{1.0, 0.5};
  const double x = 1.7;
  const double expected = -0.5 * std::pow((x - 1.0) / 0.5, 2) - std::log(0.5 * std::sqrt(2.0 * std::numbers::pi));
  EXPECT_NEAR(log_density(p, x), expected, 1e-12);
  EXPECT_NEAR(cdf(p, x), boost::math::cdf(boost::math::normal(1.0, 0.5), x), 1e-12);
}

TEST(Prior, DiscreteUniform) {
  const Prior p = DiscreteUniform{2, 5};
  EXPECT_TRUE(is_discrete(p));
  EXPECT_DOUBLE_EQ(log_density(p, 3.0), -std::log(4.0));
  EXPECT_EQ(log_density(p, 3.5), kNegInf);
  Rng rng(3);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 4000; ++i) {
    const double v = sample(p, rng);
    ASSERT_EQ(v, std::round(v));
    ++counts[static_cast<std::size_t>(v) - 2];
  }
  for (int c : counts) EXPECT_NEAR(c, 1000, 150);
}

TEST(Prior, RejectsBadParameters) {
  EXPECT_THROW(validate(Uniform{1.0, 1.0}), InvalidParameter);
  EXPECT_THROW(validate(Gaussian{0.0, 0.0}), InvalidParameter);
  EXPECT_THROW(validate(RescaledBeta{0.0, 1.0, 0.0, 1.0}), InvalidParameter);
  EXPECT_THROW(validate(DiscreteUniform{3, 2}), InvalidParameter);
}

TEST(Prior, SamplesFollowTheirCdf) {
  Rng rng(11);
  const std::vector<Prior> priors = {Uniform{-2.0, 1.0}, RescaledBeta{2.0, 2.0, 0.0, 1.0},
                                     RescaledBeta{2.0, 5.0, 1.0, 7.0}, Gaussian{0.3, 2.0}};
  for (const auto& p : priors) {
    std::vector<double> xs(20000);
    for (auto& x : xs) x = sample(p, rng);
    const auto ks = testing::ks_test(xs, [&](double x) { return cdf(p, x); });
    EXPECT_GT(ks.p_value, 1e-3) << describe(p);
  }
}

TEST(Prior, UnitMapRoundTrip) {
  const Prior p = Uniform{2.0, 6.0};
  const UnitMap m = unit_map(p);
  EXPECT_TRUE(m.bounded);
  EXPECT_DOUBLE_EQ(m.to_unit(4.0), 0.5);
  EXPECT_DOUBLE_EQ(m.from_unit(0.25), 3.0);
  EXPECT_FALSE(unit_map(Gaussian{0.0, 1.0}).bounded);
  EXPECT_DOUBLE_EQ(prior_range(Gaussian{0.0, 3.0}), 3.0);
}

TEST(Random, SplitSeedsAreIndependentOfStreamCount) {
  Rng a = make_rng(42, 3);
  Rng b = make_rng(42, 3);
  EXPECT_EQ(a(), b());
  EXPECT_NE(split_seed(42, 0), split_seed(42, 1));
  EXPECT_NE(split_seed(42, 0), split_seed(43, 0));
}

}  // namespace
}  // namespace pcad
