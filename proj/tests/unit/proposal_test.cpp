#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "pcad/proposal.hpp"
#include "support/oracles.hpp"

namespace pcad {
namespace {

TEST(Features, AllOnMapIsZero) {
  const auto f = features(BinaryImage(32, 32, 1));
  ASSERT_EQ(f.size(), 64u);
  for (double v : f) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(features(BinaryImage(32, 32, 0)), EmptyObservation);
}

TEST(Features, PoolingByHand) {
  BinaryImage img(16, 16, 0);
  img(0, 0) = 1;
  const auto f = features(img, FeatureSpec{2});
  double cell = 0.0;
  for (int y = 8; y < 16; ++y)
    for (int x = 0; x < 8; ++x) cell += std::hypot(x, y);
  EXPECT_NEAR(f[2], cell / 64.0 / std::hypot(16.0, 16.0), 1e-12);
}

TEST(Features, OnePixelShiftStaysCloserThanAnotherSample) {
  const SceneModel model;
  const RenderConfig cfg;
  Rng rng(21);
  int closer = 0;
  for (int i = 0; i < 100; ++i) {
    const SceneTrace a = model.sample_prior(i % 2 ? Program::body : Program::object, rng);
    const SceneTrace b = model.sample_prior(i % 2 ? Program::body : Program::object, rng);
    const BinaryImage ca = render_view(a, model, cfg).contour;
    BinaryImage shifted(cfg.width, cfg.height, 0);
    for (int y = 0; y < cfg.height; ++y)
      for (int x = 1; x < cfg.width; ++x) shifted(x, y) = ca(x - 1, y);
    if (count_on(shifted) == 0) continue;
    const auto fa = features(ca), fs = features(shifted), fb = features(render_view(b, model, cfg).contour);
    closer += squared_distance(fa, fs) < squared_distance(fa, fb);
  }
  EXPECT_GE(closer, 95);
}

ProposalIndex small_index(std::size_t n, Program p, std::uint64_t seed, unsigned threads = 1) {
  static const SceneModel model;
  DatasetOptions opt;
  opt.threads = threads;
  return generate_dataset(n, p, model, RenderConfig{}, seed, opt);
}

TEST(Dataset, DeterministicAcrossThreadCounts) {
  const ProposalIndex a = small_index(60, Program::object, 4, 1);
  const ProposalIndex b = small_index(60, Program::object, 4, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 60u);
}

TEST(Dataset, StoredLatentsReplayToStoredFeatures) {
  const SceneModel model;
  const ProposalIndex idx = small_index(40, Program::body, 8);
  const SchemaPtr schema = model.schema(Program::body);
  for (std::size_t e = 0; e < idx.size(); ++e) {
    const auto l = idx.latents(e);
    const SceneTrace t(schema, std::vector<double>(l.begin(), l.end()));
    for (std::size_t i = 0; i < t.size(); ++i) ASSERT_TRUE(in_support(t.schema()[i].prior, t.value(i)));
    const auto f = features(render_view(t, model, RenderConfig{}).contour);
    const auto stored = idx.feature(e);
    ASSERT_TRUE(std::equal(f.begin(), f.end(), stored.begin()));
  }
}

TEST(Index, NearestMatchesBruteForce) {
  const ProposalIndex idx = small_index(80, Program::object, 12);
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (int q = 0; q < 20; ++q) {
    std::vector<double> query(idx.feature_dimension());
    for (auto& v : query) v = u(rng);
    const auto got = idx.nearest(query, 10);
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t e = 0; e < idx.size(); ++e) {
      double d = 0.0;
      for (std::size_t k = 0; k < query.size(); ++k) d += std::pow(query[k] - idx.feature(e)[k], 2);
      all.emplace_back(d, e);
    }
    std::sort(all.begin(), all.end());
    for (std::size_t k = 0; k < 10; ++k) ASSERT_EQ(got[k], all[k].second);
  }
  std::vector<double> query(idx.feature_dimension(), 0.0);
  EXPECT_THROW(idx.nearest(query, idx.size() + 1), InvalidParameter);
  EXPECT_THROW(idx.nearest(query, 0), InvalidParameter);
}

TEST(Index, SelfRetrieval) {
  const SceneModel model;
  const ProposalIndex idx = small_index(100, Program::object, 5);
  const SchemaPtr schema = model.schema(Program::object);
  for (std::size_t e = 0; e < idx.size(); e += 7) {
    const auto l = idx.latents(e);
    const SceneTrace t(schema, std::vector<double>(l.begin(), l.end()));
    const ObservationImage obs(render_view(t, model, RenderConfig{}).contour);
    const auto f = features(obs);
    const auto nn = idx.nearest(f, 10);
    EXPECT_NE(std::find(nn.begin(), nn.end(), e), nn.end());
    EXPECT_EQ(squared_distance(f, idx.feature(nn[0])), 0.0);
  }
}

TEST(Index, BinaryRoundTripAndHeader) {
  const ProposalIndex idx = small_index(25, Program::body, 6);
  std::stringstream bin, side;
  write_index(bin, idx);
  write_index_sidecar(side, idx);
  const std::string bytes = bin.str();
  ASSERT_EQ(bytes.substr(0, 8), std::string("PCADIDX\0", 8));
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);  // version, little-endian
  const std::size_t header = 8 + 7 * 4 + 8;
  EXPECT_EQ(bytes.size(), header + idx.size() * (idx.feature_dimension() + idx.latent_dimension()) * 8);
  const ProposalIndex back = read_index(bin, side);
  EXPECT_EQ(back, idx);

  std::stringstream bad("NOTANIDX");
  std::stringstream empty_side;
  EXPECT_THROW(read_index(bad, empty_side), FormatError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  std::stringstream side2(side.str());
  EXPECT_THROW(read_index(truncated, side2), FormatError);
}

TEST(Index, SchemaCheck) {
  const SceneModel model;
  const ProposalIndex idx = small_index(5, Program::object, 1);
  EXPECT_NO_THROW(check_index_schema(idx, *model.schema(Program::object)));
  EXPECT_THROW(check_index_schema(idx, *model.schema(Program::body)), InvalidParameter);
}

TEST(Kde, SingleNeighbourUsesTheFloor) {
  const std::vector<double> floor = {0.01, 0.02};
  const Kde k = Kde::silverman({{0.3, -0.2}}, floor);
  EXPECT_EQ(k.bandwidth(), floor);
  Rng rng(2);
  double m0 = 0.0, v0 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto x = k.sample(rng);
    m0 += x[0];
    v0 += (x[0] - 0.3) * (x[0] - 0.3);
  }
  EXPECT_NEAR(m0 / n, 0.3, 4 * 0.01 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(v0 / n), 0.01, 0.0005);
}

TEST(Kde, DensityIntegratesToOne) {
  // Importance-sampled integral with a broad uniform proposal over a box
  // that holds essentially all of the mass.
  const Kde k = Kde::silverman({{0.1, 0.5}, {0.4, 0.45}, {0.35, 0.8}, {0.2, 0.6}}, std::vector<double>{1e-3, 1e-3});
  Rng rng(10);
  std::uniform_real_distribution<double> ux(-0.6, 1.1), uy(-0.2, 1.5);
  const double box = 1.7 * 1.7;
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> x = {ux(rng), uy(rng)};
    sum += std::exp(k.log_density(x)) * box;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.02);
}

TEST(Kde, SilvermanBandwidth) {
  const std::vector<std::vector<double>> xs = {{0.0}, {1.0}, {2.0}, {3.0}};
  const Kde k = Kde::silverman(xs, std::vector<double>{1e-6});
  const double sd = std::sqrt(5.0 / 3.0);
  EXPECT_NEAR(k.bandwidth()[0], 1.06 * sd * std::pow(4.0, -0.2), 1e-3 * sd);
  EXPECT_NEAR(k.bandwidth()[0], std::pow(4.0 / 3.0, 0.2) * sd * std::pow(4.0, -0.2), 1e-12);
}

TEST(Kde, SilvermanBandwidthShrinksSlowerInHigherDimension) {
  // 3 samples in 2 dimensions: sd 1 in x, 2 in y
  const std::vector<std::vector<double>> xs = {{-1.0, -2.0}, {0.0, 0.0}, {1.0, 2.0}};
  const Kde k = Kde::silverman(xs, std::vector<double>{1e-6, 1e-6});
  const double factor = std::pow(4.0 / 4.0, 1.0 / 6.0) * std::pow(3.0, -1.0 / 6.0);
  EXPECT_NEAR(k.bandwidth()[0], factor, 1e-12);
  EXPECT_NEAR(k.bandwidth()[1], 2.0 * factor, 1e-12);
}

TEST(DataProposal, SubsetAndFloor) {
  const SceneModel model;
  const ProposalIndex idx = small_index(30, Program::body, 2);
  const SchemaPtr schema = model.schema(Program::body);
  std::vector<double> query(idx.feature_dimension(), 0.05);
  DataSettings s;
  const DataProposal all = make_data_proposal(idx, *schema, query, s);
  EXPECT_EQ(all.latents.size(), schema->group_members(kPlacementGroup).size());
  s.latents = {"affine.tx", "affine.ty"};
  s.neighbors = 1;
  const DataProposal sub = make_data_proposal(idx, *schema, query, s);
  ASSERT_EQ(sub.latents.size(), 2u);
  EXPECT_EQ(sub.latents[0], schema->index("affine.tx"));
  EXPECT_DOUBLE_EQ(sub.kde.bandwidth()[0], 1e-6 * 2.0);
  s.neighbors = 31;
  EXPECT_THROW(make_data_proposal(idx, *schema, query, s), InvalidParameter);
  s.latents = {"nope"};
  s.neighbors = 3;
  EXPECT_THROW(make_data_proposal(idx, *schema, query, s), InvalidParameter);
}

}  // namespace
}  // namespace pcad
