#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <ahc/hbm.hpp>

#include "oracles.hpp"

using namespace ahc;

namespace {

NoisyHbmSpec two_level(std::size_t n, double sigma, std::uint64_t seed = 1) {
  NoisyHbmSpec spec;
  spec.n = n;
  spec.shape = BalancedShape{1};
  spec.bands = {Band::constant(0.2), Band::constant(0.8)};
  spec.sigma = sigma;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(Generate, FourObjectConstantBlocks) {
  const HbmInstance inst = generate(two_level(4, 0.0));
  Matrix expected(4, 4);
  expected << 0.8, 0.8, 0.2, 0.2,  //
      0.8, 0.8, 0.2, 0.2,          //
      0.2, 0.2, 0.8, 0.8,          //
      0.2, 0.2, 0.8, 0.8;
  EXPECT_TRUE(inst.similarities.isApprox(expected, 0.0));
  EXPECT_EQ(inst.truth.num_nodes(), 3u);
  EXPECT_DOUBLE_EQ(inst.gamma, 0.6);
}

TEST(Generate, NoiselessIsIdeal) {
  for (std::size_t depth = 1; depth <= 4; ++depth) {
    for (IdealMode mode : {IdealMode::Constant, IdealMode::Uniform}) {
      NoisyHbmSpec spec;
      spec.n = 40;
      spec.shape = BalancedShape{depth};
      spec.mode = mode;
      spec.seed = depth;
      for (const Band& b : even_level_bands(depth)) spec.bands.push_back(Band{b.lo - 0.02, b.lo + 0.02});
      const HbmInstance inst = generate(spec);
      EXPECT_FALSE(validate_ideal(inst.similarities, inst.truth).has_value());
      EXPECT_TRUE(inst.similarities == inst.ideal);
    }
  }
}

TEST(Generate, SymmetricAndDeterministic) {
  const HbmInstance a = generate(two_level(50, 0.3, 9));
  const HbmInstance b = generate(two_level(50, 0.3, 9));
  EXPECT_TRUE(a.similarities == a.similarities.transpose());
  EXPECT_TRUE(a.similarities == b.similarities);
  const HbmInstance c = generate(two_level(50, 0.3, 10));
  EXPECT_FALSE(a.similarities == c.similarities);
}

TEST(Generate, SigmaOnlyScalesTheSameNoise) {
  const HbmInstance a = generate(two_level(30, 0.1, 4));
  const HbmInstance b = generate(two_level(30, 0.2, 4));
  EXPECT_TRUE(a.ideal == b.ideal);
  const Matrix ra = a.similarities - a.ideal;
  const Matrix rb = b.similarities - b.ideal;
  EXPECT_TRUE((2.0 * ra).isApprox(rb, 1e-12));
}

TEST(Generate, NoiseIsCenteredWithRequestedScale) {
  const double sigma = 0.5;
  const HbmInstance inst = generate(two_level(300, sigma, 5));
  const Matrix r = inst.similarities - inst.ideal;
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < r.cols(); ++j) {
      sum += r(i, j);
      sq += r(i, j) * r(i, j);
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  EXPECT_LT(std::abs(mean), 4.0 * sigma / 300.0);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(count)), sigma, 0.02);
}

TEST(Generate, SampleMeansRespectSubgaussianTail) {
  // Mean of m independent sigma-subgaussian entries: P(|mean - expectation| > eps) <= 2 exp(-m eps^2 / (2 sigma^2)).
  const double sigma = 0.6;
  const std::size_t m = 4;
  const double eps = sigma;
  const double bound = 2.0 * std::exp(-static_cast<double>(m) * eps * eps / (2.0 * sigma * sigma));
  std::size_t exceed = 0;
  const std::size_t trials = 2000;
  std::mt19937_64 pick(3);
  std::vector<Eigen::Index> ids(10);
  for (std::size_t t = 0; t < trials; ++t) {
    const HbmInstance inst = generate(two_level(20, sigma, 100 + t));
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), pick);
    double mean = 0.0;
    for (std::size_t q = 0; q < m; ++q) mean += inst.similarities(ids[2 * q], ids[2 * q + 1]);
    mean /= static_cast<double>(m);
    if (std::abs(mean - 0.8) > eps) ++exceed;
  }
  const double se = std::sqrt(bound * (1.0 - bound) / trials);
  EXPECT_LE(static_cast<double>(exceed) / trials, bound + 3.0 * se);
}

TEST(Generate, RejectsBadBands) {
  NoisyHbmSpec spec = two_level(8, 0.0);
  spec.bands = {Band{0.5, 0.6}, Band{0.4, 0.9}};  // child below parent
  try {
    generate(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidBands);
  }
  spec.bands = {Band{0.2, 0.2}, Band{0.9, 1.2}};
  EXPECT_THROW(generate(spec), Error);
  spec.bands = {Band{0.2, 0.2}};
  EXPECT_THROW(generate(spec), Error);
}

TEST(Generate, ExplicitKaryTree) {
  NoisyHbmSpec spec;
  spec.n = 9;
  spec.shape = ClusterTree(ClusterNode{{0, 1, 2, 3, 4, 5, 6, 7, 8},
                                      {ClusterNode::leaf({0, 1, 2}), ClusterNode::leaf({3, 4, 5}),
                                       ClusterNode::leaf({6, 7, 8})}});
  spec.bands = {Band::constant(0.1), Band::constant(0.9)};
  const HbmInstance inst = generate(spec);
  EXPECT_DOUBLE_EQ(inst.similarities(0, 4), 0.1);
  EXPECT_DOUBLE_EQ(inst.similarities(7, 8), 0.9);
}

TEST(Generate, BandsByNode) {
  NoisyHbmSpec spec;
  spec.n = 4;
  spec.shape = BalancedShape{1};
  spec.indexing = BandIndexing::ByNode;
  spec.bands = {Band::constant(0.1), Band::constant(0.5), Band::constant(0.7)};
  const HbmInstance inst = generate(spec);
  EXPECT_DOUBLE_EQ(inst.similarities(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(inst.similarities(2, 3), 0.7);
  EXPECT_DOUBLE_EQ(inst.similarities(1, 2), 0.1);
  EXPECT_DOUBLE_EQ(inst.gamma, 0.4);
}

TEST(ValidateIdeal, PlantedViolation) {
  HbmInstance inst = generate(two_level(8, 0.0));
  inst.similarities(0, 5) = inst.similarities(5, 0) = 0.85;
  const auto v = validate_ideal(inst.similarities, inst.truth);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, Violation::Kind::BlockOrder);
  EXPECT_NE(v->detail.find("cluster 0"), std::string::npos);
}

TEST(ValidateIdeal, RandomNoiseFailsAndMatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ClusterTree tree = balanced_binary_tree(16, 3);
  for (int t = 0; t < 20; ++t) {
    Matrix w(16, 16);
    for (Eigen::Index i = 0; i < 16; ++i) {
      for (Eigen::Index j = i; j < 16; ++j) w(i, j) = w(j, i) = u(rng);
    }
    // Brute force: any pair (cross at C, within some child of C) out of order.
    bool bad = false;
    for (ObjectId a = 0; a < 16 && !bad; ++a) {
      for (ObjectId b = a + 1; b < 16 && !bad; ++b) {
        const std::size_t lca = tree.lowest_common_ancestor(a, b);
        for (ObjectId c = 0; c < 16 && !bad; ++c) {
          for (ObjectId d = c + 1; d < 16 && !bad; ++d) {
            const std::size_t inner = tree.lowest_common_ancestor(c, d);
            const auto& outer = tree.node(lca).members;
            const bool inside = inner != lca && std::binary_search(outer.begin(), outer.end(), c) &&
                                std::binary_search(outer.begin(), outer.end(), d);
            if (inside && w(a, b) > w(c, d)) bad = true;
          }
        }
      }
    }
    EXPECT_EQ(validate_ideal(w, tree).has_value(), bad);
    EXPECT_TRUE(bad);
  }
}

TEST(ExpectedGap, Constants) {
  EXPECT_DOUBLE_EQ(expected_gap(two_level(8, 0.0)), 0.6);
}

TEST(ExpectedGap, UniformMidpoints) {
  NoisyHbmSpec spec = two_level(8, 0.0);
  spec.bands = {Band{0.1, 0.3}, Band{0.6, 0.8}};
  spec.mode = IdealMode::Uniform;
  EXPECT_NEAR(expected_gap(spec), 0.5, 1e-12);
}

TEST(ExpectedGap, ThreeLevelsTakesMinimum) {
  NoisyHbmSpec spec;
  spec.n = 16;
  spec.shape = BalancedShape{2};
  spec.bands = {Band::constant(0.1), Band::constant(0.6), Band::constant(0.75)};
  // Root split gap 0.6 - 0.1, second-level gap 0.75 - 0.6.
  EXPECT_NEAR(expected_gap(spec), std::min(0.5, 0.15), 1e-12);
}

TEST(EvenBands, Spacing) {
  const auto b = even_level_bands(7);
  ASSERT_EQ(b.size(), 8u);
  EXPECT_DOUBLE_EQ(b.front().lo, 0.2);
  EXPECT_DOUBLE_EQ(b.back().lo, 0.9);
  EXPECT_NEAR(b[1].lo - b[0].lo, 0.1, 1e-12);
}

TEST(BalancedTree, SplitsCeilFloor) {
  const ClusterTree t = balanced_binary_tree(7, 1);
  ASSERT_EQ(t.num_nodes(), 3u);
  EXPECT_EQ(t.node(1).size(), 4u);
  EXPECT_EQ(t.node(2).size(), 3u);
  EXPECT_FALSE(validate_tree(balanced_binary_tree(100, 10), 100).has_value());
}

TEST(Generate, Depth7Instance) {
  NoisyHbmSpec spec;
  spec.n = 256;
  spec.shape = BalancedShape{7};
  spec.bands = even_level_bands(7);
  spec.sigma = 0.75;
  spec.seed = 42;
  const HbmInstance inst = generate(spec);
  EXPECT_EQ(inst.similarities.rows(), 256);
  EXPECT_EQ(inst.truth.num_nodes(), 255u);
  EXPECT_NEAR(inst.gamma, 0.1, 1e-12);
}
