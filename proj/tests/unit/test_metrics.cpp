#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <ahc/metrics.hpp>

#include "oracles.hpp"

using namespace ahc;

namespace {

ClusterNode leaf(std::vector<ObjectId> ids) { return ClusterNode::leaf(std::move(ids)); }

ClusterTree full_pairs(ObjectId a, ObjectId b, ObjectId c, ObjectId d) {
  return ClusterTree(ClusterNode{{0, 1, 2, 3},
                                 {ClusterNode{{a, b}, {leaf({a}), leaf({b})}},
                                  ClusterNode{{c, d}, {leaf({c}), leaf({d})}}}});
}

}  // namespace

TEST(OutlierFraction, SelfAgreement) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ClusterTree t = oracle::random_tree(15, seed);
    EXPECT_DOUBLE_EQ(outlier_fraction(t, t), 1.0);
  }
}

TEST(OutlierFraction, CrossedPairsDisagreeEverywhere) {
  EXPECT_DOUBLE_EQ(outlier_fraction(full_pairs(0, 1, 2, 3), full_pairs(0, 2, 1, 3)), 0.0);
  EXPECT_DOUBLE_EQ(oracle::brute_outlier_fraction(full_pairs(0, 1, 2, 3), full_pairs(0, 2, 1, 3)), 0.0);
}

TEST(OutlierFraction, NothingResolvedGivesOne) {
  const ClusterTree flat = ClusterTree::single_cluster(6);
  EXPECT_DOUBLE_EQ(outlier_fraction(flat, oracle::random_tree(6, 1)), 1.0);
  OutlierFractionMode strict;
  strict.unresolved = UnresolvedPolicy::CountAsDisagree;
  EXPECT_DOUBLE_EQ(outlier_fraction(flat, flat, strict), 0.0);
}

TEST(OutlierFraction, ExactMatchesBruteForceAndIsSymmetric) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ClusterTree a = oracle::random_tree(13, seed);
    const ClusterTree b = oracle::random_tree(13, seed + 1000);
    EXPECT_DOUBLE_EQ(outlier_fraction(a, b), oracle::brute_outlier_fraction(a, b));
    EXPECT_DOUBLE_EQ(outlier_fraction(a, b), outlier_fraction(b, a));
    OutlierFractionMode strict;
    strict.unresolved = UnresolvedPolicy::CountAsDisagree;
    EXPECT_DOUBLE_EQ(outlier_fraction(a, b, strict), oracle::brute_outlier_fraction(a, b, false));
  }
}

TEST(OutlierFraction, SampledTracksExact) {
  int close = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    const ClusterTree a = oracle::random_tree(60, 100 + r);
    const ClusterTree b = oracle::random_tree(60, 200 + r);
    const double exact = outlier_fraction(a, b);
    const double sampled = outlier_fraction(a, b, OutlierFractionMode::sampled(50000, static_cast<std::uint64_t>(r)));
    if (std::abs(exact - sampled) <= 0.02) ++close;
  }
  EXPECT_GE(close, 19);
}

TEST(OutlierFraction, RejectsMismatchedTrees) {
  EXPECT_THROW(outlier_fraction(ClusterTree::single_cluster(4), ClusterTree::single_cluster(5)), Error);
  EXPECT_THROW(outlier_fraction(ClusterTree::single_cluster(4), ClusterTree::single_cluster(4),
                                OutlierFractionMode::sampled(0, 1)),
               Error);
}

TEST(Hkm, IdenticalFeatures) {
  Matrix x = Matrix::Ones(8, 3);
  EXPECT_DOUBLE_EQ(hkm(oracle::random_tree(8, 2), x, 1), 1.0);
}

TEST(Hkm, FourPointsAtFortyFiveDegrees) {
  Matrix x(4, 2);
  x << 1, 0, 1, 0, 0, 1, 0, 1;
  EXPECT_NEAR(hkm(ClusterTree::single_cluster(4), x, 1), std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(Hkm, OrthogonalPair) {
  Matrix x(2, 2);
  x << 1, 0, 0, 1;
  EXPECT_NEAR(hkm(ClusterTree::single_cluster(2), x, 1), std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(Hkm, BoundedAndMatchesDirectComputation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusterTree t = oracle::random_tree(20, seed);
    Matrix x(20, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& c : oracle::clusters_at_least(t, 4)) {
      Vector center = Vector::Zero(4);
      for (ObjectId id : c) center += x.row(id).transpose();
      center /= static_cast<double>(c.size());
      double sum = 0.0;
      for (ObjectId id : c) sum += x.row(id).dot(center) / (x.row(id).norm() * center.norm());
      total += sum / static_cast<double>(c.size());
      ++count;
    }
    const double v = hkm(t, x, 3);
    EXPECT_NEAR(v, total / static_cast<double>(count), 1e-12);
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Hkm, Errors) {
  Matrix x = Matrix::Ones(4, 2);
  x.row(2).setZero();
  try {
    hkm(ClusterTree::single_cluster(4), x, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateFeatures);
  }
  try {
    hkm(ClusterTree::single_cluster(4), Matrix::Ones(4, 2), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoQualifyingClusters);
  }
}

TEST(Hkm, SimilarityRowsUseAForkedOracle) {
  Matrix w = Matrix::Constant(6, 6, 0.3);
  w.diagonal().setOnes();
  auto oracle = SimilarityOracle::from_matrix(w);
  const double v = hkm_similarity_rows(ClusterTree::single_cluster(6), oracle, 1);
  EXPECT_EQ(oracle.unique_pairs(), 0u);
  EXPECT_DOUBLE_EQ(v, hkm(ClusterTree::single_cluster(6), w, 1));
}

TEST(Hrc, HalfPerChild) {
  Matrix w = Matrix::Constant(4, 4, 0.5);
  w(0, 1) = w(1, 0) = w(2, 3) = w(3, 2) = 0.9;
  auto oracle = SimilarityOracle::from_matrix(w);
  const ClusterTree t(ClusterNode{{0, 1, 2, 3}, {leaf({0, 1}), leaf({2, 3})}});
  // Only the root qualifies above size 2: (4 * 0.5) / (2 * 2) per child.
  EXPECT_DOUBLE_EQ(hrc(t, oracle, 2), 1.0);
  // With min size 1 the two leaves qualify as well and contribute 0.
  EXPECT_DOUBLE_EQ(hrc(t, oracle, 1), 1.0 / 3.0);
  EXPECT_EQ(oracle.unique_pairs(), 0u);
  const ClusterTree swapped(ClusterNode{{0, 1, 2, 3}, {leaf({2, 3}), leaf({0, 1})}});
  EXPECT_DOUBLE_EQ(hrc(swapped, oracle, 2), 1.0);
}

TEST(Hrc, ZeroCut) {
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 0) = w(2, 3) = w(3, 2) = 1.0;
  auto oracle = SimilarityOracle::from_matrix(w);
  EXPECT_DOUBLE_EQ(hrc(ClusterTree(ClusterNode{{0, 1, 2, 3}, {leaf({0, 1}), leaf({2, 3})}}), oracle, 2), 0.0);
}

TEST(Hrc, MatchesDirectSumAndIsNonNegative) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusterTree t = oracle::random_tree(18, seed);
    Matrix w(18, 18);
    for (Eigen::Index i = 0; i < 18; ++i) {
      for (Eigen::Index j = i; j < 18; ++j) w(i, j) = w(j, i) = u(rng);
    }
    auto oracle = SimilarityOracle::from_matrix(w);
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& node : t.nodes()) {
      if (node.size() <= 3) continue;
      ++count;
      for (std::size_t c : node.children) {
        const auto& inside = t.node(c).members;
        double cut = 0.0;
        for (ObjectId a : inside) {
          for (ObjectId b : node.members) {
            if (!std::binary_search(inside.begin(), inside.end(), b)) cut += w(a, b);
          }
        }
        total += cut / (2.0 * static_cast<double>(inside.size()));
      }
    }
    const double v = hrc(t, oracle, 3);
    EXPECT_NEAR(v, total / static_cast<double>(count), 1e-12);
    EXPECT_GE(v, 0.0);
  }
}

TEST(SplitRecovery, Examples) {
  const FlatPartition a{{0, 0, 1, 1}, 2, false};
  const FlatPartition swapped{{1, 1, 0, 0}, 2, false};
  const FlatPartition moved{{0, 1, 1, 1}, 2, false};
  EXPECT_TRUE(exact_split_recovery(a, a));
  EXPECT_TRUE(exact_split_recovery(swapped, a));
  EXPECT_FALSE(exact_split_recovery(moved, a));
  EXPECT_THROW(exact_split_recovery(FlatPartition{{0, 1}, 2, false}, a), Error);
}

TEST(SplitRecovery, CanonicalLabelsMatchBijectionOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng() % 4);
    FlatPartition p, q;
    p.k = q.k = k;
    for (int i = 0; i < 8; ++i) {
      p.labels.push_back(static_cast<int>(rng() % k));
      q.labels.push_back(static_cast<int>(rng() % k));
    }
    EXPECT_EQ(exact_split_recovery(p, q), oracle::same_partition(p.labels, q.labels));
    EXPECT_EQ(canonical_labels(p).front(), 0);
  }
}

TEST(MinSampleSize, ReferenceValue) {
  BoundParams p;
  p.n = 1024;
  // 24 * 2 / 0.25 * ln(4 * 1 * 2 * 1024) = 192 * ln 8192
  EXPECT_NEAR(192.0 * std::log(8192.0), 1730.1, 0.1);
  EXPECT_EQ(min_sample_size(p), 1731u);
}

TEST(MinSampleSize, SecondTermDominates) {
  BoundParams p;
  p.n = 1000;
  p.gamma = 1.0;
  p.c1 = 100.0;
  p.k = 1;
  p.c_eta = 0.001;
  EXPECT_EQ(min_sample_size(p), static_cast<std::uint64_t>(std::ceil(16.0 * std::log(1000.0))));
}

TEST(MinSampleSize, Monotonicity) {
  BoundParams base;
  base.n = 500;
  const auto at = [&](auto mutate) {
    BoundParams p = base;
    mutate(p);
    return min_sample_size(p);
  };
  std::uint64_t prev = 0;
  for (double n : {10.0, 100.0, 1000.0, 1e4, 1e5}) {
    const auto v = at([&](BoundParams& p) { p.n = n; });
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = 0;
  for (double eta : {1.0, 1.5, 2.0, 4.0}) {
    const auto v = at([&](BoundParams& p) { p.eta = eta; });
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = 0;
  for (double k : {1.0, 2.0, 8.0, 64.0}) {
    const auto v = at([&](BoundParams& p) { p.k = k; });
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = UINT64_MAX;
  for (double gamma : {0.05, 0.1, 0.5, 1.0}) {
    const auto v = at([&](BoundParams& p) { p.gamma = gamma; });
    EXPECT_LE(v, prev);
    prev = v;
  }
  prev = UINT64_MAX;
  for (double c1 : {0.001, 0.01, 1.0, 10.0}) {
    const auto v = at([&](BoundParams& p) { p.c1 = c1; });
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(MinSampleSize, RejectsBadParameters) {
  BoundParams p;
  p.n = 100;
  p.gamma = 0.0;
  EXPECT_THROW(min_sample_size(p), Error);
  p.gamma = 1.5;
  EXPECT_THROW(min_sample_size(p), Error);
  p.gamma = 0.5;
  p.eta = 0.5;
  EXPECT_THROW(min_sample_size(p), Error);
}

TEST(DefaultMinSize, NaturalLog) {
  EXPECT_EQ(default_min_size(1024), 7u);
  EXPECT_EQ(default_min_size(256), 6u);
}
