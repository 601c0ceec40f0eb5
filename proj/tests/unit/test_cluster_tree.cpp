#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include <ahc/cluster_tree.hpp>

#include "oracles.hpp"

using namespace ahc;

namespace {

ClusterNode node(std::vector<ObjectId> members, std::vector<ClusterNode> children = {}) {
  return ClusterNode{std::move(members), std::move(children)};
}

// {0..7} -> {0..3},{4..7} -> pairs -> (optional) singletons
ClusterTree balanced8(bool singletons = false) {
  auto pair = [&](ObjectId a) {
    return singletons ? node({a, a + 1}, {node({a}), node({a + 1})}) : node({a, a + 1});
  };
  return ClusterTree(node({0, 1, 2, 3, 4, 5, 6, 7},
                          {node({0, 1, 2, 3}, {pair(0), pair(2)}), node({4, 5, 6, 7}, {pair(4), pair(6)})}));
}

ClusterTree balanced16() {
  std::function<ClusterNode(ObjectId, ObjectId)> build = [&](ObjectId lo, ObjectId hi) {
    std::vector<ObjectId> ids;
    for (ObjectId i = lo; i < hi; ++i) ids.push_back(i);
    if (hi - lo == 1) return node(ids);
    const ObjectId mid = lo + (hi - lo) / 2;
    return node(ids, {build(lo, mid), build(mid, hi)});
  };
  return ClusterTree(build(0, 16));
}

}  // namespace

TEST(ValidateTree, SingleRootIsValid) {
  EXPECT_FALSE(validate_tree(ClusterTree::single_cluster(3), 3).has_value());
}

TEST(ValidateTree, OverlappingChildren) {
  const ClusterTree t(node({0, 1, 2}, {node({0, 1}), node({1, 2})}));
  const auto v = validate_tree(t, 3);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, Violation::Kind::ChildrenOverlap);
}

TEST(ValidateTree, BalancedEightIsValid) {
  const ClusterTree t = balanced8();
  EXPECT_FALSE(validate_tree(t, 8).has_value());
  // Brute-force laminarity: any two clusters are nested or disjoint.
  for (const auto& a : t.nodes()) {
    for (const auto& b : t.nodes()) {
      std::vector<ObjectId> common;
      std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                            std::back_inserter(common));
      EXPECT_TRUE(common.empty() || common == a.members || common == b.members);
    }
  }
}

TEST(ValidateTree, DetectsStructuralErrors) {
  EXPECT_EQ(validate_tree(ClusterTree(node({0, 1, 2})), 4)->kind, Violation::Kind::RootMissingObjects);
  EXPECT_EQ(validate_tree(ClusterTree(node({0, 1, 2, 3}, {node({0, 1}), node({2})})), 4)->kind,
            Violation::Kind::ChildrenDoNotCoverParent);
  EXPECT_EQ(validate_tree(ClusterTree(node({0, 1, 2}, {node({0, 1}), node({})})), 3)->kind,
            Violation::Kind::EmptyChild);
  EXPECT_TRUE(validate_tree(ClusterTree(node({0, 1, 1})), 2).has_value());
}

TEST(ValidateTree, RandomTreesAreValid) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ClusterTree t = oracle::random_tree(1 + seed % 20, seed);
    EXPECT_FALSE(validate_tree(t, t.num_objects()).has_value()) << "seed " << seed;
  }
}

TEST(ClusterTree, CanonicalOrderMakesChildOrderIrrelevant) {
  const ClusterTree a(node({0, 1, 2, 3}, {node({0, 1}), node({2, 3})}));
  const ClusterTree b(node({3, 2, 1, 0}, {node({3, 2}), node({1, 0})}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.family(), b.family());
}

TEST(BalanceFactor, Balanced) {
  EXPECT_DOUBLE_EQ(balance_factor(balanced8(true)), 1.0);
}

TEST(BalanceFactor, SixTwo) {
  const ClusterTree t(node({0, 1, 2, 3, 4, 5, 6, 7}, {node({0, 1, 2, 3, 4, 5}), node({6, 7})}));
  EXPECT_DOUBLE_EQ(balance_factor(t), 3.0);
}

TEST(BalanceFactor, LeafRootHasNoSplits) {
  try {
    balance_factor(ClusterTree::single_cluster(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSplits);
  }
}

TEST(BalanceFactor, MatchesBruteForceOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const ClusterTree t = oracle::random_tree(12, seed, 0.9);
    if (t.root().is_leaf()) continue;
    double expected = 1.0;
    for (const auto& nd : t.nodes()) {
      if (nd.is_leaf()) continue;
      std::size_t lo = SIZE_MAX, hi = 0;
      for (std::size_t c : nd.children) {
        lo = std::min(lo, t.node(c).size());
        hi = std::max(hi, t.node(c).size());
      }
      expected = std::max(expected, static_cast<double>(hi) / static_cast<double>(lo));
    }
    const double got = balance_factor(t);
    EXPECT_DOUBLE_EQ(got, expected);
    EXPECT_GE(got, 1.0);
  }
}

TEST(ClustersOfMinSize, Thresholds) {
  const ClusterTree t = balanced16();
  EXPECT_EQ(clusters_of_min_size(t, 4).size(), 7u);
  EXPECT_TRUE(clusters_of_min_size(t, 17).empty());
  EXPECT_EQ(clusters_of_min_size(t, 1).size(), t.num_nodes());
}

TEST(DeepestPair, ForcedByConstruction) {
  const ClusterTree t(node({0, 1, 2}, {node({0, 1}), node({2})}));
  const PairChoice p = deepest_pair(t, 0, 1, 2);
  ASSERT_TRUE(p.resolved());
  EXPECT_EQ(p.first, 0u);
  EXPECT_EQ(p.second, 1u);
}

TEST(DeepestPair, OneClusterIsUnresolved) {
  EXPECT_FALSE(deepest_pair(ClusterTree::single_cluster(5), 0, 3, 4).resolved());
}

TEST(DeepestPair, BalancedEight) {
  const ClusterTree t = balanced8(true);
  const PairChoice p = deepest_pair(t, 0, 1, 4);
  EXPECT_EQ(p, (PairChoice{PairChoice::Outcome::Pair, 0, 1}));
  EXPECT_EQ(oracle::brute_deepest(t, 0, 1, 4), 0);
}

TEST(DeepestPair, PermutationInvariantAndMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ClusterTree t = oracle::random_tree(10, seed);
    for (ObjectId i = 0; i < 10; ++i) {
      for (ObjectId j = i + 1; j < 10; ++j) {
        for (ObjectId l = j + 1; l < 10; ++l) {
          const PairChoice p = deepest_pair(t, i, j, l);
          EXPECT_EQ(p, deepest_pair(t, l, i, j));
          EXPECT_EQ(p, deepest_pair(t, j, l, i));
          EXPECT_EQ(p, deepest_pair(t, j, i, l));
          const int b = oracle::brute_deepest(t, i, j, l);
          if (b < 0) {
            EXPECT_FALSE(p.resolved());
          } else {
            const ObjectId pairs[3][2] = {{i, j}, {i, l}, {j, l}};
            EXPECT_EQ(p, (PairChoice{PairChoice::Outcome::Pair, pairs[b][0], pairs[b][1]}));
          }
        }
      }
    }
  }
}

TEST(DeepestPair, BinaryTreesResolveTripletsAcrossLeaves) {
  // In a full binary tree with singleton leaves every triplet is resolved.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::function<ClusterNode(std::vector<ObjectId>)> build = [&](std::vector<ObjectId> ids) {
      if (ids.size() == 1) return node(ids);
      std::shuffle(ids.begin(), ids.end(), rng);
      const std::size_t cut = std::uniform_int_distribution<std::size_t>(1, ids.size() - 1)(rng);
      std::vector<ObjectId> a(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cut));
      std::vector<ObjectId> b(ids.begin() + static_cast<std::ptrdiff_t>(cut), ids.end());
      return node(ids, {build(a), build(b)});
    };
    std::vector<ObjectId> all(12);
    std::iota(all.begin(), all.end(), ObjectId{0});
    const ClusterTree t(build(all));
    for (ObjectId i = 0; i < 12; ++i) {
      for (ObjectId j = i + 1; j < 12; ++j) {
        for (ObjectId l = j + 1; l < 12; ++l) EXPECT_TRUE(deepest_pair(t, i, j, l).resolved());
      }
    }
  }
}

TEST(DeepestPair, RejectsRepeatedIds) {
  EXPECT_THROW(deepest_pair(balanced8(), 1, 1, 2), Error);
}

TEST(ClusterTree, LeafOfAndLca) {
  const ClusterTree t = balanced8();
  EXPECT_EQ(t.node(t.leaf_of(5)).members, (std::vector<ObjectId>{4, 5}));
  EXPECT_EQ(t.node(t.lowest_common_ancestor(0, 3)).members, (std::vector<ObjectId>{0, 1, 2, 3}));
  EXPECT_EQ(t.lowest_common_ancestor(0, 7), 0u);
}

TEST(ClusterTree, RootPartition) {
  const FlatPartition p = balanced8().root_partition();
  EXPECT_EQ(p.k, 2);
  EXPECT_EQ(p.labels, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(ClusterTree::single_cluster(3).root_partition().k, 1);
}

TEST(TreeText, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ClusterTree t = oracle::random_tree(15, seed);
    EXPECT_EQ(parse_tree(format_tree(t)), t);
  }
}

TEST(TreeText, RejectsBadDepth) {
  EXPECT_THROW(parse_tree("0\t0,1\n2\t0\n"), Error);
  EXPECT_THROW(parse_tree("0\t0,x\n"), Error);
}

TEST(FlatPartition, CheckRejectsEmptyCluster) {
  FlatPartition p{{0, 0, 0}, 2, false};
  EXPECT_THROW(p.check(), Error);
  p.degenerate = true;
  EXPECT_NO_THROW(p.check());
}
