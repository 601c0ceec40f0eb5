#pragma once

#include <cstdint>
#include <optional>

#include "ahc/cluster_tree.hpp"
#include "ahc/similarity_oracle.hpp"

namespace ahc {

enum class UnresolvedPolicy { Skip, CountAsDisagree };

struct OutlierFractionMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  std::uint64_t triplets = 0;  // sampled mode only
  std::uint64_t seed = 0;
  UnresolvedPolicy unresolved = UnresolvedPolicy::Skip;

  static OutlierFractionMode exact() { return {}; }
  static OutlierFractionMode sampled(std::uint64_t m, std::uint64_t seed) {
    return OutlierFractionMode{Kind::Sampled, m, seed, UnresolvedPolicy::Skip};
  }
};

/// Fraction of triplets whose deepest pair is the same in both trees. Triplets that are
/// unresolved in either tree are skipped or counted as disagreements according to the
/// mode. Returns 1.0 when no triplet counts.
double outlier_fraction(const ClusterTree& a, const ClusterTree& b, const OutlierFractionMode& mode = {});

/// ceil(ln n): the default "larger than log n" cluster-size threshold.
std::size_t default_min_size(std::size_t n);

/// Mean over clusters with more than min_size members of the mean cosine between each
/// member's feature row and the cluster's mean feature vector.
double hkm(const ClusterTree& tree, const Matrix& features, std::optional<std::size_t> min_size = std::nullopt);

/// hkm with rows of the full similarity matrix used as features. Queries go through a
/// fork of `oracle`, so the clustering budget is untouched.
double hkm_similarity_rows(const ClusterTree& tree, const SimilarityOracle& oracle,
                           std::optional<std::size_t> min_size = std::nullopt);

/// Mean over clusters with more than min_size members of
/// sum_k K(C_k, C \ C_k) / (2 |C_k|) over the children C_k of C; leaves contribute 0.
/// Queries go through a fork of `oracle`.
double hrc(const ClusterTree& tree, const SimilarityOracle& oracle, std::optional<std::size_t> min_size = std::nullopt);

/// True when the partitions agree up to relabeling.
bool exact_split_recovery(const FlatPartition& predicted, const FlatPartition& truth);

/// Labels renumbered in order of first appearance (clusters sorted by smallest member).
std::vector<int> canonical_labels(const FlatPartition& partition);

struct BoundParams {
  double n = 0;
  double k = 2;
  double eta = 1.0;
  double gamma = 0.5;
  double c1 = 1.0;
  double c_eta = 1.0;
};

/// ceil(max{ln(n)/c1, 4(1+eta)^2 ln n, 24 (1+eta)/gamma^2 ln(4 C_eta k n)}).
std::uint64_t min_sample_size(const BoundParams& p);

}  // namespace ahc
