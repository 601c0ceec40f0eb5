#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ahc/cluster_tree.hpp"
#include "ahc/flat_clusterers.hpp"
#include "ahc/similarity_oracle.hpp"

namespace ahc {

/// Practical modifications used by heurspec_cluster. All off by default, in which case
/// heurspec_cluster behaves exactly like active_cluster.
struct Heuristics {
  /// Choose k per split from the largest eigengap of the sample Laplacian (k <= ActiveConfig::k).
  bool eigengap_k = false;
  /// Drop sampled objects whose within-sample degree is below median - degree_c * MAD.
  bool degree_filter = false;
  double degree_c = 3.0;
  /// Objects whose best average similarity is below the threshold form new clusters.
  bool new_clusters = false;
  double new_cluster_quantile = 0.05;
  std::optional<double> new_cluster_threshold;  // absolute override of the quantile rule

  static Heuristics all() { return Heuristics{true, true, 3.0, true, 0.05, std::nullopt}; }
};

struct ActiveConfig {
  std::size_t s = 16;  // subsample size per split
  int k = 2;           // clusters per split; the upper bound kmax when eigengap_k is on
  FlatClusterer subroutine = FlatClusterer::spectral();
  std::uint64_t seed = 0;
  Heuristics heuristics;
  /// Continue inside base-case leaves with nonactive_hierarchical.
  bool refine_leaves = false;
  /// Stop splitting below this depth (0 = no limit).
  std::size_t max_depth = 0;
};

/// Everything that happened at one split.
struct SplitTrace {
  std::size_t depth = 0;
  std::vector<ObjectId> cluster;
  std::vector<ObjectId> sample;     // ascending
  std::vector<ObjectId> discarded;  // sampled objects removed by the degree filter
  FlatPartition seed_partition;     // over the kept sample, in ascending id order
  int k = 0;
  std::vector<ObjectId> assigned;             // objects placed by averaging, in processing order
  std::vector<std::vector<double>> scores;    // alpha_j per assigned object (seed clusters only)
  double new_cluster_threshold = 0.0;
  std::vector<std::vector<ObjectId>> children;
  std::uint64_t pairs_requested = 0;  // distinct pairs requested by this split
  std::uint64_t unique_pairs_after = 0;
};

/// Splits in pre-order of the produced tree.
struct SplitLog {
  std::vector<SplitTrace> splits;

  /// One line per split: depth, cluster size, |S|, k, child sizes, pairs requested, unique pairs so far.
  void write_tsv(std::ostream& out) const;
};

class SplitFailure : public Error {
 public:
  SplitFailure(SplitTrace trace, const std::string& cause)
      : Error(ErrorCode::SplitFailed, "split of a cluster of size " + std::to_string(trace.cluster.size()) +
                                          " failed: " + cause),
        trace_(std::move(trace)) {}

  const SplitTrace& trace() const noexcept { return trace_; }

 private:
  SplitTrace trace_;
};

/// Recursive active clustering. Clusters of at most s objects are leaves; larger ones
/// draw s objects uniformly without replacement, cluster the sample with the
/// subroutine, place every other object in the seed cluster with the highest average
/// similarity, and recurse. Each child's random stream is derived from its parent's
/// seed and its index, so results depend only on the oracle contents and the config.
ClusterTree active_cluster(SimilarityOracle& oracle, std::span<const ObjectId> objects, const ActiveConfig& config,
                           SplitLog* log = nullptr);

/// Index of the seed cluster with the largest mean similarity to x (smallest index on ties).
std::size_t assign_by_average(SimilarityOracle& oracle, ObjectId x,
                              std::span<const std::vector<ObjectId>> seed_clusters);

/// active_cluster with the Heuristics in `config` applied. The subroutine must be spectral.
ClusterTree heurspec_cluster(SimilarityOracle& oracle, std::span<const ObjectId> objects,
                             const ActiveConfig& config, SplitLog* log = nullptr);

/// Baseline that clusters the full similarity matrix of every cluster, recursing until
/// clusters have fewer than 2k objects.
ClusterTree nonactive_hierarchical(SimilarityOracle& oracle, std::span<const ObjectId> objects, int k,
                                   const FlatClusterer& subroutine, std::uint64_t seed = 0,
                                   SplitLog* log = nullptr, std::size_t max_depth = 0);

/// Sum over splits of C(|S|, 2) + (|C| - |S|) * |S|: the pairs an active run requests.
std::uint64_t requested_pairs_bound(const SplitLog& log);

}  // namespace ahc
