#pragma once

#include <cstdint>
#include <vector>

#include "ahc/cluster_tree.hpp"
#include "ahc/common.hpp"

namespace ahc {

struct KMeansOptions {
  std::size_t max_iter = 100;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  FlatPartition partition;
  Matrix centroids;  // k x d
  double wcss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> wcss_log;  // within-cluster sum of squares after each Lloyd iteration (best restart)
  std::size_t best_restart = 0;
};

/// Lloyd's algorithm on the rows of `points` with k-means++ seeding. Restarts use
/// independent streams derived from the seed; the lowest WCSS wins (earliest restart
/// on ties). Empty clusters are refilled with the point farthest from its centroid,
/// so the partition never has an empty cluster.
KMeansResult kmeans_lloyd(const Matrix& points, int k, const KMeansOptions& options = {});

}  // namespace ahc
