#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ahc/cluster_tree.hpp"
#include "ahc/common.hpp"

namespace ahc {

/// Two-way spectral partition: C1 = {i : v2(i) >= 0} (label 0), C2 = {i : v2(i) < 0}
/// (label 1) using the sign-canonicalized Fiedler vector of L = D - W. If one side comes
/// out empty, splits at the median of v2 instead (ties to C1).
FlatPartition spectral_split(const Matrix& similarities, std::uint64_t seed = 0);

/// k-way spectral partition: rows of eigenvectors 2..k of L, clustered by k-means
/// (5 restarts).
FlatPartition spectral_kway(const Matrix& similarities, int k, std::uint64_t seed = 0);

/// argmax over k in [1, kmax] of lambda_{k+1} - lambda_k, smallest k on ties.
/// `eigenvalues` must be ascending with at least kmax + 1 entries.
int eigengap_select_k(std::span<const double> eigenvalues, int kmax);

/// k-means on the rows of the similarity matrix.
FlatPartition kmeans_rows(const Matrix& similarities, int k, std::size_t max_iter = 100, std::size_t restarts = 5,
                          std::uint64_t seed = 0);

enum class FlatKind { SpectralBinary, SpectralKway, KMeansRows };

const char* to_string(FlatKind kind) noexcept;

/// The pluggable subroutine of the active framework: maps a sampled similarity
/// submatrix and k to a k-way partition. Deterministic in (matrix, k, seed).
struct FlatClusterer {
  FlatKind kind = FlatKind::SpectralBinary;
  std::size_t max_iter = 100;
  std::size_t restarts = 5;

  FlatPartition operator()(const Matrix& similarities, int k, std::uint64_t seed) const;

  static FlatClusterer spectral() { return FlatClusterer{FlatKind::SpectralBinary}; }
  static FlatClusterer kmeans() { return FlatClusterer{FlatKind::KMeansRows}; }
};

/// Agglomerative single linkage in similarity space: repeatedly merges the two clusters
/// joined by the largest similarity; ties go to the lexicographically smallest
/// (i, j) object pair. Produces a full binary dendrogram over `ids` (defaults to 0..m-1).
ClusterTree single_linkage(const Matrix& similarities);
ClusterTree single_linkage(const Matrix& similarities, std::span<const ObjectId> ids);

}  // namespace ahc
