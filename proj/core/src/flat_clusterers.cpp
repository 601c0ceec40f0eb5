#include "ahc/flat_clusterers.hpp"

#include <algorithm>
#include <numeric>

#include "ahc/kmeans.hpp"
#include "ahc/random.hpp"
#include "ahc/spectral.hpp"

namespace ahc {

const char* to_string(FlatKind kind) noexcept {
  switch (kind) {
    case FlatKind::SpectralBinary: return "spectral_binary";
    case FlatKind::SpectralKway: return "spectral_kway";
    case FlatKind::KMeansRows: return "kmeans_rows";
  }
  return "unknown";
}

FlatPartition spectral_split(const Matrix& similarities, std::uint64_t seed) {
  const Eigen::Index m = similarities.rows();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "spectral split needs at least 2 objects");
  EigenOptions options;
  options.seed = seed;
  const Eigenpair fiedler = smallest_nonconstant_eigvec(laplacian(similarities), options);
  const Vector& v = fiedler.vector;

  FlatPartition part;
  part.k = 2;
  part.labels.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) part.labels[static_cast<std::size_t>(i)] = v(i) >= 0.0 ? 0 : 1;

  const auto sizes = part.cluster_sizes();
  if (sizes[0] == 0 || sizes[1] == 0) {
    std::vector<double> sorted(v.data(), v.data() + m);
    std::nth_element(sorted.begin(), sorted.begin() + m / 2, sorted.end());
    const double median = sorted[static_cast<std::size_t>(m / 2)];
    for (Eigen::Index i = 0; i < m; ++i) part.labels[static_cast<std::size_t>(i)] = v(i) >= median ? 0 : 1;
    if (part.cluster_sizes()[1] == 0) {
      // Everything tied at the median: split by rank, larger values first.
      std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) > v(b); });
      for (std::size_t r = 0; r < order.size(); ++r) {
        part.labels[static_cast<std::size_t>(order[r])] = r < (order.size() + 1) / 2 ? 0 : 1;
      }
    }
  }
  return part;
}

FlatPartition spectral_kway(const Matrix& similarities, int k, std::uint64_t seed) {
  const Eigen::Index m = similarities.rows();
  if (k < 2 || k > m) throw Error(ErrorCode::InvalidArgument, "spectral k-way needs 2 <= k <= m");
  if (k == m) {
    FlatPartition part;
    part.k = k;
    part.labels.resize(static_cast<std::size_t>(m));
    std::iota(part.labels.begin(), part.labels.end(), 0);
    return part;
  }
  EigenOptions options;
  options.seed = seed;
  const EigenResult eig = smallest_eigenpairs(laplacian(similarities), static_cast<std::size_t>(k), options);
  const Matrix embedding = eig.vectors.rightCols(k - 1);

  KMeansOptions km;
  km.restarts = 5;
  km.seed = derive_seed(seed, 0x6b77);
  return kmeans_lloyd(embedding, k, km).partition;
}

int eigengap_select_k(std::span<const double> eigenvalues, int kmax) {
  if (kmax < 1) throw Error(ErrorCode::InvalidArgument, "kmax must be >= 1");
  if (eigenvalues.size() < static_cast<std::size_t>(kmax) + 1) {
    throw Error(ErrorCode::InvalidArgument, "eigengap needs kmax + 1 eigenvalues");
  }
  if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end())) {
    throw Error(ErrorCode::InvalidArgument, "eigenvalues must be ascending");
  }
  int best = 1;
  double best_gap = eigenvalues[1] - eigenvalues[0];
  for (int k = 2; k <= kmax; ++k) {
    const double gap = eigenvalues[static_cast<std::size_t>(k)] - eigenvalues[static_cast<std::size_t>(k) - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

FlatPartition kmeans_rows(const Matrix& similarities, int k, std::size_t max_iter, std::size_t restarts,
                          std::uint64_t seed) {
  if (similarities.rows() != similarities.cols()) {
    throw Error(ErrorCode::InvalidArgument, "similarity matrix must be square");
  }
  KMeansOptions options;
  options.max_iter = max_iter;
  options.restarts = restarts;
  options.seed = seed;
  return kmeans_lloyd(similarities, k, options).partition;
}

FlatPartition FlatClusterer::operator()(const Matrix& similarities, int k, std::uint64_t seed) const {
  switch (kind) {
    case FlatKind::SpectralBinary:
      if (k != 2) throw Error(ErrorCode::InvalidArgument, "binary spectral clusterer needs k = 2");
      return spectral_split(similarities, seed);
    case FlatKind::SpectralKway:
      return k == 2 ? spectral_split(similarities, seed) : spectral_kway(similarities, k, seed);
    case FlatKind::KMeansRows:
      return kmeans_rows(similarities, k, max_iter, restarts, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown flat clusterer");
}

}  // namespace ahc
