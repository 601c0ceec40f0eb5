#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ahc/common.hpp"

namespace ahc {

enum class KernelKind { Cosine, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Cosine;
  double bandwidth = 1.0;  // RBF: exp(-|x - y|^2 / (2 * bandwidth^2))
};

struct QueryBudgetReport {
  std::uint64_t unique_pairs_queried = 0;
  double fraction_of_total = 0.0;
};

class SimilarityBackend;
struct ValueCache;

/// The only path to pairwise similarities. Counts each distinct off-diagonal
/// unordered pair once, no matter how often or from how many threads it is queried.
///
/// Copies are not allowed; use fork() to get a fresh counter over the same backend
/// (e.g. for metric evaluation that must not touch the clustering budget).
class SimilarityOracle {
 public:
  /// Throws InvalidArgument unless the matrix is square and symmetric within 1e-9.
  static SimilarityOracle from_matrix(Matrix similarities);
  static SimilarityOracle from_features(Matrix features, KernelSpec kernel);

  SimilarityOracle(SimilarityOracle&&) noexcept;
  SimilarityOracle& operator=(SimilarityOracle&&) noexcept;
  ~SimilarityOracle();

  std::size_t size() const noexcept { return n_; }

  double query(ObjectId i, ObjectId j);
  /// |ids| x |ids| matrix of query(ids[a], ids[b]). Throws on duplicate ids.
  Matrix submatrix(std::span<const ObjectId> ids);

  QueryBudgetReport report() const noexcept;
  std::uint64_t unique_pairs() const noexcept { return counter_.load(std::memory_order_relaxed); }

  SimilarityOracle fork() const;

 private:
  explicit SimilarityOracle(std::shared_ptr<const SimilarityBackend> backend);

  bool mark(ObjectId i, ObjectId j) noexcept;
  void check_index(ObjectId i) const;

  std::shared_ptr<const SimilarityBackend> backend_;
  std::size_t n_ = 0;
  // One bit per unordered off-diagonal pair (row-major upper triangle).
  std::unique_ptr<std::atomic<std::uint64_t>[]> seen_;
  std::atomic<std::uint64_t> counter_{0};
  std::unique_ptr<ValueCache> cache_;  // kernel backends only
};

/// Matrix text format: first line n, then n lines of n whitespace-separated values.
/// Symmetry is checked with absolute tolerance 1e-9.
Matrix read_similarity_matrix(std::istream& in);
Matrix load_similarity_matrix(const std::string& path);
void write_similarity_matrix(std::ostream& out, const Matrix& matrix);

/// Numeric CSV, one row per object. A leading non-numeric row is taken as a header.
Matrix read_feature_csv(std::istream& in);
Matrix load_feature_csv(const std::string& path);

double kernel_value(const KernelSpec& kernel, const Vector& a, const Vector& b);

}  // namespace ahc
