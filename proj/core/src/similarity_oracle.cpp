#include "ahc/similarity_oracle.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ahc/random.hpp"

namespace ahc {

class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual std::size_t size() const noexcept = 0;
  virtual double value(ObjectId i, ObjectId j) const = 0;
  virtual bool memoize_values() const noexcept = 0;
};

namespace {

class MatrixBackend final : public SimilarityBackend {
 public:
  explicit MatrixBackend(Matrix m) : m_(std::move(m)) {}
  std::size_t size() const noexcept override { return static_cast<std::size_t>(m_.rows()); }
  double value(ObjectId i, ObjectId j) const override { return m_(i, j); }
  bool memoize_values() const noexcept override { return false; }

 private:
  Matrix m_;
};

class KernelBackend final : public SimilarityBackend {
 public:
  KernelBackend(Matrix features, KernelSpec kernel) : features_(std::move(features)), kernel_(kernel) {}
  std::size_t size() const noexcept override { return static_cast<std::size_t>(features_.rows()); }
  double value(ObjectId i, ObjectId j) const override {
    return kernel_value(kernel_, features_.row(i).transpose(), features_.row(j).transpose());
  }
  bool memoize_values() const noexcept override { return true; }

 private:
  Matrix features_;
  KernelSpec kernel_;
};

constexpr std::size_t kShards = 64;

std::uint64_t pair_index(std::uint64_t n, std::uint64_t i, std::uint64_t j) noexcept {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

// Value memo for backends where a similarity is expensive to evaluate.
struct ValueCache {
  struct Shard {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, double> values;
  };
  std::array<Shard, kShards> shards;
};

double kernel_value(const KernelSpec& kernel, const Vector& a, const Vector& b) {
  switch (kernel.kind) {
    case KernelKind::Cosine: {
      const double denom = a.norm() * b.norm();
      return denom > 0.0 ? a.dot(b) / denom : 0.0;
    }
    case KernelKind::Rbf: {
      if (!(kernel.bandwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "RBF bandwidth must be positive");
      return std::exp(-(a - b).squaredNorm() / (2.0 * kernel.bandwidth * kernel.bandwidth));
    }
  }
  return 0.0;
}

SimilarityOracle::SimilarityOracle(std::shared_ptr<const SimilarityBackend> backend)
    : backend_(std::move(backend)), n_(backend_->size()) {
  const std::uint64_t words = (pair_count(n_) + 63) / 64;
  seen_ = std::make_unique<std::atomic<std::uint64_t>[]>(words);
  for (std::uint64_t w = 0; w < words; ++w) seen_[w].store(0, std::memory_order_relaxed);
}

SimilarityOracle::SimilarityOracle(SimilarityOracle&& other) noexcept
    : backend_(std::move(other.backend_)),
      n_(other.n_),
      seen_(std::move(other.seen_)),
      counter_(other.counter_.load()),
      cache_(std::move(other.cache_)) {}

SimilarityOracle& SimilarityOracle::operator=(SimilarityOracle&& other) noexcept {
  backend_ = std::move(other.backend_);
  n_ = other.n_;
  seen_ = std::move(other.seen_);
  counter_.store(other.counter_.load());
  cache_ = std::move(other.cache_);
  return *this;
}

SimilarityOracle::~SimilarityOracle() = default;

SimilarityOracle SimilarityOracle::from_matrix(Matrix similarities) {
  if (similarities.rows() != similarities.cols()) {
    throw Error(ErrorCode::InvalidArgument, "similarity matrix must be square");
  }
  for (Eigen::Index i = 0; i < similarities.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < similarities.cols(); ++j) {
      if (std::abs(similarities(i, j) - similarities(j, i)) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument,
                    "similarity matrix not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return SimilarityOracle(std::make_shared<MatrixBackend>(std::move(similarities)));
}

SimilarityOracle SimilarityOracle::from_features(Matrix features, KernelSpec kernel) {
  if (kernel.kind == KernelKind::Rbf && !(kernel.bandwidth > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "RBF bandwidth must be positive");
  }
  SimilarityOracle oracle(std::make_shared<KernelBackend>(std::move(features), kernel));
  oracle.cache_ = std::make_unique<ValueCache>();
  return oracle;
}

SimilarityOracle SimilarityOracle::fork() const {
  SimilarityOracle copy(backend_);
  if (backend_->memoize_values()) copy.cache_ = std::make_unique<ValueCache>();
  return copy;
}

void SimilarityOracle::check_index(ObjectId i) const {
  if (i >= n_) {
    throw Error(ErrorCode::OutOfRange, "object " + std::to_string(i) + " outside [0, " + std::to_string(n_) + ")");
  }
}

bool SimilarityOracle::mark(ObjectId i, ObjectId j) noexcept {
  const std::uint64_t bit = pair_index(n_, i, j);
  const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
  const std::uint64_t before = seen_[bit / 64].fetch_or(mask, std::memory_order_relaxed);
  if (before & mask) return false;
  counter_.fetch_add(1, std::memory_order_relaxed);
  return true;
}

double SimilarityOracle::query(ObjectId i, ObjectId j) {
  check_index(i);
  check_index(j);
  if (i == j) return backend_->value(i, i);
  if (i > j) std::swap(i, j);
  mark(i, j);
  if (!cache_) return backend_->value(i, j);

  const std::uint64_t key = pair_index(n_, i, j);
  auto& shard = cache_->shards[splitmix64(key) % kShards];
  std::lock_guard lock(shard.mutex);
  auto [it, inserted] = shard.values.try_emplace(key, 0.0);
  if (inserted) it->second = backend_->value(i, j);
  return it->second;
}

Matrix SimilarityOracle::submatrix(std::span<const ObjectId> ids) {
  std::unordered_set<ObjectId> distinct(ids.begin(), ids.end());
  if (distinct.size() != ids.size()) throw Error(ErrorCode::InvalidArgument, "submatrix ids must be distinct");
  const auto m = static_cast<Eigen::Index>(ids.size());
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    out(a, a) = query(ids[a], ids[a]);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const double v = query(ids[a], ids[b]);
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return out;
}

QueryBudgetReport SimilarityOracle::report() const noexcept {
  QueryBudgetReport r;
  r.unique_pairs_queried = unique_pairs();
  const std::uint64_t total = pair_count(n_);
  r.fraction_of_total = total == 0 ? 0.0 : static_cast<double>(r.unique_pairs_queried) / static_cast<double>(total);
  return r;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

bool parse_double(std::string_view token, double& out) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

Matrix read_similarity_matrix(std::istream& in) {
  long long n = -1;
  if (!(in >> n) || n < 0) throw Error(ErrorCode::InvalidArgument, "matrix file: missing or invalid size line");
  Matrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      std::string token;
      double v = 0.0;
      if (!(in >> token) || !parse_double(token, v)) {
        throw Error(ErrorCode::InvalidArgument,
                    "matrix file: bad value at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
      m(i, j) = v;
    }
  }
  for (long long i = 0; i < n; ++i) {
    for (long long j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument,
                    "matrix file: not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return m;
}

Matrix load_similarity_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_similarity_matrix(in);
}

void write_similarity_matrix(std::ostream& out, const Matrix& matrix) {
  out << matrix.rows() << '\n';
  const auto old_precision = out.precision(17);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ' ';
      out << matrix(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Matrix read_feature_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool numeric = true;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      double v = 0.0;
      if (!parse_double(rest.substr(0, comma), v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::InvalidArgument, "feature csv: non-numeric value in row " + std::to_string(rows.size()));
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::InvalidArgument, "feature csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) m(i, c) = rows[i][c];
  }
  return m;
}

Matrix load_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_feature_csv(in);
}

}  // namespace ahc
