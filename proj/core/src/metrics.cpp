#include "ahc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ahc/random.hpp"

namespace ahc {

namespace {

// depth[i * n + j] = depth of the lowest common ancestor of i and j.
std::vector<std::uint16_t> lca_depths(const ClusterTree& tree) {
  const std::size_t n = tree.num_objects();
  std::vector<std::uint16_t> depth(n * n, 0);
  // Walk every node; pairs split between two different children meet at this node.
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) {
      for (ObjectId a : node.members) {
        for (ObjectId b : node.members) depth[a * n + b] = static_cast<std::uint16_t>(node.depth);
      }
      continue;
    }
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      for (std::size_t d = c + 1; d < node.children.size(); ++d) {
        for (ObjectId a : tree.node(node.children[c]).members) {
          for (ObjectId b : tree.node(node.children[d]).members) {
            depth[a * n + b] = depth[b * n + a] = static_cast<std::uint16_t>(node.depth);
          }
        }
      }
    }
  }
  return depth;
}

// 0: (i,j), 1: (i,l), 2: (j,l), -1: unresolved.
int deepest(std::uint16_t dij, std::uint16_t dil, std::uint16_t djl) {
  if (dij > dil && dij > djl) return 0;
  if (dil > dij && dil > djl) return 1;
  if (djl > dij && djl > dil) return 2;
  return -1;
}

struct Tally {
  std::uint64_t agree = 0;
  std::uint64_t counted = 0;

  void add(bool resolved_both, bool same, UnresolvedPolicy policy) {
    if (!resolved_both) {
      if (policy == UnresolvedPolicy::CountAsDisagree) ++counted;
      return;
    }
    ++counted;
    if (same) ++agree;
  }

  double value() const { return counted == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(counted); }
};

std::vector<std::size_t> qualifying(const ClusterTree& tree, std::optional<std::size_t> min_size) {
  const std::size_t t = min_size.value_or(default_min_size(tree.num_objects()));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    if (tree.node(i).size() > t) out.push_back(i);
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoQualifyingClusters, "no cluster has more than " + std::to_string(t) + " members");
  }
  return out;
}

}  // namespace

double outlier_fraction(const ClusterTree& a, const ClusterTree& b, const OutlierFractionMode& mode) {
  const std::size_t n = a.num_objects();
  if (b.num_objects() != n) throw Error(ErrorCode::InvalidArgument, "trees cover different object counts");
  for (const ClusterTree* t : {&a, &b}) {
    const auto& root = t->root().members;
    if (!root.empty() && root.back() != n - 1) {
      throw Error(ErrorCode::InvalidArgument, "trees must cover objects 0..n-1");
    }
  }
  Tally tally;
  if (mode.kind == OutlierFractionMode::Kind::Exact) {
    const auto da = lca_depths(a);
    const auto db = lca_depths(b);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t l = j + 1; l < n; ++l) {
          const int pa = deepest(da[i * n + j], da[i * n + l], da[j * n + l]);
          const int pb = deepest(db[i * n + j], db[i * n + l], db[j * n + l]);
          tally.add(pa >= 0 && pb >= 0, pa == pb, mode.unresolved);
        }
      }
    }
    return tally.value();
  }

  if (mode.triplets < 1) throw Error(ErrorCode::InvalidArgument, "sampled mode needs at least one triplet");
  if (n < 3) return 1.0;
  Rng rng(mode.seed);
  std::uniform_int_distribution<ObjectId> pick(0, static_cast<ObjectId>(n - 1));
  for (std::uint64_t t = 0; t < mode.triplets; ++t) {
    ObjectId i = pick(rng);
    ObjectId j = pick(rng);
    ObjectId l = pick(rng);
    while (j == i) j = pick(rng);
    while (l == i || l == j) l = pick(rng);
    const PairChoice pa = deepest_pair(a, i, j, l);
    const PairChoice pb = deepest_pair(b, i, j, l);
    tally.add(pa.resolved() && pb.resolved(), pa == pb, mode.unresolved);
  }
  return tally.value();
}

std::size_t default_min_size(std::size_t n) {
  return n < 2 ? 0 : static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
}

double hkm(const ClusterTree& tree, const Matrix& features, std::optional<std::size_t> min_size) {
  if (static_cast<std::size_t>(features.rows()) < tree.num_objects()) {
    throw Error(ErrorCode::InvalidArgument, "need one feature row per object");
  }
  const auto clusters = qualifying(tree, min_size);
  double total = 0.0;
  for (std::size_t c : clusters) {
    const auto& members = tree.node(c).members;
    Vector center = Vector::Zero(features.cols());
    for (ObjectId id : members) center += features.row(id).transpose();
    center /= static_cast<double>(members.size());
    const double cnorm = center.norm();
    if (cnorm == 0.0) throw Error(ErrorCode::DegenerateFeatures, "cluster center has zero norm");
    double sum = 0.0;
    for (ObjectId id : members) {
      const double xnorm = features.row(id).norm();
      if (xnorm == 0.0) throw Error(ErrorCode::DegenerateFeatures, "object " + std::to_string(id) + " has zero norm");
      sum += features.row(id).dot(center) / (xnorm * cnorm);
    }
    total += sum / static_cast<double>(members.size());
  }
  return total / static_cast<double>(clusters.size());
}

double hkm_similarity_rows(const ClusterTree& tree, const SimilarityOracle& oracle, std::optional<std::size_t> min_size) {
  SimilarityOracle eval = oracle.fork();
  const auto n = static_cast<Eigen::Index>(eval.size());
  Matrix rows(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      rows(i, j) = rows(j, i) = eval.query(static_cast<ObjectId>(i), static_cast<ObjectId>(j));
    }
  }
  return hkm(tree, rows, min_size);
}

double hrc(const ClusterTree& tree, const SimilarityOracle& oracle, std::optional<std::size_t> min_size) {
  SimilarityOracle eval = oracle.fork();
  const auto clusters = qualifying(tree, min_size);
  double total = 0.0;
  for (std::size_t c : clusters) {
    const auto& node = tree.node(c);
    for (std::size_t child : node.children) {
      const auto& inside = tree.node(child).members;
      double cut = 0.0;
      for (ObjectId x : node.members) {
        if (std::binary_search(inside.begin(), inside.end(), x)) continue;
        for (ObjectId y : inside) cut += eval.query(x, y);
      }
      total += cut / (2.0 * static_cast<double>(inside.size()));
    }
  }
  return total / static_cast<double>(clusters.size());
}

std::vector<int> canonical_labels(const FlatPartition& partition) {
  std::vector<int> map(static_cast<std::size_t>(std::max(partition.k, 0)), -1);
  std::vector<int> out(partition.size());
  int next = 0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const int l = partition.labels[i];
    if (l < 0 || l >= partition.k) throw Error(ErrorCode::InvalidArgument, "label out of range");
    int& m = map[static_cast<std::size_t>(l)];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

bool exact_split_recovery(const FlatPartition& predicted, const FlatPartition& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::InvalidArgument, "partition sizes differ");
  return canonical_labels(predicted) == canonical_labels(truth);
}

std::uint64_t min_sample_size(const BoundParams& p) {
  if (!(p.gamma > 0.0) || p.gamma > 1.0) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1]");
  if (p.eta < 1.0) throw Error(ErrorCode::InvalidArgument, "eta must be >= 1");
  if (!(p.n >= 1.0) || !(p.k >= 1.0) || !(p.c1 > 0.0) || !(p.c_eta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "n, k, c1 and C_eta must be positive");
  }
  const double ln_n = std::log(p.n);
  const double t1 = ln_n / p.c1;
  const double t2 = 4.0 * (1.0 + p.eta) * (1.0 + p.eta) * ln_n;
  const double t3 = 24.0 * (1.0 + p.eta) / (p.gamma * p.gamma) * std::log(4.0 * p.c_eta * p.k * p.n);
  return static_cast<std::uint64_t>(std::ceil(std::max({t1, t2, t3})));
}

}  // namespace ahc
