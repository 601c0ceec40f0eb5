#include <algorithm>
#include <numeric>
#include <tuple>

#include "ahc/flat_clusterers.hpp"

namespace ahc {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void attach(std::size_t child_root, std::size_t new_root) { parent_[child_root] = new_root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ClusterTree single_linkage(const Matrix& similarities, std::span<const ObjectId> ids) {
  const auto m = static_cast<std::size_t>(similarities.rows());
  if (similarities.cols() != similarities.rows() || ids.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "single linkage needs a square matrix matching the id list");
  }
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "single linkage needs at least one object");

  struct Edge {
    double similarity;
    std::uint32_t i;
    std::uint32_t j;
  };
  std::vector<Edge> edges;
  edges.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double s = 0.5 * (similarities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                              similarities(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      edges.push_back({s, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(b.similarity, a.i, a.j) < std::tie(a.similarity, b.i, b.j);
  });

  // Nodes 0..m-1 are singleton leaves; each merge appends one internal node.
  std::vector<ClusterNode> nodes;
  nodes.reserve(2 * m - 1);
  for (std::size_t i = 0; i < m; ++i) nodes.push_back(ClusterNode::leaf({ids[i]}));
  DisjointSets sets(2 * m - 1);

  for (const Edge& e : edges) {
    if (nodes.size() == 2 * m - 1) break;
    const std::size_t a = sets.find(e.i);
    const std::size_t b = sets.find(e.j);
    if (a == b) continue;
    ClusterNode merged;
    merged.members = nodes[a].members;
    merged.members.insert(merged.members.end(), nodes[b].members.begin(), nodes[b].members.end());
    merged.children.push_back(std::move(nodes[a]));
    merged.children.push_back(std::move(nodes[b]));
    const std::size_t index = nodes.size();
    nodes.push_back(std::move(merged));
    sets.attach(a, index);
    sets.attach(b, index);
  }
  return ClusterTree(std::move(nodes.back()));
}

ClusterTree single_linkage(const Matrix& similarities) {
  std::vector<ObjectId> ids(static_cast<std::size_t>(similarities.rows()));
  std::iota(ids.begin(), ids.end(), ObjectId{0});
  return single_linkage(similarities, ids);
}

}  // namespace ahc
