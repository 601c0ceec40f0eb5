#include "ahc/hbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ahc/random.hpp"

namespace ahc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ClusterNode balanced_node(ObjectId begin, ObjectId end, std::size_t depth_left) {
  std::vector<ObjectId> members(end - begin);
  for (ObjectId i = begin; i < end; ++i) members[i - begin] = i;
  ClusterNode node = ClusterNode::leaf(std::move(members));
  if (depth_left == 0 || end - begin < 2) return node;
  const ObjectId mid = begin + (end - begin + 1) / 2;
  node.children.push_back(balanced_node(begin, mid, depth_left - 1));
  node.children.push_back(balanced_node(mid, end, depth_left - 1));
  return node;
}

}  // namespace

std::vector<Band> even_level_bands(std::size_t depth, double lo, double hi) {
  std::vector<Band> bands;
  bands.reserve(depth + 1);
  for (std::size_t level = 0; level <= depth; ++level) {
    const double t = depth == 0 ? 1.0 : static_cast<double>(level) / static_cast<double>(depth);
    bands.push_back(Band::constant(lo + (hi - lo) * t));
  }
  return bands;
}

ClusterTree balanced_binary_tree(std::size_t n, std::size_t depth) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "balanced tree needs n >= 1");
  return ClusterTree(balanced_node(0, static_cast<ObjectId>(n), depth));
}

ClusterTree planted_tree(const NoisyHbmSpec& spec) {
  if (const auto* shape = std::get_if<BalancedShape>(&spec.shape)) return balanced_binary_tree(spec.n, shape->depth);
  const auto& tree = std::get<ClusterTree>(spec.shape);
  if (auto violation = validate_tree(tree, spec.n)) {
    throw Error(ErrorCode::InvalidArgument, std::string("planted tree invalid: ") + violation->detail);
  }
  return tree;
}

std::vector<Band> resolve_bands(const NoisyHbmSpec& spec, const ClusterTree& tree) {
  std::vector<Band> out(tree.num_nodes());
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    const std::size_t slot = spec.indexing == BandIndexing::ByDepth ? tree.node(i).depth : i;
    if (slot >= spec.bands.size()) {
      throw Error(ErrorCode::InvalidBands, "no band for cluster " + std::to_string(i) + " (slot " +
                                               std::to_string(slot) + ")");
    }
    out[i] = spec.bands[slot];
    if (!(out[i].lo <= out[i].hi) || out[i].lo < 0.0 || out[i].hi > 1.0) {
      throw Error(ErrorCode::InvalidBands, "band of cluster " + std::to_string(i) + " is not a range inside [0, 1]");
    }
  }
  for (std::size_t i = 0; i < tree.num_nodes(); ++i) {
    for (std::size_t c : tree.node(i).children) {
      if (out[c].lo < out[i].hi) {
        throw Error(ErrorCode::InvalidBands, "child cluster " + std::to_string(c) + " lower bound " +
                                                 std::to_string(out[c].lo) + " is below parent cluster " +
                                                 std::to_string(i) + " upper bound " + std::to_string(out[i].hi));
      }
    }
  }
  return out;
}

HbmInstance generate(const NoisyHbmSpec& spec) {
  if (spec.sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  ClusterTree truth = planted_tree(spec);
  const std::vector<Band> bands = resolve_bands(spec, truth);
  const auto n = static_cast<Eigen::Index>(spec.n);

  Rng ideal_rng(derive_seed(spec.seed, 1));
  Rng noise_rng(derive_seed(spec.seed, 2));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix ideal(n, n);
  Matrix noisy(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const std::size_t block = i == j ? truth.leaf_of(static_cast<ObjectId>(i))
                                       : truth.lowest_common_ancestor(static_cast<ObjectId>(i),
                                                                      static_cast<ObjectId>(j));
      const Band& band = bands[block];
      double a = band.mid();
      if (spec.mode == IdealMode::Uniform && i != j) {
        a = std::uniform_real_distribution<double>(band.lo, band.hi)(ideal_rng);
      }
      const double r = spec.sigma * gauss(noise_rng);
      ideal(i, j) = ideal(j, i) = a;
      noisy(i, j) = noisy(j, i) = a + r;
    }
  }

  HbmInstance out{std::move(noisy), std::move(ideal), std::move(truth), 0.0, spec.sigma};
  out.gamma = expected_gap(spec);
  return out;
}

std::optional<Violation> validate_ideal(const Matrix& matrix, const ClusterTree& tree) {
  const std::size_t n = tree.num_objects();
  if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(matrix.rows()) != n) {
    throw Error(ErrorCode::InvalidArgument, "matrix and tree sizes differ");
  }
  const std::size_t nodes = tree.num_nodes();
  std::vector<double> max_cross(nodes, -kInf);
  std::vector<double> min_own(nodes, kInf);  // cross entries of an internal node, within entries of a leaf
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t a = tree.lowest_common_ancestor(static_cast<ObjectId>(i), static_cast<ObjectId>(j));
      const double v = matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      min_own[a] = std::min(min_own[a], v);
      if (!tree.node(a).is_leaf()) max_cross[a] = std::max(max_cross[a], v);
    }
  }
  std::vector<double> min_inside(min_own);
  for (std::size_t i = nodes; i-- > 0;) {
    for (std::size_t c : tree.node(i).children) min_inside[i] = std::min(min_inside[i], min_inside[c]);
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t c : tree.node(i).children) {
      if (max_cross[i] > min_inside[c]) {
        const auto& node = tree.node(i);
        return Violation{Violation::Kind::BlockOrder,
                         "cluster " + std::to_string(i) + " (size " + std::to_string(node.size()) + ", first member " +
                             std::to_string(node.members.front()) + "): cross-child entry " +
                             std::to_string(max_cross[i]) + " exceeds entry " + std::to_string(min_inside[c]) +
                             " inside child cluster " + std::to_string(c)};
      }
    }
  }
  return std::nullopt;
}

double expected_gap(const NoisyHbmSpec& spec) {
  const ClusterTree tree = planted_tree(spec);
  const std::vector<Band> bands = resolve_bands(spec, tree);
  const std::size_t nodes = tree.num_nodes();

  std::vector<double> min_inside(nodes, kInf);
  for (std::size_t i = nodes; i-- > 0;) {
    const auto& node = tree.node(i);
    if (node.size() >= 2) min_inside[i] = bands[i].mid();
    for (std::size_t c : node.children) min_inside[i] = std::min(min_inside[i], min_inside[c]);
  }
  double gamma = kInf;
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto& node = tree.node(i);
    if (node.is_leaf()) continue;
    double within = kInf;
    for (std::size_t c : node.children) within = std::min(within, min_inside[c]);
    if (std::isfinite(within)) gamma = std::min(gamma, within - bands[i].mid());
  }
  return gamma;
}

}  // namespace ahc
