#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ahc/cluster_tree.hpp"
#include "ahc/common.hpp"

namespace ahc {

/// Closed similarity range [lo, hi].
struct Band {
  double lo = 0.0;
  double hi = 0.0;

  static Band constant(double v) { return Band{v, v}; }
  double mid() const { return 0.5 * (lo + hi); }
};

enum class IdealMode {
  Constant,  // every entry of a block equals its band midpoint
  Uniform,   // entries drawn uniformly from the band
};

/// Balanced binary hierarchy over contiguous id ranges; a cluster of size c splits
/// into ceil(c/2) and floor(c/2). Splitting stops at `depth` or at singletons.
struct BalancedShape {
  std::size_t depth = 1;
};

/// How `NoisyHbmSpec::bands` is indexed. For an internal cluster the band is the range
/// of similarities between its children; for a leaf it is the within-leaf range.
enum class BandIndexing { ByDepth, ByNode };

struct NoisyHbmSpec {
  std::size_t n = 0;
  std::variant<BalancedShape, ClusterTree> shape = BalancedShape{};
  std::vector<Band> bands;
  BandIndexing indexing = BandIndexing::ByDepth;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  IdealMode mode = IdealMode::Constant;
};

struct HbmInstance {
  Matrix similarities;  // W = A + R
  Matrix ideal;         // A
  ClusterTree truth;
  double gamma = 0.0;
  double sigma = 0.0;
};

/// depth+1 constant bands spaced evenly from `lo` (root split) to `hi` (leaves).
std::vector<Band> even_level_bands(std::size_t depth, double lo = 0.2, double hi = 0.9);

ClusterTree balanced_binary_tree(std::size_t n, std::size_t depth);

/// The planted hierarchy described by the spec's shape.
ClusterTree planted_tree(const NoisyHbmSpec& spec);

/// Band of every node of `tree` (pre-order). Throws InvalidBands when the spec does not
/// cover the tree, a band is outside [0, 1] or inverted, or nesting fails
/// (every child's lower bound must be >= its parent's upper bound).
std::vector<Band> resolve_bands(const NoisyHbmSpec& spec, const ClusterTree& tree);

/// Deterministic in the spec (including seed). Ideal draws and noise draws come from
/// separate streams, so instances that differ only in sigma share the same ideal matrix
/// and the same standardized noise.
HbmInstance generate(const NoisyHbmSpec& spec);

/// Block-nesting check: every cross-child entry at a cluster must be <= every
/// off-diagonal entry inside each of its children.
std::optional<Violation> validate_ideal(const Matrix& matrix, const ClusterTree& tree);

/// min over splits of (smallest expected within-child similarity - expected cross similarity),
/// from band midpoints. +infinity when the planted tree has no split with a within-child pair.
double expected_gap(const NoisyHbmSpec& spec);

}  // namespace ahc
