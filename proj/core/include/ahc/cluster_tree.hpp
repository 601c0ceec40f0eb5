#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ahc/common.hpp"

namespace ahc {

/// Construction-time form of a hierarchy. Algorithms build these recursively and
/// hand the root to ClusterTree, which flattens and canonicalizes it.
struct ClusterNode {
  std::vector<ObjectId> members;
  std::vector<ClusterNode> children;

  static ClusterNode leaf(std::vector<ObjectId> members) { return ClusterNode{std::move(members), {}}; }
};

/// k-way labeling of m local indices.
struct FlatPartition {
  std::vector<int> labels;
  int k = 0;
  bool degenerate = false;  // set when some cluster id in [0, k) is allowed to be empty

  std::size_t size() const { return labels.size(); }
  std::vector<std::size_t> cluster_sizes() const;
  /// Local indices grouped by label, in ascending order within each group.
  std::vector<std::vector<std::size_t>> groups() const;
  /// Throws InvalidArgument when a label is out of range or (non-degenerate) a cluster is empty.
  void check() const;
};

/// Outcome of a structural check. Empty optional means the structure is valid.
struct Violation {
  enum class Kind {
    RootMissingObjects,
    ObjectOutOfRange,
    DuplicateMember,
    EmptyChild,
    ChildrenOverlap,
    ChildrenDoNotCoverParent,
    ChildNotSubset,
    BlockOrder,
  };
  Kind kind;
  std::string detail;
};

const char* to_string(Violation::Kind kind) noexcept;

/// Rooted hierarchy over object ids. Immutable; nodes are stored in pre-order with
/// children ordered by their smallest member, so two trees with the same laminar
/// family have identical node arrays.
class ClusterTree {
 public:
  struct Node {
    std::vector<ObjectId> members;  // sorted ascending
    std::vector<std::size_t> children;
    std::size_t parent = npos;
    std::size_t depth = 0;

    bool is_leaf() const { return children.empty(); }
    std::size_t size() const { return members.size(); }
  };

  explicit ClusterTree(ClusterNode root);

  /// Tree with one cluster holding objects 0..n-1.
  static ClusterTree single_cluster(std::size_t n);

  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(std::size_t index) const { return nodes_.at(index); }
  const Node& root() const { return nodes_.front(); }
  std::size_t num_objects() const { return nodes_.front().members.size(); }
  std::size_t num_nodes() const { return nodes_.size(); }

  /// Leaf node containing `id`; npos when the object is not in any leaf.
  std::size_t leaf_of(ObjectId id) const;
  /// Deepest node containing both objects.
  std::size_t lowest_common_ancestor(ObjectId a, ObjectId b) const;

  /// The laminar family as a set of member lists.
  std::set<std::vector<ObjectId>> family() const;
  bool contains_cluster(std::span<const ObjectId> sorted_members) const;

  /// Root split as a flat partition over objects 0..n-1 (k = number of root children,
  /// k = 1 when the root is a leaf).
  FlatPartition root_partition() const;

  ClusterNode to_node(std::size_t index = 0) const;

  friend bool operator==(const ClusterTree& a, const ClusterTree& b);

 private:
  ClusterTree() = default;

  std::vector<Node> nodes_;
  std::vector<std::size_t> leaf_of_;
};

std::optional<Violation> validate_tree(const ClusterTree& tree, std::size_t n);

/// max over splits of (largest child / smallest child). Throws NoSplits when the root is a leaf.
double balance_factor(const ClusterTree& tree);

/// Node indices (pre-order) of all clusters with at least `min_size` members.
std::vector<std::size_t> clusters_of_min_size(const ClusterTree& tree, std::size_t min_size);

struct PairChoice {
  enum class Outcome { Pair, Unresolved };
  Outcome outcome = Outcome::Unresolved;
  ObjectId first = 0;   // smaller id of the deeper pair
  ObjectId second = 0;  // larger id

  bool resolved() const { return outcome == Outcome::Pair; }
  friend bool operator==(const PairChoice&, const PairChoice&) = default;
};

/// Which of the three pairs in the triplet is grouped strictly deeper than the third
/// object. Unresolved when all three first meet in the same cluster.
PairChoice deepest_pair(const ClusterTree& tree, ObjectId i, ObjectId j, ObjectId l);

/// Text form: one cluster per line, `depth<TAB>id,id,...`, pre-order.
void write_tree(std::ostream& out, const ClusterTree& tree);
std::string format_tree(const ClusterTree& tree);
ClusterTree read_tree(std::istream& in);
ClusterTree parse_tree(const std::string& text);

}  // namespace ahc
