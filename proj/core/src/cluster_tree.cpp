#include "ahc/cluster_tree.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace ahc {

const char* to_string(Violation::Kind kind) noexcept {
  switch (kind) {
    case Violation::Kind::RootMissingObjects: return "root does not contain exactly the objects 0..n-1";
    case Violation::Kind::ObjectOutOfRange: return "object id out of range";
    case Violation::Kind::DuplicateMember: return "duplicate member in cluster";
    case Violation::Kind::EmptyChild: return "empty child cluster";
    case Violation::Kind::ChildrenOverlap: return "children overlap";
    case Violation::Kind::ChildrenDoNotCoverParent: return "children do not cover parent";
    case Violation::Kind::ChildNotSubset: return "child is not a subset of its parent";
    case Violation::Kind::BlockOrder: return "block nesting order violated";
  }
  return "unknown violation";
}

// ---------------------------------------------------------------------------
// FlatPartition

std::vector<std::size_t> FlatPartition::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int label : labels) {
    if (label >= 0 && label < k) ++sizes[static_cast<std::size_t>(label)];
  }
  return sizes;
}

std::vector<std::vector<std::size_t>> FlatPartition::groups() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0 && labels[i] < k) out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

void FlatPartition::check() const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "partition needs k >= 1");
  for (int label : labels) {
    if (label < 0 || label >= k) throw Error(ErrorCode::InvalidArgument, "partition label out of range");
  }
  if (!degenerate) {
    for (std::size_t size : cluster_sizes()) {
      if (size == 0) throw Error(ErrorCode::InvalidArgument, "partition has an empty cluster");
    }
  }
}

// ---------------------------------------------------------------------------
// ClusterTree

namespace {

ObjectId smallest_member(const ClusterNode& node) {
  return node.members.empty() ? std::numeric_limits<ObjectId>::max()
                              : *std::min_element(node.members.begin(), node.members.end());
}

}  // namespace

ClusterTree::ClusterTree(ClusterNode root) {
  struct Pending {
    ClusterNode* node;
    std::size_t parent;
    std::size_t depth;
  };
  std::vector<Pending> stack{{&root, npos, 0}};
  while (!stack.empty()) {
    Pending cur = stack.back();
    stack.pop_back();

    const std::size_t index = nodes_.size();
    Node& out = nodes_.emplace_back();
    out.members = std::move(cur.node->members);
    std::sort(out.members.begin(), out.members.end());
    out.parent = cur.parent;
    out.depth = cur.depth;
    if (cur.parent != npos) nodes_[cur.parent].children.push_back(index);

    auto& kids = cur.node->children;
    std::vector<ClusterNode*> ordered;
    ordered.reserve(kids.size());
    for (auto& kid : kids) ordered.push_back(&kid);
    std::stable_sort(ordered.begin(), ordered.end(), [](const ClusterNode* a, const ClusterNode* b) {
      return smallest_member(*a) < smallest_member(*b);
    });
    for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) stack.push_back({*it, index, cur.depth + 1});
  }

  ObjectId max_id = 0;
  for (const Node& node : nodes_) {
    if (!node.members.empty()) max_id = std::max(max_id, node.members.back());
  }
  leaf_of_.assign(static_cast<std::size_t>(max_id) + 1, npos);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf()) continue;
    for (ObjectId id : nodes_[i].members) leaf_of_[id] = i;
  }
}

ClusterTree ClusterTree::single_cluster(std::size_t n) {
  std::vector<ObjectId> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<ObjectId>(i);
  return ClusterTree(ClusterNode::leaf(std::move(all)));
}

std::size_t ClusterTree::leaf_of(ObjectId id) const { return id < leaf_of_.size() ? leaf_of_[id] : npos; }

std::size_t ClusterTree::lowest_common_ancestor(ObjectId a, ObjectId b) const {
  std::size_t la = leaf_of(a);
  std::size_t lb = leaf_of(b);
  if (la == npos || lb == npos) throw Error(ErrorCode::OutOfRange, "object is not in the tree");
  while (la != lb) {
    if (nodes_[la].depth >= nodes_[lb].depth) {
      la = nodes_[la].parent;
    } else {
      lb = nodes_[lb].parent;
    }
    if (la == npos || lb == npos) throw Error(ErrorCode::InvalidArgument, "tree has no common ancestor");
  }
  return la;
}

std::set<std::vector<ObjectId>> ClusterTree::family() const {
  std::set<std::vector<ObjectId>> out;
  for (const Node& node : nodes_) out.insert(node.members);
  return out;
}

bool ClusterTree::contains_cluster(std::span<const ObjectId> sorted_members) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& node) {
    return std::equal(node.members.begin(), node.members.end(), sorted_members.begin(), sorted_members.end());
  });
}

FlatPartition ClusterTree::root_partition() const {
  const Node& r = root();
  FlatPartition part;
  const std::size_t n = r.members.empty() ? 0 : static_cast<std::size_t>(r.members.back()) + 1;
  part.labels.assign(n, 0);
  if (r.is_leaf()) {
    part.k = 1;
    return part;
  }
  part.k = static_cast<int>(r.children.size());
  for (std::size_t c = 0; c < r.children.size(); ++c) {
    for (ObjectId id : nodes_[r.children[c]].members) part.labels[id] = static_cast<int>(c);
  }
  return part;
}

ClusterNode ClusterTree::to_node(std::size_t index) const {
  const Node& src = nodes_.at(index);
  ClusterNode out{src.members, {}};
  out.children.reserve(src.children.size());
  for (std::size_t child : src.children) out.children.push_back(to_node(child));
  return out;
}

bool operator==(const ClusterTree& a, const ClusterTree& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    if (a.nodes_[i].members != b.nodes_[i].members || a.nodes_[i].children != b.nodes_[i].children) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Checks and queries

std::optional<Violation> validate_tree(const ClusterTree& tree, std::size_t n) {
  const auto nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& members = nodes[i].members;
    if (!members.empty() && members.back() >= n) {
      return Violation{Violation::Kind::ObjectOutOfRange,
                       "cluster " + std::to_string(i) + " contains id " + std::to_string(members.back())};
    }
    auto dup = std::adjacent_find(members.begin(), members.end());
    if (dup != members.end()) {
      return Violation{Violation::Kind::DuplicateMember,
                       "cluster " + std::to_string(i) + " repeats id " + std::to_string(*dup)};
    }
  }
  if (tree.root().size() != n) {
    return Violation{Violation::Kind::RootMissingObjects,
                     "root has " + std::to_string(tree.root().size()) + " members, expected " + std::to_string(n)};
  }

  std::vector<std::size_t> in_parent(n, npos);
  std::vector<std::size_t> claimed_by(n, npos);
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    const auto& parent = nodes[p];
    if (parent.is_leaf()) continue;
    for (ObjectId id : parent.members) in_parent[id] = p;
    std::size_t covered = 0;
    for (std::size_t c : parent.children) {
      const auto& child = nodes[c];
      if (child.members.empty()) {
        return Violation{Violation::Kind::EmptyChild, "cluster " + std::to_string(p) + " has an empty child"};
      }
      for (ObjectId id : child.members) {
        if (in_parent[id] != p) {
          return Violation{Violation::Kind::ChildNotSubset,
                           "id " + std::to_string(id) + " of cluster " + std::to_string(c) +
                               " is not in parent cluster " + std::to_string(p)};
        }
        if (claimed_by[id] == p) {
          return Violation{Violation::Kind::ChildrenOverlap,
                           "id " + std::to_string(id) + " appears in two children of cluster " + std::to_string(p)};
        }
        claimed_by[id] = p;
      }
      covered += child.members.size();
    }
    if (covered != parent.members.size()) {
      return Violation{Violation::Kind::ChildrenDoNotCoverParent,
                       "children of cluster " + std::to_string(p) + " cover " + std::to_string(covered) + " of " +
                           std::to_string(parent.members.size()) + " members"};
    }
  }
  return std::nullopt;
}

double balance_factor(const ClusterTree& tree) {
  double worst = 0.0;
  bool any_split = false;
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) continue;
    any_split = true;
    std::size_t largest = 0;
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (std::size_t c : node.children) {
      largest = std::max(largest, tree.node(c).size());
      smallest = std::min(smallest, tree.node(c).size());
    }
    const double ratio = smallest == 0 ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(largest) / static_cast<double>(smallest);
    worst = std::max(worst, ratio);
  }
  if (!any_split) throw Error(ErrorCode::NoSplits, "tree has no non-leaf cluster");
  return worst;
}

std::vector<std::size_t> clusters_of_min_size(const ClusterTree& tree, std::size_t min_size) {
  std::vector<std::size_t> out;
  const auto nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].size() >= min_size) out.push_back(i);
  }
  return out;
}

PairChoice deepest_pair(const ClusterTree& tree, ObjectId i, ObjectId j, ObjectId l) {
  if (i == j || i == l || j == l) throw Error(ErrorCode::InvalidArgument, "triplet ids must be distinct");
  for (ObjectId id : {i, j, l}) {
    if (tree.leaf_of(id) == npos) throw Error(ErrorCode::OutOfRange, "id " + std::to_string(id) + " not in tree");
  }
  const std::size_t dij = tree.node(tree.lowest_common_ancestor(i, j)).depth;
  const std::size_t dil = tree.node(tree.lowest_common_ancestor(i, l)).depth;
  const std::size_t djl = tree.node(tree.lowest_common_ancestor(j, l)).depth;

  auto make = [](ObjectId a, ObjectId b) {
    return PairChoice{PairChoice::Outcome::Pair, std::min(a, b), std::max(a, b)};
  };
  if (dij > dil && dij > djl) return make(i, j);
  if (dil > dij && dil > djl) return make(i, l);
  if (djl > dij && djl > dil) return make(j, l);
  return PairChoice{};
}

// ---------------------------------------------------------------------------
// Text format

void write_tree(std::ostream& out, const ClusterTree& tree) {
  for (const auto& node : tree.nodes()) {
    out << node.depth << '\t';
    for (std::size_t m = 0; m < node.members.size(); ++m) {
      if (m) out << ',';
      out << node.members[m];
    }
    out << '\n';
  }
}

std::string format_tree(const ClusterTree& tree) {
  std::ostringstream out;
  write_tree(out, tree);
  return out.str();
}

ClusterTree read_tree(std::istream& in) {
  struct Line {
    std::size_t depth;
    std::vector<ObjectId> members;
    std::vector<std::size_t> children;
  };
  std::vector<Line> lines;
  std::vector<std::size_t> open;  // open[d] = index of the latest node at depth d
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    const auto tab = text.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "tree line " + std::to_string(line_no) + ": missing tab");
    }
    Line line{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + tab, line.depth);
    if (ec != std::errc{} || ptr != text.data() + tab) {
      throw Error(ErrorCode::InvalidArgument, "tree line " + std::to_string(line_no) + ": bad depth");
    }
    std::size_t pos = tab + 1;
    while (pos < text.size()) {
      std::size_t end = text.find(',', pos);
      if (end == std::string::npos) end = text.size();
      ObjectId id = 0;
      auto [p, e] = std::from_chars(text.data() + pos, text.data() + end, id);
      if (e != std::errc{} || p != text.data() + end) {
        throw Error(ErrorCode::InvalidArgument, "tree line " + std::to_string(line_no) + ": bad member id");
      }
      line.members.push_back(id);
      pos = end + 1;
    }

    if (lines.empty()) {
      if (line.depth != 0) throw Error(ErrorCode::InvalidArgument, "first tree line must have depth 0");
    } else if (line.depth == 0 || line.depth > open.size()) {
      throw Error(ErrorCode::InvalidArgument, "tree line " + std::to_string(line_no) + ": unexpected depth");
    }
    const std::size_t index = lines.size();
    open.resize(line.depth);
    if (line.depth > 0) lines[open.back()].children.push_back(index);
    open.push_back(index);
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "empty tree file");

  // Children always follow their parent, so building back to front sees every child first.
  std::vector<ClusterNode> built(lines.size());
  for (std::size_t i = lines.size(); i-- > 0;) {
    built[i].members = std::move(lines[i].members);
    for (std::size_t c : lines[i].children) built[i].children.push_back(std::move(built[c]));
  }
  return ClusterTree(std::move(built[0]));
}

ClusterTree parse_tree(const std::string& text) {
  std::istringstream in(text);
  return read_tree(in);
}

}  // namespace ahc
