#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"

namespace dtsp {

struct TreeEdge {
  Node a = 0;  // a < b
  Node b = 0;
  double w = 0.0;
};

// A spanning tree with a distinguished root. Children lists are kept sorted
// ascending by node index; a node's position in that list is the bit it owns
// in child-subset masks.
class RootedTree {
 public:
  static constexpr Node kNone = std::numeric_limits<Node>::max();

  // `parent[root] == kNone`, every other entry names the parent.
  // Throws ConfigError unless the links form a single tree.
  static RootedTree from_parents(std::vector<Node> parent) {
    const std::size_t n = parent.size();
    if (n == 0) throw ConfigError("tree must have at least one node");
    RootedTree t;
    t.parent_ = std::move(parent);
    t.children_.assign(n, {});
    std::size_t roots = 0;
    for (Node v = 0; v < n; ++v) {
      const Node p = t.parent_[v];
      if (p == kNone) {
        t.root_ = v;
        ++roots;
      } else if (p >= n || p == v) {
        throw ConfigError("invalid parent link at node " + std::to_string(v));
      } else {
        t.children_[p].push_back(v);
      }
    }
    if (roots != 1) throw ConfigError("tree must have exactly one root");
    // push_back in increasing v already yields sorted children lists.

    t.depth_.assign(n, 0);
    t.subtree_size_.assign(n, 1);
    t.preorder_.reserve(n);
    std::vector<Node> stack{t.root_};
    while (!stack.empty()) {
      const Node u = stack.back();
      stack.pop_back();
      t.preorder_.push_back(u);
      const auto& ch = t.children_[u];
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
        t.depth_[*it] = t.depth_[u] + 1;
        stack.push_back(*it);
      }
    }
    if (t.preorder_.size() != n) throw ConfigError("parent links contain a cycle");
    for (auto it = t.preorder_.rbegin(); it != t.preorder_.rend(); ++it) {
      if (t.parent_[*it] != kNone) t.subtree_size_[t.parent_[*it]] += t.subtree_size_[*it];
    }
    for (const auto& ch : t.children_) t.max_children_ = std::max(t.max_children_, ch.size());
    return t;
  }

  std::size_t size() const noexcept { return parent_.size(); }
  Node root() const noexcept { return root_; }
  std::optional<Node> parent(Node u) const {
    return parent_[u] == kNone ? std::nullopt : std::optional<Node>(parent_[u]);
  }
  const std::vector<Node>& parents() const noexcept { return parent_; }
  std::span<const Node> children(Node u) const noexcept { return children_[u]; }
  std::size_t subtree_size(Node u) const noexcept { return subtree_size_[u]; }
  std::size_t depth(Node u) const noexcept { return depth_[u]; }
  std::size_t max_children() const noexcept { return max_children_; }
  bool is_leaf(Node u) const noexcept { return children_[u].empty(); }

  // Graph degree in the unrooted tree.
  std::size_t degree(Node u) const noexcept {
    return children_[u].size() + (u == root_ ? 0 : 1);
  }

  // Depth-first order, children visited ascending.
  std::span<const Node> preorder() const noexcept { return preorder_; }

  // Children before parents.
  std::vector<Node> postorder() const {
    std::vector<Node> out;
    out.reserve(size());
    std::vector<std::pair<Node, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < children_[u].size()) {
        const Node c = children_[u][next++];
        stack.emplace_back(c, 0);
      } else {
        out.push_back(u);
        stack.pop_back();
      }
    }
    return out;
  }

  bool is_ancestor(Node a, Node b) const noexcept {
    while (depth_[b] > depth_[a]) b = parent_[b];
    return a == b;
  }

  // Position of `child` within children(parent(child)).
  std::size_t child_index(Node child) const {
    const auto& ch = children_[parent_[child]];
    return static_cast<std::size_t>(std::lower_bound(ch.begin(), ch.end(), child) - ch.begin());
  }

  template <DistanceOracle M>
  std::vector<TreeEdge> edges(const M& metric) const {
    std::vector<TreeEdge> out;
    out.reserve(size() > 0 ? size() - 1 : 0);
    for (Node v = 0; v < size(); ++v) {
      if (parent_[v] == kNone) continue;
      const Node p = parent_[v];
      out.push_back(TreeEdge{std::min(v, p), std::max(v, p), metric(v, p)});
    }
    return out;
  }

  friend bool operator==(const RootedTree& x, const RootedTree& y) {
    return x.parent_ == y.parent_;
  }

 private:
  RootedTree() = default;

  Node root_ = 0;
  std::vector<Node> parent_;
  std::vector<std::vector<Node>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> subtree_size_;
  std::vector<Node> preorder_;
  std::size_t max_children_ = 0;
};

// Dense Prim, O(n^2) time and O(n) memory. Among equal-weight candidates the
// edge with the lexicographically smaller (min, max) endpoint pair wins.
template <DistanceOracle M>
std::vector<TreeEdge> minimum_spanning_tree(const M& metric) {
  const std::size_t n = metric.size();
  std::vector<TreeEdge> edges;
  if (n <= 1) return edges;
  edges.reserve(n - 1);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> key(n, inf);
  std::vector<Node> link(n, RootedTree::kNone);
  std::vector<char> in_tree(n, 0);

  auto pair_of = [](Node u, Node v) { return std::make_pair(std::min(u, v), std::max(u, v)); };

  Node current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    Node best = RootedTree::kNone;
    for (Node v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double d = metric(current, v);
      if (d < key[v] || (d == key[v] && pair_of(current, v) < pair_of(link[v], v))) {
        key[v] = d;
        link[v] = current;
      }
      if (best == RootedTree::kNone || key[v] < key[best] ||
          (key[v] == key[best] && pair_of(link[v], v) < pair_of(link[best], best))) {
        best = v;
      }
    }
    in_tree[best] = 1;
    edges.push_back(TreeEdge{std::min(best, link[best]), std::max(best, link[best]), key[best]});
    current = best;
  }
  return edges;
}

inline double tree_weight(std::span<const TreeEdge> edges) {
  double total = 0.0;
  for (const auto& e : edges) total += e.w;
  return total;
}

// Roots an unrooted spanning tree at its lowest-indexed leaf (degree-1 node),
// so the root always has exactly one child when n >= 2.
inline RootedTree root_tree(std::span<const TreeEdge> edges, std::size_t n) {
  if (n == 0) throw ConfigError("root_tree: empty tree");
  if (edges.size() + 1 != n) {
    throw ConfigError("root_tree: a spanning tree on " + std::to_string(n) + " nodes has " +
                      std::to_string(n - 1) + " edges, got " + std::to_string(edges.size()));
  }
  std::vector<std::vector<Node>> adj(n);
  for (const auto& e : edges) {
    if (e.a >= n || e.b >= n || e.a == e.b) throw ConfigError("root_tree: invalid edge");
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  Node root = 0;
  if (n >= 2) {
    root = RootedTree::kNone;
    for (Node v = 0; v < n; ++v) {
      if (adj[v].size() == 1) {
        root = v;
        break;
      }
    }
    if (root == RootedTree::kNone) throw ConfigError("root_tree: edges do not form a tree");
  }

  std::vector<Node> parent(n, RootedTree::kNone);
  std::vector<char> seen(n, 0);
  std::deque<Node> queue{root};
  seen[root] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const Node u = queue.front();
    queue.pop_front();
    for (Node v : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      parent[v] = u;
      ++reached;
      queue.push_back(v);
    }
  }
  if (reached != n) throw ConfigError("root_tree: edges do not form a tree");
  return RootedTree::from_parents(std::move(parent));
}

// Breadth-first degree-increasing pass. Starting below the root's unique
// child r', each dequeued node v first enqueues its children, then, if
// parent(v) would end up with graph degree <= limit after adopting them
// (deg(parent(v)) + |C(v)| <= limit), hands all of v's children to parent(v)
// and becomes a leaf. Degrees are read from the partially transformed tree.
// Every tour conforming to the input tree conforms to the output tree.
inline RootedTree degree_increase(const RootedTree& tree, std::size_t limit) {
  if (limit < 1) throw ConfigError("degree_increase: limit must be >= 1");
  const std::size_t n = tree.size();
  if (n <= 2) return tree;
  const Node root = tree.root();
  if (tree.children(root).size() != 1) {
    throw InvariantError("degree_increase: root must have exactly one child");
  }

  std::vector<Node> parent = tree.parents();
  std::vector<std::vector<Node>> children(n);
  for (Node u = 0; u < n; ++u) {
    const auto ch = tree.children(u);
    children[u].assign(ch.begin(), ch.end());
  }
  auto degree = [&](Node u) { return children[u].size() + (u == root ? 0 : 1); };

  const Node top = children[root].front();
  std::deque<Node> queue(children[top].begin(), children[top].end());
  while (!queue.empty()) {
    const Node v = queue.front();
    queue.pop_front();
    queue.insert(queue.end(), children[v].begin(), children[v].end());
    if (children[v].empty()) continue;
    const Node p = parent[v];
    if (degree(p) + children[v].size() <= limit) {
      for (Node w : children[v]) parent[w] = p;
      children[p].insert(children[p].end(), children[v].begin(), children[v].end());
      children[v].clear();
    }
  }
  return RootedTree::from_parents(std::move(parent));
}

// Number of edges on the tree path between a and b.
inline std::size_t tree_distance(const RootedTree& tree, Node a, Node b) {
  std::size_t dist = 0;
  while (tree.depth(a) > tree.depth(b)) {
    a = *tree.parent(a);
    ++dist;
  }
  while (tree.depth(b) > tree.depth(a)) {
    b = *tree.parent(b);
    ++dist;
  }
  while (a != b) {
    a = *tree.parent(a);
    b = *tree.parent(b);
    dist += 2;
  }
  return dist;
}

// MST rooted at its lowest-indexed leaf.
template <DistanceOracle M>
RootedTree rooted_mst(const M& metric) {
  const auto edges = minimum_spanning_tree(metric);
  return root_tree(edges, metric.size());
}

}  // namespace dtsp
