#pragma once

// Ground truth for small instances: conformance checking, exhaustive search
// over conforming and over all Hamiltonian cycles, and the classic
// depth-first double-tree tour.

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"
#include "dtsp/spanning_tree.hpp"
#include "dtsp/tour.hpp"

namespace dtsp {

inline constexpr std::size_t kMaxOracleNodes = 11;

// True iff every subtree T(u) occupies one contiguous arc of the cyclic
// order. O(n^2).
inline bool is_conforming(std::span<const Node> order, const RootedTree& tree) {
  const std::size_t n = tree.size();
  if (order.size() != n) throw ConfigError("is_conforming: tour and tree sizes differ");
  if (n <= 3) return true;

  // Subtrees are contiguous ranges of the preorder.
  std::vector<std::size_t> first(n);
  const auto pre = tree.preorder();
  for (std::size_t i = 0; i < n; ++i) first[pre[i]] = i;

  for (Node u = 0; u < n; ++u) {
    const std::size_t size = tree.subtree_size(u);
    if (size == 1 || size == n) continue;
    const std::size_t lo = first[u];
    auto inside = [&](Node v) { return first[v] - lo < size; };
    std::size_t exits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (inside(order[i]) && !inside(order[(i + 1) % n])) ++exits;
    }
    if (exits != 1) return false;
  }
  return true;
}

inline bool is_conforming(const Tour& tour, const RootedTree& tree) {
  return is_conforming(tour.order, tree);
}

namespace detail {

// Visits every Hamiltonian cycle once: node 0 first, reflections removed by
// order[1] < order[n-1]. Cycles arrive in lexicographic order.
template <class Visit>
void for_each_cycle(std::size_t n, Visit&& visit) {
  std::vector<Node> order(n);
  std::iota(order.begin(), order.end(), Node{0});
  if (n <= 2) {
    visit(std::span<const Node>(order));
    return;
  }
  do {
    if (order[1] < order[n - 1]) visit(std::span<const Node>(order));
  } while (std::next_permutation(order.begin() + 1, order.end()));
}

template <DistanceOracle M, class Accept>
Tour best_cycle(const M& metric, Accept&& accept, const char* who) {
  const std::size_t n = metric.size();
  if (n > kMaxOracleNodes) {
    throw GuardError(std::string(who) + ": exhaustive search is limited to " +
                     std::to_string(kMaxOracleNodes) + " nodes");
  }
  Tour best;
  best.weight = std::numeric_limits<double>::infinity();
  for_each_cycle(n, [&](std::span<const Node> order) {
    if (!accept(order)) return;
    const double w = cycle_weight(metric, order);
    if (w < best.weight) best = Tour{{order.begin(), order.end()}, w};
  });
  if (best.order.empty()) throw InvariantError(std::string(who) + ": no admissible cycle");
  return best;
}

}  // namespace detail

// Minimum-weight tour among those conforming to the tree, by enumeration.
template <DistanceOracle M>
Tour enumerate_conforming_min(const M& metric, const RootedTree& tree) {
  if (tree.size() != metric.size()) throw ConfigError("tree and instance sizes differ");
  return detail::best_cycle(
      metric, [&](std::span<const Node> order) { return is_conforming(order, tree); },
      "enumerate_conforming_min");
}

// Globally optimal tour by enumeration.
template <DistanceOracle M>
Tour brute_force_optimal(const M& metric) {
  return detail::best_cycle(metric, [](std::span<const Node>) { return true; },
                            "brute_force_optimal");
}

// Preorder walk of the tree (children ascending): the textbook double-tree
// shortcut.
template <DistanceOracle M>
Tour depth_first_shortcut(const M& metric, const RootedTree& tree) {
  const auto pre = tree.preorder();
  return make_tour(metric, std::vector<Node>(pre.begin(), pre.end()));
}

}  // namespace dtsp
