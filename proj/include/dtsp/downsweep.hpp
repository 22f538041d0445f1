#pragma once

// Top-down reconstruction of the tour found by the upsweep.
//
// The path P^u_V(a) follows the tree path u = v_0, v_1, ..., v_k = a. It
// first sweeps u + T(V \ v_1); then at every inner node v_i it sweeps
// v_i + T(W_i) ending at v_i and v_i + T(C(v_i) \ v_{i+1} \ W_i) starting at
// v_i; finally it sweeps T(a) ending at a. The choice of the W_i is a
// shortest path through a layered graph whose arcs are bipartition weights.
// Each arc pins one edge (x, y) of the path and leaves two smaller sweeps to
// reconstruct the same way.

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"
#include "dtsp/spanning_tree.hpp"
#include "dtsp/tour.hpp"
#include "dtsp/upsweep.hpp"

namespace dtsp {

// Layers 0 and last hold the source and the sink; consecutive layers are
// fully connected. arc(i, from, to) returns the weight of the arc from vertex
// `from` of layer i to vertex `to` of layer i + 1, or nullopt if it is absent.
template <class ArcFn>
struct LayeredGraph {
  std::vector<std::size_t> layer_sizes;
  ArcFn arc;
};

template <class ArcFn>
LayeredGraph(std::vector<std::size_t>, ArcFn) -> LayeredGraph<ArcFn>;

struct LayeredPath {
  std::vector<std::size_t> vertices;  // one per layer
  double weight = 0.0;
};

// Exact shortest source-to-sink path. Relaxation runs from the sink
// backwards, so the weight of a layer-i vertex is arc + (rest of the path),
// the same association the upsweep uses. Among equal-weight paths the
// lexicographically smallest vertex sequence wins.
template <class ArcFn>
LayeredPath layered_shortest_path(const LayeredGraph<ArcFn>& g) {
  const std::size_t layers = g.layer_sizes.size();
  if (layers < 2 || g.layer_sizes.front() != 1 || g.layer_sizes.back() != 1) {
    throw ConfigError("layered graph needs a single-vertex source and sink");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(layers);
  std::vector<std::vector<std::size_t>> next(layers);
  cost.back().assign(1, 0.0);
  for (std::size_t i = layers - 1; i-- > 0;) {
    cost[i].assign(g.layer_sizes[i], inf);
    next[i].assign(g.layer_sizes[i], 0);
    for (std::size_t from = 0; from < g.layer_sizes[i]; ++from) {
      for (std::size_t to = 0; to < g.layer_sizes[i + 1]; ++to) {
        if (cost[i + 1][to] == inf) continue;
        const std::optional<double> w = g.arc(i, from, to);
        if (!w) continue;
        const double total = *w + cost[i + 1][to];
        if (total < cost[i][from]) {
          cost[i][from] = total;
          next[i][from] = to;
        }
      }
    }
  }
  if (cost[0][0] == inf) throw InvariantError("layered graph: sink unreachable from source");

  LayeredPath path;
  path.weight = cost[0][0];
  std::size_t v = 0;
  for (std::size_t i = 0; i < layers; ++i) {
    path.vertices.push_back(v);
    if (i + 1 < layers) v = next[i][v];
  }
  return path;
}

struct DownsweepStats {
  // Edges of the tree paths u -> a summed over all recursion levels.
  std::size_t tree_path_edges = 0;
  std::size_t layered_graphs = 0;
};

namespace detail {

// Sweep of w + T(mask) ending at `end`, or the single node w when mask is
// empty. Emitted end-to-start when reversed; `skip_start` drops w itself.
struct SweepTask {
  Node start;
  ChildMask mask;
  Node end;
  bool reversed;
  bool skip_start;
};

}  // namespace detail

// Sequence of P^u_V(a): starts at u, visits every node of u + T(V) once and
// ends at a. `bipartitions` must come from an upsweep on the same tree.
inline std::vector<Node> reconstruct_path(const RootedTree& tree,
                                          const BipartitionTable& bipartitions, Node u,
                                          ChildMask v_mask, Node a,
                                          DownsweepStats* stats = nullptr) {
  if (!bipartitions.matches(tree)) {
    throw ConfigError("reconstruct_path: bipartition table belongs to a different tree");
  }
  std::vector<Node> out;
  std::vector<detail::SweepTask> stack{{u, v_mask, a, false, false}};
  std::vector<Node> path;
  std::vector<detail::SweepTask> parts;

  while (!stack.empty()) {
    const detail::SweepTask task = stack.back();
    stack.pop_back();
    if (task.mask == 0) {
      if (task.end != task.start) throw InvariantError("empty sweep must end where it starts");
      if (!task.skip_start) out.push_back(task.start);
      continue;
    }

    if (task.end == task.start) throw ConfigError("reconstruct_path: destination equals start");
    // Tree path start = path[0], ..., path[k] = end.
    path.clear();
    for (Node x = task.end; x != task.start;) {
      path.push_back(x);
      const auto p = tree.parent(x);
      if (!p) throw ConfigError("reconstruct_path: destination not below the start node");
      x = *p;
    }
    path.push_back(task.start);
    std::reverse(path.begin(), path.end());
    const std::size_t k = path.size() - 1;
    const std::size_t first_bit = tree.child_index(path[1]);
    if (!detail::has_bit(task.mask, first_bit)) {
      throw ConfigError("reconstruct_path: destination not inside T(V)");
    }
    if (stats) {
      stats->tree_path_edges += k;
      ++stats->layered_graphs;
    }

    // Vertex of inner layer i (1 <= i < k) is the rank of W_i among subsets
    // of C(v_i) without v_{i+1}; the source is (empty, V \ v_1), the sink C(a).
    auto bit_towards = [&](std::size_t i) { return tree.child_index(path[i + 1]); };
    auto width = [&](std::size_t i) { return tree.children(path[i]).size(); };
    auto after_mask = [&](std::size_t i, std::size_t vertex) -> ChildMask {
      if (i == 0) return task.mask & ~(ChildMask{1} << first_bit);
      const ChildMask rest = detail::full_mask(width(i)) & ~(ChildMask{1} << bit_towards(i));
      return rest & ~detail::insert_zero_bit(vertex, bit_towards(i));
    };
    auto before_mask = [&](std::size_t i, std::size_t vertex) -> ChildMask {
      if (i == k) return detail::full_mask(width(k));
      return detail::insert_zero_bit(vertex, bit_towards(i));
    };

    std::vector<std::size_t> sizes(k + 1, 1);
    for (std::size_t i = 1; i < k; ++i) sizes[i] = std::size_t{1} << (width(i) - 1);
    const LayeredGraph graph{
        sizes, [&](std::size_t i, std::size_t from, std::size_t to) -> std::optional<double> {
          return bipartitions.at(path[i + 1], after_mask(i, from), before_mask(i + 1, to)).weight;
        }};
    const LayeredPath best = layered_shortest_path(graph);

    // Parts in forward order.
    parts.clear();
    for (std::size_t i = 0; i < k; ++i) {
      const ChildMask after = after_mask(i, best.vertices[i]);
      const ChildMask before = before_mask(i + 1, best.vertices[i + 1]);
      const BipartitionEntry& arc = bipartitions.at(path[i + 1], after, before);
      parts.push_back({path[i], after, arc.exit, false, i == 0 ? task.skip_start : true});
      parts.push_back({path[i + 1], before, arc.entry, true, false});
    }
    if (task.reversed) {
      std::reverse(parts.begin(), parts.end());
      for (auto& p : parts) p.reversed = !p.reversed;
    }
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

// The optimal tour of a reconstruction-mode upsweep: P^r_{C(r)}(best_a)
// closed back to the root. Throws InvariantError if the rebuilt tour is not a
// permutation or its weight disagrees with the upsweep.
template <DistanceOracle M>
Tour downsweep(const M& metric, const RootedTree& tree, const UpsweepResult& result,
               DownsweepStats* stats = nullptr) {
  if (!result.bipartitions) {
    throw ConfigError("downsweep: upsweep was run without keep_bipartitions");
  }
  if (!result.bipartitions->matches(tree) || tree.size() != metric.size()) {
    throw ConfigError("downsweep: upsweep result belongs to a different tree or instance");
  }
  const Node r = tree.root();
  std::vector<Node> order = reconstruct_path(tree, *result.bipartitions, r,
                                             detail::full_mask(tree.children(r).size()), result.best_a,
                                             stats);
  if (!is_permutation_of_nodes(order, tree.size())) {
    throw InvariantError("downsweep: reconstructed order is not a permutation");
  }
  Tour tour = make_tour(metric, std::move(order));
  if (!nearly_equal(tour.weight, result.weight)) {
    throw InvariantError("downsweep: tour weight disagrees with the upsweep");
  }
  return tour;
}

}  // namespace dtsp
