#pragma once

// Held-Karp lower bound by Lagrangian 1-tree subgradient ascent.
//
// A 1-tree is a spanning tree on nodes 1..n-1 plus the two cheapest edges
// from node 0. With node potentials pi and edge costs d(i,j) + pi_i + pi_j,
// every 1-tree weight minus 2 * sum(pi) is a lower bound on the optimal tour,
// whatever pi is, so the best value seen along the ascent is always valid.

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/spanning_tree.hpp"

namespace dtsp {

struct OneTree {
  Node special = 0;
  std::vector<std::pair<Node, Node>> edges;  // n edges, the two special ones last
  std::vector<int> degree;
  double total = 0.0;  // under the potentials it was built with, before - 2 sum(pi)
};

// Minimum 1-tree under costs d(i,j) + pi_i + pi_j, special node 0. O(n^2).
template <DistanceOracle M>
OneTree minimum_one_tree(const M& metric, const std::vector<double>& pi) {
  const std::size_t n = metric.size();
  if (n < 3) throw ConfigError("1-tree needs at least 3 nodes");
  auto cost = [&](Node a, Node b) { return metric(a, b) + pi[a] + pi[b]; };

  OneTree tree;
  tree.degree.assign(n, 0);
  tree.edges.reserve(n);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> key(n, inf);
  std::vector<Node> link(n, 0);
  std::vector<char> done(n, 0);
  done[0] = 1;
  Node current = 1;
  done[1] = 1;
  for (std::size_t step = 2; step < n; ++step) {
    Node best = 0;
    double best_key = inf;
    for (Node v = 1; v < n; ++v) {
      if (done[v]) continue;
      const double c = cost(current, v);
      if (c < key[v]) {
        key[v] = c;
        link[v] = current;
      }
      if (key[v] < best_key) {
        best_key = key[v];
        best = v;
      }
    }
    done[best] = 1;
    tree.edges.emplace_back(link[best], best);
    tree.total += best_key;
    ++tree.degree[link[best]];
    ++tree.degree[best];
    current = best;
  }

  Node first = 0, second = 0;
  double c1 = inf, c2 = inf;
  for (Node v = 1; v < n; ++v) {
    const double c = cost(0, v);
    if (c < c1) {
      second = first;
      c2 = c1;
      first = v;
      c1 = c;
    } else if (c < c2) {
      second = v;
      c2 = c;
    }
  }
  tree.edges.emplace_back(0, first);
  tree.edges.emplace_back(0, second);
  tree.total += c1 + c2;
  tree.degree[0] = 2;
  ++tree.degree[first];
  ++tree.degree[second];
  return tree;
}

struct HeldKarpOptions {
  std::size_t iterations = 1000;
  // Upper bound on the optimal tour used in the step size; any tour weight.
  double upper_bound = 0.0;
  double initial_lambda = 2.0;
  // lambda halves after this many consecutive non-improving steps. A fixed
  // count keeps every run a prefix of any longer run.
  std::size_t patience = 20;
};

struct HeldKarpResult {
  double bound = 0.0;
  std::size_t iterations_run = 0;
  bool tour_found = false;  // some 1-tree was a Hamiltonian cycle; bound is optimal
};

// Subgradient ascent with step lambda * (UB - L) / |g|^2, g = degree - 2.
template <DistanceOracle M>
HeldKarpResult held_karp_ascent(const M& metric, const HeldKarpOptions& options) {
  const std::size_t n = metric.size();
  if (n < 3) throw ConfigError("held_karp_lower_bound: need at least 3 nodes");
  if (!(options.upper_bound > 0.0)) throw ConfigError("held_karp: upper bound must be > 0");

  std::vector<double> pi(n, 0.0);
  HeldKarpResult result;
  result.bound = -std::numeric_limits<double>::infinity();
  double lambda = options.initial_lambda;
  std::size_t stall = 0;

  for (std::size_t it = 0; it < std::max<std::size_t>(options.iterations, 1); ++it) {
    const OneTree tree = minimum_one_tree(metric, pi);
    const double bound = tree.total - 2.0 * std::accumulate(pi.begin(), pi.end(), 0.0);
    ++result.iterations_run;
    if (bound > result.bound) {
      result.bound = bound;
      stall = 0;
    } else if (++stall >= options.patience) {
      lambda *= 0.5;
      stall = 0;
    }

    double norm2 = 0.0;
    for (int deg : tree.degree) norm2 += static_cast<double>((deg - 2) * (deg - 2));
    if (norm2 == 0.0) {
      result.tour_found = true;
      break;
    }
    const double gap = options.upper_bound - bound;
    if (gap <= 0.0) break;
    const double step = lambda * gap / norm2;
    for (std::size_t v = 0; v < n; ++v) pi[v] += step * (tree.degree[v] - 2);
  }
  return result;
}

// Nodes up to which the ascent works on a cached distance matrix.
inline constexpr std::size_t kHeldKarpMatrixLimit = 2500;

// Best 1-tree bound after `iterations` ascent steps, with the depth-first
// double-tree tour as the upper bound. Deterministic; `seed` is accepted for
// interface stability and does not influence the ascent.
template <DistanceOracle M>
double held_karp_lower_bound(const M& metric, std::size_t iterations = 1000,
                             std::uint64_t seed = 0) {
  (void)seed;
  if (metric.size() < 3) throw ConfigError("held_karp_lower_bound: need at least 3 nodes");
  HeldKarpOptions options;
  options.iterations = iterations;
  options.upper_bound = depth_first_shortcut(metric, rooted_mst(metric)).weight;
  if (options.upper_bound <= 0.0) return 0.0;  // all points coincide
  if (metric.size() <= kHeldKarpMatrixLimit) {
    return held_karp_ascent(DistanceMatrix(metric), options).bound;
  }
  return held_karp_ascent(metric, options).bound;
}

}  // namespace dtsp
