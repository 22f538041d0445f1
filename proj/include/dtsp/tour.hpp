#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dtsp/instance.hpp"

namespace dtsp {

// Hamiltonian cycle as a node order; the closing edge back to order.front()
// is implied.
struct Tour {
  std::vector<Node> order;
  double weight = 0.0;
};

template <DistanceOracle M>
double cycle_weight(const M& metric, std::span<const Node> order) {
  if (order.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) total += metric(order[i], order[i + 1]);
  return total + metric(order.back(), order.front());
}

template <DistanceOracle M>
double path_weight(const M& metric, std::span<const Node> order) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) total += metric(order[i], order[i + 1]);
  return total;
}

template <DistanceOracle M>
Tour make_tour(const M& metric, std::vector<Node> order) {
  const double w = cycle_weight(metric, order);
  return Tour{std::move(order), w};
}

inline bool is_permutation_of_nodes(std::span<const Node> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (Node v : order) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

// |a - b| <= tol * max(1, |a|, |b|)
inline bool nearly_equal(double a, double b, double tol = 1e-9) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

}  // namespace dtsp
