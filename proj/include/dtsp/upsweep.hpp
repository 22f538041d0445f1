#pragma once

// Bottom-up dynamic program for the minimum-weight tour conforming to a
// doubled rooted spanning tree.
//
// For a node u, a set V of its children and a destination a in T(V),
// D^u_V(a) is the weight of the shortest conforming path that starts at u,
// sweeps u + T(V) and ends at a. Nodes are processed children first. While
// processing u, every child v not in V is appended to V in two steps:
//
//   bipartition:  D^u_{V,W}(v) = min_{x,y} D^u_V(x) + d(x,y) + D^v_W(y)
//                 (x = u with D = 0 when V is empty, y = v when W is empty)
//   extension:    D^u_{V+v}(a) = min_{W : a not in T(W)} D^u_{V,W}(v) + D^v_{C(v)\W}(a)
//                 D^u_{V+v}(v) = D^u_{V,C(v)}(v)
//
// and the tour weight is min_a D^r_{C(r)}(a) + d(a,r). With a depth limit k
// only destinations within tree distance k of u are stored, and every
// minimisation ranges over stored destinations only.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"
#include "dtsp/spanning_tree.hpp"

namespace dtsp {

// Subset of a node's children; bit j is children(u)[j].
using ChildMask = std::uint32_t;

inline constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kMaxChildMaskWidth = 20;

namespace detail {

// Rank of `mask` among the masks that leave bit j clear (bit j is dropped).
constexpr std::size_t drop_bit(ChildMask mask, std::size_t j) {
  const ChildMask low = mask & ((ChildMask{1} << j) - 1);
  return ((mask >> (j + 1)) << j) | low;
}

// Inverse of drop_bit for masks with bit j clear.
constexpr ChildMask insert_zero_bit(std::size_t rank, std::size_t j) {
  const auto r = static_cast<ChildMask>(rank);
  const ChildMask low = r & ((ChildMask{1} << j) - 1);
  return ((r >> j) << (j + 1)) | low;
}

constexpr ChildMask full_mask(std::size_t width) {
  return static_cast<ChildMask>((std::uint64_t{1} << width) - 1);
}

constexpr bool has_bit(ChildMask mask, std::size_t j) { return (mask >> j) & 1u; }

}  // namespace detail

// All stored values D^u_V(a) of one node u.
//
// Destinations are grouped by the child subtree they lie in: groups[j] lists
// the stored nodes of T(children(u)[j]), the child itself first. D^u_V(a) is
// defined only when a's group is in V, so group j keeps one row per subset V
// containing j, indexed by drop_bit(V, j).
struct SweepTable {
  std::vector<std::vector<Node>> groups;
  std::vector<std::vector<double>> values;

  std::size_t child_count() const noexcept { return groups.size(); }

  double at(ChildMask v_mask, std::size_t group, std::size_t index) const {
    const std::size_t len = groups[group].size();
    return values[group][detail::drop_bit(v_mask, group) * len + index];
  }

  // Absent when a is not a stored destination or not inside T(V).
  std::optional<double> value(ChildMask v_mask, Node a) const {
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (!detail::has_bit(v_mask, j)) continue;
      for (std::size_t i = 0; i < groups[j].size(); ++i) {
        if (groups[j][i] == a) return at(v_mask, j, i);
      }
    }
    return std::nullopt;
  }

  std::size_t entry_count() const noexcept {
    std::size_t total = 0;
    for (const auto& v : values) total += v.size();
    return total;
  }
};

template <DistanceOracle M>
class Upsweep;

struct BipartitionEntry {
  double weight = 0.0;
  Node exit = 0;   // last node of the u + T(V) part (u itself when V is empty)
  Node entry = 0;  // first node of the T(W) + v part (v itself when W is empty)
};

// D^u_{V,W}(v) with its argmin endpoints, for every non-root v. The parent u
// is implied by v. V ranges over subsets of children(u) without v, W over
// subsets of children(v).
class BipartitionTable {
 public:
  explicit BipartitionTable(const RootedTree& tree) : parents_(tree.parents()) {
    const std::size_t n = tree.size();
    rows_.resize(n);
    child_index_.assign(n, 0);
    width_.assign(n, 0);
    for (Node v = 0; v < n; ++v) {
      width_[v] = tree.children(v).size();
      if (v == tree.root()) continue;
      child_index_[v] = tree.child_index(v);
    }
  }

  const BipartitionEntry& at(Node v, ChildMask v_mask, ChildMask w_mask) const {
    const auto& row = rows_[v];
    const std::size_t index = (detail::drop_bit(v_mask, child_index_[v]) << width_[v]) | w_mask;
    if (index >= row.size()) throw InvariantError("bipartition entry missing");
    return row[index];
  }

  bool matches(const RootedTree& tree) const { return parents_ == tree.parents(); }

  std::size_t entry_count() const noexcept {
    std::size_t total = 0;
    for (const auto& r : rows_) total += r.size();
    return total;
  }

 private:
  template <DistanceOracle M>
  friend class Upsweep;

  // Row for one (v, V): 2^|C(v)| entries indexed by W.
  std::span<BipartitionEntry> row(Node v, std::size_t v_rank, std::size_t parent_width) {
    auto& r = rows_[v];
    if (r.empty()) r.resize((std::size_t{1} << (parent_width - 1)) << width_[v]);
    return std::span<BipartitionEntry>(r).subspan(v_rank << width_[v], std::size_t{1} << width_[v]);
  }

  std::vector<Node> parents_;
  std::vector<std::vector<BipartitionEntry>> rows_;
  std::vector<std::size_t> child_index_;
  std::vector<std::size_t> width_;
};

struct UpsweepStats {
  // Candidate evaluations in the bipartition and extension minimisations.
  std::uint64_t evaluations = 0;
  std::size_t live_entries = 0;
  std::size_t peak_live_entries = 0;
  std::size_t bipartition_entries = 0;
};

struct UpsweepOptions {
  std::size_t depth_limit = kUnlimitedDepth;
  // Keep D^u_{V,W}(v) for tour reconstruction.
  bool keep_bipartitions = false;
  // Keep every node's sweep table instead of releasing child tables once the
  // parent is done. For inspection only; breaks the O(2^d n) memory bound.
  bool retain_sweep_tables = false;
  // Guard on stored D values plus bipartition entries.
  std::size_t max_entries = std::size_t{1} << 27;
  // Processing order; empty means the tree's own post-order. Any order that
  // puts children before parents gives identical results.
  std::vector<Node> order;
};

struct UpsweepResult {
  double weight = 0.0;
  Node best_a = 0;
  std::size_t depth_limit = kUnlimitedDepth;
  std::optional<BipartitionTable> bipartitions;
  SweepTable root_table;
  UpsweepStats stats;
};

template <DistanceOracle M>
class Upsweep {
 public:
  Upsweep(const M& metric, const RootedTree& tree, UpsweepOptions options = {})
      : metric_(metric), tree_(tree), options_(std::move(options)), tables_(tree.size()),
        processed_(tree.size(), 0) {
    if (tree.size() != metric.size()) {
      throw ConfigError("upsweep: tree and instance sizes differ");
    }
    if (tree.size() < 2) throw ConfigError("upsweep: need at least 2 nodes");
    if (options_.depth_limit < 1) throw ConfigError("upsweep: depth limit must be >= 1");
    if (tree.max_children() > kMaxChildMaskWidth) {
      throw GuardError("upsweep: a node has " + std::to_string(tree.max_children()) +
                       " children; at most " + std::to_string(kMaxChildMaskWidth) +
                       " are supported");
    }
    if (options_.keep_bipartitions) bipartitions_.emplace(tree);
  }

  // Computes D^u_V(.) for every V in children(u). All children of u must
  // already be processed.
  void process_node(Node u) {
    if (u >= tree_.size()) throw ConfigError("process_node: node out of range");
    if (processed_[u]) throw InvariantError("process_node: node processed twice");
    const auto children = tree_.children(u);
    for (Node v : children) {
      if (!tables_[v]) throw InvariantError("process_node: a child has not been processed");
    }
    const std::size_t c = children.size();

    SweepTable table;
    table.groups.resize(c);
    table.values.resize(c);
    // Where each stored destination of u sits in its child's table.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> source(c);
    for (std::size_t j = 0; j < c; ++j) {
      const Node v = children[j];
      const SweepTable& child = *tables_[v];
      auto& group = table.groups[j];
      group.push_back(v);
      source[j].emplace_back(0, 0);
      for (std::size_t g = 0; g < child.groups.size(); ++g) {
        for (std::size_t i = 0; i < child.groups[g].size(); ++i) {
          const Node a = child.groups[g][i];
          if (tree_.depth(a) - tree_.depth(u) > options_.depth_limit) continue;
          group.push_back(a);
          source[j].emplace_back(static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(i));
        }
      }
      table.values[j].assign((std::size_t{1} << (c - 1)) * group.size(),
                             std::numeric_limits<double>::quiet_NaN());
    }
    charge(table.entry_count());

    std::vector<std::pair<Node, double>> exits;
    std::vector<BipartitionEntry> row;
    for (ChildMask v_mask = 0; v_mask <= detail::full_mask(c); ++v_mask) {
      collect_exits(u, table, v_mask, exits);
      for (std::size_t j = 0; j < c; ++j) {
        if (detail::has_bit(v_mask, j)) continue;
        const Node v = children[j];
        bipartition_row(exits, v, row);
        if (bipartitions_) {
          auto dst = bipartitions_->row(v, detail::drop_bit(v_mask, j), c);
          std::copy(row.begin(), row.end(), dst.begin());
          stats_.bipartition_entries += row.size();
          check_guard();
        }
        extend_sweep(table, v_mask, j, *tables_[v], row, source[j]);
      }
    }

    tables_[u] = std::move(table);
    processed_[u] = 1;
    if (!options_.retain_sweep_tables) {
      for (Node v : children) {
        stats_.live_entries -= tables_[v]->entry_count();
        tables_[v].reset();
      }
    }
  }

  // D^u_{V,W}(v) for one W. Absent if the needed tables are not held.
  std::optional<double> bipartition_path_weight(Node u, ChildMask v_mask, Node v,
                                                ChildMask w_mask) {
    if (u >= tree_.size() || v >= tree_.size() || tree_.parent(v) != u) {
      throw ConfigError("bipartition_path_weight: v must be a child of u");
    }
    const std::size_t j = tree_.child_index(v);
    if (detail::has_bit(v_mask, j) || (v_mask & ~detail::full_mask(tree_.children(u).size())) ||
        (w_mask & ~detail::full_mask(tree_.children(v).size()))) {
      throw ConfigError("bipartition_path_weight: masks out of range or v in V");
    }
    if (!tables_[v] || (v_mask != 0 && !tables_[u])) return std::nullopt;
    std::vector<std::pair<Node, double>> exits;
    std::vector<BipartitionEntry> row;
    if (v_mask == 0) {
      exits.emplace_back(u, 0.0);
    } else {
      collect_exits(u, *tables_[u], v_mask, exits);
    }
    bipartition_row(exits, v, row);
    return row[w_mask].weight;
  }

  // Sweep table of u, if currently held.
  const SweepTable* table(Node u) const { return tables_[u] ? &*tables_[u] : nullptr; }

  const UpsweepStats& stats() const noexcept { return stats_; }

  void run() {
    if (options_.order.empty()) {
      for (Node u : tree_.postorder()) process_node(u);
      return;
    }
    if (options_.order.size() != tree_.size()) {
      throw ConfigError("upsweep: processing order must list every node once");
    }
    for (Node u : options_.order) process_node(u);
  }

  // Closes the tour at the root. The root must have been processed.
  UpsweepResult finish() && {
    const Node r = tree_.root();
    if (!tables_[r]) throw InvariantError("upsweep: root not processed");
    SweepTable& root = *tables_[r];
    const ChildMask all = detail::full_mask(root.child_count());

    UpsweepResult result;
    result.weight = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < root.child_count(); ++j) {
      for (std::size_t i = 0; i < root.groups[j].size(); ++i) {
        const Node a = root.groups[j][i];
        const double w = root.at(all, j, i) + metric_(a, r);
        if (w < result.weight) {
          result.weight = w;
          result.best_a = a;
        }
      }
    }
    result.depth_limit = options_.depth_limit;
    result.bipartitions = std::move(bipartitions_);
    result.root_table = std::move(root);
    result.stats = stats_;
    return result;
  }

 private:
  void charge(std::size_t entries) {
    stats_.live_entries += entries;
    stats_.peak_live_entries = std::max(stats_.peak_live_entries, stats_.live_entries);
    check_guard();
  }

  void check_guard() const {
    if (stats_.live_entries + stats_.bipartition_entries > options_.max_entries) {
      throw GuardError("upsweep: table size exceeds the configured limit of " +
                       std::to_string(options_.max_entries) + " entries");
    }
  }

  // Candidate exits x of u + T(V) with their D^u_V(x); just (u, 0) for V empty.
  static void collect_exits(Node u, const SweepTable& table, ChildMask v_mask,
                            std::vector<std::pair<Node, double>>& exits) {
    exits.clear();
    if (v_mask == 0) {
      exits.emplace_back(u, 0.0);
      return;
    }
    for (std::size_t j = 0; j < table.child_count(); ++j) {
      if (!detail::has_bit(v_mask, j)) continue;
      for (std::size_t i = 0; i < table.groups[j].size(); ++i) {
        exits.emplace_back(table.groups[j][i], table.at(v_mask, j, i));
      }
    }
  }

  // D^u_{V,W}(v) for every W in children(v), given the exits of u + T(V).
  // The inner minimum over x depends on y only, so it is shared by all W.
  void bipartition_row(const std::vector<std::pair<Node, double>>& exits, Node v,
                       std::vector<BipartitionEntry>& row) {
    const SweepTable& child = *tables_[v];
    const std::size_t cv = child.child_count();

    entry_cost_.clear();
    entry_exit_.clear();
    auto relax_entry = [&](Node y) {
      double best = std::numeric_limits<double>::infinity();
      Node arg = exits.front().first;
      for (const auto& [x, dx] : exits) {
        const double w = dx + metric_(x, y);
        if (w < best) {
          best = w;
          arg = x;
        }
      }
      stats_.evaluations += exits.size();
      entry_cost_.push_back(best);
      entry_exit_.push_back(arg);
    };
    relax_entry(v);
    group_offset_.assign(cv, 0);
    for (std::size_t g = 0; g < cv; ++g) {
      group_offset_[g] = entry_cost_.size();
      for (Node y : child.groups[g]) relax_entry(y);
    }

    row.assign(std::size_t{1} << cv, BipartitionEntry{});
    row[0] = BipartitionEntry{entry_cost_[0], entry_exit_[0], v};
    for (ChildMask w_mask = 1; w_mask <= detail::full_mask(cv); ++w_mask) {
      BipartitionEntry best{std::numeric_limits<double>::infinity(), 0, 0};
      for (std::size_t g = 0; g < cv; ++g) {
        if (!detail::has_bit(w_mask, g)) continue;
        const auto& group = child.groups[g];
        for (std::size_t i = 0; i < group.size(); ++i) {
          const std::size_t k = group_offset_[g] + i;
          const double w = entry_cost_[k] + child.at(w_mask, g, i);
          if (w < best.weight) best = BipartitionEntry{w, entry_exit_[k], group[i]};
        }
        stats_.evaluations += group.size();
      }
      row[w_mask] = best;
    }
  }

  // Fills D^u_{V+v}(a) for the stored destinations a of group j (v = children(u)[j]).
  void extend_sweep(SweepTable& table, ChildMask v_mask, std::size_t j, const SweepTable& child,
                    const std::vector<BipartitionEntry>& row,
                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& source) {
    const std::size_t cv = child.child_count();
    const ChildMask all = detail::full_mask(cv);
    const std::size_t len = table.groups[j].size();
    double* out = table.values[j].data() + detail::drop_bit(v_mask, j) * len;

    out[0] = row[all].weight;
    for (std::size_t i = 1; i < len; ++i) {
      const auto [g, index] = source[i];
      double best = std::numeric_limits<double>::infinity();
      for (ChildMask w_mask = 0; w_mask <= all; ++w_mask) {
        if (detail::has_bit(w_mask, g)) continue;
        const double w = row[w_mask].weight + child.at(all ^ w_mask, g, index);
        if (w < best) best = w;
      }
      stats_.evaluations += std::size_t{1} << (cv - 1);
      out[i] = best;
    }
  }

  const M& metric_;
  const RootedTree& tree_;
  UpsweepOptions options_;
  std::vector<std::optional<SweepTable>> tables_;
  std::vector<char> processed_;
  std::optional<BipartitionTable> bipartitions_;
  UpsweepStats stats_;

  std::vector<double> entry_cost_;
  std::vector<Node> entry_exit_;
  std::vector<std::size_t> group_offset_;
};

template <DistanceOracle M>
UpsweepResult upsweep(const M& metric, const RootedTree& tree, UpsweepOptions options = {}) {
  Upsweep<M> dp(metric, tree, std::move(options));
  dp.run();
  return std::move(dp).finish();
}

template <DistanceOracle M>
UpsweepResult upsweep(const M& metric, const RootedTree& tree, std::size_t depth_limit,
                      bool keep_bipartitions) {
  UpsweepOptions options;
  options.depth_limit = depth_limit;
  options.keep_bipartitions = keep_bipartitions;
  return upsweep(metric, tree, std::move(options));
}

}  // namespace dtsp
