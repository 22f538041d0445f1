#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dtsp/generators.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/upsweep.hpp"
#include "reference.hpp"

using namespace dtsp;

namespace {

Instance line(std::vector<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x, 0});
  return Instance::from_points(pts);
}

Instance unit_square() { return Instance::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Instance star5() { return Instance::from_points({{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}); }

RootedTree path_tree(std::size_t n) {
  std::vector<Node> parent(n, RootedTree::kNone);
  for (Node v = 1; v < n; ++v) parent[v] = v - 1;
  return RootedTree::from_parents(parent);
}

UpsweepOptions retained(std::size_t k = kUnlimitedDepth) {
  UpsweepOptions o;
  o.depth_limit = k;
  o.retain_sweep_tables = true;
  return o;
}

std::vector<Node> children_in(const RootedTree& t, Node u, ChildMask mask) {
  std::vector<Node> out;
  const auto c = t.children(u);
  for (std::size_t j = 0; j < c.size(); ++j)
    if (mask >> j & 1u) out.push_back(c[j]);
  return out;
}

// Every stored D^u_V(a) and every D^u_{V,W}(v) against path enumeration.
template <class M>
void expect_tables_match_enumeration(const M& inst, const RootedTree& t) {
  Upsweep<M> dp(inst, t, retained());
  dp.run();
  const auto parent = ref::parents_of(t);
  const auto in = ref::subtree_sets(parent);
  for (Node u = 0; u < t.size(); ++u) {
    const SweepTable* table = dp.table(u);
    ASSERT_NE(table, nullptr);
    const std::size_t c = t.children(u).size();
    for (ChildMask V = 1; V < (ChildMask{1} << c); ++V) {
      const auto roots = children_in(t, u, V);
      for (Node a = 0; a < t.size(); ++a) {
        bool inside = false;
        for (Node r : roots) inside = inside || in[r][a];
        const auto value = table->value(V, a);
        ASSERT_EQ(value.has_value(), inside) << "u=" << u << " V=" << V << " a=" << a;
        if (inside) {
          EXPECT_NEAR(*value, ref::best_sweep(inst, parent, u, roots, a), 1e-9)
              << "u=" << u << " V=" << V << " a=" << a;
        }
      }
    }
    for (std::size_t j = 0; j < c; ++j) {
      const Node v = t.children(u)[j];
      const std::size_t cv = t.children(v).size();
      for (ChildMask V = 0; V < (ChildMask{1} << c); ++V) {
        if (V >> j & 1u) continue;
        for (ChildMask W = 0; W < (ChildMask{1} << cv); ++W) {
          const auto got = dp.bipartition_path_weight(u, V, v, W);
          ASSERT_TRUE(got.has_value());
          const double want =
              ref::best_bipartition(inst, parent, u, children_in(t, u, V), v, children_in(t, v, W));
          EXPECT_NEAR(*got, want, 1e-9) << "u=" << u << " v=" << v << " V=" << V << " W=" << W;
        }
      }
    }
  }
}

}  // namespace

TEST(Bipartition, EmptyMasksGiveTheEdge) {
  std::mt19937_64 rng(1);
  const auto inst = ref::random_instance(rng, 5);
  const auto t = path_tree(5);
  Upsweep<Instance> dp(inst, t, retained());
  dp.run();
  for (Node v = 1; v < 5; ++v) EXPECT_EQ(*dp.bipartition_path_weight(v - 1, 0, v, 0), inst(v - 1, v));
}

TEST(Bipartition, CollinearPathSecondCase) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  Upsweep<Instance> dp(inst, t, retained());
  dp.run();
  // d(0,2) + D^1_{{2}}(2) = 2 + 1.
  EXPECT_DOUBLE_EQ(*dp.bipartition_path_weight(0, 0, 1, 1), 3.0);
}

TEST(Bipartition, RejectsBadArguments) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  Upsweep<Instance> dp(inst, t, retained());
  dp.run();
  EXPECT_THROW(dp.bipartition_path_weight(0, 0, 2, 0), ConfigError);  // 2 is no child of 0
  EXPECT_THROW(dp.bipartition_path_weight(0, 1, 1, 0), ConfigError);  // v inside V
  EXPECT_THROW(dp.bipartition_path_weight(0, 0, 1, 2), ConfigError);  // W out of range
}

TEST(Bipartition, AbsentWhenTablesReleased) {
  const auto inst = line({0, 1, 2, 3});
  const auto t = path_tree(4);
  Upsweep<Instance> dp(inst, t);
  dp.run();
  EXPECT_FALSE(dp.bipartition_path_weight(1, 0, 2, 0).has_value());
}

TEST(Tables, UnitSquareMatchesEnumeration) {
  const auto inst = unit_square();
  expect_tables_match_enumeration(inst, rooted_mst(inst));
}

TEST(Tables, StarMatchesEnumeration) {
  const auto inst = star5();
  const auto t = rooted_mst(inst);
  ASSERT_EQ(t.max_children(), 3u);
  expect_tables_match_enumeration(inst, t);
}

TEST(Tables, RandomSevenNodeTreesMatchEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const auto inst = ref::random_instance(rng, 7);
    expect_tables_match_enumeration(inst, rooted_mst(inst));
    // Arbitrary tree shapes, not only MSTs.
    expect_tables_match_enumeration(inst, RootedTree::from_parents(ref::random_parents(rng, 7)));
  }
}

TEST(Tables, CollinearExtension) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  Upsweep<Instance> dp(inst, t, retained());
  dp.run();
  EXPECT_DOUBLE_EQ(*dp.table(0)->value(1, 2), 2.0);
  EXPECT_DOUBLE_EQ(*dp.table(0)->value(1, 1), 3.0);
}

TEST(Tables, LeafHasNoEntries) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  Upsweep<Instance> dp(inst, t, retained());
  dp.process_node(2);
  ASSERT_NE(dp.table(2), nullptr);
  EXPECT_EQ(dp.table(2)->child_count(), 0u);
  EXPECT_EQ(dp.table(2)->entry_count(), 0u);
}

TEST(Tables, LeafChildStoresOnlyItself) {
  const auto inst = star5();
  const auto t = rooted_mst(inst);  // root 1 -> 0 -> {2, 3, 4}
  Upsweep<Instance> dp(inst, t, retained());
  dp.run();
  const SweepTable* center = dp.table(0);
  ASSERT_EQ(center->child_count(), 3u);
  for (const auto& group : center->groups) EXPECT_EQ(group.size(), 1u);
}

TEST(Tables, SingleChildNode) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  Upsweep<Instance> dp(inst, t, retained());
  dp.run();
  const SweepTable* mid = dp.table(1);
  ASSERT_EQ(mid->child_count(), 1u);
  EXPECT_EQ(mid->entry_count(), 1u);
  EXPECT_DOUBLE_EQ(*mid->value(1, 2), 1.0);
  EXPECT_FALSE(mid->value(0, 2).has_value());
}

TEST(Tables, ProcessingOrderErrors) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  Upsweep<Instance> dp(inst, t);
  EXPECT_THROW(dp.process_node(1), InvariantError);
  dp.process_node(2);
  EXPECT_THROW(dp.process_node(2), InvariantError);
  EXPECT_THROW(dp.process_node(9), ConfigError);
}

TEST(Upsweep, TwoNodes) {
  const auto inst = Instance::from_points({{0, 0}, {3, 4}});
  EXPECT_DOUBLE_EQ(upsweep(inst, rooted_mst(inst)).weight, 10.0);
}

TEST(Upsweep, Collinear) {
  const auto inst = line({0, 1, 2});
  EXPECT_DOUBLE_EQ(upsweep(inst, rooted_mst(inst)).weight, 4.0);
}

TEST(Upsweep, UnitSquare) {
  const auto inst = unit_square();
  EXPECT_DOUBLE_EQ(upsweep(inst, rooted_mst(inst)).weight, 4.0);
}

TEST(Upsweep, FivePointStar) {
  const auto inst = star5();
  EXPECT_NEAR(upsweep(inst, rooted_mst(inst)).weight, 2.0 + 3.0 * std::sqrt(2.0), 1e-12);
}

TEST(Upsweep, EqualsConformingMinimum) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 4 + trial % 6;
    const auto inst = ref::random_instance(rng, n);
    const auto t = rooted_mst(inst);
    const auto up = upsweep(inst, t);
    EXPECT_NEAR(up.weight, enumerate_conforming_min(inst, t).weight, 1e-9) << "n=" << n;
    EXPECT_LE(up.weight, 2.0 * tree_weight(minimum_spanning_tree(inst)) + 1e-9);
  }
}

TEST(Upsweep, ExactOnArbitraryTrees) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 5;
    const auto inst = ref::random_instance(rng, n);
    const auto t = RootedTree::from_parents(ref::random_parents(rng, n));
    EXPECT_NEAR(upsweep(inst, t).weight, enumerate_conforming_min(inst, t).weight, 1e-9);
  }
}

TEST(Upsweep, DepthLimitedMatchesReferenceRecurrence) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 8 + trial % 17;
    const auto inst = ref::random_instance(rng, n);
    const auto t = trial % 2 ? rooted_mst(inst)
                             : RootedTree::from_parents(ref::random_parents(rng, n));
    if (t.max_children() > 8) continue;
    for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{3}, kUnlimitedDepth}) {
      ref::ReferenceDP<Instance> dp(inst, ref::parents_of(t), k);
      EXPECT_NEAR(upsweep(inst, t, k, false).weight, dp.tour(), 1e-9) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Upsweep, DepthLimitedTablesMatchReference) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = ref::random_instance(rng, 14);
    const auto t = rooted_mst(inst);
    for (std::size_t k : {1, 2, 3}) {
      Upsweep<Instance> dp(inst, t, retained(k));
      dp.run();
      ref::ReferenceDP<Instance> oracle(inst, ref::parents_of(t), k);
      for (Node u = 0; u < t.size(); ++u) {
        const std::size_t c = t.children(u).size();
        for (ChildMask V = 1; V < (ChildMask{1} << c); ++V) {
          for (Node a = 0; a < t.size(); ++a) {
            const auto got = dp.table(u)->value(V, a);
            const double want = oracle.D(u, V, a);
            ASSERT_EQ(got.has_value(), std::isfinite(want)) << "u=" << u << " a=" << a;
            if (got) {
              EXPECT_NEAR(*got, want, 1e-9);
              EXPECT_LE(tree_distance(t, u, a), k);
            }
          }
        }
      }
    }
  }
}

TEST(Upsweep, MonotoneInDepth) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_uniform(300, seed);
    const auto t = rooted_mst(inst);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{4}, std::size_t{8},
                          std::size_t{16}, kUnlimitedDepth}) {
      const double w = upsweep(inst, t, k, false).weight;
      EXPECT_LE(w, previous + 1e-9) << "seed=" << seed << " k=" << k;
      previous = w;
    }
  }
}

TEST(Upsweep, PostOrderIndependent) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = generate_uniform(80, 100 + trial);
    const auto t = rooted_mst(inst);
    const auto base = upsweep(inst, t, 6, false);
    // Random topological order: repeatedly pick a random ready node.
    std::vector<std::size_t> pending(t.size());
    std::vector<Node> ready;
    for (Node u = 0; u < t.size(); ++u) {
      pending[u] = t.children(u).size();
      if (pending[u] == 0) ready.push_back(u);
    }
    UpsweepOptions o;
    o.depth_limit = 6;
    while (!ready.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
      const std::size_t i = pick(rng);
      const Node u = ready[i];
      ready.erase(ready.begin() + i);
      o.order.push_back(u);
      if (auto p = t.parent(u); p && --pending[*p] == 0) ready.push_back(*p);
    }
    const auto other = upsweep(inst, t, o);
    EXPECT_EQ(other.weight, base.weight);
    EXPECT_EQ(other.best_a, base.best_a);
  }
}

TEST(Upsweep, DegreeIncreaseNeverHurtsAtFullDepth) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = ref::random_instance(rng, 40);
    const auto t = rooted_mst(inst);
    const double base = upsweep(inst, t).weight;
    for (std::size_t d : {3, 4, 5}) EXPECT_LE(upsweep(inst, degree_increase(t, d)).weight, base + 1e-9);
  }
}

TEST(Upsweep, CountersRespectComplexityBounds) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (std::size_t n : {50, 200, 500}) {
      const auto inst = generate_uniform(n, seed);
      for (std::size_t limit : {1, 5}) {
        const auto t = degree_increase(rooted_mst(inst), limit);
        const double d = static_cast<double>(t.max_children());
        const auto s = upsweep(inst, t).stats;
        const double nn = static_cast<double>(n);
        EXPECT_LE(static_cast<double>(s.peak_live_entries), std::pow(2.0, d) * nn);
        EXPECT_LE(static_cast<double>(s.evaluations), std::pow(4.0, d) * nn * nn);
        EXPECT_EQ(s.bipartition_entries, 0u);
      }
    }
  }
}

TEST(Upsweep, KeepsBipartitionsOnRequest) {
  const auto inst = generate_uniform(50, 3);
  const auto t = rooted_mst(inst);
  EXPECT_FALSE(upsweep(inst, t).bipartitions.has_value());
  const auto kept = upsweep(inst, t, kUnlimitedDepth, true);
  ASSERT_TRUE(kept.bipartitions.has_value());
  EXPECT_TRUE(kept.bipartitions->matches(t));
  EXPECT_EQ(kept.bipartitions->entry_count(), kept.stats.bipartition_entries);
}

TEST(Upsweep, Guards) {
  const auto inst = line({0, 1, 2});
  const auto t = path_tree(3);
  EXPECT_THROW(upsweep(inst, t, 0, false), ConfigError);
  EXPECT_THROW(upsweep(line({0, 1}), t), ConfigError);
  EXPECT_THROW(upsweep(line({0}), path_tree(1)), ConfigError);

  // 21 children under one node.
  std::vector<Point> pts{{-1, 0}, {0, 0}};
  for (int i = 0; i < 21; ++i) pts.push_back({std::cos(i * 0.3), std::sin(i * 0.3)});
  const auto wide_inst = Instance::from_points(pts);
  std::vector<Node> parent(23, 1);
  parent[0] = RootedTree::kNone;
  parent[1] = 0;
  const auto wide = RootedTree::from_parents(parent);
  EXPECT_THROW(upsweep(wide_inst, wide), GuardError);

  UpsweepOptions tiny;
  tiny.max_entries = 10;
  const auto big = generate_uniform(100, 1);
  EXPECT_THROW(upsweep(big, rooted_mst(big), tiny), GuardError);
}

TEST(MaskHelpers, DropAndInsert) {
  EXPECT_EQ(detail::drop_bit(0b1011, 1), 0b101u);
  EXPECT_EQ(detail::insert_zero_bit(0b11, 1), 0b101u);
  EXPECT_EQ(detail::full_mask(3), 0b111u);
  EXPECT_EQ(detail::full_mask(0), 0u);
  for (ChildMask m = 0; m < 64; ++m)
    for (std::size_t j = 0; j < 6; ++j)
      EXPECT_EQ(detail::drop_bit(detail::insert_zero_bit(m, j), j), m);
}
