#include <gtest/gtest.h>

#include <random>

#include "dtsp/generators.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/spanning_tree.hpp"
#include "reference.hpp"

using namespace dtsp;

namespace {

Instance line(std::vector<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x, 0});
  return Instance::from_points(pts);
}

Instance unit_square() { return Instance::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

RootedTree path_tree(std::size_t n) {
  std::vector<Node> parent(n, RootedTree::kNone);
  for (Node v = 1; v < n; ++v) parent[v] = v - 1;
  return RootedTree::from_parents(parent);
}

std::vector<Node> kids(const RootedTree& t, Node u) {
  return {t.children(u).begin(), t.children(u).end()};
}

}  // namespace

TEST(Mst, TwoPoints) {
  const auto inst = Instance::from_points({{0, 0}, {3, 4}});
  const auto edges = minimum_spanning_tree(inst);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].a, 0u);
  EXPECT_EQ(edges[0].b, 1u);
  EXPECT_DOUBLE_EQ(edges[0].w, 5.0);
}

TEST(Mst, CollinearIsThePath) {
  const auto edges = minimum_spanning_tree(line({0, 1, 2}));
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(std::make_pair(edges[0].a, edges[0].b), std::make_pair(Node{0}, Node{1}));
  EXPECT_EQ(std::make_pair(edges[1].a, edges[1].b), std::make_pair(Node{1}, Node{2}));
  EXPECT_DOUBLE_EQ(tree_weight(edges), 2.0);
}

TEST(Mst, UnitSquareMatchesEnumeration) {
  const auto inst = unit_square();
  EXPECT_DOUBLE_EQ(ref::prufer_mst_weight(inst), 3.0);
  EXPECT_DOUBLE_EQ(tree_weight(minimum_spanning_tree(inst)), 3.0);
}

TEST(Mst, MatchesPruferEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto inst = ref::random_instance(rng, n);
    const auto edges = minimum_spanning_tree(inst);
    ASSERT_EQ(edges.size(), n - 1);
    EXPECT_NEAR(tree_weight(edges), ref::prufer_mst_weight(inst), 1e-9);
    for (const auto& e : edges) {
      EXPECT_LT(e.a, e.b);
      EXPECT_EQ(e.w, inst(e.a, e.b));
    }
  }
}

TEST(Mst, DuplicatePointsAreDeterministic) {
  const auto inst = Instance::from_points({{0, 0}, {0, 0}, {1, 0}, {1, 0}, {0, 0}});
  const auto a = minimum_spanning_tree(inst);
  const auto b = minimum_spanning_tree(inst);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].a, b[i].a);
    EXPECT_EQ(a[i].b, b[i].b);
  }
  EXPECT_DOUBLE_EQ(tree_weight(a), 1.0);
  EXPECT_NO_THROW(root_tree(a, 5));
}

TEST(RootTree, Path) {
  const auto t = root_tree(minimum_spanning_tree(line({0, 1, 2})), 3);
  EXPECT_EQ(t.root(), 0u);
  EXPECT_EQ(kids(t, 0), (std::vector<Node>{1}));
  EXPECT_EQ(kids(t, 1), (std::vector<Node>{2}));
  EXPECT_EQ(t.depth(2), 2u);
  EXPECT_EQ(t.subtree_size(0), 3u);
}

TEST(RootTree, StarRootsAtLowestLeaf) {
  std::vector<TreeEdge> edges{{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}};
  const auto t = root_tree(edges, 5);
  EXPECT_EQ(t.root(), 1u);
  EXPECT_EQ(kids(t, 1), (std::vector<Node>{0}));
  EXPECT_EQ(kids(t, 0), (std::vector<Node>{2, 3, 4}));
  EXPECT_EQ(t.max_children(), 3u);
}

TEST(RootTree, SingleEdge) {
  const auto t = root_tree(std::vector<TreeEdge>{{0, 1, 2.0}}, 2);
  EXPECT_EQ(t.root(), 0u);
  EXPECT_EQ(kids(t, 0), (std::vector<Node>{1}));
}

TEST(RootTree, RejectsNonTrees) {
  // Triangle plus an isolated node: right edge count, no leaf, disconnected.
  EXPECT_THROW(root_tree(std::vector<TreeEdge>{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, 4), ConfigError);
  // Cycle with a pendant: a leaf exists but node 4 is unreachable.
  EXPECT_THROW(root_tree(std::vector<TreeEdge>{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {2, 3, 1}}, 5),
               ConfigError);
  EXPECT_THROW(root_tree(std::vector<TreeEdge>{{0, 1, 1}}, 3), ConfigError);
}

TEST(RootTree, RootHasOneChildAndInvariantsHold) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = generate_uniform(60, seed);
    const auto t = rooted_mst(inst);
    EXPECT_EQ(t.children(t.root()).size(), 1u);
    EXPECT_EQ(t.subtree_size(t.root()), 60u);
    std::size_t links = 0, max_c = 0;
    for (Node u = 0; u < 60; ++u) {
      links += t.parent(u).has_value();
      const auto c = t.children(u);
      EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
      max_c = std::max(max_c, c.size());
    }
    EXPECT_EQ(links, 59u);
    EXPECT_EQ(t.max_children(), max_c);
    EXPECT_LE(t.max_children(), 5u);
  }
}

TEST(RootedTree, Traversals) {
  // 0 -> {1, 4}, 1 -> {2, 3}
  const auto t = RootedTree::from_parents({RootedTree::kNone, 0, 1, 1, 0});
  const auto pre = t.preorder();
  EXPECT_EQ(std::vector<Node>(pre.begin(), pre.end()), (std::vector<Node>{0, 1, 2, 3, 4}));
  EXPECT_EQ(t.postorder(), (std::vector<Node>{2, 3, 1, 4, 0}));
  EXPECT_TRUE(t.is_ancestor(1, 3));
  EXPECT_FALSE(t.is_ancestor(4, 3));
  EXPECT_EQ(t.child_index(4), 1u);
  EXPECT_EQ(t.degree(1), 3u);
  EXPECT_EQ(t.degree(0), 2u);
  EXPECT_THROW(RootedTree::from_parents({RootedTree::kNone, 2, 1}), ConfigError);
  EXPECT_THROW(RootedTree::from_parents({RootedTree::kNone, RootedTree::kNone}), ConfigError);
  EXPECT_THROW(RootedTree::from_parents({RootedTree::kNone, 7}), ConfigError);
}

TEST(DegreeIncrease, PathWithLimitFour) {
  const auto t = degree_increase(path_tree(4), 4);
  EXPECT_EQ(kids(t, 1), (std::vector<Node>{2, 3}));
  EXPECT_TRUE(t.is_leaf(2));
  EXPECT_EQ(t.root(), 0u);
}

TEST(DegreeIncrease, PathWithLimitTwoUnchanged) {
  // Node 1 already has graph degree 2; adopting node 3 would make it 3 > 2.
  const auto t = path_tree(4);
  EXPECT_EQ(degree_increase(t, 2), t);
  EXPECT_EQ(degree_increase(t, 1), t);
}

TEST(DegreeIncrease, TwoNodesUnchanged) {
  const auto t = path_tree(2);
  EXPECT_EQ(degree_increase(t, 5), t);
}

TEST(DegreeIncrease, DegreesReadFromTheCurrentTree) {
  // Path 0-1-2-3-4, limit 4. Node 2 hands 3 to node 1 (degree 2 -> 3); then
  // node 3, now a child of 1, hands 4 to node 1 (degree 3 -> 4).
  const auto t = degree_increase(path_tree(5), 4);
  EXPECT_EQ(kids(t, 1), (std::vector<Node>{2, 3, 4}));
  // With limit 3 the second move would give node 1 degree 4.
  const auto u = degree_increase(path_tree(5), 3);
  EXPECT_EQ(kids(u, 1), (std::vector<Node>{2, 3}));
  EXPECT_EQ(kids(u, 3), (std::vector<Node>{4}));
}

TEST(DegreeIncrease, RejectsRootWithTwoChildren) {
  const auto t = RootedTree::from_parents({RootedTree::kNone, 0, 0});
  EXPECT_THROW(degree_increase(t, 5), InvariantError);
  EXPECT_THROW(degree_increase(path_tree(4), 0), ConfigError);
}

TEST(DegreeIncrease, ConformingToursOnlyGrow) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 5;  // 4..8
    const auto inst = ref::random_instance(rng, n);
    const auto t = rooted_mst(inst);
    for (std::size_t limit : {3, 4, 5}) {
      const auto t1 = degree_increase(t, limit);
      ASSERT_EQ(t1.size(), t.size());
      ASSERT_EQ(t1.root(), t.root());
      const auto p = ref::parents_of(t), p1 = ref::parents_of(t1);
      std::size_t before = 0, after = 0;
      detail::for_each_cycle(n, [&](std::span<const Node> order) {
        const std::vector<Node> o(order.begin(), order.end());
        const bool in_t = ref::cycle_conforms(o, p);
        const bool in_t1 = ref::cycle_conforms(o, p1);
        EXPECT_FALSE(in_t && !in_t1);
        before += in_t;
        after += in_t1;
      });
      EXPECT_GE(after, before);
      // Any node that adopted children respects the limit.
      for (Node u = 0; u < n; ++u) {
        if (t1.children(u).size() > t.children(u).size()) {
          EXPECT_LE(t1.degree(u), limit);
        }
      }
    }
  }
}

TEST(DegreeIncrease, LimitTwoIsANoOp) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = rooted_mst(ref::random_instance(rng, 30));
    EXPECT_EQ(degree_increase(t, 2), t);
  }
}

TEST(TreeDistance, Basics) {
  const auto t = path_tree(3);
  EXPECT_EQ(tree_distance(t, 1, 1), 0u);
  EXPECT_EQ(tree_distance(t, 0, 2), 2u);
  EXPECT_EQ(tree_distance(t, 2, 0), 2u);
}

TEST(TreeDistance, MatchesBfs) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto parent = ref::random_parents(rng, 50);
    const auto t = RootedTree::from_parents(parent);
    for (Node a = 0; a < 50; ++a)
      for (Node b = 0; b < 50; ++b) ASSERT_EQ(tree_distance(t, a, b), ref::bfs_distance(parent, a, b));
  }
}
