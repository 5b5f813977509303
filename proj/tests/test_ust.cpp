#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <set>

#include "mot/hypothesis.hpp"
#include "mot/ust.hpp"
#include "oracles.hpp"

using namespace mot;
using mot::oracle::tree_ids;

namespace {

// Loop erasure via last exits: next point is the one after the last visit to
// the current point. Independent of the chronological implementation.
WalkPath last_exit_erasure(const WalkPath& p) {
  WalkPath out;
  std::size_t k = 0;
  while (true) {
    out.push_back(p[k]);
    std::size_t last = k;
    for (std::size_t j = k; j < p.size(); ++j) {
      if (p[j] == p[k]) last = j;
    }
    if (last + 1 >= p.size()) return out;
    k = last + 1;
  }
}

WalkPath random_walk(Rng& rng, std::size_t steps) {
  DirectionSource dirs(rng);
  WalkPath p{{0, 0}};
  for (std::size_t s = 0; s < steps; ++s) p.push_back(p.back().step(static_cast<Dir>(dirs.next())));
  return p;
}


}  // namespace

TEST(LoopErase, Examples) {
  const Vertex a{0, 0}, b{1, 0}, c{0, 1};
  EXPECT_EQ(loop_erase(WalkPath{a}), (WalkPath{a}));
  EXPECT_EQ(loop_erase(WalkPath{a, b, a, c}), (WalkPath{a, c}));
  EXPECT_THROW(loop_erase(WalkPath{}), domain_error);
}

TEST(LoopErase, RandomWalksMatchLastExitOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const WalkPath p = random_walk(rng, 50);
    const WalkPath e = loop_erase(p);
    EXPECT_EQ(e, last_exit_erasure(p));
    EXPECT_EQ(e.front(), p.front());
    EXPECT_EQ(e.back(), p.back());
    std::set<Vertex> seen(e.begin(), e.end());
    EXPECT_EQ(seen.size(), e.size());
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
      EXPECT_NE(dir_between(e[k].x, e[k].y, e[k + 1].x, e[k + 1].y), Dir::Root);
    }
    // Subsequence of the input.
    std::size_t j = 0;
    for (const Vertex& v : p) {
      if (j < e.size() && v == e[j]) ++j;
    }
    EXPECT_EQ(j, e.size());
    EXPECT_EQ(loop_erase(e), e);
  }
}

TEST(Counting, SmallGraphs) {
  EXPECT_EQ(spanning_tree_count(cycle_graph(4)), 4u);
  EXPECT_EQ(spanning_tree_count(path_graph(3)), 1u);
  EXPECT_EQ(spanning_tree_count(grid_graph(3, 3)), 192u);
  EXPECT_EQ(enumerate_spanning_trees(cycle_graph(4)).size(), 4u);
  EXPECT_EQ(enumerate_spanning_trees(path_graph(3)).size(), 1u);
  EXPECT_EQ(enumerate_spanning_trees(grid_graph(3, 3)).size(), 192u);
  // Published grid counts (OEIS A007341), beyond enumeration range.
  EXPECT_EQ(spanning_tree_count(grid_graph(4, 4)), 100352u);
  EXPECT_EQ(spanning_tree_count(grid_graph(5, 5)), 557568000u);
}

TEST(Counting, EnumerationMatchesDeterminantOnRandomGraphs) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    SmallGraph g = path_graph(2 + static_cast<int>(rng() % 8));
    const std::size_t extra = rng() % 10;
    for (std::size_t k = 0; k < extra; ++k) {
      const int a = static_cast<int>(rng() % g.vertex_count);
      const int b = static_cast<int>(rng() % g.vertex_count);
      if (a != b) g.edges.emplace_back(a, b);
    }
    const auto trees = enumerate_spanning_trees(g);
    EXPECT_EQ(trees.size(), spanning_tree_count(g));
    std::set<std::vector<int>> unique(trees.begin(), trees.end());
    EXPECT_EQ(unique.size(), trees.size());
  }
}

TEST(Counting, WiredBoxAgrees) {
  const SmallGraph g = wired_box_graph(Box{1, 1});
  EXPECT_EQ(g.vertex_count, 10);
  EXPECT_EQ(g.edges.size(), 24u);
  EXPECT_EQ(enumerate_spanning_trees(g).size(), spanning_tree_count(g));
}

TEST(Counting, Errors) {
  SmallGraph disconnected{4, {{0, 1}, {2, 3}}};
  EXPECT_THROW(enumerate_spanning_trees(disconnected), domain_error);
  EXPECT_THROW(spanning_tree_count(disconnected), domain_error);
  EXPECT_THROW(enumerate_spanning_trees(grid_graph(4, 4)), resource_error);
  EXPECT_THROW(spanning_tree_count(grid_graph(8, 8)), resource_error);
  EXPECT_THROW(spanning_tree_count(grid_graph(9, 9)), resource_error);
}

TEST(Wilson, CycleFourTreesUniform) {
  const SmallGraph g = grid_graph(2, 2);
  const auto ids = tree_ids(g);
  ASSERT_EQ(ids.size(), 4u);
  std::vector<std::uint64_t> counts(4, 0);
  Rng rng(101);
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) ++counts[ids.at(wilson_sample_graph(g, 0, rng))];
  for (auto c : counts) EXPECT_NEAR(static_cast<double>(c) / samples, 0.25, 0.02);
  EXPECT_GT(chi_square_uniform(counts).p_value, 0.01);
}

TEST(Wilson, ThreeByThreeGridUniform) {
  const SmallGraph g = grid_graph(3, 3);
  const auto ids = tree_ids(g);
  ASSERT_EQ(ids.size(), 192u);
  std::vector<std::uint64_t> counts(ids.size(), 0);
  Rng rng(202);
  for (int s = 0; s < 100000; ++s) ++counts[ids.at(wilson_sample_graph(g, 4, rng))];
  EXPECT_GT(chi_square_uniform(counts).p_value, 0.01);
}

TEST(Wilson, CentreOfSmallestBoxUniform) {
  const Box box{1, 1};
  std::vector<std::uint64_t> counts(4, 0);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    ++counts[static_cast<int>(wilson_sample(box, s).parent_dir({0, 0}))];
  }
  EXPECT_GT(chi_square_uniform(counts).p_value, 0.01);
}

// Box sampler against exact parent marginals of the wired 3x3 box.
namespace {

void expect_wired_box_marginals(const std::function<SpanningTree(std::uint64_t)>& sample) {
  const Box box{1, 1};
  const SmallGraph g = wired_box_graph(box);
  const int root = g.vertex_count - 1;
  const auto trees = enumerate_spanning_trees(g);
  // Edge index -> (vertex, direction) seen from each endpoint.
  std::vector<std::pair<int, Dir>> from_a, from_b;
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const Vertex v = box.vertex(idx);
    for (Dir d : kDirs) {
      const Vertex w = v.step(d);
      if (!box.contains(w) || d == Dir::E || d == Dir::N) {
        from_a.emplace_back(static_cast<int>(idx), d);
        from_b.emplace_back(box.contains(w) ? static_cast<int>(box.index(w)) : root, opposite(d));
      }
    }
  }
  std::vector<std::vector<double>> exact(box.size(), std::vector<double>(4, 0.0));
  for (const auto& t : trees) {
    // Orient by repeated sweeps from the root.
    std::vector<int> parent_edge(g.vertex_count, -1);
    std::vector<char> reached(g.vertex_count, 0);
    reached[root] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int e : t) {
        auto [a, b] = g.edges[e];
        if (reached[a] && !reached[b]) {
          reached[b] = 1, parent_edge[b] = e, changed = true;
        } else if (reached[b] && !reached[a]) {
          reached[a] = 1, parent_edge[a] = e, changed = true;
        }
      }
    }
    for (std::size_t v = 0; v < box.size(); ++v) {
      const int e = parent_edge[v];
      const Dir d = from_a[e].first == static_cast<int>(v) ? from_a[e].second : from_b[e].second;
      exact[v][static_cast<int>(d)] += 1.0 / static_cast<double>(trees.size());
    }
  }
  std::vector<std::vector<std::uint64_t>> counts(box.size(), std::vector<std::uint64_t>(4, 0));
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const SpanningTree t = sample(1000 + s);
    for (std::size_t v = 0; v < box.size(); ++v) {
      ++counts[v][static_cast<int>(t.parent_dirs()[v])];
    }
  }
  for (std::size_t v = 0; v < box.size(); ++v) {
    EXPECT_GT(chi_square_test(counts[v], exact[v]).p_value, 0.01 / 9) << "vertex " << v;
  }
}

}  // namespace

TEST(Wilson, WiredBoxMarginalsMatchEnumeration) {
  expect_wired_box_marginals([](std::uint64_t s) { return wilson_sample(Box{1, 1}, s); });
}

TEST(WilsonStacks, WiredBoxMarginalsMatchEnumeration) {
  expect_wired_box_marginals([](std::uint64_t s) { return wilson_sample_stacks(Box{1, 1}, s); });
}

TEST(WilsonStacks, ScaledKeysAreUniformToo) {
  expect_wired_box_marginals([](std::uint64_t s) { return wilson_sample_stacks(Box{1, 1}, s, 4); });
}

TEST(WilsonStacks, SpanningTreesOfWiredGraph) {
  const Box box{1, 1};
  const auto ids = tree_ids(wired_box_graph(box));
  for (std::uint64_t s = 0; s < 500; ++s) {
    EXPECT_TRUE(ids.count(tree_edge_indices(wilson_sample_stacks(box, s))));
  }
}

TEST(WilsonStacks, DeterminedByArrowStacks) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SpanningTree a = wilson_sample_stacks(Box{10, 2}, s, 2);
    EXPECT_NO_THROW(a.check_invariants());
    EXPECT_EQ(a, wilson_sample_stacks(Box{10, 2}, s, 2));
    EXPECT_NE(a, wilson_sample_stacks(Box{10, 2}, s + 1, 2));
  }
  std::vector<std::uint64_t> counts(4, 0);
  for (std::uint32_t i = 0; i < 40000; ++i) ++counts[static_cast<int>(stack_arrow(9, 3, -7, i))];
  EXPECT_GT(chi_square_uniform(counts).p_value, 0.01);
}

TEST(Wilson, TreeEdgeSetsAreSpanningTreesOfWiredGraph) {
  const Box box{1, 1};
  const auto ids = tree_ids(wired_box_graph(box));
  for (std::uint64_t s = 0; s < 500; ++s) {
    EXPECT_TRUE(ids.count(tree_edge_indices(wilson_sample(box, s))));
  }
}

TEST(Wilson, InvariantsAndDeterminism) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Box box{8 + static_cast<int>(s % 9), 2};
    const SpanningTree t = wilson_sample(box, s);
    EXPECT_NO_THROW(t.check_invariants());
    EXPECT_EQ(t, wilson_sample(box, s));
  }
  EXPECT_NE(wilson_sample(Box{16, 4}, 1), wilson_sample(Box{16, 4}, 2));
}

TEST(SpanningTree, RejectsCycles) {
  const Box box{1, 1};
  std::vector<Dir> parent(box.size(), Dir::S);
  parent[box.index({0, 0})] = Dir::E;
  parent[box.index({1, 0})] = Dir::W;
  EXPECT_THROW(SpanningTree(box, 0, parent).check_invariants(), domain_error);
  parent[box.index({1, 0})] = Dir::S;
  EXPECT_NO_THROW(SpanningTree(box, 0, parent).check_invariants());
}
