#pragma once

// Uniform spanning trees of the wired box (Wilson's algorithm), loop erasure,
// and exact small-graph oracles (enumeration and the matrix-tree count).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/lattice.hpp"
#include "mot/rng.hpp"

namespace mot {

// Rooted spanning tree of the wired box. Every box vertex stores the direction
// of its parent edge; a step that leaves the box goes to the wired root.
class SpanningTree {
 public:
  SpanningTree(Box box, std::uint64_t seed, std::vector<Dir> parent)
      : box_(box), seed_(seed), parent_(std::move(parent)) {
    if (parent_.size() != box_.size()) {
      throw domain_error("parent table size does not match the box");
    }
  }

  const Box& box() const { return box_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const Dir> parent_dirs() const { return parent_; }

  Dir parent_dir(Vertex v) const { return parent_[checked_index(v)]; }

  // Parent vertex, or nullopt when the parent is the wired root.
  std::optional<Vertex> parent(Vertex v) const {
    const Vertex w = v.step(parent_dir(v));
    if (!box_.contains(w)) return std::nullopt;
    return w;
  }

  // Whether the edge from v in direction d (possibly to the root) is a tree edge.
  bool has_edge(Vertex v, Dir d) const {
    if (parent_dir(v) == d) return true;
    const Vertex w = v.step(d);
    return box_.contains(w) && parent_dir(w) == opposite(d);
  }

  // Either endpoint may lie outside the box (an outward edge).
  bool has_edge(const Edge& e) const {
    if (box_.contains(e.a)) return has_edge(e.a, dir_between(e.a.x, e.a.y, e.b.x, e.b.y));
    return has_edge(e.b, dir_between(e.b.x, e.b.y, e.a.x, e.a.y));
  }

  // Acyclic, every vertex reaches the root. With one parent edge per box
  // vertex this also fixes the edge count at |V| - 1 (root included).
  void check_invariants() const {
    std::vector<std::uint8_t> state(parent_.size(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::size_t> chain;
    for (std::size_t start = 0; start < parent_.size(); ++start) {
      std::size_t u = start;
      chain.clear();
      while (true) {
        if (state[u] == 2) break;
        if (state[u] == 1) throw domain_error("parent pointers contain a cycle");
        state[u] = 1;
        chain.push_back(u);
        const Dir d = parent_[u];
        if (d == Dir::Root) throw domain_error("box vertex without a parent edge");
        const Vertex w = box_.vertex(u).step(d);
        if (!box_.contains(w)) break;
        u = box_.index(w);
      }
      for (std::size_t c : chain) state[c] = 2;
    }
  }

  bool operator==(const SpanningTree& o) const {
    return box_.N == o.box_.N && box_.n == o.box_.n && parent_ == o.parent_;
  }

 private:
  std::size_t checked_index(Vertex v) const {
    if (!box_.contains(v)) throw domain_error("vertex outside the box");
    return box_.index(v);
  }

  Box box_;
  std::uint64_t seed_;
  std::vector<Dir> parent_;
};

using WalkPath = std::vector<Vertex>;

// Chronological loop erasure: scan forward, and on every revisit cut the
// path back to the first visit.
inline WalkPath loop_erase(std::span<const Vertex> path) {
  if (path.empty()) throw domain_error("loop_erase of an empty path");
  auto key = [](Vertex v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x)) << 32) |
           static_cast<std::uint32_t>(v.y);
  };
  WalkPath out;
  std::unordered_map<std::uint64_t, std::size_t> where;
  where.reserve(path.size());
  for (const Vertex& v : path) {
    auto it = where.find(key(v));
    if (it != where.end()) {
      const std::size_t keep = it->second + 1;
      for (std::size_t k = keep; k < out.size(); ++k) where.erase(key(out[k]));
      out.resize(keep);
    } else {
      where.emplace(key(v), out.size());
      out.push_back(v);
    }
  }
  return out;
}

// Wilson's algorithm rooted at the wired boundary. Vertices are processed in
// row-major order; the loop erasure is implicit in the last-exit pointers.
inline SpanningTree wilson_sample(const Box& box, std::uint64_t seed) {
  if (box.N < 1) throw domain_error("box half-width must be positive");
  Rng rng(splitmix64(seed));
  DirectionSource dirs(rng);

  const int N = box.N;
  const int side = box.side();
  const std::size_t size = box.size();
  std::vector<Dir> next(size, Dir::Root);
  std::vector<std::uint8_t> in_tree(size, 0);
  const std::array<std::ptrdiff_t, 4> offset{1, side, -1, -side};

  for (std::size_t start = 0; start < size; ++start) {
    if (in_tree[start]) continue;
    int x = static_cast<int>(start % side) - N;
    int y = static_cast<int>(start / side) - N;
    std::size_t u = start;
    while (true) {
      const int d = dirs.next();
      next[u] = static_cast<Dir>(d);
      x += kDx[d];
      y += kDy[d];
      if (x < -N || x > N || y < -N || y > N) break;
      u = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(u) + offset[d]);
      if (in_tree[u]) break;
    }
    x = static_cast<int>(start % side) - N;
    y = static_cast<int>(start / side) - N;
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      const int d = static_cast<int>(next[u]);
      x += kDx[d];
      y += kDy[d];
      if (x < -N || x > N || y < -N || y > N) break;
      u = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(u) + offset[d]);
    }
  }
  return SpanningTree(box, seed, std::move(next));
}

// Arrow i at a vertex is a hash of (seed, physical position, i), with the
// physical position being the lattice point times `scale`. Every departure
// from a vertex pops its next arrow, so the tree is a function of the arrow
// stacks alone and is uniform. Boxes at different meshes that share a seed
// and physical points share stacks there.
inline Dir stack_arrow(std::uint64_t seed, std::int64_t px, std::int64_t py, std::uint32_t i) {
  const std::uint64_t key = splitmix64(static_cast<std::uint64_t>(px) * 0x9e3779b97f4a7c15ULL ^
                                       splitmix64(static_cast<std::uint64_t>(py)));
  return static_cast<Dir>(splitmix64(seed ^ splitmix64(key + i)) >> 62);
}

inline SpanningTree wilson_sample_stacks(const Box& box, std::uint64_t seed, std::int64_t scale = 1) {
  if (box.N < 1) throw domain_error("box half-width must be positive");
  if (scale < 1) throw domain_error("stack scale must be positive");
  const int N = box.N;
  const int side = box.side();
  const std::size_t size = box.size();
  std::vector<Dir> next(size, Dir::Root);
  std::vector<std::uint8_t> in_tree(size, 0);
  std::vector<std::uint32_t> popped(size, 0);
  for (std::size_t start = 0; start < size; ++start) {
    if (in_tree[start]) continue;
    std::size_t u = start;
    while (true) {
      const int x = static_cast<int>(u % side) - N, y = static_cast<int>(u / side) - N;
      const Dir d = stack_arrow(seed, x * scale, y * scale, popped[u]++);
      next[u] = d;
      const Vertex w = Vertex{x, y}.step(d);
      if (!box.contains(w)) break;
      u = box.index(w);
      if (in_tree[u]) break;
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      const Vertex w = box.vertex(u).step(next[u]);
      if (!box.contains(w)) break;
      u = box.index(w);
    }
  }
  return SpanningTree(box, seed, std::move(next));
}

// ---------------------------------------------------------------------------
// Small multigraphs for the exact oracles.

struct SmallGraph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // parallel edges allowed, no loops
};

inline SmallGraph path_graph(int n) {
  SmallGraph g{n, {}};
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

inline SmallGraph cycle_graph(int n) {
  SmallGraph g = path_graph(n);
  if (n > 2) g.edges.emplace_back(n - 1, 0);
  return g;
}

// w x h grid, vertex (x, y) -> y * w + x.
inline SmallGraph grid_graph(int w, int h) {
  SmallGraph g{w * h, {}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) g.edges.emplace_back(y * w + x, y * w + x + 1);
      if (y + 1 < h) g.edges.emplace_back(y * w + x, (y + 1) * w + x);
    }
  }
  return g;
}

// The wired box as a multigraph: box vertices in Box::index order, root last.
// Outward edges are listed per boundary vertex in E, N, W, S order.
inline SmallGraph wired_box_graph(const Box& box) {
  const int root = static_cast<int>(box.size());
  SmallGraph g{root + 1, {}};
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const Vertex v = box.vertex(idx);
    for (Dir d : kDirs) {
      const Vertex w = v.step(d);
      if (!box.contains(w)) {
        g.edges.emplace_back(static_cast<int>(idx), root);
      } else if (d == Dir::E || d == Dir::N) {
        g.edges.emplace_back(static_cast<int>(idx), static_cast<int>(box.index(w)));
      }
    }
  }
  return g;
}

namespace detail {

inline int dsu_find(std::vector<int>& p, int a) {
  while (p[a] != a) a = p[a] = p[p[a]];
  return a;
}

inline bool is_connected(const SmallGraph& g) {
  if (g.vertex_count == 0) return true;
  std::vector<int> p(g.vertex_count);
  std::iota(p.begin(), p.end(), 0);
  int comps = g.vertex_count;
  for (auto [a, b] : g.edges) {
    const int ra = dsu_find(p, a), rb = dsu_find(p, b);
    if (ra != rb) {
      p[ra] = rb;
      --comps;
    }
  }
  return comps == 1;
}

inline void enumerate_rec(const SmallGraph& g, std::size_t next_edge, std::vector<int>& parent,
                          std::vector<int>& chosen, std::vector<std::vector<int>>& out) {
  const std::size_t need = static_cast<std::size_t>(g.vertex_count - 1);
  if (chosen.size() == need) {
    out.push_back(chosen);
    return;
  }
  if (g.edges.size() - next_edge < need - chosen.size()) return;
  for (std::size_t e = next_edge; e < g.edges.size(); ++e) {
    if (g.edges.size() - e < need - chosen.size()) break;
    std::vector<int> saved = parent;
    const int ra = dsu_find(parent, g.edges[e].first);
    const int rb = dsu_find(parent, g.edges[e].second);
    if (ra == rb) continue;
    parent[ra] = rb;
    chosen.push_back(static_cast<int>(e));
    enumerate_rec(g, e + 1, parent, chosen, out);
    chosen.pop_back();
    parent = std::move(saved);
  }
}

}  // namespace detail

inline constexpr int kMaxEnumerationVertices = 12;
inline constexpr int kMaxCountVertices = 64;

// All spanning trees as sorted lists of edge indices, in lexicographic order.
inline std::vector<std::vector<int>> enumerate_spanning_trees(const SmallGraph& g) {
  if (g.vertex_count > kMaxEnumerationVertices) {
    throw resource_error("enumeration is limited to " + std::to_string(kMaxEnumerationVertices) +
                         " vertices");
  }
  if (g.vertex_count < 1 || !detail::is_connected(g)) {
    throw domain_error("graph is not connected");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> parent(g.vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> chosen;
  detail::enumerate_rec(g, 0, parent, chosen, out);
  return out;
}

// Matrix-tree theorem: determinant of the Laplacian with the last row and
// column removed, by fraction-free (Bareiss) elimination in 128-bit integers.
inline std::uint64_t spanning_tree_count(const SmallGraph& g) {
  const int n = g.vertex_count;
  if (n > kMaxCountVertices) {
    throw resource_error("exact count is limited to " + std::to_string(kMaxCountVertices) +
                         " vertices");
  }
  if (n < 1 || !detail::is_connected(g)) throw domain_error("graph is not connected");
  if (n == 1) return 1;
  using Wide = __int128;
  const int m = n - 1;
  std::vector<Wide> a(static_cast<std::size_t>(m) * m, 0);
  auto at = [&](int r, int c) -> Wide& { return a[static_cast<std::size_t>(r) * m + c]; };
  for (auto [u, v] : g.edges) {
    if (u < m) at(u, u) += 1;
    if (v < m) at(v, v) += 1;
    if (u < m && v < m) {
      at(u, v) -= 1;
      at(v, u) -= 1;
    }
  }
  auto overflow = [] { return resource_error("spanning tree count exceeds exact 64-bit range"); };
  Wide prev = 1;
  int sign = 1;
  for (int k = 0; k < m; ++k) {
    if (at(k, k) == 0) {
      int swap_row = -1;
      for (int r = k + 1; r < m; ++r) {
        if (at(r, k) != 0) {
          swap_row = r;
          break;
        }
      }
      if (swap_row < 0) return 0;
      for (int c = 0; c < m; ++c) std::swap(at(k, c), at(swap_row, c));
      sign = -sign;
    }
    for (int r = k + 1; r < m; ++r) {
      for (int c = k + 1; c < m; ++c) {
        Wide x, y;
        if (__builtin_mul_overflow(at(r, c), at(k, k), &x) ||
            __builtin_mul_overflow(at(r, k), at(k, c), &y)) {
          throw overflow();
        }
        Wide diff;
        if (__builtin_sub_overflow(x, y, &diff)) throw overflow();
        at(r, c) = diff / prev;
      }
      at(r, k) = 0;
    }
    prev = at(k, k);
  }
  const Wide det = sign * at(m - 1, m - 1);
  if (det < 0 || det > static_cast<Wide>(std::numeric_limits<std::uint64_t>::max())) {
    throw overflow();
  }
  return static_cast<std::uint64_t>(det);
}

// Wilson's algorithm on a small multigraph, rooted at `root`. Returns the
// sorted edge indices of the sampled tree.
inline std::vector<int> wilson_sample_graph(const SmallGraph& g, int root, Rng& rng) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.vertex_count);  // (neighbour, edge)
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [a, b] = g.edges[e];
    adj[a].emplace_back(b, static_cast<int>(e));
    adj[b].emplace_back(a, static_cast<int>(e));
  }
  std::vector<char> in_tree(g.vertex_count, 0);
  std::vector<std::pair<int, int>> next(g.vertex_count, {-1, -1});
  in_tree[root] = 1;
  for (int start = 0; start < g.vertex_count; ++start) {
    int u = start;
    while (!in_tree[u]) {
      std::uniform_int_distribution<std::size_t> pick(0, adj[u].size() - 1);
      next[u] = adj[u][pick(rng)];
      u = next[u].first;
    }
    for (u = start; !in_tree[u]; u = next[u].first) in_tree[u] = 1;
  }
  std::vector<int> edges;
  for (int v = 0; v < g.vertex_count; ++v) {
    if (v != root) edges.push_back(next[v].second);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Tree edges of a wired-box tree, as indices into wired_box_graph(box).edges.
inline std::vector<int> tree_edge_indices(const SpanningTree& t) {
  const Box& box = t.box();
  std::vector<int> out;
  int e = 0;
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const Vertex v = box.vertex(idx);
    for (Dir d : kDirs) {
      const Vertex w = v.step(d);
      if (!box.contains(w) || d == Dir::E || d == Dir::N) {
        if (t.has_edge(v, d)) out.push_back(e);
        ++e;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mot
