#pragma once

// Dual spanning tree: the dual edges crossing the primal non-tree edges.
//
// The dual of the wired box is the full grid of faces, ring included. The
// complement of a wired tree is a spanning tree of that grid, rooted here at
// the lower-left ring face. (Merging all ring faces into one vertex would
// close a cycle whenever the primal tree uses two outward edges.)

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mot/errors.hpp"
#include "mot/lattice.hpp"
#include "mot/ust.hpp"

namespace mot {

inline DualVertex default_dual_root(const Box& box) { return {-box.N - 1, -box.N - 1}; }

// Whether the primal edge crossed by the dual edge f -> f.step(d) belongs to t.
inline bool primal_crossed_in_tree(const SpanningTree& t, DualVertex f, Dir d) {
  const DualEdge de(f, f.step(d));
  const Edge e = crossing_primal_edge(de);
  const Box& box = t.box();
  if (box.contains(e.a)) return t.has_edge(e.a, dir_between(e.a.x, e.a.y, e.b.x, e.b.y));
  if (box.contains(e.b)) return t.has_edge(e.b, dir_between(e.b.x, e.b.y, e.a.x, e.a.y));
  throw domain_error("dual edge outside the wired box");
}

class DualSpanningTree {
 public:
  DualSpanningTree(Box box, DualVertex root, std::vector<Dir> parent)
      : box_(box), root_(root), parent_(std::move(parent)) {
    if (parent_.size() != box_.dual_size()) {
      throw domain_error("dual parent table size does not match the box");
    }
    if (!box_.contains(root_) || parent_[box_.dual_index(root_)] != Dir::Root) {
      throw domain_error("dual root must be a dual vertex with no parent");
    }
  }

  const Box& box() const { return box_; }
  DualVertex root() const { return root_; }
  std::span<const Dir> parent_dirs() const { return parent_; }

  Dir parent_dir(DualVertex f) const { return parent_[checked_index(f)]; }

  std::optional<DualVertex> parent(DualVertex f) const {
    const Dir d = parent_dir(f);
    if (d == Dir::Root) return std::nullopt;
    return f.step(d);
  }

  bool has_edge(DualVertex f, Dir d) const {
    if (d == Dir::Root) return false;
    if (parent_dir(f) == d) return true;
    const DualVertex g = f.step(d);
    return box_.contains(g) && parent_dir(g) == opposite(d);
  }

  bool has_edge(const DualEdge& e) const {
    return has_edge(e.a, dir_between(e.a.i, e.a.j, e.b.i, e.b.j));
  }

  std::size_t edge_count() const { return parent_.size() - 1; }

  // Acyclic and every vertex reaches the root.
  void check_invariants() const {
    std::vector<std::uint8_t> state(parent_.size(), 0);
    std::vector<std::size_t> chain;
    state[box_.dual_index(root_)] = 2;
    for (std::size_t start = 0; start < parent_.size(); ++start) {
      std::size_t u = start;
      chain.clear();
      while (state[u] != 2) {
        if (state[u] == 1) throw domain_error("dual parent pointers contain a cycle");
        state[u] = 1;
        chain.push_back(u);
        const Dir d = parent_[u];
        if (d == Dir::Root) throw domain_error("second dual root");
        const DualVertex g = box_.dual_vertex(u).step(d);
        if (!box_.contains(g)) throw domain_error("dual parent leaves the dual grid");
        u = box_.dual_index(g);
      }
      for (std::size_t c : chain) state[c] = 2;
    }
  }

  bool operator==(const DualSpanningTree& o) const {
    return box_.N == o.box_.N && root_ == o.root_ && parent_ == o.parent_;
  }

 private:
  std::size_t checked_index(DualVertex f) const {
    if (!box_.contains(f)) throw domain_error("dual vertex outside the dual grid");
    return box_.dual_index(f);
  }

  Box box_;
  DualVertex root_;
  std::vector<Dir> parent_;
};

// Flood from the root through dual edges whose crossing primal edge is not in
// the tree; neighbours are scanned in E, N, W, S order.
inline DualSpanningTree build_dual(const SpanningTree& t) {
  const Box& box = t.box();
  const DualVertex root = default_dual_root(box);
  std::vector<Dir> parent(box.dual_size(), Dir::Root);
  std::vector<std::uint8_t> seen(box.dual_size(), 0);
  std::deque<DualVertex> queue{root};
  seen[box.dual_index(root)] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const DualVertex f = queue.front();
    queue.pop_front();
    for (Dir d : kDirs) {
      const DualVertex g = f.step(d);
      if (!box.contains(g) || seen[box.dual_index(g)]) continue;
      if (primal_crossed_in_tree(t, f, d)) continue;
      seen[box.dual_index(g)] = 1;
      parent[box.dual_index(g)] = opposite(d);
      queue.push_back(g);
      ++reached;
    }
  }
  if (reached != box.dual_size()) {
    throw domain_error("complement of the primal tree does not span the dual grid");
  }
  return DualSpanningTree(box, root, std::move(parent));
}

// Number of primal edges of the wired box (outward edges included).
inline std::size_t wired_edge_count(const Box& box) {
  const std::size_t s = static_cast<std::size_t>(box.side());
  return 2 * s * (s + 1);
}

}  // namespace mot
