#pragma once

// From the contour pair back to the scene.
//
// Two curve times see the same primal vertex exactly when L takes the same
// value at both and does not go lower in between (the curve explores the
// tree depth first); the same holds for R and dual vertices. Everything here
// is built on that identification.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mot/contour.hpp"
#include "mot/errors.hpp"
#include "mot/lattice.hpp"
#include "mot/peano.hpp"

namespace mot {

namespace detail {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) {
    while (p[a] != a) a = p[a] = p[p[a]];
    return a;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Sparse table for range minima.
class RangeMin {
 public:
  explicit RangeMin(const std::vector<int>& x) {
    const std::size_t n = x.size();
    table_.push_back(x);
    for (std::size_t w = 1; 2 * w <= n; w *= 2) {
      const auto& prev = table_.back();
      std::vector<int> next(n - 2 * w + 1);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(prev[i], prev[i + w]);
      table_.push_back(std::move(next));
    }
  }
  // Minimum over the closed index range [a, b].
  int min(std::size_t a, std::size_t b) const {
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= b - a + 1) ++level;
    return std::min(table_[level][a], table_[level][b + 1 - (std::size_t{1} << level)]);
  }

 private:
  std::vector<std::vector<int>> table_;
};

// For each index, the previous index with the same value and nothing lower in
// between (-1 if none).
inline std::vector<int> previous_same_level(const std::vector<int>& x) {
  std::vector<int> prev(x.size(), -1);
  std::vector<int> stack;
  for (std::size_t t = 0; t < x.size(); ++t) {
    while (!stack.empty() && x[stack.back()] > x[t]) stack.pop_back();
    if (!stack.empty() && x[stack.back()] == x[t]) {
      prev[t] = stack.back();
      stack.back() = static_cast<int>(t);
    } else {
      stack.push_back(static_cast<int>(t));
    }
  }
  return prev;
}

}  // namespace detail

// Whether x_s = x_t = min over [s, t] (closed range, ties included).
inline bool same_level_link(const std::vector<int>& x, std::size_t s, std::size_t t) {
  if (s > t) std::swap(s, t);
  for (std::size_t k = s; k <= t; ++k) {
    if (x[k] < x[s]) return false;
  }
  return x[s] == x[t];
}

// Partition of curve times by both coordinates. Chains only use one
// coordinate at a time: a mixed chain would join every pair of consecutive
// times and collapse the window.
class TimeEquivalence {
 public:
  TimeEquivalence(const ContourPair& c, int chain_bound = 4) : n_minus_(c.n_minus) {
    if (chain_bound < 1) throw domain_error("chain bound must be positive");
    c.check_invariants();
    primal_ = classes(c.L, chain_bound);
    dual_ = classes(c.R, chain_bound);
  }

  int n_minus() const { return n_minus_; }
  int n_plus() const { return n_minus_ + static_cast<int>(primal_.size()) - 1; }
  // Class ids are the smallest time offset in the class.
  int primal_class(int t) const { return primal_[offset(t)]; }
  int dual_class(int t) const { return dual_[offset(t)]; }
  const std::vector<int>& primal_classes() const { return primal_; }
  const std::vector<int>& dual_classes() const { return dual_; }
  bool same_primal(int s, int t) const { return primal_class(s) == primal_class(t); }
  bool same_dual(int s, int t) const { return dual_class(s) == dual_class(t); }
  bool equivalent(int s, int t) const { return same_primal(s, t) || same_dual(s, t); }

  bool operator==(const TimeEquivalence&) const = default;

 private:
  std::size_t offset(int t) const {
    if (t < n_minus_ || t > n_plus()) throw domain_error("time outside the window");
    return static_cast<std::size_t>(t - n_minus_);
  }

  // Candidate pairs come from the same-level chains; each pair is confirmed
  // by a range-minimum query, then classes are grown by chains of at most
  // `bound` confirmed links and closed under union.
  static std::vector<int> classes(const std::vector<int>& x, int bound) {
    const std::vector<int> prev = detail::previous_same_level(x);
    const detail::RangeMin rmq(x);
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of(x.size(), -1);
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (prev[t] < 0) {
        group_of[t] = static_cast<int>(groups.size());
        groups.push_back({static_cast<int>(t)});
      } else {
        group_of[t] = group_of[prev[t]];
        groups[group_of[t]].push_back(static_cast<int>(t));
      }
    }
    detail::Dsu dsu(x.size());
    for (const auto& g : groups) {
      const std::size_t k = g.size();
      std::vector<std::vector<char>> link(k, std::vector<char>(k, 0));
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          const auto s = static_cast<std::size_t>(g[a]), t = static_cast<std::size_t>(g[b]);
          link[a][b] = link[b][a] = x[s] == x[t] && rmq.min(s, t) == x[s];
        }
      }
      // Reachability within `bound` links from the first element.
      std::vector<int> dist(k, -1);
      dist[0] = 0;
      for (int round = 0; round < bound; ++round) {
        for (std::size_t a = 0; a < k; ++a) {
          if (dist[a] != round) continue;
          for (std::size_t b = 0; b < k; ++b) {
            if (link[a][b] && dist[b] < 0) dist[b] = round + 1;
          }
        }
      }
      for (std::size_t a = 0; a < k; ++a) {
        if (dist[a] >= 0) dsu.unite(g[a], g[0]);
      }
    }
    std::vector<int> out(x.size());
    std::vector<int> smallest(x.size(), -1);
    for (std::size_t t = 0; t < x.size(); ++t) {
      const int r = dsu.find(static_cast<int>(t));
      if (smallest[r] < 0) smallest[r] = static_cast<int>(t);
      out[t] = smallest[r];
    }
    return out;
  }

  int n_minus_;
  std::vector<int> primal_;
  std::vector<int> dual_;
};

// Graph on the unit-time cells [m, m+1], m in [m_min, m_max].
class StructureGraph {
 public:
  StructureGraph(int m_min, int m_max) : m_min_(m_min), m_max_(m_max) {
    if (m_max < m_min) throw domain_error("structure graph needs at least one cell");
    for (int m = m_min; m < m_max; ++m) add_edge(m, m + 1);
  }

  int m_min() const { return m_min_; }
  int m_max() const { return m_max_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(m_max_ - m_min_ + 1); }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }

  void add_edge(int a, int b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (a < m_min_ || b > m_max_) throw domain_error("cell outside the structure graph");
    edges_.emplace(a, b);
  }
  bool adjacent(int a, int b) const {
    if (a > b) std::swap(a, b);
    return edges_.count({a, b}) > 0;
  }

  std::vector<int> degrees() const {
    std::vector<int> d(cell_count(), 0);
    for (auto [a, b] : edges_) {
      ++d[a - m_min_];
      ++d[b - m_min_];
    }
    return d;
  }
  int max_degree() const {
    const auto d = degrees();
    return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
  }
  bool connected() const {
    detail::Dsu dsu(cell_count());
    for (auto [a, b] : edges_) dsu.unite(a - m_min_, b - m_min_);
    for (std::size_t k = 1; k < cell_count(); ++k) {
      if (dsu.find(static_cast<int>(k)) != dsu.find(0)) return false;
    }
    return true;
  }

  bool operator==(const StructureGraph&) const = default;

 private:
  int m_min_;
  int m_max_;
  std::set<std::pair<int, int>> edges_;
};

// A cell is the closed triangle swept in one unit of time, with corners
// primal(l_m), primal(l_{m+1}), dual(l_m), dual(l_{m+1}). The triangles tile
// the plane without T-junctions, so two cells meet iff they share a corner.
inline StructureGraph structure_graph_from_curve(const PeanoCurve& curve) {
  if (curve.steps() == 0) throw domain_error("curve has no unit-time cells");
  const int m_min = curve.n_minus(), m_max = curve.n_plus() - 1;
  StructureGraph g(m_min, m_max);
  std::map<Vertex, std::vector<int>> by_primal;
  std::map<DualVertex, std::vector<int>> by_dual;
  for (int m = m_min; m <= m_max; ++m) {
    for (int t : {m, m + 1}) {
      auto& a = by_primal[curve.at(t).primal()];
      if (a.empty() || a.back() != m) a.push_back(m);
      auto& b = by_dual[curve.at(t).dual()];
      if (b.empty() || b.back() != m) b.push_back(m);
    }
  }
  auto link_all = [&](const std::vector<int>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t j = i + 1; j < cells.size(); ++j) g.add_edge(cells[i], cells[j]);
    }
  };
  for (const auto& [v, cells] : by_primal) link_all(cells);
  for (const auto& [f, cells] : by_dual) link_all(cells);
  return g;
}

// Cells [m1, m1+1] and [m2, m2+1] are adjacent iff some endpoint times are
// linked in L or in R.
inline StructureGraph structure_graph_from_contour(const ContourPair& c, int chain_bound = 4) {
  if (c.size() < 2) throw domain_error("contour has no unit-time cells");
  const TimeEquivalence eq(c, chain_bound);
  const int m_min = c.n_minus, m_max = c.n_plus() - 1;
  StructureGraph g(m_min, m_max);
  auto add_classes = [&](const std::vector<int>& cls) {
    std::map<int, std::vector<int>> members;
    for (std::size_t k = 0; k < cls.size(); ++k) members[cls[k]].push_back(static_cast<int>(k));
    for (const auto& [id, times] : members) {
      std::vector<int> cells;
      for (int off : times) {
        const int t = c.n_minus + off;
        if (t - 1 >= m_min && (cells.empty() || cells.back() != t - 1)) cells.push_back(t - 1);
        if (t <= m_max) cells.push_back(t);
      }
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) g.add_edge(cells[i], cells[j]);
      }
    }
  };
  add_classes(eq.primal_classes());
  add_classes(eq.dual_classes());
  return g;
}

// ---------------------------------------------------------------------------
// Gluing into a sphere.
//
// The quotient of the rectangle diagram is built combinatorially. Vertical
// segments collapse, so each time becomes a point; horizontal chords below R
// (above C - L) identify times of one R-class (L-class). A chord that reaches
// either end of the window lies on the rectangle boundary and joins the single
// boundary vertex. The result is a triangulated complex:
//   vertices  boundary vertex + interior chord classes of L and of R
//   edges     one tree edge per interior class (to the chord one level down)
//             + one diagonal per interior time (from its L class to its R class)
//   faces     one triangle per unit step
// Edges inside the boundary (tree edges of boundary chords, diagonals at the two
// end times) are collapsed.

class GluedComplex {
 public:
  static constexpr int kBoundary = 0;

  struct EdgeCell {
    int a;  // end 0
    int b;  // end 1
  };
  // A face boundary as a cyclic list of (edge, reversed) traversals; collapsed
  // edges are omitted.
  struct FaceCell {
    std::vector<std::pair<int, bool>> sides;
  };

  int V() const { return static_cast<int>(vertex_count_); }
  int E() const { return static_cast<int>(edges_.size()); }
  int F() const { return static_cast<int>(faces_.size()); }
  int chi() const { return V() - E() + F(); }

  const std::vector<EdgeCell>& edges() const { return edges_; }
  const std::vector<FaceCell>& faces() const { return faces_; }
  int n_minus() const { return n_minus_; }
  // Vertex of time t in the L (primal) and R (dual) tree.
  int primal_vertex(int t) const { return time_l_[static_cast<std::size_t>(t - n_minus_)]; }
  int dual_vertex(int t) const { return time_r_[static_cast<std::size_t>(t - n_minus_)]; }

  bool connected() const {
    detail::Dsu dsu(vertex_count_);
    for (const auto& e : edges_) dsu.unite(e.a, e.b);
    for (std::size_t v = 1; v < vertex_count_; ++v) {
      if (dsu.find(static_cast<int>(v)) != dsu.find(0)) return false;
    }
    return true;
  }

  // Each edge bounds exactly two face sides.
  bool edges_two_sided() const {
    std::vector<int> uses(edges_.size(), 0);
    for (const auto& f : faces_) {
      for (auto [e, rev] : f.sides) ++uses[e];
    }
    return std::all_of(uses.begin(), uses.end(), [](int u) { return u == 2; });
  }

  // The link of every vertex is one cycle: nodes are edge ends at the vertex,
  // and each face corner joins the two ends it sits between.
  bool links_are_circles() const {
    if (edges_.empty()) return faces_.size() == 1 && vertex_count_ == 1;
    // End id = 2 * edge + (0 for end a, 1 for end b).
    std::vector<std::vector<int>> nbr(2 * edges_.size());
    for (const auto& f : faces_) {
      const std::size_t k = f.sides.size();
      if (k == 0) return false;
      for (std::size_t i = 0; i < k; ++i) {
        const auto [e1, r1] = f.sides[i];
        const auto [e2, r2] = f.sides[(i + 1) % k];
        const int arrive = 2 * e1 + (r1 ? 0 : 1);
        const int leave = 2 * e2 + (r2 ? 1 : 0);
        if (end_vertex(arrive) != end_vertex(leave)) return false;
        nbr[arrive].push_back(leave);
        nbr[leave].push_back(arrive);
      }
    }
    std::vector<std::vector<int>> ends_at(vertex_count_);
    for (int end = 0; end < static_cast<int>(nbr.size()); ++end) {
      if (nbr[end].size() != 2) return false;
      ends_at[end_vertex(end)].push_back(end);
    }
    for (const auto& ends : ends_at) {
      if (ends.empty()) return false;
      std::set<int> seen{ends.front()};
      std::vector<int> stack{ends.front()};
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w : nbr[u]) {
          if (seen.insert(w).second) stack.push_back(w);
        }
      }
      if (seen.size() != ends.size()) return false;
    }
    return true;
  }

  bool is_sphere() const { return chi() == 2 && connected() && edges_two_sided() && links_are_circles(); }

 private:
  friend GluedComplex glue_complex(const ContourPair& c, double C);

  int end_vertex(int end) const {
    const auto& e = edges_[static_cast<std::size_t>(end / 2)];
    return end % 2 == 0 ? e.a : e.b;
  }

  std::size_t vertex_count_ = 1;
  int n_minus_ = 0;
  std::vector<int> time_l_, time_r_;
  std::vector<EdgeCell> edges_;
  std::vector<FaceCell> faces_;
};

namespace detail {

struct ChordForest {
  std::vector<int> vertex_of_time;  // complex vertex id, kBoundary for boundary chords
  std::vector<int> edge_of_time;    // tree edge id of the time's class, -1 if collapsed
};

// Chords of one coordinate. A class touches the boundary when its chord, run
// left and right until the value drops below, reaches either window end.
inline ChordForest chord_forest(const std::vector<int>& x, const std::vector<int>& cls,
                                std::size_t& next_vertex, std::vector<GluedComplex::EdgeCell>& edges) {
  const std::size_t n = x.size();
  std::vector<int> first(n, -1), last(n, -1);
  for (std::size_t t = 0; t < n; ++t) {
    if (first[cls[t]] < 0) first[cls[t]] = static_cast<int>(t);
    last[cls[t]] = static_cast<int>(t);
  }
  ChordForest out{std::vector<int>(n, GluedComplex::kBoundary), std::vector<int>(n, -1)};
  std::vector<int> vid(n, -1);
  for (std::size_t t = 0; t < n; ++t) {
    const int k = cls[t];
    if (vid[k] >= 0) continue;
    const bool touches = first[k] == 0 || last[k] == static_cast<int>(n) - 1 ||
                         x[static_cast<std::size_t>(first[k] - 1)] >= x[t] ||
                         x[static_cast<std::size_t>(last[k] + 1)] >= x[t];
    vid[k] = touches ? GluedComplex::kBoundary : static_cast<int>(next_vertex++);
  }
  // Tree edges: interior class -> class of the time just before its chord.
  std::vector<int> eid(n, -1);
  for (std::size_t t = 0; t < n; ++t) {
    const int k = cls[t];
    if (vid[k] == GluedComplex::kBoundary || eid[k] >= 0) continue;
    const int parent_time = first[k] - 1;
    eid[k] = static_cast<int>(edges.size());
    edges.push_back({vid[k], vid[cls[static_cast<std::size_t>(parent_time)]]});
  }
  for (std::size_t t = 0; t < n; ++t) {
    out.vertex_of_time[t] = vid[cls[t]];
    out.edge_of_time[t] = eid[cls[t]];
  }
  return out;
}

}  // namespace detail

// Rectangle of height C with R at the bottom and C - L on top; the two graphs
// stay apart iff C > R_t + L_t for every t.
inline GluedComplex glue_complex(const ContourPair& c, double C) {
  c.check_invariants();
  if (c.size() < 2) throw domain_error("gluing needs at least one step");
  int top = c.L[0] + c.R[0];
  for (std::size_t t = 0; t < c.size(); ++t) top = std::max(top, c.L[t] + c.R[t]);
  if (!(C > top)) {
    throw domain_error("rectangle height C=" + std::to_string(C) +
                       " does not separate the graphs (need C > " + std::to_string(top) + ")");
  }
  const TimeEquivalence eq(c);
  GluedComplex g;
  g.n_minus_ = c.n_minus;
  const auto lf = detail::chord_forest(c.L, eq.primal_classes(), g.vertex_count_, g.edges_);
  const auto rf = detail::chord_forest(c.R, eq.dual_classes(), g.vertex_count_, g.edges_);
  g.time_l_ = lf.vertex_of_time;
  g.time_r_ = rf.vertex_of_time;
  const std::size_t n = c.size();
  std::vector<int> diag(n, -1);
  for (std::size_t t = 1; t + 1 < n; ++t) {
    diag[t] = static_cast<int>(g.edges_.size());
    g.edges_.push_back({lf.vertex_of_time[t], rf.vertex_of_time[t]});
  }
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const bool l_step = c.L[t + 1] != c.L[t];
    const auto& x = l_step ? c.L : c.R;
    const auto& forest = l_step ? lf : rf;
    // Tree edge belongs to the deeper endpoint; traversal runs from time t to t+1.
    const bool up = x[t + 1] > x[t];
    const int tree_edge = forest.edge_of_time[up ? t + 1 : t];
    GluedComplex::FaceCell face;
    // Boundary walk: tree side t -> t+1, then diagonal at t+1 (towards the
    // shared vertex of the other tree), then diagonal at t back.
    auto push = [&](int e, bool rev) {
      if (e >= 0) face.sides.emplace_back(e, rev);
    };
    // Edge ends: tree edges run child -> parent, diagonals primal -> dual.
    push(tree_edge, up);
    push(diag[t + 1], !l_step);
    push(diag[t], l_step);
    g.faces_.push_back(std::move(face));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Reconstruction by replaying the turn table.

struct ReconstructedScene {
  PeanoCurve curve;
  // Parent edges seen by the curve inside the window.
  std::map<Vertex, Dir> primal_parent;
  std::map<DualVertex, Dir> dual_parent;
  // Multiple of pi/2 applied; with the start point fixed at (1/4, 1/4) the
  // replay is unambiguous and this stays 0.
  int rotation = 0;
  ContourPair contour;

  bool operator==(const ReconstructedScene&) const = default;
};

namespace detail {

template <typename Key>
void record_parent(std::map<Key, Dir>& m, Key child, Dir d) {
  auto [it, inserted] = m.emplace(child, d);
  if (!inserted && it->second != d) throw domain_error("contour assigns two parents to a vertex");
}

// Height of `v` relative to `anchor` in a partial forest; both root paths
// must meet inside the known part.
template <typename Key>
int partial_height(const std::map<Key, Dir>& parent, Key v, const std::map<Key, int>& anchor_path) {
  int k = 0;
  for (Key u = v;; ++k) {
    auto hit = anchor_path.find(u);
    if (hit != anchor_path.end()) return k - hit->second;
    auto it = parent.find(u);
    if (it == parent.end()) throw domain_error("reconstructed trees do not connect to the origin");
    u = u.step(it->second);
    if (k > static_cast<int>(parent.size()) + 1) throw domain_error("reconstructed forest has a cycle");
  }
}

template <typename Key>
std::map<Key, int> anchor_chain(const std::map<Key, Dir>& parent, Key anchor) {
  std::map<Key, int> path;
  Key u = anchor;
  for (int k = 0;; ++k) {
    if (!path.emplace(u, k).second) throw domain_error("reconstructed forest has a cycle");
    auto it = parent.find(u);
    if (it == parent.end()) break;
    u = u.step(it->second);
  }
  return path;
}

}  // namespace detail

// Heights along a curve in the given partial forests, relative to the
// vertices at time 0.
inline ContourPair contour_from_partial(const PeanoCurve& curve,
                                        const std::map<Vertex, Dir>& primal,
                                        const std::map<DualVertex, Dir>& dual) {
  ContourPair c;
  c.n_minus = curve.n_minus();
  c.L.resize(curve.size());
  c.R.resize(curve.size());
  const auto pa = detail::anchor_chain(primal, Vertex{0, 0});
  const auto da = detail::anchor_chain(dual, DualVertex{0, 0});
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const QuarterPoint& q = curve.positions()[k];
    c.L[k] = detail::partial_height(primal, q.primal(), pa);
    c.R[k] = detail::partial_height(dual, q.dual(), da);
  }
  return c;
}

inline ReconstructedScene reconstruct_scene(const ContourPair& c) {
  c.check_invariants();
  ReconstructedScene out;
  const std::size_t zero = static_cast<std::size_t>(-c.n_minus);
  std::vector<QuarterPoint> pos(c.size());
  pos[zero] = QuarterPoint::origin();
  std::set<std::pair<Vertex, Dir>> primal_edges;  // (lower-left endpoint, E or N)
  std::set<std::pair<Vertex, Dir>> dual_crossed;

  auto canonical = [](Vertex v, Dir d) {
    if (d == Dir::W || d == Dir::S) return std::make_pair(v.step(d), opposite(d));
    return std::make_pair(v, d);
  };
  // One step of the replay: from q through the diamond of the primal edge
  // (v, e.edge). Returns the next point and records the traced edges.
  auto replay = [&](const QuarterPoint& q, const TurnEntry& e, bool l_step, bool towards_deeper) {
    const Vertex v = q.primal();
    const auto key = canonical(v, e.edge);
    if (l_step) {
      if (dual_crossed.count(key)) throw domain_error("contour is not realisable: crossing trees");
      primal_edges.insert(key);
      const Vertex w = v.step(e.edge);
      if (towards_deeper) detail::record_parent(out.primal_parent, w, opposite(e.edge));
      else detail::record_parent(out.primal_parent, v, e.edge);
      return q.step(e.along_tree);
    }
    if (primal_edges.count(key)) throw domain_error("contour is not realisable: crossing trees");
    dual_crossed.insert(key);
    const QuarterPoint r = q.step(e.across);
    const DualVertex f = q.dual(), g = r.dual();
    const Dir fg = dir_between(f.i, f.j, g.i, g.j);
    if (towards_deeper) detail::record_parent(out.dual_parent, g, opposite(fg));
    else detail::record_parent(out.dual_parent, f, fg);
    return r;
  };

  for (std::size_t k = zero; k + 1 < c.size(); ++k) {
    const bool l_step = c.L[k + 1] != c.L[k];
    const bool deeper = l_step ? c.L[k + 1] > c.L[k] : c.R[k + 1] > c.R[k];
    pos[k + 1] = replay(pos[k], kForward[quarter_type(pos[k])], l_step, deeper);
  }
  for (std::size_t k = zero; k-- > 0;) {
    const bool l_step = c.L[k + 1] != c.L[k];
    // Going back in time; "deeper" refers to the point being reached.
    const bool deeper = l_step ? c.L[k] > c.L[k + 1] : c.R[k] > c.R[k + 1];
    pos[k] = replay(pos[k + 1], kBackward[quarter_type(pos[k + 1])], l_step, deeper);
  }
  std::set<QuarterPoint> seen(pos.begin(), pos.end());
  if (seen.size() != pos.size()) throw domain_error("contour is not realisable: curve revisits a point");
  out.curve = PeanoCurve(c.n_minus, std::move(pos));
  out.contour = contour_from_partial(out.curve, out.primal_parent, out.dual_parent);
  out.contour.delta = c.delta;
  out.contour.c_check = c.c_check;
  if (out.contour.L != c.L || out.contour.R != c.R) {
    throw domain_error("contour is not realisable: heights disagree with the rebuilt trees");
  }
  return out;
}

// The window-visible part of a sampled scene, in the same form.
inline ReconstructedScene visible_part(const SpanningTree& t, const DualSpanningTree& d,
                                       const PeanoCurve& curve, const ContourPair& c) {
  ReconstructedScene out;
  out.curve = curve;
  out.contour = c;
  for (int n = curve.n_minus(); n < curve.n_plus(); ++n) {
    const QuarterPoint a = curve.at(n), b = curve.at(n + 1);
    if (a.primal() != b.primal()) {
      for (Vertex v : {a.primal(), b.primal()}) {
        const Dir pd = t.parent_dir(v);
        const Vertex other = v == a.primal() ? b.primal() : a.primal();
        if (v.step(pd) == other) out.primal_parent[v] = pd;
      }
    } else {
      for (DualVertex f : {a.dual(), b.dual()}) {
        const Dir pd = d.parent_dir(f);
        const DualVertex other = f == a.dual() ? b.dual() : a.dual();
        if (pd != Dir::Root && f.step(pd) == other) out.dual_parent[f] = pd;
      }
    }
  }
  return out;
}

// Plain encoding of a scene for comparisons up to rotation about the origin.
struct SceneEncoding {
  std::vector<QuarterPoint> positions;
  std::vector<std::pair<Vertex, Dir>> primal;
  std::vector<std::pair<DualVertex, Dir>> dual;
  auto operator<=>(const SceneEncoding&) const = default;
};

inline SceneEncoding encode(const ReconstructedScene& s, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  SceneEncoding e;
  for (QuarterPoint q : s.curve.positions()) {
    for (int r = 0; r < k; ++r) q = q.rotated_ccw();
    e.positions.push_back(q);
  }
  for (auto [v0, d0] : s.primal_parent) {
    Vertex v = v0;
    Dir d = d0;
    for (int r = 0; r < k; ++r) v = v.rotated_ccw(), d = rotate_ccw(d);
    e.primal.emplace_back(v, d);
  }
  for (auto [f0, d0] : s.dual_parent) {
    DualVertex f = f0;
    Dir d = d0;
    for (int r = 0; r < k; ++r) f = f.rotated_ccw(), d = rotate_ccw(d);
    e.dual.emplace_back(f, d);
  }
  std::sort(e.primal.begin(), e.primal.end());
  std::sort(e.dual.begin(), e.dual.end());
  return e;
}

// Rotation (in quarter turns) with the lexicographically smallest encoding.
inline std::pair<int, SceneEncoding> canonical_rotation(const ReconstructedScene& s) {
  std::pair<int, SceneEncoding> best{0, encode(s, 0)};
  for (int k = 1; k < 4; ++k) {
    SceneEncoding e = encode(s, k);
    if (e < best.second) best = {k, std::move(e)};
  }
  return best;
}

inline bool equal_up_to_rotation(const ReconstructedScene& a, const ReconstructedScene& b) {
  return canonical_rotation(a).second == canonical_rotation(b).second;
}

}  // namespace mot
