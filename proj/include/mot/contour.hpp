#pragma once

// Contour pair (L, R) of a scene and its rescaled view.
//
// L_n is the tree distance from v_n to its meet with the origin, minus the
// distance from the origin to that meet. Both distances are depth
// differences, so L_n = depth(v_n) - depth(origin). R_n is the same in the dual
// tree relative to the dual vertex (1/2, 1/2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mot/dual.hpp"
#include "mot/errors.hpp"
#include "mot/lattice.hpp"
#include "mot/peano.hpp"
#include "mot/ust.hpp"

namespace mot {

// Rooted forest over node ids 0..n-1, parent -1 for the top nodes. Top nodes
// sit at depth `top_depth` (1 when they hang below a virtual root).
class TreeIndex {
 public:
  TreeIndex() = default;
  TreeIndex(const std::vector<std::int32_t>& parent, int top_depth, std::int32_t anchor)
      : parent_(parent) {
    const std::size_t n = parent_.size();
    depth_.assign(n, 0);
    tin_.assign(n, 0);
    tout_.assign(n, 0);
    anchor_meet_.assign(n, -1);
    std::vector<std::int32_t> first(n + 1, 0), child(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (parent_[v] >= 0) ++first[parent_[v] + 1];
    }
    for (std::size_t v = 0; v < n; ++v) first[v + 1] += first[v];
    std::vector<std::int32_t> fill(first.begin(), first.end() - 1);
    for (std::size_t v = 0; v < n; ++v) {
      if (parent_[v] >= 0) child[fill[parent_[v]]++] = static_cast<std::int32_t>(v);
    }
    std::vector<std::uint8_t> on_anchor_path(n, 0);
    if (anchor >= 0) {
      for (std::int32_t a = anchor; a >= 0; a = parent_[a]) on_anchor_path[a] = 1;
    }
    std::uint32_t clock = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> stack;  // (node, next child slot)
    std::size_t visited = 0;
    for (std::size_t top = 0; top < n; ++top) {
      if (parent_[top] >= 0) continue;
      depth_[top] = top_depth;
      tin_[top] = clock++;
      anchor_meet_[top] = on_anchor_path[top] ? static_cast<std::int32_t>(top) : -1;
      ++visited;
      stack.emplace_back(static_cast<std::int32_t>(top), first[top]);
      while (!stack.empty()) {
        auto& [u, slot] = stack.back();
        if (slot < first[u + 1]) {
          const std::int32_t c = child[slot++];
          depth_[c] = depth_[u] + 1;
          tin_[c] = clock++;
          anchor_meet_[c] = on_anchor_path[c] ? c : anchor_meet_[u];
          ++visited;
          stack.emplace_back(c, first[c]);
        } else {
          tout_[u] = clock++;
          stack.pop_back();
        }
      }
    }
    if (visited != n) throw domain_error("parent table contains a cycle");
  }

  std::size_t size() const { return parent_.size(); }
  std::int32_t parent(std::int32_t v) const { return parent_[v]; }
  int depth(std::int32_t v) const { return depth_[v]; }
  bool is_ancestor(std::int32_t a, std::int32_t b) const {
    return tin_[a] <= tin_[b] && tout_[b] <= tout_[a];
  }
  // Meet with the anchor fixed at construction; -1 if only the virtual root.
  std::int32_t anchor_meet(std::int32_t v) const { return anchor_meet_[v]; }
  // Deepest common ancestor, -1 if none.
  std::int32_t meet(std::int32_t a, std::int32_t b) const {
    while (a >= 0 && !is_ancestor(a, b)) a = parent_[a];
    return a;
  }

 private:
  std::vector<std::int32_t> parent_;
  std::vector<int> depth_;
  std::vector<std::uint32_t> tin_, tout_;
  std::vector<std::int32_t> anchor_meet_;
};

// Depths and meets in the primal tree (root is the wired vertex, depth 0) or in
// the dual tree (root is its ring corner, depth 0).
template <typename V>
class DepthIndex;

template <>
class DepthIndex<Vertex> {
 public:
  explicit DepthIndex(const SpanningTree& t, Vertex anchor = {0, 0}) : box_(t.box()) {
    std::vector<std::int32_t> parent(box_.size());
    for (std::size_t i = 0; i < box_.size(); ++i) {
      const Vertex w = box_.vertex(i).step(t.parent_dirs()[i]);
      parent[i] = box_.contains(w) ? static_cast<std::int32_t>(box_.index(w)) : -1;
    }
    index_ = TreeIndex(parent, 1, id(anchor));
  }
  int depth(Vertex v) const { return index_.depth(id(v)); }
  // nullopt stands for the wired root.
  std::optional<Vertex> meet(Vertex a, Vertex b) const { return decode(index_.meet(id(a), id(b))); }
  std::optional<Vertex> anchor_meet(Vertex v) const { return decode(index_.anchor_meet(id(v))); }
  bool is_ancestor(Vertex a, Vertex b) const { return index_.is_ancestor(id(a), id(b)); }

 private:
  std::int32_t id(Vertex v) const {
    if (!box_.contains(v)) throw domain_error("vertex outside the box");
    return static_cast<std::int32_t>(box_.index(v));
  }
  std::optional<Vertex> decode(std::int32_t i) const {
    if (i < 0) return std::nullopt;
    return box_.vertex(static_cast<std::size_t>(i));
  }
  Box box_;
  TreeIndex index_;
};

template <>
class DepthIndex<DualVertex> {
 public:
  explicit DepthIndex(const DualSpanningTree& t, DualVertex anchor = {0, 0}) : box_(t.box()) {
    std::vector<std::int32_t> parent(box_.dual_size());
    for (std::size_t i = 0; i < box_.dual_size(); ++i) {
      const Dir d = t.parent_dirs()[i];
      parent[i] = d == Dir::Root
                      ? -1
                      : static_cast<std::int32_t>(box_.dual_index(box_.dual_vertex(i).step(d)));
    }
    index_ = TreeIndex(parent, 0, id(anchor));
  }
  int depth(DualVertex f) const { return index_.depth(id(f)); }
  std::optional<DualVertex> meet(DualVertex a, DualVertex b) const {
    return decode(index_.meet(id(a), id(b)));
  }
  std::optional<DualVertex> anchor_meet(DualVertex f) const {
    return decode(index_.anchor_meet(id(f)));
  }
  bool is_ancestor(DualVertex a, DualVertex b) const { return index_.is_ancestor(id(a), id(b)); }

 private:
  std::int32_t id(DualVertex f) const {
    if (!box_.contains(f)) throw domain_error("dual vertex outside the dual grid");
    return static_cast<std::int32_t>(box_.dual_index(f));
  }
  std::optional<DualVertex> decode(std::int32_t i) const {
    if (i < 0) return std::nullopt;
    return box_.dual_vertex(static_cast<std::size_t>(i));
  }
  Box box_;
  TreeIndex index_;
};

using PrimalDepthIndex = DepthIndex<Vertex>;
using DualDepthIndex = DepthIndex<DualVertex>;

inline std::pair<Vertex, DualVertex> nearest_tree_pair(const QuarterPoint& q) {
  return {q.primal(), q.dual()};
}

inline std::pair<Vertex, DualVertex> nearest_tree_pair(double x, double y) {
  return nearest_tree_pair(QuarterPoint::from_coords(x, y));
}

// First vertex on the path from v to the root that is also on the origin's
// path; nullopt when the two paths only meet at the wired root.
inline std::optional<Vertex> merge_point(Vertex v, const PrimalDepthIndex& index) {
  return index.anchor_meet(v);
}

struct ContourPair {
  int n_minus = 0;
  std::vector<int> L{0};
  std::vector<int> R{0};
  double delta = 1.0;
  double c_check = 1.0;

  int n_plus() const { return n_minus + static_cast<int>(L.size()) - 1; }
  std::size_t size() const { return L.size(); }
  bool contains_time(int n) const { return n >= n_minus && n <= n_plus(); }
  int L_at(int n) const { return L[offset(n)]; }
  int R_at(int n) const { return R[offset(n)]; }

  std::size_t offset(int n) const {
    if (!contains_time(n)) {
      throw domain_error("contour time " + std::to_string(n) + " outside [" +
                         std::to_string(n_minus) + ", " + std::to_string(n_plus()) + "]");
    }
    return static_cast<std::size_t>(n - n_minus);
  }

  // L = R = 0 at time 0 and every step moves exactly one coordinate by one.
  void check_invariants() const {
    if (L.empty() || L.size() != R.size()) throw domain_error("contour sequences differ in length");
    if (!contains_time(0)) throw domain_error("contour window does not contain time 0");
    if (L_at(0) != 0 || R_at(0) != 0) throw domain_error("contour is not zero at time 0");
    if (!(delta > 0) || !(c_check > 0)) throw domain_error("scale parameters must be positive");
    for (std::size_t k = 0; k + 1 < L.size(); ++k) {
      const int a = std::abs(L[k + 1] - L[k]);
      const int b = std::abs(R[k + 1] - R[k]);
      if (a + b != 1) {
        throw domain_error("contour increment at time " +
                           std::to_string(n_minus + static_cast<int>(k)) +
                           " is not a unit step in one coordinate");
      }
    }
  }

  bool operator==(const ContourPair&) const = default;
};

inline ContourPair compute_contour(const PeanoCurve& curve, const PrimalDepthIndex& primal,
                                   const DualDepthIndex& dual) {
  ContourPair c;
  c.n_minus = curve.n_minus();
  c.L.resize(curve.size());
  c.R.resize(curve.size());
  const int d0 = primal.depth({0, 0});
  const int e0 = dual.depth({0, 0});
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const QuarterPoint& q = curve.positions()[k];
    c.L[k] = primal.depth(q.primal()) - d0;
    c.R[k] = dual.depth(q.dual()) - e0;
  }
  return c;
}

inline ContourPair compute_contour(const SpanningTree& t, const DualSpanningTree& dual,
                                   const PeanoCurve& curve) {
  return compute_contour(curve, PrimalDepthIndex(t), DualDepthIndex(dual));
}

// Continuous piecewise-linear function with breakpoints t0 + k*dt.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(double t0, double dt, std::vector<double> values)
      : t0_(t0), dt_(dt), values_(std::move(values)) {
    if (!(dt_ > 0) || values_.empty()) throw domain_error("piecewise-linear grid is empty");
  }
  double t_min() const { return t0_; }
  double t_max() const { return t0_ + dt_ * static_cast<double>(values_.size() - 1); }
  double dt() const { return dt_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(double t) const {
    const double u = (t - t0_) / dt_;
    const double last = static_cast<double>(values_.size() - 1);
    if (u < -1e-9 || u > last + 1e-9) {
      throw domain_error("time " + std::to_string(t) + " outside the rescaled window");
    }
    const double uc = std::min(std::max(u, 0.0), last);
    const auto k = static_cast<std::size_t>(std::floor(uc));
    if (k + 1 >= values_.size()) return values_.back();
    const double w = uc - static_cast<double>(k);
    return values_[k] + w * (values_[k + 1] - values_[k]);
  }

 private:
  double t0_ = 0;
  double dt_ = 1;
  std::vector<double> values_{0.0};
};

struct RescaledContour {
  PiecewiseLinear L;
  PiecewiseLinear R;
};

// Z_t = c * delta^(5/4) * Z_{t / delta^2}, interpolated linearly.
inline RescaledContour rescale_contour(const ContourPair& c, double delta) {
  if (!(delta > 0)) throw domain_error("delta must be positive");
  const double scale = c.c_check * std::pow(delta, 1.25);
  const double dt = delta * delta;
  std::vector<double> l(c.size()), r(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    l[k] = scale * c.L[k];
    r[k] = scale * c.R[k];
  }
  const double t0 = dt * c.n_minus;
  return {PiecewiseLinear(t0, dt, std::move(l)), PiecewiseLinear(t0, dt, std::move(r))};
}

inline RescaledContour rescale_contour(const ContourPair& c) { return rescale_contour(c, c.delta); }

}  // namespace mot
