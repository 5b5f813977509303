#pragma once

// The Peano curve between a tree and its dual.
//
// A quarter point q sits on the diagonal from its primal vertex v to its dual
// vertex f. It lies in the diamonds of two primal edges at v: the horizontal
// one towards sx and the vertical one towards sy. The curve leaves q through
// one diamond and enters through the other; in a diamond it runs parallel to
// the primal edge if that edge is in the tree and parallel to the crossing
// dual edge otherwise. The primal tree stays on the left.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mot/dual.hpp"
#include "mot/errors.hpp"
#include "mot/lattice.hpp"
#include "mot/ust.hpp"

namespace mot {

// Position type of a quarter point: bit 0 set when sx > 0, bit 1 when sy > 0.
constexpr int quarter_type(const QuarterPoint& q) { return (q.sx() > 0 ? 1 : 0) | (q.sy() > 0 ? 2 : 0); }

struct TurnEntry {
  Dir edge;        // direction from v of the primal edge whose diamond is used
  Dir along_tree;  // half-step when that edge is a tree edge
  Dir across;      // half-step otherwise
};

// Outgoing and incoming rules per position type. Frozen convention: at
// (1/4, 1/4) the curve moves N if (0,0)-(0,1) is a tree edge and W otherwise.
inline constexpr std::array<TurnEntry, 4> kForward{{
    {Dir::S, Dir::S, Dir::E},
    {Dir::E, Dir::E, Dir::N},
    {Dir::W, Dir::W, Dir::S},
    {Dir::N, Dir::N, Dir::W},
}};
inline constexpr std::array<TurnEntry, 4> kBackward{{
    {Dir::W, Dir::W, Dir::N},
    {Dir::S, Dir::S, Dir::W},
    {Dir::N, Dir::N, Dir::E},
    {Dir::E, Dir::E, Dir::S},
}};

class PeanoCurve {
 public:
  PeanoCurve() = default;
  PeanoCurve(int n_minus, std::vector<QuarterPoint> positions)
      : n_minus_(n_minus), positions_(std::move(positions)) {
    if (positions_.empty() || n_minus_ > 0 ||
        n_minus_ + static_cast<int>(positions_.size()) - 1 < 0) {
      throw domain_error("curve index range must contain time 0");
    }
    if (at(0) != QuarterPoint::origin()) throw domain_error("curve must pass (1/4,1/4) at time 0");
    for (std::size_t k = 0; k + 1 < positions_.size(); ++k) {
      step_dir(positions_[k], positions_[k + 1]);
    }
  }

  // Rebuild from moves; the position at time 0 is (1/4, 1/4).
  static PeanoCurve from_moves(int n_minus, const std::vector<Dir>& moves) {
    if (n_minus > 0 || -n_minus > static_cast<int>(moves.size())) {
      throw domain_error("move list does not cover time 0");
    }
    std::vector<QuarterPoint> pos(moves.size() + 1);
    const std::size_t zero = static_cast<std::size_t>(-n_minus);
    pos[zero] = QuarterPoint::origin();
    for (std::size_t k = zero; k < moves.size(); ++k) pos[k + 1] = pos[k].step(moves[k]);
    for (std::size_t k = zero; k-- > 0;) pos[k] = pos[k + 1].step(opposite(moves[k]));
    return PeanoCurve(n_minus, std::move(pos));
  }

  int n_minus() const { return n_minus_; }
  int n_plus() const { return n_minus_ + static_cast<int>(positions_.size()) - 1; }
  std::size_t size() const { return positions_.size(); }
  std::size_t steps() const { return positions_.size() - 1; }
  bool contains_time(int n) const { return n >= n_minus() && n <= n_plus(); }

  const QuarterPoint& at(int n) const {
    if (!contains_time(n)) {
      throw domain_error("curve time " + std::to_string(n) + " outside [" +
                         std::to_string(n_minus()) + ", " + std::to_string(n_plus()) + "]");
    }
    return positions_[static_cast<std::size_t>(n - n_minus_)];
  }
  const std::vector<QuarterPoint>& positions() const { return positions_; }

  // Move characters, from time n_minus onwards.
  std::vector<Dir> moves() const {
    std::vector<Dir> out;
    out.reserve(steps());
    for (std::size_t k = 0; k + 1 < positions_.size(); ++k) {
      out.push_back(step_dir(positions_[k], positions_[k + 1]));
    }
    return out;
  }

  static Dir step_dir(const QuarterPoint& a, const QuarterPoint& b) {
    const int ddx = b.qx - a.qx, ddy = b.qy - a.qy;
    if (ddx % 2 != 0 || ddy % 2 != 0) throw domain_error("curve step is not a half step");
    const Dir d = dir_between(0, 0, ddx / 2, ddy / 2);
    if (d == Dir::Root) throw domain_error("curve step is not a half step");
    return d;
  }

  bool operator==(const PeanoCurve&) const = default;

 private:
  int n_minus_ = 0;
  std::vector<QuarterPoint> positions_{QuarterPoint::origin()};
};

namespace detail {

inline bool inside_window(const QuarterPoint& q, int n) {
  const int lim = 4 * n - 1;
  return q.qx >= -lim && q.qx <= lim && q.qy >= -lim && q.qy <= lim;
}

// One rule application, with a consistency check against the dual tree.
inline QuarterPoint apply_turn(const SpanningTree& t, const DualSpanningTree& dual,
                               const QuarterPoint& q, const TurnEntry& e) {
  const Vertex v = q.primal();
  const bool primal = t.has_edge(v, e.edge);
  const Edge pe(v, v.step(e.edge));
  const DualEdge de = crossing_dual_edge(pe);
  if (primal == dual.has_edge(de)) {
    throw domain_error("tree and dual tree disagree on an edge crossing");
  }
  return q.step(primal ? e.along_tree : e.across);
}

}  // namespace detail

// Maximal segment through time 0 inside the window |x|, |y| < n.
inline PeanoCurve trace_peano(const SpanningTree& t, const DualSpanningTree& dual, int n) {
  if (n < 1 || n > t.box().N) throw domain_error("window must be inside the box");
  if (!(dual.box().N == t.box().N)) throw domain_error("tree and dual tree use different boxes");
  const std::size_t limit = 16 * static_cast<std::size_t>(n) * n + 1;
  std::vector<QuarterPoint> fwd{QuarterPoint::origin()};
  std::vector<QuarterPoint> bwd;
  while (true) {
    const QuarterPoint& q = fwd.back();
    const QuarterPoint r = detail::apply_turn(t, dual, q, kForward[quarter_type(q)]);
    if (!detail::inside_window(r, n)) break;
    if (fwd.size() > limit) throw domain_error("curve does not close up: inconsistent scene");
    fwd.push_back(r);
  }
  QuarterPoint q = QuarterPoint::origin();
  while (true) {
    const QuarterPoint r = detail::apply_turn(t, dual, q, kBackward[quarter_type(q)]);
    if (!detail::inside_window(r, n)) break;
    if (bwd.size() + fwd.size() > limit) {
      throw domain_error("curve does not close up: inconsistent scene");
    }
    bwd.push_back(r);
    q = r;
  }
  std::vector<QuarterPoint> pos(bwd.rbegin(), bwd.rend());
  pos.insert(pos.end(), fwd.begin(), fwd.end());
  return PeanoCurve(-static_cast<int>(bwd.size()), std::move(pos));
}

inline PeanoCurve trace_peano(const SpanningTree& t, const DualSpanningTree& dual) {
  return trace_peano(t, dual, t.box().n);
}

inline PeanoCurve trace_peano(const SpanningTree& t, const DualSpanningTree& dual,
                              const Box& window) {
  return trace_peano(t, dual, window.n);
}

}  // namespace mot
