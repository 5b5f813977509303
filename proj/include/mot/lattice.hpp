#pragma once

// Coordinates and incidence for the three interleaved lattices used by a
// tree/dual-tree/Peano scene:
//   primal  Z^2                    Vertex
//   dual    (Z + 1/2)^2            DualVertex, stored as the integer corner (i, j)
//   curve   (Z/2 + 1/4)^2          QuarterPoint, stored in units of 1/4
//
// A Box of half-width N holds the primal vertices with |x|,|y| <= N. Everything
// outside is wired into one root vertex, so each boundary vertex keeps its
// outward edges (two of them at a corner). By planar duality the dual graph is
// then the full (2N+2)x(2N+2) grid of faces, ring faces included.

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mot/errors.hpp"

namespace mot {

enum class Dir : std::uint8_t { E = 0, N = 1, W = 2, S = 3, Root = 4 };

inline constexpr std::array<Dir, 4> kDirs{Dir::E, Dir::N, Dir::W, Dir::S};
inline constexpr std::array<int, 4> kDx{1, 0, -1, 0};
inline constexpr std::array<int, 4> kDy{0, 1, 0, -1};

constexpr int dx(Dir d) { return kDx[static_cast<int>(d)]; }
constexpr int dy(Dir d) { return kDy[static_cast<int>(d)]; }
constexpr Dir opposite(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 2) & 3); }
// Quarter turn counter-clockwise.
constexpr Dir rotate_ccw(Dir d) {
  return d == Dir::Root ? d : static_cast<Dir>((static_cast<int>(d) + 1) & 3);
}

inline char to_char(Dir d) {
  static constexpr std::array<char, 5> kChars{'E', 'N', 'W', 'S', 'R'};
  return kChars[static_cast<int>(d)];
}

inline Dir dir_from_char(char c) {
  switch (c) {
    case 'E': return Dir::E;
    case 'N': return Dir::N;
    case 'W': return Dir::W;
    case 'S': return Dir::S;
    case 'R': return Dir::Root;
    default: throw domain_error(std::string("unknown direction character '") + c + "'");
  }
}

// Direction of the unit step a -> b, or Root if they are not neighbours.
constexpr Dir dir_between(int ax, int ay, int bx, int by) {
  for (Dir d : kDirs) {
    if (ax + dx(d) == bx && ay + dy(d) == by) return d;
  }
  return Dir::Root;
}

constexpr int floor_div(int a, int b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

struct Vertex {
  int x = 0;
  int y = 0;

  constexpr Vertex step(Dir d) const { return {x + dx(d), y + dy(d)}; }
  constexpr Vertex rotated_ccw() const { return {-y, x}; }
  auto operator<=>(const Vertex&) const = default;
};

// Dual vertex (i + 1/2, j + 1/2).
struct DualVertex {
  int i = 0;
  int j = 0;

  constexpr double x() const { return i + 0.5; }
  constexpr double y() const { return j + 0.5; }
  constexpr DualVertex step(Dir d) const { return {i + dx(d), j + dy(d)}; }
  // Rotation by a quarter turn about the primal origin.
  constexpr DualVertex rotated_ccw() const { return {-j - 1, i}; }

  static DualVertex from_coords(double x, double y) {
    const double fx = x - std::floor(x);
    const double fy = y - std::floor(y);
    if (fx != 0.5 || fy != 0.5) {
      throw domain_error("dual vertex coordinates must lie in Z + 1/2");
    }
    return {static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y))};
  }
  auto operator<=>(const DualVertex&) const = default;
};

struct Edge {
  Vertex a;
  Vertex b;

  Edge(Vertex p, Vertex q) : a(p), b(q) {
    if (dir_between(p.x, p.y, q.x, q.y) == Dir::Root) {
      throw domain_error("edge endpoints are not nearest neighbours");
    }
    if (b < a) std::swap(a, b);
  }
  bool horizontal() const { return a.y == b.y; }
  auto operator<=>(const Edge&) const = default;
};

struct DualEdge {
  DualVertex a;
  DualVertex b;

  DualEdge(DualVertex p, DualVertex q) : a(p), b(q) {
    if (dir_between(p.i, p.j, q.i, q.j) == Dir::Root) {
      throw domain_error("dual edge endpoints are not nearest neighbours");
    }
    if (b < a) std::swap(a, b);
  }
  auto operator<=>(const DualEdge&) const = default;
};

// The dual edge crossing e at its midpoint.
inline DualEdge crossing_dual_edge(const Edge& e) {
  if (e.horizontal()) {
    return {DualVertex{e.a.x, e.a.y - 1}, DualVertex{e.a.x, e.a.y}};
  }
  return {DualVertex{e.a.x - 1, e.a.y}, DualVertex{e.a.x, e.a.y}};
}

// Inverse of crossing_dual_edge.
inline Edge crossing_primal_edge(const DualEdge& f) {
  if (f.a.j == f.b.j) {  // horizontal dual edge crosses a vertical primal edge
    return {Vertex{f.a.i + 1, f.a.j}, Vertex{f.a.i + 1, f.a.j + 1}};
  }
  return {Vertex{f.a.i, f.a.j + 1}, Vertex{f.a.i + 1, f.a.j + 1}};
}

struct Box {
  int N = 1;  // box half-width
  int n = 1;  // window half-width

  // Window-in-box ratio; statistics assume the window sits well inside.
  static constexpr int kDefaultRatio = 4;

  void validate(int min_ratio = kDefaultRatio) const {
    if (N < 1 || n < 1) throw domain_error("box and window half-widths must be positive");
    if (N < min_ratio * n) {
      throw domain_error("box half-width N=" + std::to_string(N) + " is below " +
                         std::to_string(min_ratio) + " * n (n=" + std::to_string(n) + ")");
    }
  }

  constexpr int side() const { return 2 * N + 1; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(side()) * side(); }
  constexpr bool contains(Vertex v) const {
    return v.x >= -N && v.x <= N && v.y >= -N && v.y <= N;
  }
  constexpr bool on_boundary(Vertex v) const {
    return contains(v) && (v.x == N || v.x == -N || v.y == N || v.y == -N);
  }
  constexpr std::size_t index(Vertex v) const {
    return static_cast<std::size_t>(v.y + N) * side() + static_cast<std::size_t>(v.x + N);
  }
  constexpr Vertex vertex(std::size_t idx) const {
    return {static_cast<int>(idx % side()) - N, static_cast<int>(idx / side()) - N};
  }

  // Dual faces: (i + 1/2, j + 1/2) with i, j in [-N-1, N].
  constexpr int dual_side() const { return 2 * N + 2; }
  constexpr std::size_t dual_size() const {
    return static_cast<std::size_t>(dual_side()) * dual_side();
  }
  constexpr bool contains(DualVertex f) const {
    return f.i >= -N - 1 && f.i <= N && f.j >= -N - 1 && f.j <= N;
  }
  constexpr std::size_t dual_index(DualVertex f) const {
    return static_cast<std::size_t>(f.j + N + 1) * dual_side() +
           static_cast<std::size_t>(f.i + N + 1);
  }
  constexpr DualVertex dual_vertex(std::size_t idx) const {
    return {static_cast<int>(idx % dual_side()) - N - 1,
            static_cast<int>(idx / dual_side()) - N - 1};
  }
};

// One entry of a neighbourhood: either a box vertex or the wired root.
struct Site {
  Dir dir;
  Vertex v;
  bool is_root;
};

// Neighbours of v in E, N, W, S order. Steps leaving the box land on the root.
inline std::vector<Site> neighbors(Vertex v, const Box& box) {
  if (!box.contains(v)) {
    throw domain_error("vertex (" + std::to_string(v.x) + "," + std::to_string(v.y) +
                       ") lies outside the box");
  }
  std::vector<Site> out;
  out.reserve(4);
  for (Dir d : kDirs) {
    const Vertex w = v.step(d);
    out.push_back({d, w, !box.contains(w)});
  }
  return out;
}

// Point of (Z/2 + 1/4)^2 stored as (4x, 4y); both components are odd.
struct QuarterPoint {
  int qx = 1;
  int qy = 1;

  static constexpr QuarterPoint origin() { return {1, 1}; }

  static QuarterPoint from_coords(double x, double y) {
    const double sx = 4.0 * x;
    const double sy = 4.0 * y;
    const auto ix = static_cast<long long>(std::llround(sx));
    const auto iy = static_cast<long long>(std::llround(sy));
    if (static_cast<double>(ix) != sx || static_cast<double>(iy) != sy || (ix & 1) == 0 ||
        (iy & 1) == 0) {
      throw domain_error("point is not on the quarter-offset lattice (Z/2 + 1/4)^2");
    }
    return {static_cast<int>(ix), static_cast<int>(iy)};
  }

  constexpr double x() const { return qx / 4.0; }
  constexpr double y() const { return qy / 4.0; }

  // Nearest primal vertex: the diagonal segment from it to dual() contains this point.
  constexpr Vertex primal() const { return {floor_div(qx + 2, 4), floor_div(qy + 2, 4)}; }
  // Offset signs of this point relative to primal(); also the direction to dual().
  constexpr int sx() const { return qx - 4 * primal().x; }
  constexpr int sy() const { return qy - 4 * primal().y; }
  constexpr DualVertex dual() const {
    const Vertex v = primal();
    return {sx() > 0 ? v.x : v.x - 1, sy() > 0 ? v.y : v.y - 1};
  }

  // Half-step move.
  constexpr QuarterPoint step(Dir d) const { return {qx + 2 * dx(d), qy + 2 * dy(d)}; }
  constexpr QuarterPoint rotated_ccw() const { return {-qy, qx}; }
  auto operator<=>(const QuarterPoint&) const = default;
};

}  // namespace mot
