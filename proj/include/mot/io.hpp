#pragma once

// Text formats. Each writer produces a string; readers reject anything a
// writer would not emit, so write -> read -> write is byte-identical.
//
//   ust v1 N=<N> n=<n> seed=<seed>        then "x y D" per box vertex, row-major
//   dual v1 N=<N> n=<n> root=<i>,<j>      then "i j D" per dual vertex, D may be R
//   peano v1 n_minus=<a> n_plus=<b>       then moves, 64 per line
//   contour v1 <n_minus> <n_plus> <delta> <c_check>   then "n,L,R" per time
//   partial v1 <primal|dual> count=<k>    then "x y D" per recorded parent edge
//   m1,m2                                 structure graph edge list
//   V,E,F,chi                             glued complex records

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "mot/contour.hpp"
#include "mot/dual.hpp"
#include "mot/errors.hpp"
#include "mot/mating.hpp"
#include "mot/peano.hpp"
#include "mot/ust.hpp"

namespace mot {

inline char dir_char(Dir d) {
  switch (d) {
    case Dir::E: return 'E';
    case Dir::N: return 'N';
    case Dir::W: return 'W';
    case Dir::S: return 'S';
    case Dir::Root: return 'R';
  }
  return '?';
}

inline Dir char_dir(char c) {
  switch (c) {
    case 'E': return Dir::E;
    case 'N': return Dir::N;
    case 'W': return Dir::W;
    case 'S': return Dir::S;
    case 'R': return Dir::Root;
    default: throw io_error(std::string("bad direction character '") + c + "'");
  }
}

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Line reader with strict parsing helpers.

namespace detail {

class Lines {
 public:
  explicit Lines(const std::string& text) : text_(text) {}
  bool done() const { return pos_ >= text_.size(); }
  std::string next() {
    if (done()) throw io_error("unexpected end of input");
    const std::size_t e = text_.find('\n', pos_);
    if (e == std::string::npos) throw io_error("last line is not newline-terminated");
    std::string line = text_.substr(pos_, e - pos_);
    pos_ = e + 1;
    ++line_no_;
    return line;
  }
  int line_no() const { return line_no_; }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t e = s.find(sep, start);
    out.push_back(s.substr(start, e == std::string::npos ? std::string::npos : e - start));
    if (e == std::string::npos) break;
    start = e + 1;
  }
  return out;
}

inline long long parse_int(const std::string& s) {
  if (s.empty()) throw io_error("empty integer field");
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw io_error("bad integer '" + s + "'");
  }
  if (used != s.size() || std::to_string(v) != s) throw io_error("bad integer '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s[0] == '-' || s[0] == '+') throw io_error("bad unsigned integer '" + s + "'");
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw io_error("bad unsigned integer '" + s + "'");
  }
  if (used != s.size() || std::to_string(v) != s) throw io_error("bad unsigned integer '" + s + "'");
  return v;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw io_error("bad number '" + s + "'");
  }
  if (used != s.size() || format_double(v) != s) throw io_error("non-canonical number '" + s + "'");
  return v;
}

inline std::string field(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw io_error("expected field " + key + "=");
  return token.substr(key.size() + 1);
}

inline std::vector<std::string> header(Lines& in, const std::string& magic, std::size_t fields) {
  const auto tok = split(in.next(), ' ');
  if (tok.size() != fields + 2 || tok[0] != magic || tok[1] != "v1") {
    throw io_error("expected a '" + magic + " v1' header");
  }
  return {tok.begin() + 2, tok.end()};
}

inline void expect_end(const Lines& in) {
  if (!in.done()) throw io_error("trailing data after line " + std::to_string(in.line_no()));
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::string write_ust(const SpanningTree& t) {
  std::ostringstream o;
  const Box& b = t.box();
  o << "ust v1 N=" << b.N << " n=" << b.n << " seed=" << t.seed() << "\n";
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vertex v = b.vertex(i);
    o << v.x << ' ' << v.y << ' ' << dir_char(t.parent_dirs()[i]) << '\n';
  }
  return o.str();
}

inline SpanningTree read_ust(const std::string& text) {
  detail::Lines in(text);
  const auto h = detail::header(in, "ust", 3);
  const Box box{static_cast<int>(detail::parse_int(detail::field(h[0], "N"))),
                static_cast<int>(detail::parse_int(detail::field(h[1], "n")))};
  const std::uint64_t seed = detail::parse_u64(detail::field(h[2], "seed"));
  if (box.N < 1 || box.n < 0 || box.n > box.N) throw io_error("bad box in ust header");
  std::vector<Dir> parent(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    const auto tok = detail::split(in.next(), ' ');
    const Vertex v = box.vertex(i);
    if (tok.size() != 3 || detail::parse_int(tok[0]) != v.x || detail::parse_int(tok[1]) != v.y ||
        tok[2].size() != 1) {
      throw io_error("ust line " + std::to_string(in.line_no()) + " is malformed");
    }
    parent[i] = char_dir(tok[2][0]);
    if (parent[i] == Dir::Root) throw io_error("primal vertex without a parent edge");
  }
  detail::expect_end(in);
  SpanningTree t(box, seed, std::move(parent));
  try {
    t.check_invariants();
  } catch (const domain_error& e) {
    throw io_error(std::string("ust file is not a spanning tree: ") + e.what());
  }
  return t;
}

inline std::string write_dual(const DualSpanningTree& d) {
  std::ostringstream o;
  const Box& b = d.box();
  o << "dual v1 N=" << b.N << " n=" << b.n << " root=" << d.root().i << ',' << d.root().j << "\n";
  for (std::size_t i = 0; i < b.dual_size(); ++i) {
    const DualVertex f = b.dual_vertex(i);
    o << f.i << ' ' << f.j << ' ' << dir_char(d.parent_dirs()[i]) << '\n';
  }
  return o.str();
}

inline DualSpanningTree read_dual(const std::string& text) {
  detail::Lines in(text);
  const auto h = detail::header(in, "dual", 3);
  const Box box{static_cast<int>(detail::parse_int(detail::field(h[0], "N"))),
                static_cast<int>(detail::parse_int(detail::field(h[1], "n")))};
  if (box.N < 1 || box.n < 0 || box.n > box.N) throw io_error("bad box in dual header");
  const auto r = detail::split(detail::field(h[2], "root"), ',');
  if (r.size() != 2) throw io_error("bad dual root");
  const DualVertex root{static_cast<int>(detail::parse_int(r[0])), static_cast<int>(detail::parse_int(r[1]))};
  std::vector<Dir> parent(box.dual_size());
  for (std::size_t i = 0; i < box.dual_size(); ++i) {
    const auto tok = detail::split(in.next(), ' ');
    const DualVertex f = box.dual_vertex(i);
    if (tok.size() != 3 || detail::parse_int(tok[0]) != f.i || detail::parse_int(tok[1]) != f.j ||
        tok[2].size() != 1) {
      throw io_error("dual line " + std::to_string(in.line_no()) + " is malformed");
    }
    parent[i] = char_dir(tok[2][0]);
  }
  detail::expect_end(in);
  try {
    DualSpanningTree d(box, root, std::move(parent));
    d.check_invariants();
    return d;
  } catch (const domain_error& e) {
    throw io_error(std::string("dual file is not a spanning tree: ") + e.what());
  }
}

inline std::string write_peano(const PeanoCurve& c) {
  std::ostringstream o;
  o << "peano v1 n_minus=" << c.n_minus() << " n_plus=" << c.n_plus() << "\n";
  const auto m = c.moves();
  for (std::size_t k = 0; k < m.size(); ++k) {
    o << dir_char(m[k]);
    if (k % 64 == 63 || k + 1 == m.size()) o << '\n';
  }
  return o.str();
}

inline PeanoCurve read_peano(const std::string& text) {
  detail::Lines in(text);
  const auto h = detail::header(in, "peano", 2);
  const long long a = detail::parse_int(detail::field(h[0], "n_minus"));
  const long long b = detail::parse_int(detail::field(h[1], "n_plus"));
  if (a > 0 || b < 0) throw io_error("peano window must contain time 0");
  const auto steps = static_cast<std::size_t>(b - a);
  std::vector<Dir> moves;
  moves.reserve(steps);
  while (moves.size() < steps) {
    const std::string line = in.next();
    const std::size_t want = std::min<std::size_t>(64, steps - moves.size());
    if (line.size() != want) throw io_error("peano line " + std::to_string(in.line_no()) + " has the wrong length");
    for (char c : line) {
      const Dir d = char_dir(c);
      if (d == Dir::Root) throw io_error("peano move cannot be R");
      moves.push_back(d);
    }
  }
  detail::expect_end(in);
  try {
    return PeanoCurve::from_moves(static_cast<int>(a), moves);
  } catch (const domain_error& e) {
    throw io_error(std::string("peano file is not a curve: ") + e.what());
  }
}

inline std::string write_contour(const ContourPair& c) {
  std::ostringstream o;
  o << "contour v1 " << c.n_minus << ' ' << c.n_plus() << ' ' << format_double(c.delta) << ' '
    << format_double(c.c_check) << "\n";
  for (int n = c.n_minus; n <= c.n_plus(); ++n) o << n << ',' << c.L_at(n) << ',' << c.R_at(n) << '\n';
  return o.str();
}

// Values are not checked against the unit-step rule here; reconstruction
// reports unrealisable input itself.
inline ContourPair read_contour(const std::string& text) {
  detail::Lines in(text);
  const auto h = detail::header(in, "contour", 4);
  ContourPair c;
  c.n_minus = static_cast<int>(detail::parse_int(h[0]));
  const long long b = detail::parse_int(h[1]);
  c.delta = detail::parse_double(h[2]);
  c.c_check = detail::parse_double(h[3]);
  if (b < c.n_minus) throw io_error("contour window is empty");
  c.L.clear();
  c.R.clear();
  for (long long n = c.n_minus; n <= b; ++n) {
    const auto tok = detail::split(in.next(), ',');
    if (tok.size() != 3 || detail::parse_int(tok[0]) != n) {
      throw io_error("contour line " + std::to_string(in.line_no()) + " is malformed");
    }
    c.L.push_back(static_cast<int>(detail::parse_int(tok[1])));
    c.R.push_back(static_cast<int>(detail::parse_int(tok[2])));
  }
  detail::expect_end(in);
  return c;
}

template <typename Key>
std::string write_partial(const std::map<Key, Dir>& m, const std::string& kind) {
  std::ostringstream o;
  o << "partial v1 " << kind << " count=" << m.size() << "\n";
  for (const auto& [k, d] : m) {
    if constexpr (std::is_same_v<Key, Vertex>) o << k.x << ' ' << k.y;
    else o << k.i << ' ' << k.j;
    o << ' ' << dir_char(d) << '\n';
  }
  return o.str();
}

template <typename Key>
std::map<Key, Dir> read_partial(const std::string& text, const std::string& kind) {
  detail::Lines in(text);
  const auto h = detail::header(in, "partial", 2);
  if (h[0] != kind) throw io_error("expected a " + kind + " partial tree");
  const auto count = detail::parse_u64(detail::field(h[1], "count"));
  std::map<Key, Dir> m;
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto tok = detail::split(in.next(), ' ');
    if (tok.size() != 3 || tok[2].size() != 1) throw io_error("partial tree line is malformed");
    const Key key{static_cast<int>(detail::parse_int(tok[0])), static_cast<int>(detail::parse_int(tok[1]))};
    const Dir d = char_dir(tok[2][0]);
    if (d == Dir::Root) throw io_error("partial tree edge cannot be R");
    if (!m.empty() && !(m.rbegin()->first < key)) throw io_error("partial tree lines are not sorted");
    m.emplace(key, d);
  }
  detail::expect_end(in);
  return m;
}

inline std::string write_structure_graph(const StructureGraph& g) {
  std::ostringstream o;
  o << "m1,m2\n";
  for (auto [a, b] : g.edges()) o << a << ',' << b << '\n';
  return o.str();
}

// The cell range is not stored; it is taken from the smallest and largest
// cells that appear.
inline StructureGraph read_structure_graph(const std::string& text) {
  detail::Lines in(text);
  if (in.next() != "m1,m2") throw io_error("expected header m1,m2");
  std::vector<std::pair<int, int>> e;
  while (!in.done()) {
    const auto tok = detail::split(in.next(), ',');
    if (tok.size() != 2) throw io_error("structure graph line is malformed");
    const int a = static_cast<int>(detail::parse_int(tok[0])), b = static_cast<int>(detail::parse_int(tok[1]));
    if (!(a < b) || (!e.empty() && !(e.back() < std::make_pair(a, b)))) {
      throw io_error("structure graph edges must be sorted pairs m1 < m2");
    }
    e.emplace_back(a, b);
  }
  if (e.empty()) throw io_error("structure graph has no edges");
  int lo = e.front().first, hi = e.front().second;
  for (auto [a, b] : e) lo = std::min(lo, a), hi = std::max(hi, b);
  StructureGraph g(lo, hi);
  for (auto [a, b] : e) g.add_edge(a, b);
  if (g.edges().size() != e.size()) throw io_error("structure graph lacks its path edges");
  return g;
}

struct GlueRecord {
  int V = 0, E = 0, F = 0, chi = 0;
  bool operator==(const GlueRecord&) const = default;
};

inline GlueRecord glue_record(const GluedComplex& g) { return {g.V(), g.E(), g.F(), g.chi()}; }

inline std::string write_glue_records(const std::vector<GlueRecord>& rs) {
  std::ostringstream o;
  o << "V,E,F,chi\n";
  for (const auto& r : rs) o << r.V << ',' << r.E << ',' << r.F << ',' << r.chi << '\n';
  return o.str();
}

inline std::vector<GlueRecord> read_glue_records(const std::string& text) {
  detail::Lines in(text);
  if (in.next() != "V,E,F,chi") throw io_error("expected header V,E,F,chi");
  std::vector<GlueRecord> rs;
  while (!in.done()) {
    const auto tok = detail::split(in.next(), ',');
    if (tok.size() != 4) throw io_error("glue record is malformed");
    GlueRecord r{static_cast<int>(detail::parse_int(tok[0])), static_cast<int>(detail::parse_int(tok[1])),
                 static_cast<int>(detail::parse_int(tok[2])), static_cast<int>(detail::parse_int(tok[3]))};
    if (r.chi != r.V - r.E + r.F) throw io_error("glue record chi does not match V - E + F");
    rs.push_back(r);
  }
  return rs;
}

// ---------------------------------------------------------------------------
// Files.

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot open " + p.string());
  std::ostringstream o;
  o << in.rdbuf();
  if (in.bad()) throw io_error("cannot read " + p.string());
  return o.str();
}

// Write to a sibling temporary, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw io_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw io_error("cannot move " + tmp.string() + " into place");
  }
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mot
