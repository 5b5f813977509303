#pragma once

// Minimal SVG of a scene inside its window: primal tree edges blue, dual tree
// edges red, Peano curve green.

#include <sstream>
#include <string>

#include "mot/dual.hpp"
#include "mot/io.hpp"
#include "mot/peano.hpp"
#include "mot/ust.hpp"

namespace mot {

inline std::string render_svg(const SpanningTree& t, const DualSpanningTree& d, const PeanoCurve& c,
                              double unit = 12.0) {
  const int n = t.box().n;
  const double lo = -n - 1, span = 2.0 * n + 2;
  auto X = [&](double x) { return format_double((x - lo) * unit); };
  auto Y = [&](double y) { return format_double((lo + span - y) * unit); };
  auto inside = [&](double x, double y) { return x >= -n - 0.5 && x <= n + 0.5 && y >= -n - 0.5 && y <= n + 0.5; };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(span * unit) << "\" height=\""
    << format_double(span * unit) << "\" viewBox=\"0 0 " << format_double(span * unit) << ' '
    << format_double(span * unit) << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<g stroke=\"blue\" stroke-width=\"" << format_double(unit / 6) << "\" stroke-linecap=\"round\">\n";
  for (int x = -n; x <= n; ++x) {
    for (int y = -n; y <= n; ++y) {
      const Vertex v{x, y};
      const Vertex w = v.step(t.parent_dir(v));
      if (!inside(w.x, w.y)) continue;
      o << "<line x1=\"" << X(v.x) << "\" y1=\"" << Y(v.y) << "\" x2=\"" << X(w.x) << "\" y2=\"" << Y(w.y) << "\"/>\n";
    }
  }
  o << "</g>\n<g stroke=\"red\" stroke-width=\"" << format_double(unit / 6) << "\" stroke-linecap=\"round\">\n";
  for (int i = -n - 1; i <= n; ++i) {
    for (int j = -n - 1; j <= n; ++j) {
      const DualVertex f{i, j};
      const Dir pd = d.parent_dir(f);
      if (pd == Dir::Root) continue;
      const DualVertex g = f.step(pd);
      if (!inside(f.x(), f.y()) || !inside(g.x(), g.y())) continue;
      o << "<line x1=\"" << X(f.x()) << "\" y1=\"" << Y(f.y()) << "\" x2=\"" << X(g.x()) << "\" y2=\"" << Y(g.y())
        << "\"/>\n";
    }
  }
  o << "</g>\n<polyline fill=\"none\" stroke=\"green\" stroke-width=\"" << format_double(unit / 10) << "\" points=\"";
  bool first = true;
  for (const auto& q : c.positions()) {
    o << (first ? "" : " ") << X(q.x()) << ',' << Y(q.y());
    first = false;
  }
  o << "\"/>\n</svg>\n";
  return o.str();
}

}  // namespace mot
