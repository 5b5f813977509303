#pragma once

#include <cstdint>

#include "mot/contour.hpp"
#include "mot/dual.hpp"
#include "mot/peano.hpp"
#include "mot/ust.hpp"

namespace mot {

struct Scene {
  SpanningTree tree;
  DualSpanningTree dual;
  PeanoCurve curve;
  ContourPair contour;
};

inline Scene make_scene(const Box& box, std::uint64_t seed, double delta = 1.0,
                        double c_check = 1.0) {
  SpanningTree tree = wilson_sample(box, seed);
  DualSpanningTree dual = build_dual(tree);
  PeanoCurve curve = trace_peano(tree, dual, box.n);
  ContourPair contour = compute_contour(tree, dual, curve);
  contour.delta = delta;
  contour.c_check = c_check;
  return {std::move(tree), std::move(dual), std::move(curve), std::move(contour)};
}

}  // namespace mot
