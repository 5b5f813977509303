#include <gtest/gtest.h>

#include <map>

#include "mot/mating.hpp"
#include "mot/scene.hpp"

using namespace mot;

namespace {

ContourPair make_contour(int n_minus, std::vector<int> L, std::vector<int> R) {
  ContourPair c;
  c.n_minus = n_minus;
  c.L = std::move(L);
  c.R = std::move(R);
  return c;
}

}  // namespace

TEST(TimeEquivalence, ClassesMatchLatticeVertices) {
  const Box box{32, 8};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Scene sc = make_scene(box, 10 + s);
    const TimeEquivalence eq(sc.contour);
    std::map<Vertex, int> pclass;
    std::map<DualVertex, int> dclass;
    for (int t = sc.curve.n_minus(); t <= sc.curve.n_plus(); ++t) {
      const QuarterPoint& q = sc.curve.at(t);
      auto [pi, pnew] = pclass.emplace(q.primal(), eq.primal_class(t));
      if (!pnew) EXPECT_EQ(pi->second, eq.primal_class(t));
      auto [di, dnew] = dclass.emplace(q.dual(), eq.dual_class(t));
      if (!dnew) EXPECT_EQ(di->second, eq.dual_class(t));
    }
    // Distinct vertices get distinct classes.
    std::set<int> pids, dids;
    for (auto& [v, k] : pclass) pids.insert(k);
    for (auto& [f, k] : dclass) dids.insert(k);
    EXPECT_EQ(pids.size(), pclass.size());
    EXPECT_EQ(dids.size(), dclass.size());
  }
}

TEST(TimeEquivalence, AgreesWithPairwiseDefinition) {
  const Box box{8, 2};
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Scene sc = make_scene(box, 40 + s);
    const TimeEquivalence eq(sc.contour);
    const ContourPair& c = sc.contour;
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a; b < c.size(); ++b) {
        const int ta = c.n_minus + static_cast<int>(a), tb = c.n_minus + static_cast<int>(b);
        EXPECT_EQ(eq.same_primal(ta, tb), same_level_link(c.L, a, b));
        EXPECT_EQ(eq.same_dual(ta, tb), same_level_link(c.R, a, b));
        if (eq.same_primal(ta, tb)) EXPECT_EQ(c.L[a], c.L[b]);
      }
    }
  }
}

TEST(TimeEquivalence, ChainBoundStabilises) {
  const Box box{64, 16};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Scene sc = make_scene(box, 70 + s);
    const TimeEquivalence e1(sc.contour, 1), e2(sc.contour, 2), e3(sc.contour, 3),
        e4(sc.contour, 4), e5(sc.contour, 5);
    EXPECT_EQ(e2, e3);
    EXPECT_EQ(e3, e4);
    EXPECT_EQ(e4, e5);
    EXPECT_EQ(e1, e2);
  }
}

TEST(TimeEquivalence, ClassesHaveAtMostFourTimes) {
  const Scene sc = make_scene(Box{64, 16}, 5);
  const TimeEquivalence eq(sc.contour);
  std::map<int, int> sizes;
  for (int k : eq.primal_classes()) ++sizes[k];
  for (auto [k, n] : sizes) EXPECT_LE(n, 4);
}

TEST(StructureGraph, CurveAndContourAgree) {
  const Box box{64, 16};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Scene sc = make_scene(box, 100 + s);
    const StructureGraph a = structure_graph_from_curve(sc.curve);
    const StructureGraph b = structure_graph_from_contour(sc.contour);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.connected());
    for (int m = a.m_min(); m < a.m_max(); ++m) EXPECT_TRUE(a.adjacent(m, m + 1));
  }
}

TEST(StructureGraph, DegreeBounded) {
  const Box box{128, 32};
  int worst = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Scene sc = make_scene(box, 200 + s);
    worst = std::max(worst, structure_graph_from_curve(sc.curve).max_degree());
  }
  // Each corner is shared by at most 8 cells, and a cell has 3 corners.
  EXPECT_LE(worst, 21);
  EXPECT_GE(worst, 3);
}

// Both coordinates nondecreasing: a level is only revisited while the other
// coordinate moves. With flat runs of at most two steps, no link reaches
// beyond three cells.
TEST(StructureGraph, StaircaseHasOnlyShortRangeAdjacency) {
  std::vector<int> L{0}, R{0};
  for (int k = 0; k < 40; ++k) {
    if (k % 3 == 0) {
      L.push_back(L.back() + 1);
      R.push_back(R.back());
    } else {
      L.push_back(L.back());
      R.push_back(R.back() + 1);
    }
  }
  const StructureGraph g = structure_graph_from_contour(make_contour(0, L, R));
  int longest = 0;
  for (auto [a, b] : g.edges()) {
    EXPECT_LE(b - a, 3) << a << " " << b;
    longest = std::max(longest, b - a);
  }
  EXPECT_EQ(longest, 3);
}

TEST(Glue, SphereOnSampledWindows) {
  const Box box{64, 16};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Scene sc = make_scene(box, 300 + s);
    int top = 0;
    for (std::size_t k = 0; k < sc.contour.size(); ++k) {
      top = std::max(top, sc.contour.L[k] + sc.contour.R[k]);
    }
    const GluedComplex g = glue_complex(sc.contour, top + 1.0);
    EXPECT_EQ(g.chi(), 2);
    EXPECT_TRUE(g.connected());
    EXPECT_TRUE(g.edges_two_sided());
    EXPECT_TRUE(g.links_are_circles());
    EXPECT_TRUE(g.is_sphere());
    // Vertex ids agree with the time classes away from the boundary vertex.
    const TimeEquivalence eq(sc.contour);
    const ContourPair& c = sc.contour;
    for (int a = c.n_minus; a <= c.n_plus(); ++a) {
      for (int b = a; b <= std::min(c.n_plus(), a + 60); ++b) {
        if (eq.same_primal(a, b)) EXPECT_EQ(g.primal_vertex(a), g.primal_vertex(b));
        if (eq.same_dual(a, b)) EXPECT_EQ(g.dual_vertex(a), g.dual_vertex(b));
        if (g.primal_vertex(a) != GluedComplex::kBoundary &&
            g.primal_vertex(a) == g.primal_vertex(b)) {
          EXPECT_TRUE(eq.same_primal(a, b));
        }
        if (g.dual_vertex(a) != GluedComplex::kBoundary && g.dual_vertex(a) == g.dual_vertex(b)) {
          EXPECT_TRUE(eq.same_dual(a, b));
        }
      }
    }
  }
}

TEST(Glue, DegenerateOneStepWindow) {
  const GluedComplex g = glue_complex(make_contour(0, {0, 1}, {0, 0}), 5.0);
  EXPECT_EQ(g.V(), 1);
  EXPECT_EQ(g.E(), 0);
  EXPECT_EQ(g.F(), 1);
  EXPECT_EQ(g.chi(), 2);
  EXPECT_TRUE(g.is_sphere());
}

TEST(Glue, HeightMustSeparateGraphs) {
  const ContourPair c = make_contour(0, {0, 1, 1, 2}, {0, 0, 1, 1});
  EXPECT_THROW(glue_complex(c, 3.0), domain_error);
  EXPECT_NO_THROW(glue_complex(c, 3.5));
}

TEST(Glue, RepeatedExcursionsFromOneVertex) {
  const ContourPair c = make_contour(0, {0, 1, 0, 1, 0}, {0, 0, 0, 0, 0});
  const GluedComplex g = glue_complex(c, 10.0);
  EXPECT_EQ(g.V(), 3);
  EXPECT_EQ(g.chi(), 2);
  EXPECT_TRUE(g.is_sphere());
}

TEST(Reconstruct, HandBuiltLoopAroundALeaf) {
  // Up to (0,1), around it through three dual steps, back down and on to (-1,0).
  const ContourPair c = make_contour(0, {0, 1, 1, 1, 1, 0, 1}, {0, 0, 1, 2, 3, 3, 3});
  const ReconstructedScene s = reconstruct_scene(c);
  EXPECT_EQ(s.primal_parent.at({0, 1}), Dir::S);
  EXPECT_EQ(s.primal_parent.at({-1, 0}), Dir::E);
  EXPECT_EQ(s.dual_parent.at({0, 1}), Dir::S);
  EXPECT_EQ(s.curve.at(1), (QuarterPoint{1, 3}));
  EXPECT_EQ(s.curve.at(4), (QuarterPoint{-1, 3}));
  EXPECT_EQ(s.curve.at(5), (QuarterPoint{-1, 1}));
  EXPECT_EQ(s.contour.L, c.L);
  EXPECT_EQ(s.contour.R, c.R);
  EXPECT_EQ(s.rotation, 0);
}

TEST(Reconstruct, RoundTripOnSampledScenes) {
  const Box box{128, 32};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Scene sc = make_scene(box, 400 + s);
    const ReconstructedScene r = reconstruct_scene(sc.contour);
    EXPECT_EQ(r.contour.L, sc.contour.L);
    EXPECT_EQ(r.contour.R, sc.contour.R);
    const ReconstructedScene truth = visible_part(sc.tree, sc.dual, sc.curve, sc.contour);
    EXPECT_TRUE(equal_up_to_rotation(r, truth));
    EXPECT_EQ(r.curve, sc.curve);
    EXPECT_EQ(r.primal_parent, truth.primal_parent);
    EXPECT_EQ(r.dual_parent, truth.dual_parent);
  }
}

TEST(Reconstruct, InvalidIncrementsRejected) {
  EXPECT_THROW(reconstruct_scene(make_contour(0, {0, 2}, {0, 0})), domain_error);
  EXPECT_THROW(reconstruct_scene(make_contour(0, {0, 1}, {0, 1})), domain_error);
  EXPECT_THROW(reconstruct_scene(make_contour(0, {0, 0}, {0, 0})), domain_error);
}

// Random walks in the contour space either rebuild exactly or are rejected.
TEST(Reconstruct, ArbitraryContoursRebuildOrThrow) {
  Rng rng(9);
  int ok = 0, rejected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int len = 1 + static_cast<int>(rng() % 40);
    const int n_minus = -static_cast<int>(rng() % static_cast<unsigned>(len + 1));
    std::vector<int> L(static_cast<std::size_t>(len) + 1), R(L.size());
    for (std::size_t k = 1; k < L.size(); ++k) {
      const unsigned m = static_cast<unsigned>(rng() % 4);
      L[k] = L[k - 1] + (m == 0) - (m == 1);
      R[k] = R[k - 1] + (m == 2) - (m == 3);
    }
    const std::size_t zero = static_cast<std::size_t>(-n_minus);
    const int l0 = L[zero], r0 = R[zero];
    for (auto& v : L) v -= l0;
    for (auto& v : R) v -= r0;
    const ContourPair c = make_contour(n_minus, L, R);
    try {
      const ReconstructedScene s = reconstruct_scene(c);
      EXPECT_EQ(s.contour.L, c.L);
      EXPECT_EQ(s.contour.R, c.R);
      ++ok;
    } catch (const domain_error&) {
      ++rejected;
    }
  }
  EXPECT_GT(ok, 0);
  EXPECT_GT(rejected, 0);
}

TEST(Rotation, CanonicalFormIsRotationInvariant) {
  const Scene sc = make_scene(Box{32, 8}, 17);
  const ReconstructedScene s = visible_part(sc.tree, sc.dual, sc.curve, sc.contour);
  const auto base = canonical_rotation(s).second;
  for (int k = 0; k < 4; ++k) {
    // Rotating the encoding and canonicalising again gives the same form.
    SceneEncoding e = encode(s, k);
    std::vector<SceneEncoding> alts;
    for (int j = 0; j < 4; ++j) {
      SceneEncoding r = e;
      for (auto& q : r.positions) {
        for (int i = 0; i < j; ++i) q = q.rotated_ccw();
      }
      for (auto& [v, d] : r.primal) {
        for (int i = 0; i < j; ++i) v = v.rotated_ccw(), d = rotate_ccw(d);
      }
      for (auto& [f, d] : r.dual) {
        for (int i = 0; i < j; ++i) f = f.rotated_ccw(), d = rotate_ccw(d);
      }
      std::sort(r.primal.begin(), r.primal.end());
      std::sort(r.dual.begin(), r.dual.end());
      alts.push_back(r);
    }
    EXPECT_EQ(*std::min_element(alts.begin(), alts.end()), base);
  }
}
