#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "mot/io.hpp"
#include "mot/parallel.hpp"
#include "mot/scene.hpp"
#include "mot/svg.hpp"

using namespace mot;

TEST(Formats, UstRoundTrip) {
  const SpanningTree t = wilson_sample(Box{12, 3}, 17);
  const std::string a = write_ust(t);
  const SpanningTree back = read_ust(a);
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.seed(), 17u);
  EXPECT_EQ(write_ust(back), a);
  EXPECT_EQ(a.substr(0, a.find('\n')), "ust v1 N=12 n=3 seed=17");
}

TEST(Formats, DualRoundTrip) {
  const SpanningTree t = wilson_sample(Box{12, 3}, 18);
  const DualSpanningTree d = build_dual(t);
  const std::string a = write_dual(d);
  EXPECT_EQ(read_dual(a), d);
  EXPECT_EQ(write_dual(read_dual(a)), a);
}

TEST(Formats, PeanoRoundTrip) {
  const Scene sc = make_scene(Box{16, 4}, 19);
  const std::string a = write_peano(sc.curve);
  EXPECT_EQ(read_peano(a), sc.curve);
  EXPECT_EQ(write_peano(read_peano(a)), a);
}

TEST(Formats, ContourRoundTrip) {
  Scene sc = make_scene(Box{16, 4}, 20, 1.0 / 3, 0.1);
  const std::string a = write_contour(sc.contour);
  EXPECT_EQ(read_contour(a), sc.contour);
  EXPECT_EQ(write_contour(read_contour(a)), a);
  EXPECT_NE(a.find("contour v1 "), std::string::npos);
  EXPECT_NE(a.find("0,0,0\n"), std::string::npos);
}

TEST(Formats, PartialTreesRoundTrip) {
  const Scene sc = make_scene(Box{16, 4}, 21);
  const ReconstructedScene r = reconstruct_scene(sc.contour);
  const std::string p = write_partial(r.primal_parent, "primal");
  const std::string d = write_partial(r.dual_parent, "dual");
  EXPECT_EQ((read_partial<Vertex>(p, "primal")), r.primal_parent);
  EXPECT_EQ((read_partial<DualVertex>(d, "dual")), r.dual_parent);
  EXPECT_EQ(write_partial(read_partial<Vertex>(p, "primal"), "primal"), p);
  EXPECT_THROW(read_partial<Vertex>(p, "dual"), io_error);
}

TEST(Formats, StructureGraphAndGlueRoundTrip) {
  const Scene sc = make_scene(Box{16, 4}, 22);
  const StructureGraph g = structure_graph_from_contour(sc.contour);
  const std::string a = write_structure_graph(g);
  EXPECT_EQ(read_structure_graph(a), g);
  EXPECT_EQ(write_structure_graph(read_structure_graph(a)), a);
  const std::vector<GlueRecord> rs{glue_record(glue_complex(sc.contour, 1e9)), {1, 0, 1, 2}};
  const std::string b = write_glue_records(rs);
  EXPECT_EQ(read_glue_records(b), rs);
  EXPECT_EQ(write_glue_records(read_glue_records(b)), b);
  EXPECT_THROW(read_glue_records("V,E,F,chi\n1,0,1,3\n"), io_error);
}

TEST(Formats, MalformedInputRejected) {
  const std::string u = write_ust(wilson_sample(Box{4, 1}, 1));
  EXPECT_THROW(read_ust(u.substr(0, u.size() - 1)), io_error);           // no final newline
  EXPECT_THROW(read_ust(u + "0 0 E\n"), io_error);                        // trailing line
  EXPECT_THROW(read_ust("ust v2" + u.substr(6)), io_error);               // version
  std::string cyc = u;
  cyc.replace(cyc.find("\n0 0 ") + 5, 1, "R");
  EXPECT_THROW(read_ust(cyc), io_error);
  EXPECT_THROW(read_contour("contour v1 0 1 1 1\n0,0,0\n"), io_error);   // short
  EXPECT_THROW(read_contour("contour v1 0 0 1.0 1\n0,0,0\n"), io_error); // non-canonical number
  EXPECT_THROW(read_contour("contour v1 0 0 1 1\n0,+0,0\n"), io_error);
  EXPECT_THROW(read_peano("peano v1 n_minus=0 n_plus=2\nEX\n"), io_error);
  EXPECT_THROW(read_peano("peano v1 n_minus=1 n_plus=2\nE\n"), io_error);
  EXPECT_THROW(read_structure_graph("m1,m2\n1,0\n"), io_error);
}

TEST(Files, AtomicWriteAndChecksum) {
  const auto dir = std::filesystem::temp_directory_path() / "mot_io_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / "a.txt";
  write_file_atomic(p, "hello\n");
  EXPECT_EQ(read_file(p), "hello\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  write_file_atomic(p, "again\n");
  EXPECT_EQ(read_file(p), "again\n");
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.txt", "x"), io_error);
  EXPECT_THROW(read_file(dir / "nope.txt"), io_error);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
  std::filesystem::remove_all(dir);
}

TEST(Parallel, SlotsFollowIndicesForAnyWorkerCount) {
  auto f = [](std::size_t i) {
    Rng rng = make_rng(7, Stream::kScene, i);
    return static_cast<double>(rng() % 1000) / 7.0;
  };
  const auto one = parallel_map(200, 1, f);
  for (unsigned w : {2U, 3U, 8U}) EXPECT_EQ(parallel_map(200, w, f), one);
  EXPECT_TRUE(parallel_map(0, 4, f).empty());
  EXPECT_THROW(parallel_map(10, 3, [](std::size_t i) -> int {
                 if (i == 6) throw domain_error("boom");
                 return 0;
               }),
               domain_error);
}

TEST(Svg, PaletteAndDeterminism) {
  const Scene sc = make_scene(Box{8, 2}, 3);
  const std::string a = render_svg(sc.tree, sc.dual, sc.curve);
  EXPECT_EQ(a, render_svg(sc.tree, sc.dual, sc.curve));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("stroke=\"blue\""), std::string::npos);
  EXPECT_NE(a.find("stroke=\"red\""), std::string::npos);
  EXPECT_NE(a.find("stroke=\"green\""), std::string::npos);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}
