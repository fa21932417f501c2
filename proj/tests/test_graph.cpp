#include "support.hpp"

#include <gtest/gtest.h>

using namespace troplift;
using namespace fixtures;

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(to_string(parse_rational("-10/4")), "-5/2");
  EXPECT_THROW(parse_rational("10/-4"), MalformedInput);
  EXPECT_THROW(parse_rational("1/0"), MalformedInput);
  EXPECT_THROW(parse_rational("1.5"), MalformedInput);
  EXPECT_THROW(parse_rational(""), MalformedInput);
}

TEST(Rational, LatticeDecompose) {
  auto [len, dir] = lattice_decompose(QVec{Rational(6), Rational(-4), Rational(0)});
  EXPECT_EQ(len, Rational(2));
  EXPECT_EQ(dir, zv({3, -2, 0}));
  auto [half, d2] = lattice_decompose(QVec{Rational(1, 2), Rational(1, 2)});
  EXPECT_EQ(half, Rational(1, 2));
  EXPECT_EQ(d2, zv({1, 1}));
}

TEST(Graph, FixturesAreBalanced) {
  for (const auto& g : {elliptic(1, 2, 3, 1), g3(), trivalent_boundary(), triangle(), segment()}) {
    EXPECT_TRUE(check_balanced(g).balanced);
    EXPECT_NO_THROW(g.validate());
  }
}

TEST(Graph, UnbalancedVertexIsReported) {
  EmbeddedGraph g = triangle();
  g.leaf_directions[1] = zv({2, -3});
  auto rep = check_balanced(g);
  EXPECT_FALSE(rep.balanced);
  ASSERT_EQ(rep.unbalanced.size(), 1u);
  EXPECT_EQ(g.base.vertices[rep.unbalanced[0]].id, "y");
  EXPECT_EQ(rep.residuals[rep.unbalanced[0]], zv({0, -2}));
}

TEST(Graph, NonPrimitiveLeafRejected) {
  EmbeddedGraph g = segment();
  g.leaf_directions[0] = zv({-2, 2});
  try {
    g.validate();
    FAIL() << "expected MalformedInput";
  } catch (const MalformedInput& e) {
    EXPECT_NE(std::string(e.what()).find("s1"), std::string::npos);
  }
}

TEST(Graph, LengthMustMatchLattice) {
  EmbeddedGraph g = segment();
  g.base.edges[0].length = 3;
  EXPECT_THROW(g.validate(), MalformedInput);
}

TEST(Graph, SemistabilityRequired) {
  AbstractGraph g;
  g.vertices = {{"a", 0}, {"b", 0}};
  g.edges = {{"e", 0, 1, 0, 1}};
  EXPECT_THROW(g.validate(), MalformedInput);  // contracted edge alone at a vertex
  g.edges.push_back({"f", 0, 1, 0, 1});
  EXPECT_NO_THROW(g.validate());
}

TEST(Graph, BettiAndGenus) {
  auto e = elliptic(1, 2, 3, 1);
  EXPECT_EQ(first_betti(e.base), 1);
  EXPECT_EQ(first_betti(g3().base), 3);
  AbstractGraph loop;
  loop.vertices = {{"v", 2}};
  loop.edges = {{"l", 0, 0, 1, 1}};
  EXPECT_EQ(first_betti(loop), 1);
  EXPECT_EQ(total_genus(loop), 3);
}

TEST(Graph, StarOrderAndDegree) {
  AbstractGraph g;
  g.vertices = {{"v", 0}, {"w", 0}};
  g.edges = {{"loop", 0, 0, 1, 1}, {"e", 0, 1, 1, 1}};
  g.leaves = {{"x", 0, 1}, {"y", 1, 1}, {"z", 1, 1}};
  EXPECT_EQ(g.degree(0), 4);  // loops count twice, leaves count
  auto st = g.star(0);
  ASSERT_EQ(st.size(), 4u);
  EXPECT_EQ(g.label(st[0]), "loop@v");
  EXPECT_EQ(st[1].end, 1);
  EXPECT_TRUE(st[3].is_leaf());
}

TEST(Graph, SubdivideKeepsSegmentLength) {
  auto s = segment();
  auto t = subdivide(s, 3);
  EXPECT_EQ(t.base.vertices.size(), 4u);
  EXPECT_EQ(t.base.edges.size(), 3u);
  for (std::size_t e = 0; e < t.base.edges.size(); ++e) {
    EXPECT_EQ(t.base.edges[e].length, Rational(2));
    EXPECT_EQ(t.lattice_length(e), Rational(2));
  }
  EXPECT_TRUE(check_balanced(t).balanced);
  EXPECT_EQ(t.positions[2], pt({2, 0}));  // first inserted point, scaled by 3
}

TEST(Graph, LevelPreimageCutsCrossingEdges) {
  auto s = segment();
  auto ls = level_preimage(s, zv({1, 0}), Rational(1));
  EXPECT_EQ(ls.host.base.vertices.size(), 3u);
  EXPECT_EQ(ls.preimage.vertices.size(), 1u);
  EXPECT_EQ(ls.host.base.vertices[ls.preimage.vertices[0]].id, "st^cut");
  auto flat = level_preimage(s, zv({0, 1}), Rational(0));
  EXPECT_EQ(flat.preimage.vertices.size(), 2u);
  EXPECT_EQ(flat.preimage.edges.size(), 1u);
}

TEST(Graph, LevelPreimageOfEllipticPlane) {
  auto g = elliptic(1, 2, 3, 1);
  auto ls = level_preimage(g, zv({0, 0, 1}), Rational(0));
  EXPECT_EQ(ls.preimage.vertices.size(), g.base.vertices.size());
  EXPECT_EQ(first_betti(ls.host.base, ls.preimage), 1);
  auto bd = boundary(ls.host.base, ls.preimage);
  std::vector<std::string> ids;
  for (auto v : bd) ids.push_back(ls.host.base.vertices[v].id);
  EXPECT_EQ(ids, (std::vector<std::string>{"A", "B", "C"}));
}

TEST(Graph, MetricDistance) {
  auto g = elliptic(1, 2, 3, 1);
  Subgraph cycle;
  for (std::size_t v = 0; v < 7; ++v) cycle.vertices.push_back(v);
  EXPECT_EQ(*metric_distance(g.base, g.base.find_vertex("A"), cycle), Rational(2));
  EXPECT_EQ(*metric_distance(g.base, g.base.find_vertex("C"), cycle), Rational(3));
}

TEST(Graph, StructureChecks) {
  auto g = elliptic(1, 2, 3, 1);
  Subgraph cycle;
  for (std::size_t v = 0; v < 7; ++v) cycle.vertices.push_back(v);
  for (std::size_t e = 0; e < 7; ++e) cycle.edges.push_back(e);
  auto st = structure_checks(g.base, cycle);
  EXPECT_TRUE(st.two_vertex_connected);
  EXPECT_TRUE(st.complement_is_forest);
  EXPECT_TRUE(st.is_cycle);
  EXPECT_FALSE(st.has_one_valent_vertex);

  auto h = g3();
  Subgraph tri = edge_spanned(h.base, {h.base.find_edge("B01"), h.base.find_edge("B02"), h.base.find_edge("B12")});
  EXPECT_FALSE(structure_checks(h.base, tri).complement_is_forest);  // the other two triangles remain
}

TEST(Graph, Indecomposability) {
  auto h = g3();
  EXPECT_TRUE(is_indecomposable_vertex(h, h.base.find_vertex("R")));
  // A 4-valent crossing of two lines splits.
  Builder b(2);
  b.vertex("o", pt({0, 0}));
  b.leaf("e", "o", zv({1, 0})).leaf("w", "o", zv({-1, 0})).leaf("n", "o", zv({0, 1})).leaf("s", "o", zv({0, -1}));
  EXPECT_FALSE(is_indecomposable_vertex(b.build(), 0));
}

TEST(Topology, SimpleCyclesAndBlocks) {
  auto h = g3();
  auto cycles = simple_cycles(h.base, whole(h.base));
  EXPECT_EQ(cycles.size(), 3u);
  EXPECT_EQ(cyclic_blocks(h.base, whole(h.base)).size(), 3u);
  AbstractGraph theta;
  theta.vertices = {{"a", 0}, {"b", 0}};
  theta.edges = {{"x", 0, 1, 1, 1}, {"y", 0, 1, 1, 1}, {"z", 0, 1, 1, 1}};
  EXPECT_EQ(simple_cycles(theta, whole(theta)).size(), 3u);
  auto blocks = cyclic_blocks(theta, whole(theta));
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].edges.size(), 3u);
  EXPECT_EQ(cycle_basis(theta).size(), 2u);
}

TEST(Topology, SmallConnectedSubgraphs) {
  AbstractGraph path;
  path.vertices = {{"a", 0}, {"b", 0}, {"c", 0}};
  path.edges = {{"x", 0, 1, 1, 1}, {"y", 1, 2, 1, 1}};
  auto subs = small_connected_subgraphs(path, whole(path), 2);
  EXPECT_EQ(subs.size(), 3u + 2u + 1u);
}

TEST(Linalg, IntegerKernelIsSaturated) {
  ZMatrix a = {zv({1, 1, 0})};
  auto ker = integer_kernel(a, 3);
  ASSERT_EQ(ker.size(), 2u);
  for (const auto& k : ker) EXPECT_EQ(dot(a[0], k), 0);
  // Saturation: (1,-1,0) must be an integer combination, not a multiple.
  QMatrix m;
  for (const auto& k : ker) m.push_back(to_qvec(k));
  EXPECT_EQ(rank_of(m, 3), 2u);
  ZMatrix b = {zv({2, 4})};
  auto kb = integer_kernel(b, 2);
  ASSERT_EQ(kb.size(), 1u);
  EXPECT_EQ(sign_normalized(kb[0]), zv({2, -1}));
}

TEST(Lp, StrictInfeasibilityHasWitness) {
  LinearSystem s;
  s.nvars = 1;
  s.add({Rational(1)}, 0, RowKind::strict, "x<0");
  s.add({Rational(-1)}, 0, RowKind::weak, "x>=0");
  auto f = solve(s);
  ASSERT_FALSE(f.feasible);
  EXPECT_TRUE(is_infeasibility_witness(s, f.multipliers));
  s.rows[0].kind = RowKind::weak;
  auto g = solve(s);
  ASSERT_TRUE(g.feasible);
  EXPECT_EQ(g.x[0], 0);
}

TEST(Lp, FeasiblePointSatisfiesStrictRows) {
  LinearSystem s;
  s.nvars = 2;
  s.add({Rational(1), Rational(1)}, 3, RowKind::strict, "a");
  s.add({Rational(-1), Rational(0)}, -1, RowKind::strict, "b");
  s.add({Rational(0), Rational(-1)}, -1, RowKind::weak, "c");
  auto f = solve(s);
  ASSERT_TRUE(f.feasible);
  EXPECT_TRUE(satisfies(s, f.x));
  // maximize works on the closure
  EXPECT_EQ(*maximize(s, {Rational(1), Rational(0)}), Rational(2));
  EXPECT_EQ(*maximize(s, {Rational(-1), Rational(0)}), Rational(-1));
  s.rows.erase(s.rows.begin());
  EXPECT_FALSE(maximize(s, {Rational(1), Rational(0)}).has_value());  // unbounded
}
