#include "support.hpp"

#include <gtest/gtest.h>

using namespace troplift;
using namespace fixtures;

namespace {

const ZVec z_axis = zv({0, 0, 1});

Subgraph planar_cycle(const EmbeddedGraph& g) {
  std::vector<std::size_t> edges;
  for (const char* id : {"c12", "c23", "c34", "c45", "c56", "c67", "c71"}) edges.push_back(g.base.find_edge(id));
  return edge_spanned(g.base, edges);
}

ObstructionCertificate first_certificate(const ObstructionVerdict& v) {
  for (const auto& leg : v.legs)
    if (leg.result.certificate) return *leg.result.certificate;
  throw std::runtime_error("no certificate");
}

// Two parallel unit segments: the cycle spans only a line.
EmbeddedGraph doubled_line() {
  Builder g(3);
  g.vertex("s", pt({0, 0, 0})).vertex("t", pt({1, 0, 0}));
  g.edge("u", "s", "t").edge("w", "s", "t");
  g.leaf("s1", "s", zv({-1, 1, 0})).leaf("s2", "s", zv({-1, -1, 0}));
  g.leaf("t1", "t", zv({1, 0, 1})).leaf("t2", "t", zv({1, 0, -1}));
  return g.build();
}

}  // namespace

TEST(Directions, PlaneNormals) {
  EXPECT_EQ(candidate_directions(elliptic(1, 2, 3, 1)), std::vector<ZVec>{z_axis});
  EXPECT_EQ(candidate_directions(g3()), std::vector<ZVec>{z_axis});
  EXPECT_EQ(candidate_directions(trivalent_boundary()), std::vector<ZVec>{z_axis});
  EXPECT_TRUE(candidate_directions(triangle()).empty());  // a cycle spanning the whole plane
}

TEST(Directions, LineHasTwoNormals) {
  auto dirs = candidate_directions(doubled_line());
  ASSERT_EQ(dirs.size(), 2u);
  for (const auto& m : dirs) {
    EXPECT_EQ(m[0], 0);
    EXPECT_TRUE(is_primitive(m));
  }
}

TEST(WellSpaced, MatchesMinimumRule) {
  for (long a = 1; a <= 3; ++a)
    for (long b = 1; b <= 3; ++b)
      for (long c = 1; c <= 3; ++c)
        for (long d = 1; d <= 3; ++d) {
          auto g = elliptic(a, b, c, d);
          EXPECT_EQ(well_spaced_check(g, z_axis, 0, planar_cycle(g)), min_achieved_twice(a, b, c, d));
        }
}

TEST(WellSpaced, Preconditions) {
  auto g = elliptic(1, 2, 3, 1);
  Subgraph with_leaf = planar_cycle(g);
  with_leaf.leaves.push_back(0);
  EXPECT_THROW(well_spaced_check(g, z_axis, 0, with_leaf), PreconditionError);
  EXPECT_THROW(well_spaced_check(g, z_axis, 1, planar_cycle(g)), PreconditionError);  // wrong level
  auto path = edge_spanned(g.base, {g.base.find_edge("c12")});
  EXPECT_THROW(well_spaced_check(g, z_axis, 0, path), PreconditionError);
  auto h = g3();  // R is 4-valent
  EXPECT_THROW(well_spaced_check(h, z_axis, 0, edge_spanned(h.base, {h.base.find_edge("B01")})), PreconditionError);
  auto genus = g;
  genus.base.vertices[0].genus = 1;
  EXPECT_THROW(well_spaced_check(genus, z_axis, 0, planar_cycle(g)), PreconditionError);
  EXPECT_THROW(weak_well_spaced_check(genus, z_axis, 0), PreconditionError);
}

TEST(WeakWellSpaced, SingleTrivalentAttachment) {
  EXPECT_FALSE(weak_well_spaced_check(trivalent_boundary(), z_axis, 0));
  EXPECT_TRUE(weak_well_spaced_check(elliptic(1, 2, 3, 1), z_axis, 0));
  EXPECT_TRUE(weak_well_spaced_check(trivalent_boundary(), z_axis, 5));  // empty level
}

TEST(Obstruct, Verdicts) {
  EXPECT_EQ(obstruct(shared(elliptic(1, 2, 3, 1)), 1).status, ObstructionStatus::not_obstructed);
  EXPECT_EQ(obstruct(shared(elliptic(1, 1, 3, 1)), 1).status, ObstructionStatus::obstructed);
  auto t = obstruct(shared(trivalent_boundary()), 1);
  EXPECT_EQ(t.status, ObstructionStatus::obstructed);
  EXPECT_EQ(t.parameterizations, 1u);
  auto vacuous = obstruct(shared(elliptic(1, 2, 3, 1)), 0);
  EXPECT_EQ(vacuous.status, ObstructionStatus::obstructed);
  EXPECT_EQ(vacuous.parameterizations, 0u);
  EXPECT_TRUE(vacuous.legs.empty());
}

TEST(Obstruct, NoDirectionMeansNotObstructed) {
  auto v = obstruct(shared(triangle()), 1);
  EXPECT_EQ(v.status, ObstructionStatus::not_obstructed);
  EXPECT_TRUE(v.directions.empty());
}

TEST(Obstruct, ExtraDirectionsAndJobs) {
  ObstructOptions opt;
  opt.extra_directions = {zv({0, 0, -3}), zv({1, 0, 0})};
  opt.jobs = 2;
  auto v = obstruct(shared(elliptic(1, 1, 3, 1)), 1, opt);
  EXPECT_EQ(v.status, ObstructionStatus::obstructed);
  EXPECT_EQ(v.directions.size(), 2u);  // -3z collapses onto z
}

TEST(Certificate, ValidatesAndRejectsTampering) {
  auto target = shared(elliptic(1, 1, 3, 1));
  auto cert = first_certificate(obstruct(target, 1));
  ASSERT_TRUE(validate_certificate(cert, target).valid) << validate_certificate(cert, target).reason;

  for (std::size_t i = 0; i < cert.cases.size(); ++i) {
    auto cut = cert;
    cut.cases.erase(cut.cases.begin() + static_cast<long>(i));
    EXPECT_FALSE(validate_certificate(cut, target).valid) << "deleted case " << i;
  }

  bool farkas_seen = false;
  for (std::size_t i = 0; i < cert.cases.size(); ++i) {
    if (cert.cases[i].witness.kind != CaseWitness::Kind::farkas) continue;
    farkas_seen = true;
    auto bent = cert;
    bent.cases[i].witness.multipliers[0].second += Rational(1, 7);
    EXPECT_FALSE(validate_certificate(bent, target).valid) << "perturbed case " << i;
  }
  EXPECT_TRUE(farkas_seen);

  auto moved = cert;
  moved.direction = zv({0, 1, 0});
  EXPECT_FALSE(validate_certificate(moved, target).valid);

  auto other = shared(elliptic(1, 2, 3, 1));
  EXPECT_FALSE(validate_certificate(cert, other).valid);
}

TEST(Certificate, StructuralWitnessMustHold) {
  auto target = shared(trivalent_boundary());
  auto cert = first_certificate(obstruct(target, 1));
  ASSERT_TRUE(validate_certificate(cert, target).valid);
  for (std::size_t i = 0; i < cert.cases.size(); ++i) {
    auto& w = cert.cases[i].witness;
    if (w.kind != CaseWitness::Kind::structural) continue;
    auto bent = cert;
    auto& r = *bent.cases[i].witness.reason;
    if (r.kind == "local-min")
      r.vertex = r.vertex == "W" ? "T0" : "W";
    else
      r.cycle += 1;  // this graph has a single constrained cycle
    EXPECT_FALSE(validate_certificate(bent, target).valid) << r.kind;
  }
}
