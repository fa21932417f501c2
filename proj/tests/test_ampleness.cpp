#include "support.hpp"

#include <gtest/gtest.h>

using namespace troplift;
using namespace fixtures;

namespace {

// Cycle g0..g{n-1} at level 0 with one outgoing edge per vertex; `slopes` are
// the slopes of f leaving the cycle along those edges.
AmpleInstance decorated_cycle(std::vector<int> slopes) {
  AmpleInstance in;
  std::size_t n = slopes.size();
  for (std::size_t v = 0; v < n; ++v) {
    in.g.vertices.push_back({"g" + std::to_string(v), 0});
    in.f.values.push_back(0);
  }
  for (std::size_t v = 0; v < n; ++v) in.g.edges.push_back({"c" + std::to_string(v), v, (v + 1) % n, 1, 1});
  in.gamma = whole(in.g);
  for (std::size_t v = 0; v < n; ++v) {
    in.g.vertices.push_back({"o" + std::to_string(v), 0});
    in.g.edges.push_back({"x" + std::to_string(v), v, n + v, 1, 1});
    in.f.values.push_back(slopes[v]);
  }
  in.gamma_prime = whole(in.g);
  return in;
}

}  // namespace

TEST(BoundaryDivisor, CollectsNegativeSlopesAtMinimum) {
  auto in = decorated_cycle({-1, 2, -3});
  auto d = boundary_divisor(in.g, in.f, in.gamma, in.gamma_prime);
  EXPECT_EQ(d.min_level, 0);
  EXPECT_EQ(d.degree(), 4);
  EXPECT_EQ(d.degree_at(0), 1);
  EXPECT_EQ(d.degree_at(1), 0);
  // Raise g2: it leaves the minimum and its entry disappears.
  in.f.values[2] = 1;
  in.f.values[5] = -2;
  EXPECT_EQ(boundary_divisor(in.g, in.f, in.gamma, in.gamma_prime).degree(), 1);
}

TEST(BoundaryDivisor, InteriorPrecondition) {
  auto in = decorated_cycle({-1, -1, -1});
  Subgraph small = in.gamma;
  small.vertices.pop_back();  // g2 gone, but edges still point at it
  EXPECT_THROW(boundary_divisor(in.g, in.f, in.gamma, small), PreconditionError);
  Subgraph with_leaf = in.gamma;
  in.g.leaves.push_back({"l", 0, 1});
  in.f.leaf_slopes.push_back(0);
  with_leaf.leaves.push_back(0);
  EXPECT_THROW(boundary_divisor(in.g, in.f, with_leaf, whole(in.g)), PreconditionError);
}

TEST(Ampleness, CycleDegreeBound) {
  auto one = decorated_cycle({-1, 0, 0});
  auto v = ample_cycle(one.g, one.f, one.gamma, one.gamma_prime);
  EXPECT_EQ(v.status, AmpleStatus::not_ample);
  EXPECT_NE(v.detail.find("< 2"), std::string::npos);
  EXPECT_EQ(ample_general(one.g, one.f, one.gamma, one.gamma_prime).status, AmpleStatus::not_ample);

  auto two = decorated_cycle({-1, -1, 1});
  EXPECT_EQ(ample_cycle(two.g, two.f, two.gamma, two.gamma_prime).status, AmpleStatus::not_ample);  // g2 uncovered
  two.f.values[2] = 1;
  EXPECT_EQ(ample_cycle(two.g, two.f, two.gamma, two.gamma_prime).status, AmpleStatus::ample);
  EXPECT_EQ(ample_general(two.g, two.f, two.gamma, two.gamma_prime).status, AmpleStatus::ample);
  auto disp = ample(two.g, two.f, two.gamma, two.gamma_prime);
  EXPECT_EQ(disp.method, AmpleMethod::cycle);
}

TEST(Ampleness, DoubleEntryOnOneVertex) {
  // All of the degree sits at one vertex: still two zeros' worth on the cycle.
  auto in = decorated_cycle({-2, 0, 0});
  in.f.values[1] = in.f.values[2] = 1;
  EXPECT_EQ(ample_cycle(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::ample);
  EXPECT_EQ(ample_general(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::ample);
}

TEST(Ampleness, TreeNeedsEveryMinimumCovered) {
  AmpleInstance in;
  in.g.vertices = {{"a", 0}, {"b", 0}};
  in.g.edges = {{"ab", 0, 1, 1, 1}};
  in.g.leaves = {{"la", 0, 1}, {"lb", 1, 1}};
  in.f.values = {0, 0};
  in.f.leaf_slopes = {-1, 0};
  in.gamma = {{0, 1}, {0}, {}};
  in.gamma_prime = whole(in.g);
  auto v = ample_tree(in.g, in.f, in.gamma, in.gamma_prime);
  EXPECT_EQ(v.status, AmpleStatus::not_ample);
  EXPECT_NE(v.detail.find("'b'"), std::string::npos);
  EXPECT_EQ(ample_general(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::not_ample);
  in.f.leaf_slopes[1] = -1;
  EXPECT_EQ(ample_tree(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::ample);
  EXPECT_EQ(ample(in.g, in.f, in.gamma, in.gamma_prime).method, AmpleMethod::tree);
  in.f.values[1] = 1;  // b off the minimum needs nothing
  in.f.leaf_slopes[1] = 0;
  EXPECT_EQ(ample_tree(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::ample);
}

TEST(Ampleness, DispatchErrors) {
  auto in = decorated_cycle({-1, -1, -1});
  EXPECT_THROW(ample_tree(in.g, in.f, in.gamma, in.gamma_prime), DispatchError);
  Subgraph path{{0, 1}, {0}, {}};
  EXPECT_THROW(ample_cycle(in.g, in.f, path, in.gamma_prime), DispatchError);
  EXPECT_THROW(ample_necessary(in.g, in.f, path, in.gamma_prime), DispatchError);
  in.g.vertices[0].genus = 1;
  EXPECT_EQ(ample(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::indeterminate);
}

TEST(Ampleness, ThetaGraphUsesGeneralDecider) {
  AmpleInstance in;
  in.g.vertices = {{"a", 0}, {"b", 0}, {"m", 0}, {"out", 0}};
  in.g.edges = {{"x", 0, 1, 1, 1}, {"y", 0, 2, 1, 1}, {"z", 2, 1, 1, 1}, {"w", 0, 1, 1, 1}, {"t", 2, 3, 1, 1}};
  in.f.values = {0, 0, 0, -1};
  in.gamma = {{0, 1, 2}, {0, 1, 2, 3}, {}};
  in.gamma_prime = whole(in.g);
  auto v = ample(in.g, in.f, in.gamma, in.gamma_prime);
  EXPECT_EQ(v.method, AmpleMethod::general);
  EXPECT_EQ(v.status, AmpleStatus::not_ample);  // degree 1 on a 2-connected graph
  EXPECT_EQ(ample_necessary(in.g, in.f, in.gamma, in.gamma_prime).status, AmpleStatus::not_ample);
}

TEST(Ampleness, RandomAgreement) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    for (bool cycle : {false, true}) {
      auto in = random_ample_instance(rng, cycle);
      auto special = cycle ? ample_cycle(in.g, in.f, in.gamma, in.gamma_prime)
                           : ample_tree(in.g, in.f, in.gamma, in.gamma_prime);
      auto general = ample_general(in.g, in.f, in.gamma, in.gamma_prime);
      EXPECT_EQ(special.status, general.status) << "trial " << trial << (cycle ? " cycle" : " tree");
    }
  }
}
