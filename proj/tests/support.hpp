#pragma once

// Fixture builders shared by the unit tests and the acceptance runner.

#include "troplift/io.hpp"

#include <memory>
#include <random>

namespace fixtures {

using namespace troplift;

inline QVec pt(std::initializer_list<long> xs) {
  QVec v;
  for (long x : xs) v.push_back(Rational(x));
  return v;
}

inline ZVec zv(std::initializer_list<long> xs) {
  ZVec v;
  for (long x : xs) v.push_back(Integer(x));
  return v;
}

class Builder {
 public:
  explicit Builder(int dim) { g_.dim = dim; }

  Builder& vertex(const std::string& id, QVec pos, int genus = 0) {
    g_.base.vertices.push_back({id, genus});
    g_.positions.push_back(std::move(pos));
    return *this;
  }

  Builder& edge(const std::string& id, const std::string& a, const std::string& b, int mu = 1) {
    g_.base.edges.push_back({id, g_.base.find_vertex(a), g_.base.find_vertex(b), mu, 1});
    return *this;
  }

  Builder& leaf(const std::string& id, const std::string& v, ZVec dir, int mu = 1) {
    g_.base.leaves.push_back({id, g_.base.find_vertex(v), mu});
    g_.leaf_directions.push_back(std::move(dir));
    return *this;
  }

  // Lengths derived from lattice lengths, then everything validated.
  EmbeddedGraph build() {
    for (std::size_t e = 0; e < g_.base.edges.size(); ++e)
      if (g_.base.edges[e].multiplicity > 0) g_.base.edges[e].length = g_.lattice_length(e) / g_.base.edges[e].multiplicity;
    g_.base.validate();
    g_.validate();
    if (!check_balanced(g_).balanced) throw MalformedInput("fixture is not balanced");
    return g_;
  }

 private:
  EmbeddedGraph g_;
};

// A planar cycle in z = 0 with three paths b, c and d-then-a leading to the
// points where the curve leaves the plane.
inline EmbeddedGraph elliptic(long a, long b, long c, long d) {
  Builder g(3);
  g.vertex("v1", pt({2, 3, 0})).vertex("v2", pt({4, 5, 0})).vertex("v3", pt({4, 6, 0}))
      .vertex("v4", pt({3, 7, 0})).vertex("v5", pt({2, 7, 0})).vertex("v6", pt({0, 5, 0}))
      .vertex("v7", pt({0, 3, 0})).vertex("p", pt({2, 2, 0})).vertex("u", pt({-d, 5, 0}))
      .vertex("A", pt({-d, 5 + a, 0})).vertex("B", pt({2, 7 + b, 0})).vertex("C", pt({3, 7 + c, 0}));
  g.edge("c12", "v1", "v2").edge("c23", "v2", "v3").edge("c34", "v3", "v4").edge("c45", "v4", "v5")
      .edge("c56", "v5", "v6").edge("c67", "v6", "v7").edge("c71", "v7", "v1");
  g.edge("e", "v1", "p").edge("d", "v6", "u").edge("a", "u", "A").edge("b", "v5", "B").edge("c", "v4", "C");
  g.leaf("p1", "p", zv({-1, -1, 0})).leaf("p2", "p", zv({1, 0, 0}));
  g.leaf("l2", "v2", zv({1, 0, 0})).leaf("l3", "v3", zv({1, 0, 0})).leaf("l7", "v7", zv({-1, -1, 0}));
  g.leaf("lu", "u", zv({-1, -1, 0}));
  for (const char* end : {"A", "B", "C"}) {
    g.leaf(std::string(end) + "+", end, zv({0, 1, 1}));
    g.leaf(std::string(end) + "-", end, zv({0, 0, -1}));
  }
  return g.build();
}

// Genus three: a 4-valent vertex R carrying three triangles on edges b, c, d.
inline EmbeddedGraph g3() {
  Builder g(3);
  g.vertex("P", pt({0, 0, 0})).vertex("Q1", pt({-2, 1, 0})).vertex("Q2", pt({1, -1, 0})).vertex("R", pt({1, 0, 0}));
  g.vertex("B0", pt({2, 2, 0})).vertex("B1", pt({3, 3, 0})).vertex("B2", pt({2, 3, 0}));
  g.vertex("C0", pt({2, -1, 0})).vertex("C1", pt({3, -1, 0})).vertex("C2", pt({2, -2, 0}));
  g.vertex("D0", pt({0, -1, 0})).vertex("D1", pt({-1, -1, 0})).vertex("D2", pt({0, -2, 0}));
  g.vertex("B1x", pt({19, 11, 0})).vertex("B2x", pt({-6, 11, 0}));
  g.vertex("C1x", pt({19, 7, 0})).vertex("C2x", pt({-6, -18, 0}));
  g.vertex("D1x", pt({-17, 7, 0})).vertex("D2x", pt({8, -18, 0}));
  g.edge("q1", "P", "Q1").edge("q2", "P", "Q2").edge("a", "P", "R");
  g.edge("b", "R", "B0").edge("c", "R", "C0").edge("d", "R", "D0");
  for (const char* t : {"B", "C", "D"}) {
    std::string s(t);
    g.edge(s + "01", s + "0", s + "1").edge(s + "02", s + "0", s + "2").edge(s + "12", s + "1", s + "2");
    g.edge(s + "1t", s + "1", s + "1x").edge(s + "2t", s + "2", s + "2x");
  }
  auto ends = [&](const std::string& v, ZVec dir) {
    ZVec up = dir;
    up.push_back(1);
    g.leaf(v + "+", v, up).leaf(v + "-", v, zv({0, 0, -1}));
  };
  ends("Q1", zv({-2, 1}));
  ends("Q2", zv({1, -1}));
  ends("B1x", zv({2, 1}));
  ends("B2x", zv({-1, 1}));
  ends("C1x", zv({2, 1}));
  ends("C2x", zv({-1, -2}));
  ends("D1x", zv({-2, 1}));
  ends("D2x", zv({1, -2}));
  return g.build();
}

// A planar triangle attached to the rest of the curve through one trivalent vertex.
inline EmbeddedGraph trivalent_boundary() {
  Builder g(3);
  g.vertex("T0", pt({0, 0, 0})).vertex("T1", pt({1, 0, 0})).vertex("T2", pt({0, 1, 0})).vertex("W", pt({-1, -1, 0}));
  g.edge("t01", "T0", "T1").edge("t02", "T0", "T2").edge("t12", "T1", "T2").edge("e", "T0", "W");
  g.leaf("l1", "T1", zv({2, -1, 0})).leaf("l2", "T2", zv({-1, 2, 0}));
  g.leaf("W+", "W", zv({-1, -1, 1})).leaf("W-", "W", zv({0, 0, -1}));
  return g.build();
}

inline EmbeddedGraph triangle() {
  Builder g(2);
  g.vertex("x", pt({0, 0})).vertex("y", pt({1, 0})).vertex("z", pt({0, 1}));
  g.edge("xy", "x", "y").edge("xz", "x", "z").edge("yz", "y", "z");
  g.leaf("lx", "x", zv({-1, -1})).leaf("ly", "y", zv({2, -1})).leaf("lz", "z", zv({-1, 2}));
  return g.build();
}

inline EmbeddedGraph segment() {
  Builder g(2);
  g.vertex("s", pt({0, 0})).vertex("t", pt({2, 0}));
  g.edge("st", "s", "t");
  g.leaf("s1", "s", zv({-1, 1})).leaf("s2", "s", zv({0, -1}));
  g.leaf("t1", "t", zv({1, 1})).leaf("t2", "t", zv({0, -1}));
  return g.build();
}

inline std::shared_ptr<const EmbeddedGraph> shared(EmbeddedGraph g) {
  return std::make_shared<const EmbeddedGraph>(std::move(g));
}

inline ParamChoice identity_choice(const EmbeddedGraph& g) {
  ParamChoice c;
  for (const auto& e : g.base.edges) c.edge_parts.push_back({e.multiplicity});
  for (const auto& l : g.base.leaves) c.leaf_parts.push_back({l.multiplicity});
  c.genus_marks.assign(g.base.vertices.size(), 0);
  return c;
}

inline bool min_achieved_twice(long a, long b, long c, long d) {
  long xs[3] = {a + d, b, c};
  long m = std::min({xs[0], xs[1], xs[2]});
  return std::count(xs, xs + 3, m) >= 2;
}

// Connected random graph with lengths in {1,2,3}, possibly with loops and
// parallel edges, and a few leaves.
inline AbstractGraph random_graph(std::mt19937& rng, int n, int extra_edges, int leaves) {
  AbstractGraph g;
  std::uniform_int_distribution<int> len(1, 3);
  for (int v = 0; v < n; ++v) g.vertices.push_back({"v" + std::to_string(v), static_cast<int>(rng() % 2)});
  for (int v = 1; v < n; ++v) {
    std::size_t u = rng() % v;
    g.edges.push_back({"e" + std::to_string(g.edges.size()), u, static_cast<std::size_t>(v), 1, len(rng)});
  }
  for (int k = 0; k < extra_edges; ++k) {
    std::size_t a = rng() % n, b = rng() % n;
    g.edges.push_back({"e" + std::to_string(g.edges.size()), a, b, 1, len(rng)});
  }
  for (int k = 0; k < leaves; ++k)
    g.leaves.push_back({"l" + std::to_string(k), static_cast<std::size_t>(rng() % n), 1});
  return g;
}

// Values are multiples of 6, so every slope over a length in {1,2,3} is integral.
inline PLFunction random_function(std::mt19937& rng, const AbstractGraph& g) {
  std::uniform_int_distribution<int> val(-5, 5), slope(-4, 4);
  PLFunction f;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) f.values.push_back(Rational(6 * val(rng)));
  for (std::size_t l = 0; l < g.leaves.size(); ++l) f.leaf_slopes.push_back(slope(rng));
  return f;
}

inline PLFunction add(const PLFunction& a, const PLFunction& b, long scale = 1) {
  PLFunction f = a;
  for (std::size_t v = 0; v < f.values.size(); ++v) f.values[v] += scale * b.values[v];
  for (std::size_t l = 0; l < f.leaf_slopes.size(); ++l) f.leaf_slopes[l] += scale * b.leaf_slopes[l];
  return f;
}

struct AmpleInstance {
  AbstractGraph g;
  PLFunction f;
  Subgraph gamma;
  Subgraph gamma_prime;
};

// A random tree or cycle gamma on at most 8 vertices, every vertex carrying at
// most three special points, inside the level set gamma_prime = everything.
inline AmpleInstance random_ample_instance(std::mt19937& rng, bool cycle) {
  AmpleInstance in;
  AbstractGraph& g = in.g;
  int n = cycle ? 2 + static_cast<int>(rng() % 7) : 1 + static_cast<int>(rng() % 8);
  std::vector<int> deg(n, 0);
  for (int v = 0; v < n; ++v) g.vertices.push_back({"g" + std::to_string(v), 0});
  auto link = [&](std::size_t a, std::size_t b) {
    g.edges.push_back({"c" + std::to_string(g.edges.size()), a, b, 1, 1});
    ++deg[a];
    ++deg[b];
  };
  if (cycle) {
    for (int v = 0; v < n; ++v) link(v, (v + 1) % n);
  } else {
    for (int v = 1; v < n; ++v) {
      std::vector<std::size_t> open;
      for (int u = 0; u < v; ++u)
        if (deg[u] < 3) open.push_back(u);
      link(open[rng() % open.size()], v);
    }
  }
  // Exits lean negative so both verdicts show up in reasonable numbers.
  std::uniform_int_distribution<int> low(0, 1), slope(-2, 1);
  for (int v = 0; v < n; ++v) in.f.values.push_back(Rational(low(rng)));
  in.gamma = whole(g);
  in.gamma.leaves.clear();
  for (int v = 0; v < n; ++v) {
    int room = 3 - deg[v];
    int extra = room == 0 ? 0 : 1 + static_cast<int>(rng() % room);
    for (int k = 0; k < extra; ++k) {
      if (rng() % 2) {
        g.leaves.push_back({"l" + std::to_string(g.leaves.size()), static_cast<std::size_t>(v), 1});
        in.f.leaf_slopes.push_back(slope(rng));
      } else {
        std::size_t w = g.vertices.size();
        g.vertices.push_back({"o" + std::to_string(w), 0});
        g.edges.push_back({"x" + std::to_string(g.edges.size()), static_cast<std::size_t>(v), w, 1, 1});
        in.f.values.push_back(in.f.values[v] + slope(rng));
      }
    }
  }
  in.gamma_prime = whole(g);
  return in;
}

}  // namespace fixtures
