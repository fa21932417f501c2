#pragma once

// Genus-marked weighted graphs, their embeddings in Q^n, and the metric and
// topological utilities the rest of the library is built on.

#include "troplift/rational.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace troplift {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct Vertex {
  std::string id;
  int genus = 0;
};

// A bounded edge. Multiplicity 0 marks an edge contracted by a parameterization;
// such edges still carry a length.
struct Edge {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
  int multiplicity = 1;
  Rational length = 1;

  bool is_loop() const { return tail == head; }
  std::size_t other(std::size_t v) const { return v == tail ? head : tail; }
};

struct Leaf {
  std::string id;
  std::size_t vertex = 0;
  int multiplicity = 1;
};

// One end of a bounded edge or a leaf, seen from the vertex it is attached to.
struct HalfEdge {
  enum class Kind { edge, leaf } kind;
  std::size_t index;
  int end;  // 0 = tail side, 1 = head side; always 0 for leaves

  bool is_leaf() const { return kind == Kind::leaf; }
  friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
};

struct AbstractGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Leaf> leaves;

  std::size_t vertex_count() const { return vertices.size(); }

  std::size_t find_vertex(std::string_view id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].id == id) return i;
    return npos;
  }
  std::size_t find_edge(std::string_view id) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i].id == id) return i;
    return npos;
  }
  std::size_t find_leaf(std::string_view id) const {
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (leaves[i].id == id) return i;
    return npos;
  }

  // Edge ends and leaves at v, in canonical order (edges by index, then leaves).
  std::vector<HalfEdge> star(std::size_t v) const {
    std::vector<HalfEdge> out;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].tail == v) out.push_back({HalfEdge::Kind::edge, e, 0});
      if (edges[e].head == v) out.push_back({HalfEdge::Kind::edge, e, 1});
    }
    for (std::size_t l = 0; l < leaves.size(); ++l)
      if (leaves[l].vertex == v) out.push_back({HalfEdge::Kind::leaf, l, 0});
    return out;
  }

  // Incidence degree: loops count twice, leaves count once.
  int degree(std::size_t v) const { return static_cast<int>(star(v).size()); }

  std::size_t vertex_of(const HalfEdge& h) const {
    if (h.is_leaf()) return leaves[h.index].vertex;
    return h.end == 0 ? edges[h.index].tail : edges[h.index].head;
  }

  std::string label(const HalfEdge& h) const {
    if (h.is_leaf()) return leaves[h.index].id;
    return edges[h.index].id + "@" + vertices[vertex_of(h)].id;
  }

  // Checks id uniqueness, endpoint validity and the semistability condition
  // (a vertex meeting only contracted edges has degree >= 2).
  void validate() const {
    std::set<std::string> seen;
    auto fresh = [&](const std::string& id, const char* what) {
      if (id.empty()) throw MalformedInput(std::string("empty ") + what + " id");
      if (!seen.insert(id).second) throw MalformedInput("duplicate id '" + id + "'");
    };
    for (const auto& v : vertices) {
      fresh(v.id, "vertex");
      if (v.genus < 0) throw MalformedInput("negative genus at vertex '" + v.id + "'");
    }
    for (const auto& e : edges) {
      fresh(e.id, "edge");
      if (e.tail >= vertices.size() || e.head >= vertices.size())
        throw MalformedInput("edge '" + e.id + "' references a missing vertex");
      if (e.multiplicity < 0) throw MalformedInput("negative multiplicity on edge '" + e.id + "'");
      if (e.length <= 0) throw MalformedInput("non-positive length on edge '" + e.id + "'");
    }
    for (const auto& l : leaves) {
      fresh(l.id, "leaf");
      if (l.vertex >= vertices.size())
        throw MalformedInput("leaf '" + l.id + "' references a missing vertex");
      if (l.multiplicity < 0) throw MalformedInput("negative multiplicity on leaf '" + l.id + "'");
    }
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      auto s = star(v);
      if (s.empty()) continue;
      bool all_contracted = std::all_of(s.begin(), s.end(), [&](const HalfEdge& h) {
        return !h.is_leaf() && edges[h.index].multiplicity == 0;
      });
      if (all_contracted && s.size() < 2)
        throw MalformedInput("vertex '" + vertices[v].id +
                             "' meets only contracted edges and has degree < 2");
    }
  }
};

// A balanced weighted integral graph: an abstract graph with vertex positions in
// Q^n and primitive leaf directions.
struct EmbeddedGraph {
  int dim = 0;
  AbstractGraph base;
  std::vector<QVec> positions;
  std::vector<ZVec> leaf_directions;

  QVec displacement(std::size_t e) const {
    const auto& ed = base.edges[e];
    return positions[ed.head] - positions[ed.tail];
  }

  // Lattice length of the image of e (0 for contracted edges).
  Rational lattice_length(std::size_t e) const {
    QVec d = displacement(e);
    if (is_zero(d)) return 0;
    return lattice_decompose(d).first;
  }

  // Primitive direction of a half-edge pointing away from its vertex; zero for
  // contracted edges.
  ZVec direction_away(const HalfEdge& h) const {
    if (h.is_leaf()) return leaf_directions[h.index];
    QVec d = displacement(h.index);
    if (is_zero(d)) return ZVec(dim, 0);
    ZVec dir = lattice_decompose(d).second;
    return h.end == 0 ? dir : negated(dir);
  }

  // Structural invariants apart from balancing.
  void validate() const {
    base.validate();
    if (dim <= 0) throw MalformedInput("ambient dimension must be positive");
    if (positions.size() != base.vertices.size())
      throw MalformedInput("position count does not match vertex count");
    if (leaf_directions.size() != base.leaves.size())
      throw MalformedInput("leaf direction count does not match leaf count");
    for (std::size_t v = 0; v < positions.size(); ++v)
      if (static_cast<int>(positions[v].size()) != dim)
        throw MalformedInput("vertex '" + base.vertices[v].id + "' has wrong position dimension");
    for (std::size_t l = 0; l < leaf_directions.size(); ++l) {
      if (static_cast<int>(leaf_directions[l].size()) != dim)
        throw MalformedInput("leaf '" + base.leaves[l].id + "' has wrong direction dimension");
      if (!is_primitive(leaf_directions[l]))
        throw MalformedInput("leaf '" + base.leaves[l].id + "' direction " +
                             to_string(leaf_directions[l]) + " is not primitive");
    }
    for (std::size_t e = 0; e < base.edges.size(); ++e) {
      const auto& ed = base.edges[e];
      QVec d = displacement(e);
      if (ed.multiplicity == 0) {
        if (!is_zero(d))
          throw MalformedInput("contracted edge '" + ed.id + "' has distinct endpoint positions");
        continue;
      }
      if (is_zero(d)) throw MalformedInput("edge '" + ed.id + "' has coinciding endpoints");
      Rational lat = lattice_decompose(d).first;
      if (lat != ed.length * ed.multiplicity)
        throw MalformedInput("edge '" + ed.id + "' lattice length " + to_string(lat) +
                             " != multiplicity * length");
    }
  }
};

struct BalanceReport {
  bool balanced = true;
  std::vector<ZVec> residuals;                // per vertex
  std::vector<std::size_t> unbalanced;        // vertices with nonzero residual
};

inline BalanceReport check_balanced(const EmbeddedGraph& g) {
  for (std::size_t l = 0; l < g.leaf_directions.size(); ++l)
    if (!is_primitive(g.leaf_directions[l]))
      throw MalformedInput("leaf '" + g.base.leaves[l].id + "' direction is not primitive");
  BalanceReport rep;
  rep.residuals.assign(g.base.vertices.size(), ZVec(g.dim, 0));
  for (std::size_t v = 0; v < g.base.vertices.size(); ++v) {
    for (const auto& h : g.base.star(v)) {
      int mu = h.is_leaf() ? g.base.leaves[h.index].multiplicity
                           : g.base.edges[h.index].multiplicity;
      ZVec w = g.direction_away(h);
      for (int i = 0; i < g.dim; ++i) rep.residuals[v][i] += w[i] * mu;
    }
    if (!is_zero(rep.residuals[v])) {
      rep.balanced = false;
      rep.unbalanced.push_back(v);
    }
  }
  return rep;
}

// A subgraph of some host graph, as sorted index sets. Leaves are included
// whole; truncated pieces are materialized as vertices of a refined host.
struct Subgraph {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> edges;
  std::vector<std::size_t> leaves;

  bool has_vertex(std::size_t v) const { return std::binary_search(vertices.begin(), vertices.end(), v); }
  bool has_edge(std::size_t e) const { return std::binary_search(edges.begin(), edges.end(), e); }
  bool has_leaf(std::size_t l) const { return std::binary_search(leaves.begin(), leaves.end(), l); }
  bool has(const HalfEdge& h) const { return h.is_leaf() ? has_leaf(h.index) : has_edge(h.index); }
  bool empty() const { return vertices.empty(); }

  void normalize() {
    for (auto* v : {&vertices, &edges, &leaves}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
  }
  friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

inline Subgraph whole(const AbstractGraph& g) {
  Subgraph s;
  s.vertices.resize(g.vertices.size());
  std::iota(s.vertices.begin(), s.vertices.end(), 0);
  s.edges.resize(g.edges.size());
  std::iota(s.edges.begin(), s.edges.end(), 0);
  s.leaves.resize(g.leaves.size());
  std::iota(s.leaves.begin(), s.leaves.end(), 0);
  return s;
}

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

inline std::size_t component_count(const AbstractGraph& g, const Subgraph& s) {
  std::map<std::size_t, std::size_t> local;
  for (auto v : s.vertices) local.emplace(v, local.size());
  DisjointSets ds(local.size());
  std::size_t comps = local.size();
  for (auto e : s.edges)
    if (ds.unite(local.at(g.edges[e].tail), local.at(g.edges[e].head))) --comps;
  return comps;
}

}  // namespace detail

// h^1 = |E| - |V| + #components, leaves ignored.
inline int first_betti(const AbstractGraph& g, const Subgraph& s) {
  return static_cast<int>(s.edges.size()) - static_cast<int>(s.vertices.size()) +
         static_cast<int>(detail::component_count(g, s));
}

inline int first_betti(const AbstractGraph& g) { return first_betti(g, whole(g)); }

inline int total_genus(const AbstractGraph& g) {
  int sum = first_betti(g);
  for (const auto& v : g.vertices) sum += v.genus;
  return sum;
}

// Connected components of s, each as its own Subgraph (leaves follow their vertex).
inline std::vector<Subgraph> components(const AbstractGraph& g, const Subgraph& s) {
  std::map<std::size_t, std::size_t> local;
  for (auto v : s.vertices) local.emplace(v, local.size());
  detail::DisjointSets ds(local.size());
  for (auto e : s.edges) ds.unite(local.at(g.edges[e].tail), local.at(g.edges[e].head));
  std::map<std::size_t, Subgraph> by_root;
  for (auto v : s.vertices) by_root[ds.find(local.at(v))].vertices.push_back(v);
  for (auto e : s.edges) by_root[ds.find(local.at(g.edges[e].tail))].edges.push_back(e);
  for (auto l : s.leaves) by_root[ds.find(local.at(g.leaves[l].vertex))].leaves.push_back(l);
  std::vector<Subgraph> out;
  for (auto& [root, sub] : by_root) {
    sub.normalize();
    out.push_back(std::move(sub));
  }
  std::sort(out.begin(), out.end(),
            [](const Subgraph& a, const Subgraph& b) { return a.vertices.front() < b.vertices.front(); });
  return out;
}

// Vertices of s meeting an edge or leaf of g that is not in s.
inline std::vector<std::size_t> boundary(const AbstractGraph& g, const Subgraph& s) {
  std::vector<std::size_t> out;
  for (auto v : s.vertices) {
    auto st = g.star(v);
    if (std::any_of(st.begin(), st.end(), [&](const HalfEdge& h) { return !s.has(h); }))
      out.push_back(v);
  }
  return out;
}

// Replaces every bounded edge by l segments of the original length; new vertices
// have genus 0 and inherit the edge multiplicity.
inline AbstractGraph subdivide(const AbstractGraph& g, int l) {
  if (l < 1) throw PreconditionError("subdivision factor must be >= 1");
  if (l == 1) return g;
  AbstractGraph out;
  out.vertices = g.vertices;
  out.leaves = g.leaves;
  for (const auto& e : g.edges) {
    std::size_t prev = e.tail;
    for (int k = 1; k <= l; ++k) {
      std::size_t next = e.head;
      if (k < l) {
        next = out.vertices.size();
        out.vertices.push_back({e.id + "#" + std::to_string(k), 0});
      }
      out.edges.push_back({e.id + "#" + std::to_string(k), prev, next, e.multiplicity, e.length});
      prev = next;
    }
  }
  return out;
}

// Positions are scaled by l; leaf directions are unchanged.
inline EmbeddedGraph subdivide(const EmbeddedGraph& g, int l) {
  if (l < 1) throw PreconditionError("subdivision factor must be >= 1");
  if (l == 1) return g;
  EmbeddedGraph out;
  out.dim = g.dim;
  out.base = subdivide(g.base, l);
  out.leaf_directions = g.leaf_directions;
  for (const auto& p : g.positions) out.positions.push_back(scaled(p, l));
  for (const auto& e : g.base.edges) {
    QVec start = scaled(g.positions[e.tail], l);
    QVec d = g.positions[e.head] - g.positions[e.tail];
    for (int k = 1; k < l; ++k) out.positions.push_back(start + scaled(d, k));
  }
  return out;
}

// Result of cutting a graph at a level hyperplane: a refined host (crossing
// points inserted as genus-0 2-valent vertices) and the preimage inside it.
struct LevelSet {
  EmbeddedGraph host;
  Subgraph preimage;
};

inline Rational level_of(const EmbeddedGraph& g, const ZVec& m, std::size_t v) {
  return dot(m, g.positions[v]);
}

inline LevelSet level_preimage(const EmbeddedGraph& g, const ZVec& m, const Rational& c) {
  if (is_zero(m)) throw PreconditionError("level direction must be nonzero");
  LevelSet out;
  EmbeddedGraph& h = out.host;
  h.dim = g.dim;
  h.base.vertices = g.base.vertices;
  h.positions = g.positions;
  for (std::size_t e = 0; e < g.base.edges.size(); ++e) {
    const Edge& ed = g.base.edges[e];
    Rational a = level_of(g, m, ed.tail);
    Rational b = level_of(g, m, ed.head);
    bool crosses = a != b && ((a < c && c < b) || (b < c && c < a));
    if (!crosses) {
      h.base.edges.push_back(ed);
      continue;
    }
    Rational tau = (c - a) / (b - a);
    std::size_t mid = h.base.vertices.size();
    h.base.vertices.push_back({ed.id + "^cut", 0});
    h.positions.push_back(g.positions[ed.tail] + scaled(g.displacement(e), tau));
    h.base.edges.push_back({ed.id + "^a", ed.tail, mid, ed.multiplicity, ed.length * tau});
    h.base.edges.push_back({ed.id + "^b", mid, ed.head, ed.multiplicity, ed.length * (1 - tau)});
  }
  for (std::size_t l = 0; l < g.base.leaves.size(); ++l) {
    const Leaf& lf = g.base.leaves[l];
    const ZVec& dir = g.leaf_directions[l];
    Rational a = level_of(g, m, lf.vertex);
    Rational slope = dot(m, dir);
    if (slope == 0 || (c - a) / slope <= 0) {
      h.base.leaves.push_back(lf);
      h.leaf_directions.push_back(dir);
      continue;
    }
    Rational tau = (c - a) / slope;  // lattice length to the crossing point
    std::size_t mid = h.base.vertices.size();
    h.base.vertices.push_back({lf.id + "^cut", 0});
    h.positions.push_back(g.positions[lf.vertex] + scaled(to_qvec(dir), tau));
    Rational len = lf.multiplicity > 0 ? tau / lf.multiplicity : tau;
    h.base.edges.push_back({lf.id + "^a", lf.vertex, mid, lf.multiplicity, len});
    h.base.leaves.push_back({lf.id + "^b", mid, lf.multiplicity});
    h.leaf_directions.push_back(dir);
  }
  Subgraph& s = out.preimage;
  for (std::size_t v = 0; v < h.base.vertices.size(); ++v)
    if (level_of(h, m, v) == c) s.vertices.push_back(v);
  for (std::size_t e = 0; e < h.base.edges.size(); ++e) {
    const Edge& ed = h.base.edges[e];
    if (level_of(h, m, ed.tail) == c && level_of(h, m, ed.head) == c) s.edges.push_back(e);
  }
  for (std::size_t l = 0; l < h.base.leaves.size(); ++l)
    if (level_of(h, m, h.base.leaves[l].vertex) == c && dot(m, h.leaf_directions[l]) == 0)
      s.leaves.push_back(l);
  s.normalize();
  return out;
}

// Shortest path length (stored edge lengths) from x to the nearest vertex of
// target, optionally travelling only inside `within`. nullopt means infinity.
inline std::optional<Rational> metric_distance(const AbstractGraph& g, std::size_t x,
                                               const Subgraph& target,
                                               const Subgraph* within = nullptr) {
  std::size_t n = g.vertices.size();
  std::vector<std::optional<Rational>> dist(n);
  std::vector<bool> done(n, false);
  dist[x] = Rational(0);
  for (;;) {
    std::size_t best = npos;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && dist[v] && (best == npos || *dist[v] < *dist[best])) best = v;
    if (best == npos) return std::nullopt;
    if (target.has_vertex(best)) return dist[best];
    done[best] = true;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const Edge& ed = g.edges[e];
      if (within && !within->has_edge(e)) continue;
      if (ed.tail != best && ed.head != best) continue;
      std::size_t w = ed.other(best);
      Rational cand = *dist[best] + ed.length;
      if (!dist[w] || cand < *dist[w]) dist[w] = cand;
    }
  }
}

// All-vertex shortest distances from a set of sources (multi-source Dijkstra).
inline std::vector<std::optional<Rational>> distances_from(const AbstractGraph& g,
                                                           const std::vector<std::size_t>& sources,
                                                           const std::function<bool(std::size_t)>& edge_ok) {
  std::size_t n = g.vertices.size();
  std::vector<std::optional<Rational>> dist(n);
  std::vector<bool> done(n, false);
  for (auto s : sources) dist[s] = Rational(0);
  for (;;) {
    std::size_t best = npos;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && dist[v] && (best == npos || *dist[v] < *dist[best])) best = v;
    if (best == npos) break;
    done[best] = true;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const Edge& ed = g.edges[e];
      if (!edge_ok(e) || (ed.tail != best && ed.head != best)) continue;
      std::size_t w = ed.other(best);
      Rational cand = *dist[best] + ed.length;
      if (!dist[w] || cand < *dist[w]) dist[w] = cand;
    }
  }
  return dist;
}

struct StructureReport {
  bool two_vertex_connected = false;
  bool complement_is_forest = false;
  bool is_cycle = false;
  bool has_one_valent_vertex = false;
};

namespace detail {

inline bool connected_without(const AbstractGraph& g, const Subgraph& s, std::size_t removed) {
  Subgraph t;
  for (auto v : s.vertices)
    if (v != removed) t.vertices.push_back(v);
  for (auto e : s.edges)
    if (g.edges[e].tail != removed && g.edges[e].head != removed) t.edges.push_back(e);
  return t.vertices.empty() || component_count(g, t) == 1;
}

inline int degree_within(const AbstractGraph& g, const Subgraph& s, std::size_t v) {
  int d = 0;
  for (auto e : s.edges) {
    if (g.edges[e].tail == v) ++d;
    if (g.edges[e].head == v) ++d;
  }
  return d;
}

}  // namespace detail

// Standard predicates on the bounded part of gamma. "Two-vertex connected"
// means: connected, at least two vertices, no loops, contains a cycle and no
// cut vertex.
inline StructureReport structure_checks(const AbstractGraph& g, const Subgraph& gamma) {
  StructureReport r;
  bool connected = !gamma.vertices.empty() && detail::component_count(g, gamma) == 1;
  bool loops = std::any_of(gamma.edges.begin(), gamma.edges.end(),
                           [&](std::size_t e) { return g.edges[e].is_loop(); });
  for (auto v : gamma.vertices)
    if (detail::degree_within(g, gamma, v) == 1) r.has_one_valent_vertex = true;
  r.is_cycle = connected && gamma.edges.size() == gamma.vertices.size() &&
               std::all_of(gamma.vertices.begin(), gamma.vertices.end(),
                           [&](std::size_t v) { return detail::degree_within(g, gamma, v) == 2; });
  if (connected && !loops && gamma.vertices.size() >= 2 && first_betti(g, gamma) >= 1) {
    r.two_vertex_connected = std::all_of(gamma.vertices.begin(), gamma.vertices.end(), [&](std::size_t v) {
      return detail::connected_without(g, gamma, v);
    });
  }
  // Complement: edges outside gamma, with every end lying in gamma detached to
  // a fresh node (gamma is removed as a closed set).
  std::size_t n = g.vertices.size();
  detail::DisjointSets ds(n + 2 * g.edges.size());
  bool forest = true;
  for (std::size_t e = 0; e < g.edges.size() && forest; ++e) {
    if (gamma.has_edge(e)) continue;
    std::size_t a = gamma.has_vertex(g.edges[e].tail) ? n + 2 * e : g.edges[e].tail;
    std::size_t b = gamma.has_vertex(g.edges[e].head) ? n + 2 * e + 1 : g.edges[e].head;
    if (!ds.unite(a, b)) forest = false;
  }
  r.complement_is_forest = forest;
  return r;
}

// Star of v as (away direction, multiplicity) pairs, contracted edges dropped.
inline std::vector<std::pair<ZVec, int>> weighted_star(const EmbeddedGraph& g, std::size_t v) {
  std::vector<std::pair<ZVec, int>> out;
  for (const auto& h : g.base.star(v)) {
    int mu = h.is_leaf() ? g.base.leaves[h.index].multiplicity : g.base.edges[h.index].multiplicity;
    if (mu == 0) continue;
    out.emplace_back(g.direction_away(h), mu);
  }
  return out;
}

// True iff the weighted star of v admits no split mu = mu1 + mu2 into two
// nonzero balanced parts. Exhaustive over the (small) star.
inline bool is_indecomposable_vertex(const EmbeddedGraph& g, std::size_t v) {
  auto st = weighted_star(g, v);
  std::vector<int> part(st.size(), 0);
  for (;;) {
    std::size_t i = 0;
    while (i < part.size() && part[i] == st[i].second) part[i++] = 0;
    if (i == part.size()) return true;
    ++part[i];
    bool full = true;
    for (std::size_t k = 0; k < part.size(); ++k)
      if (part[k] != st[k].second) full = false;
    if (full) continue;
    ZVec sum(g.dim, 0);
    for (std::size_t k = 0; k < part.size(); ++k)
      for (int d = 0; d < g.dim; ++d) sum[d] += st[k].first[d] * part[k];
    if (is_zero(sum)) return false;
  }
}

}  // namespace troplift
