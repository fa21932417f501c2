#pragma once

// Tropical parameterizations: maps from a genus-marked weighted graph onto a
// balanced embedded graph, their verification, and enumeration over targets
// whose vertices are all indecomposable.

#include "troplift/graph.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace troplift {

class MalformedMap : public MalformedInput {
 public:
  using MalformedInput::MalformedInput;
};

class UnsupportedEnumeration : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Source vertices map to target vertices; source edges map to target edges or
// are contracted (nullopt, multiplicity 0).
struct ParamMap {
  AbstractGraph source;
  std::shared_ptr<const EmbeddedGraph> target;
  std::vector<std::size_t> vertex_map;
  std::vector<std::optional<std::size_t>> edge_map;
  std::vector<std::size_t> leaf_map;
};

struct ParamViolation {
  int condition;  // 1 dilation, 2 balancing, 3 multiplicity sums, 4 semistability
  std::string witness;
  std::string detail;
};

struct ParamReport {
  bool ok = true;
  std::vector<ParamViolation> violations;
};

// The source graph placed in the target's ambient space through p.
inline EmbeddedGraph realize(const ParamMap& p) {
  EmbeddedGraph g;
  g.dim = p.target->dim;
  g.base = p.source;
  for (auto v : p.vertex_map) g.positions.push_back(p.target->positions[v]);
  for (auto l : p.leaf_map) g.leaf_directions.push_back(p.target->leaf_directions[l]);
  return g;
}

inline ParamMap identity_map(std::shared_ptr<const EmbeddedGraph> target) {
  ParamMap p;
  p.source = target->base;
  for (std::size_t v = 0; v < target->base.vertices.size(); ++v) p.vertex_map.push_back(v);
  for (std::size_t e = 0; e < target->base.edges.size(); ++e) p.edge_map.emplace_back(e);
  for (std::size_t l = 0; l < target->base.leaves.size(); ++l) p.leaf_map.push_back(l);
  p.target = std::move(target);
  return p;
}

inline ParamReport verify_parameterization(const ParamMap& p) {
  const AbstractGraph& s = p.source;
  const EmbeddedGraph& t = *p.target;
  if (p.vertex_map.size() != s.vertices.size() || p.edge_map.size() != s.edges.size() ||
      p.leaf_map.size() != s.leaves.size())
    throw MalformedMap("map does not cover the source graph");
  for (auto v : p.vertex_map)
    if (v >= t.base.vertices.size()) throw MalformedMap("vertex image out of range");
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    std::size_t a = p.vertex_map[s.edges[e].tail], b = p.vertex_map[s.edges[e].head];
    if (!p.edge_map[e]) {
      if (a != b) throw MalformedMap("contracted edge '" + s.edges[e].id + "' has distinct endpoint images");
      continue;
    }
    if (*p.edge_map[e] >= t.base.edges.size()) throw MalformedMap("edge image out of range");
    const Edge& img = t.base.edges[*p.edge_map[e]];
    if (!((img.tail == a && img.head == b) || (img.tail == b && img.head == a)))
      throw MalformedMap("edge '" + s.edges[e].id + "' endpoints do not map to the endpoints of its image");
  }
  for (std::size_t l = 0; l < s.leaves.size(); ++l) {
    if (p.leaf_map[l] >= t.base.leaves.size()) throw MalformedMap("leaf image out of range");
    if (t.base.leaves[p.leaf_map[l]].vertex != p.vertex_map[s.leaves[l].vertex])
      throw MalformedMap("leaf '" + s.leaves[l].id + "' is not anchored over its image's vertex");
  }

  ParamReport rep;
  auto fail = [&](int cond, std::string witness, std::string detail) {
    rep.ok = false;
    rep.violations.push_back({cond, std::move(witness), std::move(detail)});
  };
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const Edge& ed = s.edges[e];
    if (!p.edge_map[e]) {
      if (ed.multiplicity != 0) fail(1, ed.id, "contracted edge has nonzero multiplicity");
      continue;
    }
    Rational lat = t.lattice_length(*p.edge_map[e]);
    if (ed.multiplicity == 0 || lat != ed.length * ed.multiplicity)
      fail(1, ed.id, "image lattice length " + to_string(lat) + " != " + std::to_string(ed.multiplicity) +
                         " * " + to_string(ed.length));
  }
  EmbeddedGraph r = realize(p);
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    ZVec sum(t.dim, 0);
    for (const auto& h : s.star(v)) {
      int mu = h.is_leaf() ? s.leaves[h.index].multiplicity : s.edges[h.index].multiplicity;
      if (!h.is_leaf() && !p.edge_map[h.index]) continue;
      ZVec w = r.direction_away(h);
      for (int i = 0; i < t.dim; ++i) sum[i] += w[i] * mu;
    }
    if (!is_zero(sum)) fail(2, s.vertices[v].id, "residual " + to_string(sum));
  }
  std::vector<long> edge_sum(t.base.edges.size(), 0), leaf_sum(t.base.leaves.size(), 0);
  for (std::size_t e = 0; e < s.edges.size(); ++e)
    if (p.edge_map[e]) edge_sum[*p.edge_map[e]] += s.edges[e].multiplicity;
  for (std::size_t l = 0; l < s.leaves.size(); ++l) leaf_sum[p.leaf_map[l]] += s.leaves[l].multiplicity;
  for (std::size_t e = 0; e < t.base.edges.size(); ++e)
    if (edge_sum[e] != t.base.edges[e].multiplicity)
      fail(3, t.base.edges[e].id, "preimage multiplicities sum to " + std::to_string(edge_sum[e]) + ", expected " +
                                      std::to_string(t.base.edges[e].multiplicity));
  for (std::size_t l = 0; l < t.base.leaves.size(); ++l)
    if (leaf_sum[l] != t.base.leaves[l].multiplicity)
      fail(3, t.base.leaves[l].id, "preimage multiplicities sum to " + std::to_string(leaf_sum[l]) + ", expected " +
                                       std::to_string(t.base.leaves[l].multiplicity));
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    auto st = s.star(v);
    bool all_contracted = std::all_of(st.begin(), st.end(), [&](const HalfEdge& h) {
      return !h.is_leaf() && !p.edge_map[h.index];
    });
    if (all_contracted && st.size() < 2)
      fail(4, s.vertices[v].id, "vertex meets only contracted edges and has degree " + std::to_string(st.size()));
  }
  return rep;
}

namespace detail {

inline void partitions_into(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int k = std::min(n, max_part); k >= 1; --k) {
    cur.push_back(k);
    partitions_into(n - k, k, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (n == 0) return {{}};
  partitions_into(n, n, cur, out);
  return out;
}

inline void compositions(int total, std::size_t slots, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == slots) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = total; k >= 0; --k) {
    cur.push_back(k);
    compositions(total - k, slots, cur, out);
    cur.pop_back();
  }
}

// Vertex permutations of the target preserving genus, edge multiplicities
// between every pair, and leaf multiplicities at every vertex.
inline std::vector<std::vector<std::size_t>> combinatorial_automorphisms(const AbstractGraph& g) {
  std::size_t n = g.vertices.size();
  std::map<std::pair<std::size_t, std::size_t>, std::multiset<int>> between;
  for (const auto& e : g.edges) {
    between[{e.tail, e.head}].insert(e.multiplicity);
    if (e.tail != e.head) between[{e.head, e.tail}].insert(e.multiplicity);
  }
  std::vector<std::multiset<int>> leaf_mu(n);
  for (const auto& l : g.leaves) leaf_mu[l.vertex].insert(l.multiplicity);
  auto edges_between = [&](std::size_t a, std::size_t b) {
    auto it = between.find({a, b});
    return it == between.end() ? std::multiset<int>{} : it->second;
  };
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> image(n, npos);
  std::vector<bool> used(n, false);
  std::function<void(std::size_t)> place = [&](std::size_t v) {
    if (v == n) {
      out.push_back(image);
      return;
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (used[w] || g.vertices[v].genus != g.vertices[w].genus || leaf_mu[v] != leaf_mu[w] ||
          g.degree(v) != g.degree(w))
        continue;
      bool ok = edges_between(v, v) == edges_between(w, w);
      for (std::size_t u = 0; u < v && ok; ++u) ok = edges_between(u, v) == edges_between(image[u], w);
      if (!ok) continue;
      image[v] = w;
      used[w] = true;
      place(v + 1);
      used[w] = false;
    }
    image[v] = npos;
  };
  place(0);
  return out;
}

}  // namespace detail

// The choice data behind an enumerated map.
struct ParamChoice {
  std::vector<std::vector<int>> edge_parts;  // per target edge
  std::vector<std::vector<int>> leaf_parts;  // per target leaf
  std::vector<int> genus_marks;              // per target vertex
};

struct Enumeration {
  std::vector<ParamMap> maps;        // up to reordering parallel preimages
  std::vector<ParamChoice> choices;  // aligned with maps
  std::size_t abstract_classes = 0;  // orbits under target graph automorphisms
};

inline ParamMap build_param_map(std::shared_ptr<const EmbeddedGraph> target, const ParamChoice& c) {
  const AbstractGraph& t = target->base;
  ParamMap p;
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    p.source.vertices.push_back({t.vertices[v].id, c.genus_marks[v]});
    p.vertex_map.push_back(v);
  }
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    Rational lat = target->lattice_length(e);
    const auto& parts = c.edge_parts[e];
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string id = parts.size() == 1 ? t.edges[e].id : t.edges[e].id + "." + std::to_string(i + 1);
      p.source.edges.push_back({id, t.edges[e].tail, t.edges[e].head, parts[i], lat / parts[i]});
      p.edge_map.emplace_back(e);
    }
  }
  for (std::size_t l = 0; l < t.leaves.size(); ++l) {
    const auto& parts = c.leaf_parts[l];
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string id = parts.size() == 1 ? t.leaves[l].id : t.leaves[l].id + "." + std::to_string(i + 1);
      p.source.leaves.push_back({id, t.leaves[l].vertex, parts[i]});
      p.leaf_map.push_back(l);
    }
  }
  p.target = std::move(target);
  return p;
}

inline Enumeration enumerate_parameterizations(std::shared_ptr<const EmbeddedGraph> target, int genus) {
  const AbstractGraph& t = target->base;
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (!is_indecomposable_vertex(*target, v))
      throw UnsupportedEnumeration("vertex '" + t.vertices[v].id + "' is decomposable; enumeration unsupported");
  for (const auto& e : t.edges)
    if (e.multiplicity == 0) throw UnsupportedEnumeration("target edge '" + e.id + "' has multiplicity 0");
  Enumeration out;
  int base_h1 = first_betti(t);
  if (genus < base_h1) return out;

  std::vector<std::vector<std::vector<int>>> edge_opts, leaf_opts;
  for (const auto& e : t.edges) edge_opts.push_back(detail::partitions(e.multiplicity));
  for (const auto& l : t.leaves) leaf_opts.push_back(detail::partitions(l.multiplicity));

  auto autos = detail::combinatorial_automorphisms(t);
  std::set<std::vector<std::string>> classes;
  // Key of a choice after relabeling vertices by sigma.
  auto key_of = [&](const ParamChoice& c, const std::vector<std::size_t>& sigma) {
    std::vector<std::string> key;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      std::size_t a = sigma[t.edges[e].tail], b = sigma[t.edges[e].head];
      if (a > b) std::swap(a, b);
      std::string k = "e" + std::to_string(a) + "-" + std::to_string(b) + ":" +
                      std::to_string(t.edges[e].multiplicity) + ":";
      for (int x : c.edge_parts[e]) k += std::to_string(x) + ",";
      key.push_back(k);
    }
    for (std::size_t l = 0; l < t.leaves.size(); ++l) {
      std::string k = "l" + std::to_string(sigma[t.leaves[l].vertex]) + ":" + std::to_string(t.leaves[l].multiplicity) + ":";
      for (int x : c.leaf_parts[l]) k += std::to_string(x) + ",";
      key.push_back(k);
    }
    std::vector<std::string> marks(t.vertices.size());
    for (std::size_t v = 0; v < t.vertices.size(); ++v)
      marks[sigma[v]] = "g" + std::to_string(sigma[v]) + ":" + std::to_string(c.genus_marks[v]);
    key.insert(key.end(), marks.begin(), marks.end());
    std::sort(key.begin(), key.end());
    return key;
  };

  ParamChoice cur;
  cur.edge_parts.resize(t.edges.size());
  cur.leaf_parts.resize(t.leaves.size());
  std::function<void(std::size_t)> choose_leaf;
  std::function<void(std::size_t, int)> choose_edge = [&](std::size_t e, int extra_h1) {
    if (e == t.edges.size()) {
      int spare = genus - base_h1 - extra_h1;
      if (spare < 0) return;
      std::vector<std::vector<int>> marks;
      std::vector<int> tmp;
      if (t.vertices.empty()) return;
      detail::compositions(spare, t.vertices.size(), tmp, marks);
      std::function<void(std::size_t)> leaves_then = [&](std::size_t l) {
        if (l == t.leaves.size()) {
          for (const auto& m : marks) {
            cur.genus_marks = m;
            out.maps.push_back(build_param_map(target, cur));
            out.choices.push_back(cur);
            std::vector<std::string> best;
            for (const auto& sigma : autos) {
              auto k = key_of(cur, sigma);
              if (best.empty() || k < best) best = k;
            }
            classes.insert(best);
          }
          return;
        }
        for (const auto& parts : leaf_opts[l]) {
          cur.leaf_parts[l] = parts;
          leaves_then(l + 1);
        }
      };
      leaves_then(0);
      return;
    }
    for (const auto& parts : edge_opts[e]) {
      int extra = static_cast<int>(parts.size()) - 1;
      if (base_h1 + extra_h1 + extra > genus) continue;
      cur.edge_parts[e] = parts;
      choose_edge(e + 1, extra_h1 + extra);
    }
  };
  choose_edge(0, 0);
  out.abstract_classes = classes.size();
  return out;
}

}  // namespace troplift
