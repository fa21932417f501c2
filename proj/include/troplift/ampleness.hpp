#pragma once

// The boundary divisor D_phi of a function at the minimum level of a subgraph,
// and deciders for C0-ampleness on genus-0 configurations.

#include "troplift/divisor.hpp"
#include "troplift/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace troplift {

struct BoundaryEntry {
  std::size_t vertex;
  HalfEdge edge;
  long multiplicity;
};

struct BoundaryDivisor {
  std::vector<BoundaryEntry> entries;
  Rational min_level;

  long degree() const {
    long d = 0;
    for (const auto& e : entries) d += e.multiplicity;
    return d;
  }
  long degree_at(std::size_t v) const {
    long d = 0;
    for (const auto& e : entries)
      if (e.vertex == v) d += e.multiplicity;
    return d;
  }
};

enum class AmpleStatus { ample, not_ample, indeterminate };
enum class AmpleMethod { tree, cycle, general, necessary_only };

inline const char* to_string(AmpleStatus s) {
  switch (s) {
    case AmpleStatus::ample: return "Ample";
    case AmpleStatus::not_ample: return "NotAmple";
    default: return "Indeterminate";
  }
}

inline const char* to_string(AmpleMethod m) {
  switch (m) {
    case AmpleMethod::tree: return "tree";
    case AmpleMethod::cycle: return "cycle";
    case AmpleMethod::general: return "general-linear-algebra";
    default: return "necessary-only";
  }
}

struct AmplenessVerdict {
  AmpleStatus status = AmpleStatus::indeterminate;
  AmpleMethod method = AmpleMethod::necessary_only;
  std::string detail;
};

// Raised when a decider is called on a subgraph of the wrong shape.
class DispatchError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Precondition shared by everything below: gamma is nonempty, connected, has no
// leaves, sits inside gamma_prime and avoids the boundary of gamma_prime.
inline void require_interior(const AbstractGraph& g, const Subgraph& gamma, const Subgraph& gamma_prime) {
  if (gamma.empty()) throw PreconditionError("subgraph is empty");
  if (!gamma.leaves.empty()) throw PreconditionError("subgraph is not bounded");
  if (components(g, gamma).size() != 1) throw PreconditionError("subgraph is not connected");
  for (auto v : gamma.vertices)
    if (!gamma_prime.has_vertex(v)) throw PreconditionError("subgraph is not contained in the level set");
  for (auto e : gamma.edges)
    if (!gamma_prime.has_edge(e)) throw PreconditionError("subgraph is not contained in the level set");
  for (auto v : boundary(g, gamma_prime))
    if (gamma.has_vertex(v))
      throw PreconditionError("subgraph meets the boundary of the level set at '" + g.vertices[v].id + "'");
}

inline BoundaryDivisor boundary_divisor(const AbstractGraph& g, const PLFunction& f, const Subgraph& gamma,
                                        const Subgraph& gamma_prime) {
  require_interior(g, gamma, gamma_prime);
  if (f.infinite) throw PreconditionError("boundary divisor of the infinite function");
  BoundaryDivisor d;
  d.min_level = f.values[gamma.vertices.front()];
  for (auto v : gamma.vertices) d.min_level = std::min(d.min_level, f.values[v]);
  for (auto v : gamma.vertices) {
    if (f.values[v] != d.min_level) continue;
    for (const auto& h : g.star(v)) {
      if (gamma.has(h)) continue;
      Rational s = away_slope(g, f, h);
      if (s < 0) d.entries.push_back({v, h, -s.get_num().get_si()});
    }
  }
  return d;
}

namespace detail {

inline bool all_genus_zero(const AbstractGraph& g, const Subgraph& gamma) {
  for (auto v : gamma.vertices)
    if (g.vertices[v].genus != 0) return false;
  return true;
}

inline std::vector<std::size_t> min_vertices(const PLFunction& f, const Subgraph& gamma, const Rational& h) {
  std::vector<std::size_t> out;
  for (auto v : gamma.vertices)
    if (f.values[v] == h) out.push_back(v);
  return out;
}

inline std::optional<std::size_t> uncovered_min_vertex(const AbstractGraph& g, const PLFunction& f,
                                                       const Subgraph& gamma, const BoundaryDivisor& d) {
  (void)g;
  for (auto v : min_vertices(f, gamma, d.min_level))
    if (d.degree_at(v) < 1) return v;
  return std::nullopt;
}

}  // namespace detail

inline AmplenessVerdict ample_tree(const AbstractGraph& g, const PLFunction& f, const Subgraph& gamma,
                                   const Subgraph& gamma_prime) {
  if (gamma.edges.size() + 1 != gamma.vertices.size() || components(g, gamma).size() != 1)
    throw DispatchError("ample_tree: subgraph is not a tree");
  if (!detail::all_genus_zero(g, gamma)) throw DispatchError("ample_tree: positive genus vertex");
  auto d = boundary_divisor(g, f, gamma, gamma_prime);
  AmplenessVerdict out{AmpleStatus::ample, AmpleMethod::tree, "every minimum vertex has degree >= 1"};
  if (auto v = detail::uncovered_min_vertex(g, f, gamma, d)) {
    out.status = AmpleStatus::not_ample;
    out.detail = "minimum vertex '" + g.vertices[*v].id + "' has degree 0";
  }
  return out;
}

inline AmplenessVerdict ample_cycle(const AbstractGraph& g, const PLFunction& f, const Subgraph& gamma,
                                    const Subgraph& gamma_prime) {
  if (!structure_checks(g, gamma).is_cycle) throw DispatchError("ample_cycle: subgraph is not a cycle");
  if (!detail::all_genus_zero(g, gamma)) throw DispatchError("ample_cycle: positive genus vertex");
  auto d = boundary_divisor(g, f, gamma, gamma_prime);
  AmplenessVerdict out{AmpleStatus::ample, AmpleMethod::cycle, "degree >= 2 and every minimum vertex covered"};
  if (d.degree() < 2) {
    out.status = AmpleStatus::not_ample;
    out.detail = "deg(D_phi) = " + std::to_string(d.degree()) + " < 2";
  } else if (auto v = detail::uncovered_min_vertex(g, f, gamma, d)) {
    out.status = AmpleStatus::not_ample;
    out.detail = "minimum vertex '" + g.vertices[*v].id + "' has degree 0";
  }
  return out;
}

// Exact decision when every component carries at most three special points.
// Each component C_v is a projective line with its points at 0, 1, infinity
// (in star order). Sections on C_v are spanned by 1 and the principal parts
// (x - p)^-k (or x^k when p is infinity) allowed by D_phi; gluing at the nodes
// is a linear map r, and W = ker r.
inline AmplenessVerdict ample_general(const AbstractGraph& g, const PLFunction& f, const Subgraph& gamma,
                                      const Subgraph& gamma_prime) {
  if (!detail::all_genus_zero(g, gamma)) throw DispatchError("ample_general: positive genus vertex");
  auto d = boundary_divisor(g, f, gamma, gamma_prime);
  AmplenessVerdict out{AmpleStatus::indeterminate, AmpleMethod::general, ""};

  struct Point {
    HalfEdge h;
    long pole_order;  // 0 for nodes
    int slot;         // 0, 1, or 2 (= infinity)
  };
  std::vector<std::vector<Point>> points(g.vertices.size());
  for (auto v : gamma.vertices) {
    for (const auto& h : g.star(v)) {
      long order = 0;
      if (!gamma.has(h)) {
        for (const auto& en : d.entries)
          if (en.vertex == v && en.edge == h) order = en.multiplicity;
        if (order == 0) continue;
      }
      points[v].push_back({h, order, static_cast<int>(points[v].size())});
    }
    if (points[v].size() > 3) {
      out.detail = "vertex '" + g.vertices[v].id + "' has " + std::to_string(points[v].size()) +
                   " special points; the answer depends on their cross-ratios";
      return out;
    }
  }
  // Coefficient layout: per vertex, the constant then each pole's terms.
  std::vector<std::size_t> offset(g.vertices.size(), 0);
  std::size_t n = 0;
  for (auto v : gamma.vertices) {
    offset[v] = n;
    n += 1;
    for (const auto& p : points[v]) n += static_cast<std::size_t>(p.pole_order);
  }
  auto evaluate = [&](std::size_t v, int slot, QVec& row, const Rational& sign) {
    row[offset[v]] += sign;
    std::size_t k = offset[v] + 1;
    for (const auto& p : points[v]) {
      for (long j = 1; j <= p.pole_order; ++j, ++k) {
        if (p.slot == 2) {
          Rational q = slot;  // slot is 0 or 1 here
          Rational val = 1;
          for (long t = 0; t < j; ++t) val *= q;
          row[k] += sign * val;
        } else if (slot != 2) {
          Rational base = Rational(slot - p.slot);
          Rational val = 1;
          for (long t = 0; t < j; ++t) val /= base;
          row[k] += sign * val;
        }
      }
    }
  };
  QMatrix r;
  for (auto e : gamma.edges) {
    const Edge& ed = g.edges[e];
    int slot_t = -1, slot_h = -1;
    for (const auto& p : points[ed.tail])
      if (!p.h.is_leaf() && p.h.index == e && p.h.end == 0) slot_t = p.slot;
    for (const auto& p : points[ed.head])
      if (!p.h.is_leaf() && p.h.index == e && p.h.end == 1) slot_h = p.slot;
    QVec row(n, 0);
    evaluate(ed.tail, slot_t, row, 1);
    evaluate(ed.head, slot_h, row, -1);
    r.push_back(std::move(row));
  }
  std::size_t dim_w = n - rank_of(r, n);
  out.status = AmpleStatus::ample;
  out.detail = "dim W = " + std::to_string(dim_w);
  for (auto v : detail::min_vertices(f, gamma, d.min_level)) {
    QMatrix rv = r;
    std::size_t width = 0;
    for (const auto& p : points[v]) width += static_cast<std::size_t>(p.pole_order);
    for (std::size_t k = 0; k < width; ++k) {
      QVec row(n, 0);
      row[offset[v] + 1 + k] = 1;
      rv.push_back(std::move(row));
    }
    std::size_t dim_u = n - rank_of(rv, n);
    if (dim_u == dim_w) {
      out.status = AmpleStatus::not_ample;
      out.detail = "every section is constant on the component of '" + g.vertices[v].id + "'";
      return out;
    }
  }
  return out;
}

// Cheap refutation for 2-connected subgraphs without 1-valent vertices.
inline AmplenessVerdict ample_necessary(const AbstractGraph& g, const PLFunction& f, const Subgraph& gamma,
                                        const Subgraph& gamma_prime) {
  auto sc = structure_checks(g, gamma);
  if (!sc.two_vertex_connected || sc.has_one_valent_vertex)
    throw DispatchError("ample_necessary: subgraph is not 2-vertex connected without 1-valent vertices");
  auto d = boundary_divisor(g, f, gamma, gamma_prime);
  AmplenessVerdict out{AmpleStatus::indeterminate, AmpleMethod::necessary_only, "necessary conditions hold"};
  if (d.degree() < 2) {
    out.status = AmpleStatus::not_ample;
    out.detail = "deg(D_phi) = " + std::to_string(d.degree()) + " < 2";
  } else if (auto v = detail::uncovered_min_vertex(g, f, gamma, d)) {
    out.status = AmpleStatus::not_ample;
    out.detail = "minimum vertex '" + g.vertices[*v].id + "' has degree 0";
  }
  return out;
}

inline AmplenessVerdict ample(const AbstractGraph& g, const PLFunction& f, const Subgraph& gamma,
                              const Subgraph& gamma_prime) {
  require_interior(g, gamma, gamma_prime);
  if (!detail::all_genus_zero(g, gamma))
    return {AmpleStatus::indeterminate, AmpleMethod::necessary_only, "positive genus vertex in subgraph"};
  if (gamma.edges.size() + 1 == gamma.vertices.size()) return ample_tree(g, f, gamma, gamma_prime);
  auto sc = structure_checks(g, gamma);
  if (sc.is_cycle) return ample_cycle(g, f, gamma, gamma_prime);
  auto gen = ample_general(g, f, gamma, gamma_prime);
  if (gen.status != AmpleStatus::indeterminate) return gen;
  if (sc.two_vertex_connected && !sc.has_one_valent_vertex) return ample_necessary(g, f, gamma, gamma_prime);
  return {AmpleStatus::indeterminate, AmpleMethod::necessary_only, gen.detail};
}

}  // namespace troplift
