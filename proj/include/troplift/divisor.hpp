#pragma once

// Divisors, canonical divisors, Laplacians of edge-linear functions and the
// tropical (min achieved twice) relation.

#include "troplift/graph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace troplift {

struct Divisor {
  std::vector<long> coeffs;  // indexed by vertex

  Divisor() = default;
  explicit Divisor(std::size_t n) : coeffs(n, 0) {}

  long degree() const {
    long d = 0;
    for (long c : coeffs) d += c;
    return d;
  }
  bool effective() const {
    for (long c : coeffs)
      if (c < 0) return false;
    return true;
  }
  long operator[](std::size_t v) const { return coeffs[v]; }
  long& operator[](std::size_t v) { return coeffs[v]; }

  friend Divisor operator+(Divisor a, const Divisor& b) {
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) a.coeffs[i] += b.coeffs[i];
    return a;
  }
  friend bool operator==(const Divisor&, const Divisor&) = default;
};

// Edge-linear function. An infinite function is the constant infinity and
// carries no values.
struct PLFunction {
  bool infinite = false;
  std::vector<Rational> values;  // per vertex
  std::vector<long> leaf_slopes; // per leaf

  static PLFunction infinity() {
    PLFunction f;
    f.infinite = true;
    return f;
  }
  static PLFunction constant(const AbstractGraph& g, const Rational& c) {
    PLFunction f;
    f.values.assign(g.vertices.size(), c);
    f.leaf_slopes.assign(g.leaves.size(), 0);
    return f;
  }
};

class UndefinedLaplacian : public PreconditionError {
 public:
  UndefinedLaplacian() : PreconditionError("Laplacian of the infinite function is undefined") {}
};

inline Divisor canonical_divisor(const AbstractGraph& g) {
  Divisor k(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    k[v] = g.degree(v) + 2 * g.vertices[v].genus - 2;
  return k;
}

// Slope of f leaving the vertex of h, as an exact rational.
inline Rational away_slope(const AbstractGraph& g, const PLFunction& f, const HalfEdge& h) {
  if (h.is_leaf()) return f.leaf_slopes[h.index];
  const Edge& e = g.edges[h.index];
  Rational s = (f.values[e.head] - f.values[e.tail]) / e.length;
  return h.end == 0 ? s : Rational(-s);
}

// Checks shape and slope integrality.
inline void validate_function(const AbstractGraph& g, const PLFunction& f) {
  if (f.infinite) return;
  if (f.values.size() != g.vertices.size()) throw MalformedInput("function has wrong number of vertex values");
  if (f.leaf_slopes.size() != g.leaves.size()) throw MalformedInput("function has wrong number of leaf slopes");
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    Rational s = (f.values[g.edges[e].head] - f.values[g.edges[e].tail]) / g.edges[e].length;
    if (!is_integer(s))
      throw MalformedInput("slope " + to_string(s) + " on edge '" + g.edges[e].id + "' is not an integer");
  }
}

inline Divisor laplacian(const AbstractGraph& g, const PLFunction& f) {
  if (f.infinite) throw UndefinedLaplacian();
  validate_function(g, f);
  Divisor d(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    Rational sum = 0;
    for (const auto& h : g.star(v)) sum += away_slope(g, f, h);
    d[v] = -sum.get_num().get_si();
  }
  return d;
}

inline bool in_linear_system(const AbstractGraph& g, const PLFunction& f, const Divisor& lambda) {
  return (laplacian(g, f) + lambda).effective();
}

namespace detail {

using Extended = std::optional<Rational>;  // nullopt is +infinity

inline bool extended_less(const Extended& a, const Extended& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

inline bool min_twice(const Extended& a, const Extended& b, const Extended& c) {
  Extended m = a;
  if (extended_less(b, m)) m = b;
  if (extended_less(c, m)) m = c;
  int hits = (a == m) + (b == m) + (c == m);
  return hits >= 2;
}

inline Extended value_at(const PLFunction& f, const Edge& e, const Rational& tau) {
  if (f.infinite) return std::nullopt;
  return f.values[e.tail] + tau * (f.values[e.head] - f.values[e.tail]);
}

}  // namespace detail

// The pointwise minimum of the three functions is attained at least twice on
// every vertex and every point of every bounded edge.
inline bool tropical_triple_check(const AbstractGraph& g, const PLFunction& f1, const PLFunction& f2,
                                  const PLFunction& f3) {
  const PLFunction* fs[3] = {&f1, &f2, &f3};
  for (auto* f : fs) {
    if (f->infinite) continue;
    if (f->values.size() != g.vertices.size())
      throw MalformedInput("tropical triple: functions live on different graphs");
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    auto val = [&](const PLFunction& f) -> detail::Extended {
      if (f.infinite) return std::nullopt;
      return f.values[v];
    };
    if (!detail::min_twice(val(f1), val(f2), val(f3))) return false;
  }
  for (const auto& e : g.edges) {
    std::vector<Rational> pts = {0, 1};
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        if (fs[i]->infinite || fs[j]->infinite) continue;
        Rational a0 = fs[i]->values[e.tail] - fs[j]->values[e.tail];
        Rational a1 = fs[i]->values[e.head] - fs[j]->values[e.head];
        if (a0 == a1) continue;
        Rational tau = a0 / (a0 - a1);
        if (tau > 0 && tau < 1) pts.push_back(tau);
      }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Rational> probes = pts;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) probes.push_back((pts[i] + pts[i + 1]) / 2);
    for (const auto& tau : probes)
      if (!detail::min_twice(detail::value_at(f1, e, tau), detail::value_at(f2, e, tau),
                             detail::value_at(f3, e, tau)))
        return false;
  }
  return true;
}

struct HomomorphismReport {
  bool ok = true;
  bool zero_is_infinite = true;
  std::vector<std::pair<ZVec, ZVec>> checked;
  std::vector<std::pair<ZVec, ZVec>> failed;
  std::vector<std::pair<ZVec, ZVec>> skipped;  // m1 + m2 absent from the family
};

// m -> phi_m must send 0 to infinity and satisfy the triple check on every pair
// (m1, m2), m1 <= m2, whose sum is present. A missing 0 entry is taken as infinity.
inline HomomorphismReport tropical_homomorphism_check(const AbstractGraph& g,
                                                      const std::map<ZVec, PLFunction>& family) {
  HomomorphismReport rep;
  auto lookup = [&](const ZVec& m) -> const PLFunction* {
    auto it = family.find(m);
    return it == family.end() ? nullptr : &it->second;
  };
  static const PLFunction inf = PLFunction::infinity();
  for (const auto& [m, f] : family)
    if (is_zero(m) && !f.infinite) rep.zero_is_infinite = false;
  rep.ok = rep.zero_is_infinite;
  for (auto i = family.begin(); i != family.end(); ++i)
    for (auto j = i; j != family.end(); ++j) {
      ZVec sum(i->first.size());
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = i->first[k] + j->first[k];
      const PLFunction* s = lookup(sum);
      if (!s && is_zero(sum)) s = &inf;
      if (!s) {
        rep.skipped.emplace_back(i->first, j->first);
        continue;
      }
      rep.checked.emplace_back(i->first, j->first);
      if (!tropical_triple_check(g, i->second, j->second, *s)) {
        rep.failed.emplace_back(i->first, j->first);
        rep.ok = false;
      }
    }
  return rep;
}

}  // namespace troplift
