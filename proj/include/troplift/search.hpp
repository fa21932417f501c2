#pragma once

// Search for the functions phi_m: a branch-and-bound over sign, membership and
// integrality decisions, each node decided by exact strict linear feasibility.
// Refuted nodes carry Motzkin multipliers (or a combinatorial reason), so a
// finished refutation is a case tree that can be replayed independently.

#include "troplift/ampleness.hpp"
#include "troplift/lp.hpp"
#include "troplift/parameterization.hpp"
#include "troplift/topology.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace troplift {

enum class SearchMode { stable, discrete };

struct SearchOptions {
  std::size_t node_cap = 200000;
  bool pruning = false;         // descending-path rows; applied only when every genus mark is 0
  long slope_bound = 0;         // discrete mode; 0 selects max(1, deg K) + 1
  std::size_t gamma_budget = 2; // replay of Sat witnesses
};

struct Decision {
  enum class Kind { sign, split, member } kind = Kind::sign;
  std::size_t subject = 0;  // variable (sign, split) or cycle (member)
  std::size_t vertex = 0;   // member only
  Integer pivot = 0;        // split: var <= pivot | var >= pivot + 1
  bool second = false;      // sign: neg | pos; split: le | ge; member: in | out

  bool same_subject(const Decision& o) const {
    return kind == o.kind && subject == o.subject && vertex == o.vertex && pivot == o.pivot;
  }
};

// One end of a flat edge, as a signed variable.
struct EndForm {
  std::size_t var = npos;
  int sign = 1;
};

struct ConstrainedCycle {
  Subgraph sub;
  std::vector<std::size_t> boundary;   // vertices with a half-edge outside the cycle
  std::vector<std::size_t> inner;      // the rest
  std::vector<std::vector<HalfEdge>> exits;  // per boundary vertex: bounded half-edges leaving the cycle
  std::size_t h_var = npos;
};

struct StructuralReason {
  enum class Kind { argmin_empty, uncovered, local_min } kind;
  std::size_t cycle = 0;
  std::size_t vertex = 0;
};

// Decisions and reasons as they appear in certificates: by name, not index.
struct NamedDecision {
  std::string kind;    // sign | split | member
  std::string subject; // variable name, or cycle index for member
  std::string vertex;  // member only
  Integer pivot = 0;   // split only
  std::string branch;  // neg|pos, le|ge, in|out
};

struct NamedReason {
  std::string kind;  // argmin-empty | uncovered | local-min
  std::size_t cycle = 0;
  std::string vertex;
};

class SearchModel {
 public:
  SearchModel(EmbeddedGraph g, ZVec m, SearchMode mode, const SearchOptions& opt)
      : graph_(std::move(g)), m_(std::move(m)), mode_(mode) {
    if (is_zero(m_)) throw PreconditionError("direction must be nonzero");
    const AbstractGraph& b = graph_.base;
    flat_edge_.resize(b.edges.size());
    for (std::size_t e = 0; e < b.edges.size(); ++e) flat_edge_[e] = dot(m_, graph_.displacement(e)) == 0;
    flat_leaf_.resize(b.leaves.size());
    for (std::size_t l = 0; l < b.leaves.size(); ++l) flat_leaf_[l] = dot(m_, graph_.leaf_directions[l]) == 0;
    anchored_.assign(b.vertices.size(), false);
    for (std::size_t v = 0; v < b.vertices.size(); ++v)
      for (const auto& h : b.star(v))
        if (!flat(h)) anchored_[v] = true;
    genus_zero_ = std::all_of(b.vertices.begin(), b.vertices.end(), [](const Vertex& v) { return v.genus == 0; });
    pruning_ = opt.pruning && genus_zero_;

    phi_var_.assign(b.vertices.size(), npos);
    for (std::size_t v = 0; v < b.vertices.size(); ++v)
      if (!anchored_[v]) phi_var_[v] = add_var("phi:" + b.vertices[v].id, false);
    end_form_.assign(b.edges.size(), {EndForm{}, EndForm{}});
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      if (!flat_edge_[e]) continue;
      if (mode_ == SearchMode::stable) {
        end_form_[e][0] = {add_var("s:" + b.edges[e].id + ":0", true), 1};
        end_form_[e][1] = {add_var("s:" + b.edges[e].id + ":1", true), 1};
      } else {
        std::size_t s = add_var("s:" + b.edges[e].id, true);
        end_form_[e][0] = {s, 1};
        end_form_[e][1] = {s, -1};
      }
    }
    Subgraph interior;
    for (std::size_t v = 0; v < b.vertices.size(); ++v)
      if (!anchored_[v]) interior.vertices.push_back(v);
    for (std::size_t e = 0; e < b.edges.size(); ++e)
      if (flat_edge_[e] && !anchored_[b.edges[e].tail] && !anchored_[b.edges[e].head]) interior.edges.push_back(e);
    for (auto& sub : simple_cycles(b, interior)) {
      ConstrainedCycle c;
      c.sub = sub;
      for (auto v : sub.vertices) {
        std::vector<HalfEdge> exits;
        bool leaves_cycle = false;
        for (const auto& h : b.star(v)) {
          if (sub.has(h)) continue;
          leaves_cycle = true;
          if (!h.is_leaf()) exits.push_back(h);
        }
        if (leaves_cycle) {
          c.boundary.push_back(v);
          c.exits.push_back(std::move(exits));
        } else {
          c.inner.push_back(v);
        }
      }
      c.h_var = add_var("h:" + std::to_string(cycles_.size()), false);
      cycles_.push_back(std::move(c));
    }
    if (mode_ == SearchMode::discrete) {
      long deg_k = canonical_divisor(b).degree();
      bound_ = opt.slope_bound > 0 ? opt.slope_bound : std::max(1L, deg_k) + 1;
    }
    if (pruning_) {
      std::vector<std::size_t> anchors;
      for (std::size_t v = 0; v < b.vertices.size(); ++v)
        if (anchored_[v]) anchors.push_back(v);
      flat_dist_ = distances_from(b, anchors, [&](std::size_t e) { return static_cast<bool>(flat_edge_[e]); });
    }
    build_base_rows();
  }

  const EmbeddedGraph& graph() const { return graph_; }
  const ZVec& direction() const { return m_; }
  SearchMode mode() const { return mode_; }
  long slope_bound() const { return bound_; }
  bool pruning() const { return pruning_; }
  std::size_t var_count() const { return names_.size(); }
  const std::string& var_name(std::size_t i) const { return names_[i]; }
  bool is_integer_var(std::size_t i) const { return integer_[i]; }
  const std::vector<ConstrainedCycle>& cycles() const { return cycles_; }
  bool flat(const HalfEdge& h) const { return h.is_leaf() ? flat_leaf_[h.index] : flat_edge_[h.index]; }
  bool flat_edge(std::size_t e) const { return flat_edge_[e]; }
  bool anchored(std::size_t v) const { return anchored_[v]; }
  std::size_t phi_var(std::size_t v) const { return phi_var_[v]; }
  EndForm end_form(const HalfEdge& h) const { return end_form_[h.index][h.end]; }

  std::size_t find_var(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return npos;
  }

  std::vector<std::size_t> slope_vars() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (integer_[i]) out.push_back(i);
    return out;
  }

  // Sign of a variable fixed by the path: -1, +1 or 0 (undecided).
  static int decided_sign(const std::vector<Decision>& path, std::size_t var) {
    int s = 0;
    for (const auto& d : path)
      if (d.kind == Decision::Kind::sign && d.subject == var) s = d.second ? 1 : -1;
    return s;
  }

  // Sign of an end slope under the path (0 if undecided).
  int end_sign(const std::vector<Decision>& path, const HalfEdge& h) const {
    EndForm f = end_form(h);
    return decided_sign(path, f.var) * f.sign;
  }

  // Membership of a boundary vertex in a cycle's argmin: -1 unknown, 1 in, 0 out.
  static int membership(const std::vector<Decision>& path, std::size_t cycle, std::size_t v) {
    int s = -1;
    for (const auto& d : path)
      if (d.kind == Decision::Kind::member && d.subject == cycle && d.vertex == v) s = d.second ? 0 : 1;
    return s;
  }

  std::optional<StructuralReason> structural(const std::vector<Decision>& path) const {
    for (std::size_t k = 0; k < cycles_.size(); ++k) {
      const auto& c = cycles_[k];
      bool all_out = std::all_of(c.boundary.begin(), c.boundary.end(),
                                 [&](std::size_t v) { return membership(path, k, v) == 0; });
      if (all_out) return StructuralReason{StructuralReason::Kind::argmin_empty, k, 0};
      for (std::size_t i = 0; i < c.boundary.size(); ++i) {
        if (membership(path, k, c.boundary[i]) != 1) continue;
        bool all_pos = std::all_of(c.exits[i].begin(), c.exits[i].end(),
                                   [&](const HalfEdge& h) { return end_sign(path, h) > 0; });
        if (all_pos) return StructuralReason{StructuralReason::Kind::uncovered, k, c.boundary[i]};
      }
    }
    const AbstractGraph& b = graph_.base;
    for (std::size_t v = 0; v < b.vertices.size(); ++v) {
      if (anchored_[v]) continue;
      bool all_pos = true;
      for (const auto& h : b.star(v))
        if (!h.is_leaf() && end_sign(path, h) <= 0) all_pos = false;
      if (all_pos) return StructuralReason{StructuralReason::Kind::local_min, 0, v};
    }
    return std::nullopt;
  }

  // Does the stated reason actually hold for this path?
  bool reason_holds(const std::vector<Decision>& path, const StructuralReason& r) const {
    const AbstractGraph& b = graph_.base;
    switch (r.kind) {
      case StructuralReason::Kind::argmin_empty: {
        if (r.cycle >= cycles_.size()) return false;
        const auto& c = cycles_[r.cycle];
        return std::all_of(c.boundary.begin(), c.boundary.end(),
                           [&](std::size_t v) { return membership(path, r.cycle, v) == 0; });
      }
      case StructuralReason::Kind::uncovered: {
        if (r.cycle >= cycles_.size()) return false;
        const auto& c = cycles_[r.cycle];
        auto it = std::find(c.boundary.begin(), c.boundary.end(), r.vertex);
        if (it == c.boundary.end() || membership(path, r.cycle, r.vertex) != 1) return false;
        const auto& exits = c.exits[static_cast<std::size_t>(it - c.boundary.begin())];
        return std::all_of(exits.begin(), exits.end(), [&](const HalfEdge& h) { return end_sign(path, h) > 0; });
      }
      case StructuralReason::Kind::local_min: {
        if (r.vertex >= b.vertices.size() || anchored_[r.vertex]) return false;
        for (const auto& h : b.star(r.vertex))
          if (!h.is_leaf() && end_sign(path, h) <= 0) return false;
        return true;
      }
    }
    return false;
  }

  std::string describe(const StructuralReason& r) const {
    const AbstractGraph& b = graph_.base;
    switch (r.kind) {
      case StructuralReason::Kind::argmin_empty:
        return "cycle " + std::to_string(r.cycle) + ": no vertex can attain the minimum";
      case StructuralReason::Kind::uncovered:
        return "cycle " + std::to_string(r.cycle) + ": minimum vertex '" + b.vertices[r.vertex].id +
               "' has deg(D_phi|C_v) = 0 (required >= 1)";
      default:
        return "vertex '" + b.vertices[r.vertex].id + "' is a local minimum: deg(D_phi) = 0 on it (required >= 1)";
    }
  }

  std::string describe(const Decision& d) const {
    switch (d.kind) {
      case Decision::Kind::sign: return names_[d.subject] + (d.second ? " >= 1" : " <= -1");
      case Decision::Kind::split:
        return d.second ? names_[d.subject] + " >= " + to_string(Integer(d.pivot + 1))
                        : names_[d.subject] + " <= " + to_string(d.pivot);
      default:
        return "cycle " + std::to_string(d.subject) + ": '" + graph_.base.vertices[d.vertex].id +
               (d.second ? "' above minimum" : "' at minimum");
    }
  }

  NamedDecision named(const Decision& d) const {
    NamedDecision n;
    switch (d.kind) {
      case Decision::Kind::sign:
        n.kind = "sign";
        n.subject = names_[d.subject];
        n.branch = d.second ? "pos" : "neg";
        break;
      case Decision::Kind::split:
        n.kind = "split";
        n.subject = names_[d.subject];
        n.pivot = d.pivot;
        n.branch = d.second ? "ge" : "le";
        break;
      case Decision::Kind::member:
        n.kind = "member";
        n.subject = std::to_string(d.subject);
        n.vertex = graph_.base.vertices[d.vertex].id;
        n.branch = d.second ? "out" : "in";
        break;
    }
    return n;
  }

  // nullopt if the record names nothing in this model, or names a variable of
  // the wrong type for the decision.
  std::optional<Decision> resolve(const NamedDecision& n) const {
    Decision d;
    if (n.kind == "sign" || n.kind == "split") {
      d.kind = n.kind == "sign" ? Decision::Kind::sign : Decision::Kind::split;
      d.subject = find_var(n.subject);
      if (d.subject == npos || !integer_[d.subject]) return std::nullopt;
      const char* lo = n.kind == "sign" ? "neg" : "le";
      const char* hi = n.kind == "sign" ? "pos" : "ge";
      if (n.branch != lo && n.branch != hi) return std::nullopt;
      d.second = n.branch == hi;
      if (d.kind == Decision::Kind::split) d.pivot = n.pivot;
      return d;
    }
    if (n.kind != "member") return std::nullopt;
    d.kind = Decision::Kind::member;
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoul(n.subject, &used);
      if (used != n.subject.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (k >= cycles_.size()) return std::nullopt;
    std::size_t v = graph_.base.find_vertex(n.vertex);
    const auto& bd = cycles_[k].boundary;
    if (v == npos || std::find(bd.begin(), bd.end(), v) == bd.end()) return std::nullopt;
    if (n.branch != "in" && n.branch != "out") return std::nullopt;
    d.subject = k;
    d.vertex = v;
    d.second = n.branch == "out";
    return d;
  }

  NamedReason named(const StructuralReason& r) const {
    NamedReason n;
    n.kind = r.kind == StructuralReason::Kind::argmin_empty ? "argmin-empty"
             : r.kind == StructuralReason::Kind::uncovered  ? "uncovered"
                                                            : "local-min";
    n.cycle = r.cycle;
    if (r.kind != StructuralReason::Kind::argmin_empty) n.vertex = graph_.base.vertices[r.vertex].id;
    return n;
  }

  std::optional<StructuralReason> resolve(const NamedReason& n) const {
    StructuralReason r{StructuralReason::Kind::argmin_empty, n.cycle, 0};
    if (n.kind == "argmin-empty") return r;
    r.kind = n.kind == "uncovered" ? StructuralReason::Kind::uncovered : StructuralReason::Kind::local_min;
    if (n.kind != "uncovered" && n.kind != "local-min") return std::nullopt;
    r.vertex = graph_.base.find_vertex(n.vertex);
    if (r.vertex == npos) return std::nullopt;
    return r;
  }

  // The full row system of a node.
  LinearSystem system(const std::vector<Decision>& path) const {
    LinearSystem s = base_;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const Decision& d = path[i];
      std::string label = "dec:" + std::to_string(i);
      QVec a(s.nvars, 0);
      switch (d.kind) {
        case Decision::Kind::sign:
          a[d.subject] = d.second ? -1 : 1;
          s.add(a, -1, RowKind::weak, label);
          break;
        case Decision::Kind::split:
          if (d.second) {
            a[d.subject] = -1;
            s.add(a, Rational(-(d.pivot + 1)), RowKind::weak, label);
          } else {
            a[d.subject] = 1;
            s.add(a, Rational(d.pivot), RowKind::weak, label);
          }
          break;
        case Decision::Kind::member: {
          std::size_t h = cycles_[d.subject].h_var, p = phi_var_[d.vertex];
          if (d.second) {
            a[h] = 1;
            a[p] = -1;
            s.add(a, 0, RowKind::strict, label);
          } else {
            a[p] = 1;
            a[h] = -1;
            s.add(a, 0, RowKind::weak, label);
          }
          break;
        }
      }
    }
    // Lower bound on deg(D_phi) once a cycle's argmin and exit signs are settled.
    for (std::size_t k = 0; k < cycles_.size(); ++k) {
      const auto& c = cycles_[k];
      bool settled = true, any_in = false;
      QVec a(s.nvars, 0);
      for (std::size_t i = 0; i < c.boundary.size() && settled; ++i) {
        int mem = membership(path, k, c.boundary[i]);
        if (mem < 0) settled = false;
        if (mem != 1) continue;
        any_in = true;
        for (const auto& h : c.exits[i]) {
          int sg = end_sign(path, h);
          if (sg == 0) settled = false;
          if (sg < 0) add_end(a, h, 1);
        }
      }
      if (settled && any_in) s.add(a, -2, RowKind::weak, "cycdeg:" + std::to_string(k));
    }
    if (pruning_) {
      for (std::size_t i = 0; i < path.size(); ++i) {
        const Decision& d = path[i];
        if (d.kind != Decision::Kind::sign) continue;
        for (const auto& [h, v] : ends_of_var(d.subject)) {
          if (decided_sign(path, d.subject) == 0) continue;
          if ((d.second ? 1 : -1) * end_form(h).sign >= 0) continue;
          const Edge& ed = graph_.base.edges[h.index];
          std::size_t other = ed.other(v);
          if (ed.is_loop() || !flat_dist_[other]) continue;
          Rational bound = ed.length + *flat_dist_[other];
          QVec a(s.nvars, 0);
          if (phi_var_[v] != npos) a[phi_var_[v]] = -1;
          s.add(a, -bound, RowKind::weak, "decpath:" + std::to_string(i));
        }
      }
    }
    return s;
  }

  // Linear form of an end slope, accumulated into a row.
  void add_end(QVec& a, const HalfEdge& h, const Rational& coeff) const {
    EndForm f = end_form(h);
    a[f.var] += coeff * f.sign;
  }

  Rational end_value(const QVec& x, const HalfEdge& h) const {
    EndForm f = end_form(h);
    return x[f.var] * f.sign;
  }

  Rational phi_value(const QVec& x, std::size_t v) const { return phi_var_[v] == npos ? Rational(0) : x[phi_var_[v]]; }

  // Ends (half-edge, vertex) controlled by a slope variable.
  std::vector<std::pair<HalfEdge, std::size_t>> ends_of_var(std::size_t var) const {
    std::vector<std::pair<HalfEdge, std::size_t>> out;
    const AbstractGraph& b = graph_.base;
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      if (!flat_edge_[e]) continue;
      for (int end = 0; end < 2; ++end)
        if (end_form_[e][end].var == var)
          out.push_back({HalfEdge{HalfEdge::Kind::edge, e, end}, end == 0 ? b.edges[e].tail : b.edges[e].head});
    }
    return out;
  }

 private:
  std::size_t add_var(std::string name, bool integral) {
    names_.push_back(std::move(name));
    integer_.push_back(integral);
    return names_.size() - 1;
  }

  void build_base_rows() {
    const AbstractGraph& b = graph_.base;
    base_.nvars = names_.size();
    auto row = [&]() { return QVec(base_.nvars, 0); };
    for (std::size_t v = 0; v < b.vertices.size(); ++v) {
      if (phi_var_[v] == npos) continue;
      QVec a = row();
      a[phi_var_[v]] = -1;
      base_.add(a, 0, RowKind::weak, "nonneg:" + b.vertices[v].id);
    }
    Divisor k = canonical_divisor(b);
    for (std::size_t v = 0; v < b.vertices.size(); ++v) {
      QVec a = row();
      long rhs = k[v];
      for (const auto& h : b.star(v)) {
        if (!flat(h)) continue;
        if (h.is_leaf()) rhs -= 1;
        else add_end(a, h, 1);
      }
      if (is_zero(a) && rhs >= 0) continue;
      base_.add(a, rhs, RowKind::weak, "vertex:" + b.vertices[v].id);
    }
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      if (!flat_edge_[e]) continue;
      const Edge& ed = b.edges[e];
      auto add_phi = [&](QVec& a, std::size_t v, int c) {
        if (phi_var_[v] != npos) a[phi_var_[v]] += c;
      };
      if (mode_ == SearchMode::stable) {
        // s0 L >= phi(head) - phi(tail),  s1 L >= phi(tail) - phi(head)
        QVec a0 = row();
        add_phi(a0, ed.head, 1);
        add_phi(a0, ed.tail, -1);
        a0[end_form_[e][0].var] -= ed.length;
        base_.add(a0, 0, RowKind::weak, "concave:" + ed.id + ":0");
        QVec a1 = row();
        add_phi(a1, ed.tail, 1);
        add_phi(a1, ed.head, -1);
        a1[end_form_[e][1].var] -= ed.length;
        base_.add(a1, 0, RowKind::weak, "concave:" + ed.id + ":1");
      } else {
        QVec a = row();
        add_phi(a, ed.head, 1);
        add_phi(a, ed.tail, -1);
        a[end_form_[e][0].var] -= ed.length;
        QVec neg = a;
        for (auto& x : neg) x = -x;
        base_.add(a, 0, RowKind::weak, "linear:" + ed.id + ":+");
        base_.add(neg, 0, RowKind::weak, "linear:" + ed.id + ":-");
        QVec up = row(), down = row();
        up[end_form_[e][0].var] = 1;
        down[end_form_[e][0].var] = -1;
        base_.add(up, bound_, RowKind::weak, "bound:" + ed.id + ":+");
        base_.add(down, bound_, RowKind::weak, "bound:" + ed.id + ":-");
      }
    }
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      if (!flat_edge_[e]) continue;
      for (int end = 0; end < 2; ++end) {
        std::size_t v = end == 0 ? b.edges[e].tail : b.edges[e].head;
        if (!anchored_[v]) continue;
        QVec a = row();
        add_end(a, HalfEdge{HalfEdge::Kind::edge, e, end}, -1);
        base_.add(a, -1, RowKind::weak, "anchor:" + b.edges[e].id + ":" + std::to_string(end));
      }
    }
    for (std::size_t k2 = 0; k2 < cycles_.size(); ++k2) {
      const auto& c = cycles_[k2];
      for (auto u : c.sub.vertices) {
        QVec a = row();
        a[c.h_var] = 1;
        a[phi_var_[u]] = -1;
        base_.add(a, 0, RowKind::weak, "cycmin:" + std::to_string(k2) + ":" + b.vertices[u].id);
      }
      for (auto u : c.inner) {
        QVec a = row();
        a[c.h_var] = 1;
        a[phi_var_[u]] = -1;
        base_.add(a, 0, RowKind::strict, "cycabove:" + std::to_string(k2) + ":" + b.vertices[u].id);
      }
    }
  }

  EmbeddedGraph graph_;
  ZVec m_;
  SearchMode mode_;
  long bound_ = 0;
  bool genus_zero_ = true;
  bool pruning_ = false;
  std::vector<bool> flat_edge_, flat_leaf_, anchored_;
  std::vector<std::string> names_;
  std::vector<bool> integer_;
  std::vector<std::size_t> phi_var_;
  std::vector<std::array<EndForm, 2>> end_form_;
  std::vector<ConstrainedCycle> cycles_;
  std::vector<std::optional<Rational>> flat_dist_;
  LinearSystem base_;
};

// Subdivision-stable candidate: vertex values plus the two end slopes of a
// concave profile on every flat edge. Slopes are integers.
struct RelaxedPLFunction {
  std::vector<Rational> values;
  std::vector<std::array<Integer, 2>> end_slopes;  // zero on non-flat edges
  std::vector<long> leaf_slopes;
};

struct CaseWitness {
  enum class Kind { farkas, structural } kind = Kind::farkas;
  std::vector<std::pair<std::string, Rational>> multipliers;  // farkas: row label -> multiplier
  std::optional<NamedReason> reason;                          // structural
  std::string note;                                           // human-readable violated constraint
};

struct CertificateCase {
  std::vector<NamedDecision> path;
  CaseWitness witness;
};

struct ObstructionCertificate {
  ZVec direction;
  SearchMode mode = SearchMode::stable;
  int level = 1;
  bool pruning = false;
  long slope_bound = 0;
  ParamChoice parameterization;
  std::vector<std::vector<std::string>> cycles;  // vertex ids per constrained cycle
  std::vector<CertificateCase> cases;
};

enum class SearchStatus { sat, unsat, indeterminate };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::sat: return "Sat";
    case SearchStatus::unsat: return "Unsat";
    default: return "Indeterminate";
  }
}

struct Theorem1Report {
  bool nonnegative = true;
  bool cond1 = true, cond2 = true, cond3 = true, cond4 = true;
  std::size_t gammas_checked = 0;
  std::size_t gammas_indeterminate = 0;
  std::vector<std::string> failures;

  bool ok() const { return nonnegative && cond1 && cond2 && cond3 && cond4; }
};

struct SearchResult {
  SearchStatus status = SearchStatus::indeterminate;
  std::optional<PLFunction> witness;          // on the graph subdivided `level` times
  std::optional<RelaxedPLFunction> relaxed;   // stable mode
  int level = 1;
  std::optional<Theorem1Report> replay;
  std::optional<ObstructionCertificate> certificate;
  std::string reason;
  std::size_t nodes = 0;
};

namespace detail {

inline bool flat_edge_of(const EmbeddedGraph& g, const ZVec& m, std::size_t e) {
  return dot(m, g.displacement(e)) == 0;
}

// The level set at c without refinement: vertices at level c, flat edges and
// flat leaves there.
inline Subgraph level_set(const EmbeddedGraph& g, const ZVec& m, const Rational& c) {
  Subgraph s;
  for (std::size_t v = 0; v < g.base.vertices.size(); ++v)
    if (level_of(g, m, v) == c) s.vertices.push_back(v);
  for (std::size_t e = 0; e < g.base.edges.size(); ++e)
    if (flat_edge_of(g, m, e) && level_of(g, m, g.base.edges[e].tail) == c) s.edges.push_back(e);
  for (std::size_t l = 0; l < g.base.leaves.size(); ++l)
    if (dot(m, g.leaf_directions[l]) == 0 && level_of(g, m, g.base.leaves[l].vertex) == c) s.leaves.push_back(l);
  return s;
}

}  // namespace detail

// Conditions (1)-(3) exactly; condition (4) over cycles, cyclic blocks and
// connected pieces up to `budget` edges inside every level set.
inline Theorem1Report check_theorem1(const EmbeddedGraph& g, const PLFunction& f, const ZVec& m,
                                     std::size_t budget = 2) {
  Theorem1Report rep;
  const AbstractGraph& b = g.base;
  if (f.infinite) {
    rep.nonnegative = false;
    rep.failures.push_back("function is infinite");
    return rep;
  }
  try {
    validate_function(b, f);
  } catch (const MalformedInput& e) {
    rep.cond3 = false;
    rep.failures.push_back(e.what());
    return rep;
  }
  for (std::size_t v = 0; v < b.vertices.size(); ++v)
    if (f.values[v] < 0) {
      rep.nonnegative = false;
      rep.failures.push_back("negative value at '" + b.vertices[v].id + "'");
    }
  for (std::size_t l = 0; l < b.leaves.size(); ++l)
    if (f.leaf_slopes[l] < 0) {
      rep.nonnegative = false;
      rep.failures.push_back("negative slope on leaf '" + b.leaves[l].id + "'");
    }
  Divisor k = canonical_divisor(b);
  Divisor lap = laplacian(b, f);
  for (std::size_t v = 0; v < b.vertices.size(); ++v)
    if (lap[v] + k[v] < 0) {
      rep.cond1 = false;
      rep.failures.push_back("(1) Delta(phi) + K < 0 at '" + b.vertices[v].id + "'");
    }
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    const Edge& ed = b.edges[e];
    bool flat = detail::flat_edge_of(g, m, e);
    if (!flat && (f.values[ed.tail] != 0 || f.values[ed.head] != 0)) {
      rep.cond2 = false;
      rep.failures.push_back("(2) nonzero on edge '" + ed.id + "'");
    }
    if (flat && f.values[ed.tail] == f.values[ed.head]) {
      rep.cond3 = false;
      rep.failures.push_back("(3) slope 0 on edge '" + ed.id + "'");
    }
  }
  for (std::size_t l = 0; l < b.leaves.size(); ++l) {
    bool flat = dot(m, g.leaf_directions[l]) == 0;
    if (!flat && (f.leaf_slopes[l] != 0 || f.values[b.leaves[l].vertex] != 0)) {
      rep.cond2 = false;
      rep.failures.push_back("(2) nonzero on leaf '" + b.leaves[l].id + "'");
    }
    if (flat && f.leaf_slopes[l] == 0) {
      rep.cond3 = false;
      rep.failures.push_back("(3) slope 0 on leaf '" + b.leaves[l].id + "'");
    }
  }
  std::set<Rational> levels;
  for (std::size_t v = 0; v < b.vertices.size(); ++v) levels.insert(level_of(g, m, v));
  for (const auto& c : levels) {
    Subgraph gp = detail::level_set(g, m, c);
    auto bd = boundary(b, gp);
    Subgraph inside;
    for (auto v : gp.vertices)
      if (!std::binary_search(bd.begin(), bd.end(), v)) inside.vertices.push_back(v);
    for (auto e : gp.edges)
      if (inside.has_vertex(b.edges[e].tail) && inside.has_vertex(b.edges[e].head)) inside.edges.push_back(e);
    if (inside.empty()) continue;
    std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
    std::vector<Subgraph> gammas;
    auto take = [&](const Subgraph& s) {
      if (seen.insert({s.vertices, s.edges}).second) gammas.push_back(s);
    };
    for (const auto& comp : components(b, inside)) {
      for (const auto& s : simple_cycles(b, comp, 1000)) take(s);
      for (const auto& s : cyclic_blocks(b, comp)) take(s);
      for (const auto& s : small_connected_subgraphs(b, comp, budget)) take(s);
    }
    for (const auto& gamma : gammas) {
      ++rep.gammas_checked;
      auto verdict = ample(b, f, gamma, gp);
      if (verdict.status == AmpleStatus::indeterminate) ++rep.gammas_indeterminate;
      if (verdict.status == AmpleStatus::not_ample) {
        rep.cond4 = false;
        std::string ids;
        for (auto v : gamma.vertices) ids += (ids.empty() ? "" : ",") + b.vertices[v].id;
        rep.failures.push_back("(4) not C0-ample on {" + ids + "}: " + verdict.detail);
      }
    }
  }
  return rep;
}

// phi(lx)/l pulled back to the original metric, read off a level-l function.
inline RelaxedPLFunction relax_discrete(const EmbeddedGraph& g, const ZVec& m, const PLFunction& f, int l) {
  const AbstractGraph& b = g.base;
  RelaxedPLFunction r;
  for (std::size_t v = 0; v < b.vertices.size(); ++v) r.values.push_back(f.values[v] / l);
  r.end_slopes.assign(b.edges.size(), {Integer(0), Integer(0)});
  // subdivide() numbers the inserted vertices edge by edge after the originals.
  std::size_t next = b.vertices.size();
  AbstractGraph sub = subdivide(b, l);
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    const Edge& ed = b.edges[e];
    std::size_t first = l > 1 ? next : ed.head;
    std::size_t last = l > 1 ? next + static_cast<std::size_t>(l) - 2 : ed.tail;
    if (detail::flat_edge_of(g, m, e)) {
      Rational s0 = (f.values[first] - f.values[ed.tail]) / ed.length;
      Rational s1 = (f.values[last] - f.values[ed.head]) / ed.length;
      r.end_slopes[e] = {s0.get_num(), s1.get_num()};
    }
    if (l > 1) next += static_cast<std::size_t>(l) - 1;
  }
  (void)sub;
  r.leaf_slopes = f.leaf_slopes;
  return r;
}

inline bool relaxed_invariants_hold(const EmbeddedGraph& g, const ZVec& m, const RelaxedPLFunction& r) {
  const AbstractGraph& b = g.base;
  for (const auto& v : r.values)
    if (v < 0) return false;
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    const Edge& ed = b.edges[e];
    if (!detail::flat_edge_of(g, m, e)) {
      if (r.values[ed.tail] != 0 || r.values[ed.head] != 0 || r.end_slopes[e][0] != 0 || r.end_slopes[e][1] != 0)
        return false;
      continue;
    }
    if (r.end_slopes[e][0] == 0 || r.end_slopes[e][1] == 0) return false;
    if (Rational(r.end_slopes[e][0]) * ed.length < r.values[ed.head] - r.values[ed.tail]) return false;
    if (Rational(r.end_slopes[e][1]) * ed.length < r.values[ed.tail] - r.values[ed.head]) return false;
  }
  return true;
}

// Places every kink on a subdivision point of Sigma_l and returns (l, phi on Sigma_l).
inline std::pair<int, PLFunction> realize_relaxed(const EmbeddedGraph& g, const ZVec& m, const RelaxedPLFunction& r) {
  const AbstractGraph& b = g.base;
  Integer l = 1;
  std::vector<std::optional<Rational>> kink(b.edges.size());
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    if (!detail::flat_edge_of(g, m, e)) continue;
    const Edge& ed = b.edges[e];
    Rational a = r.values[ed.tail], c = r.values[ed.head];
    Rational s0 = r.end_slopes[e][0], s1 = r.end_slopes[e][1];
    if (s0 + s1 == 0) continue;
    Rational tau = (c - a + s1 * ed.length) / (s0 + s1);  // distance of the kink from the tail
    kink[e] = tau;
    Rational frac = tau / ed.length;
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), frac.get_den_mpz_t());
  }
  if (l > 1000) throw PreconditionError("witness needs a subdivision finer than 1000");
  int lv = static_cast<int>(l.get_si());
  PLFunction f;
  for (const auto& v : r.values) f.values.push_back(v * lv);
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    const Edge& ed = b.edges[e];
    for (int k = 1; k < lv; ++k) {
      if (!detail::flat_edge_of(g, m, e)) {
        f.values.push_back(0);
        continue;
      }
      Rational x = ed.length * k / lv;  // original metric
      Rational s0 = r.end_slopes[e][0];
      Rational val;
      if (!kink[e] || x <= *kink[e]) val = r.values[ed.tail] + s0 * x;
      else val = r.values[ed.head] + Rational(r.end_slopes[e][1]) * (ed.length - x);
      f.values.push_back(val * lv);
    }
  }
  f.leaf_slopes = r.leaf_slopes;
  return {lv, f};
}

namespace detail {

struct BranchChoice {
  Decision first, second;
};

inline Decision with_branch(Decision d, bool second) {
  d.second = second;
  return d;
}

// Why x is not a genuine solution, as the next decision to branch on.
inline std::optional<Decision> next_branch(const SearchModel& model, const std::vector<Decision>& path, const QVec& x) {
  const AbstractGraph& b = model.graph().base;
  auto undecided_sign = [&](const HalfEdge& h) -> std::optional<Decision> {
    std::size_t var = model.end_form(h).var;
    if (SearchModel::decided_sign(path, var) != 0) return std::nullopt;
    Decision d;
    d.kind = Decision::Kind::sign;
    d.subject = var;
    return d;
  };
  auto member = [&](std::size_t k, std::size_t v) {
    Decision d;
    d.kind = Decision::Kind::member;
    d.subject = k;
    d.vertex = v;
    return d;
  };
  for (std::size_t k = 0; k < model.cycles().size(); ++k) {
    const auto& c = model.cycles()[k];
    Rational h = model.phi_value(x, c.sub.vertices.front());
    for (auto v : c.sub.vertices) h = std::min(h, model.phi_value(x, v));
    bool ok = true;
    Rational deg = 0;
    for (auto v : c.inner)
      if (model.phi_value(x, v) == h) ok = false;
    for (std::size_t i = 0; i < c.boundary.size(); ++i) {
      if (model.phi_value(x, c.boundary[i]) != h) continue;
      Rational here = 0;
      for (const auto& e : c.exits[i]) {
        Rational s = model.end_value(x, e);
        if (s < 0) here -= s;
      }
      if (here < 1) ok = false;
      deg += here;
    }
    if (deg < 2) ok = false;
    if (ok) continue;
    for (std::size_t i = 0; i < c.boundary.size(); ++i) {
      std::size_t v = c.boundary[i];
      if (model.phi_value(x, v) != h) continue;
      if (SearchModel::membership(path, k, v) < 0) return member(k, v);
      for (const auto& e : c.exits[i])
        if (auto d = undecided_sign(e)) return d;
    }
    for (std::size_t i = 0; i < c.boundary.size(); ++i)
      if (SearchModel::membership(path, k, c.boundary[i]) < 0) return member(k, c.boundary[i]);
    for (std::size_t i = 0; i < c.boundary.size(); ++i) {
      if (SearchModel::membership(path, k, c.boundary[i]) != 1) continue;
      for (const auto& e : c.exits[i])
        if (auto d = undecided_sign(e)) return d;
    }
    throw std::logic_error("cycle condition fails although every choice is settled");
  }
  for (std::size_t v = 0; v < b.vertices.size(); ++v) {
    if (model.anchored(v)) continue;
    bool has_negative = false;
    for (const auto& h : b.star(v))
      if (!h.is_leaf() && model.end_value(x, h) < 0) has_negative = true;
    if (has_negative) continue;
    for (const auto& h : b.star(v))
      if (!h.is_leaf())
        if (auto d = undecided_sign(h)) return d;
    throw std::logic_error("local minimum although every sign is settled");
  }
  for (auto var : model.slope_vars()) {
    if (abs(x[var]) >= 1 || SearchModel::decided_sign(path, var) != 0) continue;
    Decision d;
    d.kind = Decision::Kind::sign;
    d.subject = var;
    return d;
  }
  for (auto var : model.slope_vars()) {
    if (is_integer(x[var])) continue;
    Decision d;
    d.kind = Decision::Kind::split;
    d.subject = var;
    d.pivot = floor_of(x[var]);
    return d;
  }
  return std::nullopt;
}

inline std::string farkas_note(const SearchModel& model, const LinearSystem& sys, const QVec& y) {
  for (std::size_t i = 0; i < sys.rows.size(); ++i) {
    if (y[i] == 0 || sys.rows[i].label.rfind("cycdeg:", 0) != 0) continue;
    std::size_t k = std::stoul(sys.rows[i].label.substr(7));
    LinearSystem rest;
    rest.nvars = sys.nvars;
    for (std::size_t j = 0; j < sys.rows.size(); ++j)
      if (j != i) rest.rows.push_back(sys.rows[j]);
    QVec objective = sys.rows[i].a;
    for (auto& c : objective) c = -c;
    auto sup = maximize(rest, objective);
    std::string ids;
    for (auto v : model.cycles()[k].sub.vertices) ids += (ids.empty() ? "" : ",") + model.graph().base.vertices[v].id;
    std::string bound = sup ? to_string(floor_of(*sup)) : std::string("unbounded");
    return "cycle " + std::to_string(k) + " {" + ids + "}: deg(D_phi) <= " + bound + " (required >= 2)";
  }
  std::set<std::string> kinds;
  for (std::size_t i = 0; i < sys.rows.size(); ++i)
    if (y[i] != 0) kinds.insert(sys.rows[i].label.substr(0, sys.rows[i].label.find(':')));
  std::string out = "infeasible linear system over rows:";
  for (const auto& k : kinds) out += " " + k;
  return out;
}

}  // namespace detail

// Depth-first branch and bound. A Sat leaf stops the search; otherwise every
// leaf is refuted and the leaves form the certificate.
inline SearchResult run_search(const SearchModel& model, const SearchOptions& opt) {
  SearchResult res;
  ObstructionCertificate cert;
  cert.direction = model.direction();
  cert.mode = model.mode();
  cert.pruning = model.pruning();
  cert.slope_bound = model.slope_bound();
  for (const auto& c : model.cycles()) {
    std::vector<std::string> ids;
    for (auto v : c.sub.vertices) ids.push_back(model.graph().base.vertices[v].id);
    cert.cycles.push_back(ids);
  }
  std::vector<std::vector<Decision>> stack = {{}};
  while (!stack.empty()) {
    if (res.nodes >= opt.node_cap) {
      res.status = SearchStatus::indeterminate;
      res.reason = "node cap " + std::to_string(opt.node_cap) + " reached";
      return res;
    }
    ++res.nodes;
    std::vector<Decision> path = std::move(stack.back());
    stack.pop_back();
    if (auto r = model.structural(path)) {
      CertificateCase cc;
      for (const auto& d : path) cc.path.push_back(model.named(d));
      cc.witness.kind = CaseWitness::Kind::structural;
      cc.witness.reason = model.named(*r);
      cc.witness.note = model.describe(*r);
      cert.cases.push_back(std::move(cc));
      continue;
    }
    LinearSystem sys = model.system(path);
    Feasibility f = solve(sys);
    if (!f.feasible) {
      CertificateCase cc;
      for (const auto& d : path) cc.path.push_back(model.named(d));
      cc.witness.kind = CaseWitness::Kind::farkas;
      for (std::size_t i = 0; i < sys.rows.size(); ++i)
        if (f.multipliers[i] != 0) cc.witness.multipliers.emplace_back(sys.rows[i].label, f.multipliers[i]);
      cc.witness.note = detail::farkas_note(model, sys, f.multipliers);
      cert.cases.push_back(std::move(cc));
      continue;
    }
    auto branch = detail::next_branch(model, path, f.x);
    if (!branch) {
      res.status = SearchStatus::sat;
      const AbstractGraph& b = model.graph().base;
      if (model.mode() == SearchMode::stable) {
        RelaxedPLFunction r;
        for (std::size_t v = 0; v < b.vertices.size(); ++v) r.values.push_back(model.phi_value(f.x, v));
        r.end_slopes.assign(b.edges.size(), {Integer(0), Integer(0)});
        for (std::size_t e = 0; e < b.edges.size(); ++e)
          if (model.flat_edge(e))
            for (int end = 0; end < 2; ++end)
              r.end_slopes[e][end] = model.end_value(f.x, HalfEdge{HalfEdge::Kind::edge, e, end}).get_num();
        for (std::size_t l = 0; l < b.leaves.size(); ++l)
          r.leaf_slopes.push_back(model.flat(HalfEdge{HalfEdge::Kind::leaf, l, 0}) ? 1 : 0);
        res.relaxed = r;
      } else {
        PLFunction w;
        for (std::size_t v = 0; v < b.vertices.size(); ++v) w.values.push_back(model.phi_value(f.x, v));
        for (std::size_t l = 0; l < b.leaves.size(); ++l)
          w.leaf_slopes.push_back(model.flat(HalfEdge{HalfEdge::Kind::leaf, l, 0}) ? 1 : 0);
        res.witness = w;
      }
      return res;
    }
    // Explore the branch suggested by x first; push it last.
    Decision d = *branch;
    bool prefer_second = true;
    if (d.kind == Decision::Kind::sign) prefer_second = f.x[d.subject] >= 0;
    if (d.kind == Decision::Kind::member) prefer_second = false;
    if (d.kind == Decision::Kind::split) prefer_second = f.x[d.subject] - d.pivot > Rational(1, 2);
    auto other = path;
    other.push_back(detail::with_branch(d, !prefer_second));
    path.push_back(detail::with_branch(d, prefer_second));
    stack.push_back(std::move(other));
    stack.push_back(std::move(path));
  }
  res.status = SearchStatus::unsat;
  res.certificate = std::move(cert);
  return res;
}

// Sat witnesses are replayed through check_theorem1 on the subdivided graph.
inline SearchResult phi_search_stable(const ParamMap& p, const ZVec& m, const ParamChoice& choice,
                                      const SearchOptions& opt = {}) {
  EmbeddedGraph g = realize(p);
  SearchModel model(g, m, SearchMode::stable, opt);
  SearchResult res = run_search(model, opt);
  if (res.certificate) res.certificate->parameterization = choice;
  if (res.status == SearchStatus::sat) {
    auto [l, f] = realize_relaxed(g, m, *res.relaxed);
    res.level = l;
    res.witness = f;
    res.replay = check_theorem1(subdivide(g, l), f, m, opt.gamma_budget);
  }
  return res;
}

inline SearchResult phi_search_discrete(const ParamMap& p, const ZVec& m, int l, const ParamChoice& choice,
                                        const SearchOptions& opt = {}) {
  EmbeddedGraph g = subdivide(realize(p), l);
  SearchModel model(g, m, SearchMode::discrete, opt);
  SearchResult res = run_search(model, opt);
  res.level = l;
  if (res.certificate) {
    res.certificate->parameterization = choice;
    res.certificate->level = l;
  }
  if (res.status == SearchStatus::sat) res.replay = check_theorem1(g, *res.witness, m, opt.gamma_budget);
  return res;
}

}  // namespace troplift
