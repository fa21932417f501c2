#pragma once

#include "troplift/search.hpp"

#include <memory>
#include <mutex>
#include <thread>

namespace troplift {

// Normals of the affine spans of the fundamental cycles, primitive and up to sign.
inline std::vector<ZVec> candidate_directions(const EmbeddedGraph& g) {
  std::vector<ZVec> out;
  for (const auto& cyc : cycle_basis(g.base)) {
    ZMatrix rows;
    const QVec& p0 = g.positions[cyc.vertices.front()];
    for (auto v : cyc.vertices) {
      QVec d = g.positions[v] - p0;
      Integer den = 1;
      for (const auto& x : d) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
      ZVec row;
      for (const auto& x : d) row.push_back(Integer(x * den));
      if (!is_zero(row)) rows.push_back(row);
    }
    for (auto m : integer_kernel(rows, static_cast<std::size_t>(g.dim))) {
      m = sign_normalized(primitive_of(m));
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
  }
  return out;
}

namespace detail {

inline Subgraph map_by_id(const AbstractGraph& from, const AbstractGraph& to, const Subgraph& s) {
  Subgraph out;
  for (auto v : s.vertices) out.vertices.push_back(to.find_vertex(from.vertices[v].id));
  for (auto e : s.edges) out.edges.push_back(to.find_edge(from.edges[e].id));
  for (auto l : s.leaves) out.leaves.push_back(to.find_leaf(from.leaves[l].id));
  out.normalize();
  return out;
}

inline std::optional<Subgraph> component_containing(const AbstractGraph& g, const Subgraph& s, std::size_t v) {
  for (auto& c : components(g, s))
    if (c.has_vertex(v)) return c;
  return std::nullopt;
}

}  // namespace detail

// Whether the minimum of dist(w, gamma) over the boundary points w of the
// level component containing gamma is attained at least twice.
inline bool well_spaced_check(const EmbeddedGraph& g, const ZVec& m, const Rational& c, const Subgraph& gamma) {
  const AbstractGraph& b = g.base;
  for (std::size_t v = 0; v < b.vertices.size(); ++v) {
    if (b.degree(v) != 2 && b.degree(v) != 3)
      throw PreconditionError("vertex '" + b.vertices[v].id + "' has degree outside {2,3}");
    if (b.vertices[v].genus != 0) throw PreconditionError("vertex '" + b.vertices[v].id + "' has positive genus");
  }
  if (gamma.vertices.empty() || !gamma.leaves.empty()) throw PreconditionError("gamma must be a nonempty bounded subgraph");
  auto st = structure_checks(b, gamma);
  if (!st.complement_is_forest) throw PreconditionError("complement of gamma is not a forest");
  if (!st.two_vertex_connected) throw PreconditionError("gamma is not 2-vertex-connected");
  if (st.has_one_valent_vertex) throw PreconditionError("gamma has a 1-valent vertex");
  LevelSet ls = level_preimage(g, m, c);
  const AbstractGraph& h = ls.host.base;
  Subgraph in_host = detail::map_by_id(b, h, gamma);
  for (auto e : in_host.edges)
    if (!ls.preimage.has_edge(e)) throw PreconditionError("gamma is not contained in the level set");
  auto comp = detail::component_containing(h, ls.preimage, in_host.vertices.front());
  if (!comp) throw PreconditionError("gamma is not contained in the level set");
  auto bd = boundary(h, *comp);
  for (auto v : in_host.vertices)
    if (!comp->has_vertex(v) || std::binary_search(bd.begin(), bd.end(), v))
      throw PreconditionError("gamma is not inside the interior of its level component");
  if (bd.empty()) return false;
  std::vector<Rational> dist;
  for (auto w : bd) {
    auto d = metric_distance(h, w, in_host, &*comp);
    if (d) dist.push_back(*d);
  }
  if (dist.empty()) return false;
  Rational least = *std::min_element(dist.begin(), dist.end());
  return std::count(dist.begin(), dist.end(), least) >= 2;
}

// False iff some level component at c with a cycle is attached to the rest of
// the graph through a single trivalent vertex.
inline bool weak_well_spaced_check(const EmbeddedGraph& g, const ZVec& m, const Rational& c) {
  for (const auto& v : g.base.vertices)
    if (v.genus != 0) throw PreconditionError("vertex '" + v.id + "' has positive genus");
  LevelSet ls = level_preimage(g, m, c);
  const AbstractGraph& h = ls.host.base;
  for (const auto& comp : components(h, ls.preimage)) {
    if (first_betti(h, comp) == 0) continue;
    auto bd = boundary(h, comp);
    if (bd.size() == 1 && h.degree(bd.front()) == 3) return false;
  }
  return true;
}

struct CertificateCheck {
  bool valid = false;
  std::string reason;
};

namespace detail {

inline CertificateCheck reject(std::string why) { return {false, std::move(why)}; }

// Every internal node branches on one subject with both outcomes present, and
// every case path ends at a leaf.
inline bool covers(const std::vector<std::vector<Decision>>& paths, std::vector<std::size_t> idx, std::size_t depth,
                   std::string& why) {
  if (idx.empty()) {
    why = "empty branch";
    return false;
  }
  for (auto i : idx)
    if (paths[i].size() == depth) {
      if (idx.size() != 1) {
        why = "overlapping cases at depth " + std::to_string(depth);
        return false;
      }
      return true;
    }
  const Decision& head = paths[idx.front()][depth];
  std::vector<std::size_t> lo, hi;
  for (auto i : idx) {
    const Decision& d = paths[i][depth];
    if (!d.same_subject(head)) {
      why = "cases disagree on the decision at depth " + std::to_string(depth);
      return false;
    }
    (d.second ? hi : lo).push_back(i);
  }
  if (lo.empty() || hi.empty()) {
    why = "a branch is missing at depth " + std::to_string(depth);
    return false;
  }
  return covers(paths, lo, depth + 1, why) && covers(paths, hi, depth + 1, why);
}

}  // namespace detail

// Rebuilds the row systems from the graph alone and re-checks the case tree
// and every leaf by exact arithmetic. The search itself is not consulted.
inline CertificateCheck validate_certificate(const ObstructionCertificate& cert,
                                             std::shared_ptr<const EmbeddedGraph> target) {
  using detail::reject;
  const AbstractGraph& t = target->base;
  if (cert.direction.size() != static_cast<std::size_t>(target->dim) || !is_primitive(cert.direction))
    return reject("direction is not a primitive vector of the ambient lattice");
  const ParamChoice& ch = cert.parameterization;
  if (ch.edge_parts.size() != t.edges.size() || ch.leaf_parts.size() != t.leaves.size() ||
      ch.genus_marks.size() != t.vertices.size())
    return reject("parameterization does not match the graph");
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    int sum = 0;
    for (int x : ch.edge_parts[e]) {
      if (x <= 0) return reject("nonpositive part on edge '" + t.edges[e].id + "'");
      sum += x;
    }
    if (sum != t.edges[e].multiplicity) return reject("parts do not sum to the multiplicity of '" + t.edges[e].id + "'");
  }
  for (std::size_t l = 0; l < t.leaves.size(); ++l) {
    int sum = 0;
    for (int x : ch.leaf_parts[l]) {
      if (x <= 0) return reject("nonpositive part on leaf '" + t.leaves[l].id + "'");
      sum += x;
    }
    if (sum != t.leaves[l].multiplicity) return reject("parts do not sum to the multiplicity of '" + t.leaves[l].id + "'");
  }
  for (int gm : ch.genus_marks)
    if (gm < 0) return reject("negative genus mark");
  if (cert.level < 1) return reject("level must be positive");
  if (cert.mode == SearchMode::stable && cert.level != 1) return reject("stable certificates carry level 1");

  ParamMap p = build_param_map(target, ch);
  EmbeddedGraph g = realize(p);
  if (cert.mode == SearchMode::discrete) g = subdivide(g, cert.level);
  SearchOptions opt;
  opt.pruning = cert.pruning;
  opt.slope_bound = cert.slope_bound;
  std::unique_ptr<SearchModel> model;
  try {
    model = std::make_unique<SearchModel>(g, cert.direction, cert.mode, opt);
  } catch (const PreconditionError& e) {
    return reject(e.what());
  }
  if (model->pruning() != cert.pruning) return reject("pruning rows need every genus mark to be 0");
  if (cert.mode == SearchMode::discrete && model->slope_bound() != cert.slope_bound)
    return reject("slope bound mismatch");
  if (cert.cycles.size() != model->cycles().size()) return reject("constrained cycles do not match the graph");
  for (std::size_t k = 0; k < cert.cycles.size(); ++k) {
    std::vector<std::string> ids;
    for (auto v : model->cycles()[k].sub.vertices) ids.push_back(g.base.vertices[v].id);
    if (ids != cert.cycles[k]) return reject("constrained cycle " + std::to_string(k) + " does not match the graph");
  }
  if (cert.cases.empty()) return reject("no cases");

  std::vector<std::vector<Decision>> paths;
  for (std::size_t i = 0; i < cert.cases.size(); ++i) {
    std::vector<Decision> path;
    for (const auto& nd : cert.cases[i].path) {
      auto d = model->resolve(nd);
      if (!d) return reject("case " + std::to_string(i) + ": unknown decision '" + nd.kind + " " + nd.subject + "'");
      path.push_back(*d);
    }
    paths.push_back(std::move(path));
  }
  std::vector<std::size_t> all(paths.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::string why;
  if (!detail::covers(paths, all, 0, why)) return reject("case split does not cover: " + why);

  for (std::size_t i = 0; i < cert.cases.size(); ++i) {
    const CaseWitness& w = cert.cases[i].witness;
    std::string where = "case " + std::to_string(i) + ": ";
    if (w.kind == CaseWitness::Kind::structural) {
      if (!w.reason) return reject(where + "structural case without a reason");
      auto r = model->resolve(*w.reason);
      if (!r || !model->reason_holds(paths[i], *r)) return reject(where + "stated reason does not hold");
      continue;
    }
    LinearSystem sys = model->system(paths[i]);
    QVec y(sys.rows.size(), 0);
    Rational total = 0;
    for (const auto& [label, value] : w.multipliers) {
      std::size_t row = npos;
      for (std::size_t j = 0; j < sys.rows.size(); ++j)
        if (sys.rows[j].label == label) row = j;
      if (row == npos) return reject(where + "unknown row '" + label + "'");
      y[row] += value;
      total += value;
    }
    if (total != 1) return reject(where + "multipliers do not sum to 1");
    if (!is_infeasibility_witness(sys, y)) return reject(where + "multipliers do not certify infeasibility");
  }
  return {true, "ok"};
}

enum class ObstructionStatus { obstructed, not_obstructed, indeterminate };

inline const char* to_string(ObstructionStatus s) {
  switch (s) {
    case ObstructionStatus::obstructed: return "Obstructed";
    case ObstructionStatus::not_obstructed: return "NotObstructed";
    default: return "Indeterminate";
  }
}

struct ObstructOptions {
  std::vector<ZVec> extra_directions;
  SearchOptions search;
  unsigned jobs = 1;
};

struct ObstructionLeg {
  std::size_t parameterization = 0;
  ZVec direction;
  SearchResult result;
};

struct ObstructionVerdict {
  ObstructionStatus status = ObstructionStatus::indeterminate;
  std::size_t parameterizations = 0;
  std::size_t abstract_classes = 0;
  std::vector<ZVec> directions;
  std::vector<ObstructionLeg> legs;  // per parameterization: directions in order, up to the first Unsat
  std::string report;
};

inline ObstructionVerdict obstruct(std::shared_ptr<const EmbeddedGraph> target, int genus,
                                   const ObstructOptions& opt = {}) {
  ObstructionVerdict out;
  Enumeration en;
  try {
    en = enumerate_parameterizations(target, genus);
  } catch (const PreconditionError& e) {
    out.report = e.what();
    return out;
  }
  out.parameterizations = en.maps.size();
  out.abstract_classes = en.abstract_classes;
  if (en.maps.empty()) {
    out.status = ObstructionStatus::obstructed;
    out.report = "no tropical parameterization of genus " + std::to_string(genus) + " exists";
    return out;
  }
  out.directions = candidate_directions(*target);
  for (const auto& m : opt.extra_directions) {
    ZVec d = sign_normalized(primitive_of(m));
    if (std::find(out.directions.begin(), out.directions.end(), d) == out.directions.end()) out.directions.push_back(d);
  }

  std::size_t np = en.maps.size(), nd = out.directions.size();
  std::vector<std::optional<SearchResult>> grid(np * nd);
  auto run_leg = [&](std::size_t i) {
    std::size_t pi = i / nd, di = i % nd;
    grid[i] = phi_search_stable(en.maps[pi], out.directions[di], en.choices[pi], opt.search);
  };
  if (opt.jobs > 1 && np * nd > 1) {
    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&]() {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next == grid.size()) return;
          i = next++;
        }
        run_leg(i);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<std::size_t>(opt.jobs, grid.size()); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::size_t obstructed = 0, unobstructed = 0;
  for (std::size_t pi = 0; pi < np; ++pi) {
    bool blocked = false, all_sat = true;
    for (std::size_t di = 0; di < nd && !blocked; ++di) {
      std::size_t i = pi * nd + di;
      if (!grid[i]) run_leg(i);
      SearchResult& r = *grid[i];
      if (r.status == SearchStatus::unsat) blocked = true;
      if (r.status != SearchStatus::sat) all_sat = false;
      out.legs.push_back({pi, out.directions[di], std::move(r)});
    }
    if (blocked) ++obstructed;
    else if (all_sat) ++unobstructed;
  }
  if (obstructed == np) {
    out.status = ObstructionStatus::obstructed;
    out.report = "every parameterization is refuted by some direction";
  } else if (unobstructed == np) {
    out.status = ObstructionStatus::not_obstructed;
    out.report = "the necessary conditions hold for every parameterization and candidate direction; "
                 "this does not prove that a lift exists";
  } else {
    out.report = std::to_string(np - obstructed - unobstructed) + " parameterization(s) undecided, " +
                 std::to_string(unobstructed) + " passing";
  }
  if (nd == 0 && out.status != ObstructionStatus::obstructed) out.report += " (no candidate directions)";
  return out;
}

}  // namespace troplift
