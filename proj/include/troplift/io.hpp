#pragma once

// JSON formats for graphs, piecewise-linear functions and certificates.
// Rationals are always strings "p/q"; no floats anywhere.

#include "troplift/obstruction.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>

namespace troplift {

using Json = nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedGraph {
  bool abstract = false;
  EmbeddedGraph graph;  // positions and leaf directions empty when abstract
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first `"id": "<id>"` in the text, if any.
inline std::optional<std::size_t> line_of_id(const std::string& text, const std::string& id) {
  std::size_t pos = 0;
  std::string needle = "\"" + id + "\"";
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    std::size_t before = text.rfind("\"id\"", pos);
    if (before != std::string::npos && text.find_first_not_of(" \t\r\n:", before + 4) == pos)
      return line_of_offset(text, pos);
    pos += needle.size();
  }
  return std::nullopt;
}

// Attach a line number to a message that quotes an element id.
inline std::string anchored(const std::string& text, const std::string& msg) {
  auto open = msg.find('\'');
  if (open != std::string::npos) {
    auto close = msg.find('\'', open + 1);
    if (close != std::string::npos)
      if (auto line = line_of_id(text, msg.substr(open + 1, close - open - 1)))
        return "line " + std::to_string(*line) + ": " + msg;
  }
  return msg;
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedInput("line " + std::to_string(line_of_offset(text, e.byte)) + ": JSON syntax error: " + e.what());
  }
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw MalformedInput(where + ": missing field '" + key + "'");
  return obj.at(key);
}

inline std::string str_field(const Json& obj, const char* key, const std::string& where) {
  const Json& j = field(obj, key, where);
  if (!j.is_string()) throw MalformedInput(where + ": field '" + std::string(key) + "' must be a string");
  return j.get<std::string>();
}

inline long int_value(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw MalformedInput(where + ": expected an integer");
  return j.get<long>();
}

inline Rational rational_value(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw MalformedInput(where + ": rationals are written as \"p/q\" strings");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const MalformedInput& e) {
    throw MalformedInput(where + ": " + e.what());
  }
}

inline ZVec zvec_value(const Json& j, const std::string& where) {
  if (!j.is_array()) throw MalformedInput(where + ": expected an integer array");
  ZVec out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(Integer(int_value(j[i], where + "/" + std::to_string(i))));
  return out;
}

inline Json zvec_json(const ZVec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.get_si());
  return a;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// With require_balanced = false the balancing condition is left to the caller.
inline LoadedGraph parse_graph(const std::string& text, bool require_balanced = true) {
  using namespace detail;
  Json j = parse_json(text);
  if (!j.is_object()) throw MalformedInput("line 1: graph file must be a JSON object");
  LoadedGraph out;
  out.abstract = j.contains("abstract") && j["abstract"].is_boolean() && j["abstract"].get<bool>();
  EmbeddedGraph& g = out.graph;
  AbstractGraph& b = g.base;
  if (!out.abstract) {
    long dim = int_value(field(j, "ambient_dim", "/"), "/ambient_dim");
    if (dim < 1) throw MalformedInput("/ambient_dim: must be positive");
    g.dim = static_cast<int>(dim);
  }
  const Json& vs = field(j, "vertices", "/");
  if (!vs.is_array()) throw MalformedInput("/vertices: expected an array");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    std::string where = "/vertices/" + std::to_string(i);
    std::string id = str_field(vs[i], "id", where);
    long genus = vs[i].contains("genus") ? int_value(vs[i]["genus"], where + "/genus") : 0;
    b.vertices.push_back({id, static_cast<int>(genus)});
    if (out.abstract) continue;
    const Json& pos = field(vs[i], "position", where);
    if (!pos.is_array() || pos.size() != static_cast<std::size_t>(g.dim))
      throw MalformedInput(anchored(text, "vertex '" + id + "': position must have ambient_dim entries"));
    QVec p;
    for (std::size_t k = 0; k < pos.size(); ++k) p.push_back(rational_value(pos[k], where + "/position"));
    g.positions.push_back(p);
  }
  auto vertex_index = [&](const Json& ref, const std::string& where) {
    if (!ref.is_string()) throw MalformedInput(where + ": vertex references are ids");
    std::size_t v = b.find_vertex(ref.get<std::string>());
    if (v == npos) throw MalformedInput(anchored(text, where + ": unknown vertex '" + ref.get<std::string>() + "'"));
    return v;
  };
  const Json empty = Json::array();
  const Json& es = j.contains("edges") ? j["edges"] : empty;
  std::vector<std::optional<Rational>> given_length;
  for (std::size_t i = 0; i < es.size(); ++i) {
    std::string where = "/edges/" + std::to_string(i);
    std::string id = str_field(es[i], "id", where);
    const Json& ends = field(es[i], "ends", where);
    if (!ends.is_array() || ends.size() != 2) throw MalformedInput(anchored(text, "edge '" + id + "': ends must be a pair"));
    long mu = es[i].contains("multiplicity") ? int_value(es[i]["multiplicity"], where + "/multiplicity") : 1;
    std::optional<Rational> len;
    if (es[i].contains("length")) len = rational_value(es[i]["length"], where + "/length");
    given_length.push_back(len);
    b.edges.push_back({id, vertex_index(ends[0], where + "/ends"), vertex_index(ends[1], where + "/ends"),
                       static_cast<int>(mu), len.value_or(Rational(1))});
  }
  const Json& ls = j.contains("leaves") ? j["leaves"] : empty;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    std::string where = "/leaves/" + std::to_string(i);
    std::string id = str_field(ls[i], "id", where);
    long mu = ls[i].contains("multiplicity") ? int_value(ls[i]["multiplicity"], where + "/multiplicity") : 1;
    b.leaves.push_back({id, vertex_index(field(ls[i], "vertex", where), where + "/vertex"), static_cast<int>(mu)});
    if (out.abstract) continue;
    ZVec dir = zvec_value(field(ls[i], "direction", where), where + "/direction");
    if (dir.size() != static_cast<std::size_t>(g.dim))
      throw MalformedInput(anchored(text, "leaf '" + id + "': direction must have ambient_dim entries"));
    g.leaf_directions.push_back(dir);
  }
  try {
    b.validate();
    if (out.abstract) return out;
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      Edge& ed = b.edges[e];
      if (ed.multiplicity == 0) continue;
      Rational lat = g.lattice_length(e);
      Rational derived = lat / ed.multiplicity;
      if (given_length[e] && *given_length[e] != derived)
        throw MalformedInput("edge '" + ed.id + "': length " + to_string(*given_length[e]) +
                             " disagrees with lattice length / multiplicity = " + to_string(derived));
      ed.length = derived;
    }
    g.validate();
    auto bal = check_balanced(g);
    if (require_balanced && !bal.balanced) {
      std::size_t v = bal.unbalanced.front();
      throw MalformedInput("vertex '" + b.vertices[v].id + "' is not balanced: residual " +
                           to_string(bal.residuals[v]));
    }
  } catch (const MalformedInput& e) {
    throw MalformedInput(anchored(text, e.what()));
  } catch (const PreconditionError& e) {
    throw MalformedInput(anchored(text, e.what()));
  }
  return out;
}

inline LoadedGraph load_graph(const std::string& path, bool require_balanced = true) {
  return parse_graph(detail::read_file(path), require_balanced);
}

inline Json graph_json(const EmbeddedGraph& g, bool abstract = false) {
  const AbstractGraph& b = g.base;
  Json j;
  if (abstract) j["abstract"] = true;
  else j["ambient_dim"] = g.dim;
  j["vertices"] = Json::array();
  for (std::size_t v = 0; v < b.vertices.size(); ++v) {
    Json o{{"id", b.vertices[v].id}, {"genus", b.vertices[v].genus}};
    if (!abstract) {
      Json pos = Json::array();
      for (const auto& x : g.positions[v]) pos.push_back(to_string(x));
      o["position"] = pos;
    }
    j["vertices"].push_back(o);
  }
  j["edges"] = Json::array();
  for (const auto& e : b.edges) {
    Json o{{"id", e.id}, {"ends", {b.vertices[e.tail].id, b.vertices[e.head].id}}, {"multiplicity", e.multiplicity}};
    if (abstract || e.multiplicity == 0) o["length"] = to_string(e.length);
    j["edges"].push_back(o);
  }
  j["leaves"] = Json::array();
  for (std::size_t l = 0; l < b.leaves.size(); ++l) {
    Json o{{"id", b.leaves[l].id}, {"vertex", b.vertices[b.leaves[l].vertex].id},
           {"multiplicity", b.leaves[l].multiplicity}};
    if (!abstract) o["direction"] = detail::zvec_json(g.leaf_directions[l]);
    j["leaves"].push_back(o);
  }
  return j;
}

inline std::string save_graph(const EmbeddedGraph& g, bool abstract = false) { return graph_json(g, abstract).dump(2) + "\n"; }

// FNV-1a over the canonical serialization.
inline std::string graph_hash(const EmbeddedGraph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : save_graph(g)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << h;
  return ss.str();
}

inline PLFunction parse_function(const std::string& text, const AbstractGraph& g) {
  using namespace detail;
  Json j = parse_json(text);
  if (!j.is_object()) throw MalformedInput("line 1: function file must be a JSON object");
  if (j.contains("infinite") && j["infinite"].is_boolean() && j["infinite"].get<bool>()) return PLFunction::infinity();
  PLFunction f;
  f.values.assign(g.vertices.size(), 0);
  f.leaf_slopes.assign(g.leaves.size(), 0);
  const Json& vals = field(j, "values", "/");
  if (!vals.is_object()) throw MalformedInput("/values: expected an object keyed by vertex id");
  std::vector<bool> seen(g.vertices.size(), false);
  for (auto it = vals.begin(); it != vals.end(); ++it) {
    std::size_t v = g.find_vertex(it.key());
    if (v == npos) throw MalformedInput(anchored(text, "/values: unknown vertex '" + it.key() + "'"));
    f.values[v] = rational_value(it.value(), "/values/" + it.key());
    seen[v] = true;
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!seen[v]) throw MalformedInput("/values: no value for vertex '" + g.vertices[v].id + "'");
  if (j.contains("leaf_slopes")) {
    const Json& ls = j["leaf_slopes"];
    if (!ls.is_object()) throw MalformedInput("/leaf_slopes: expected an object keyed by leaf id");
    for (auto it = ls.begin(); it != ls.end(); ++it) {
      std::size_t l = g.find_leaf(it.key());
      if (l == npos) throw MalformedInput("/leaf_slopes: unknown leaf '" + it.key() + "'");
      f.leaf_slopes[l] = int_value(it.value(), "/leaf_slopes/" + it.key());
    }
  }
  return f;
}

inline Json function_json(const PLFunction& f, const AbstractGraph& g) {
  if (f.infinite) return Json{{"infinite", true}};
  Json j;
  j["values"] = Json::object();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) j["values"][g.vertices[v].id] = to_string(f.values[v]);
  j["leaf_slopes"] = Json::object();
  for (std::size_t l = 0; l < g.leaves.size(); ++l) j["leaf_slopes"][g.leaves[l].id] = f.leaf_slopes[l];
  return j;
}

inline Json relaxed_json(const RelaxedPLFunction& r, const AbstractGraph& g) {
  Json j;
  j["values"] = Json::object();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) j["values"][g.vertices[v].id] = to_string(r.values[v]);
  j["end_slopes"] = Json::object();
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (r.end_slopes[e][0] != 0 || r.end_slopes[e][1] != 0)
      j["end_slopes"][g.edges[e].id] = {r.end_slopes[e][0].get_si(), r.end_slopes[e][1].get_si()};
  j["leaf_slopes"] = Json::object();
  for (std::size_t l = 0; l < g.leaves.size(); ++l) j["leaf_slopes"][g.leaves[l].id] = r.leaf_slopes[l];
  return j;
}

inline Json divisor_json(const Divisor& d, const AbstractGraph& g) {
  Json j = Json::object();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) j[g.vertices[v].id] = d[v];
  return j;
}

// Certificates.

struct CertificateFile {
  ObstructionCertificate cert;
  std::string graph_hash;
  std::string tool_version;
};

inline Json choice_json(const ParamChoice& c, const AbstractGraph& t) {
  Json j;
  j["edge_parts"] = Json::object();
  for (std::size_t e = 0; e < t.edges.size(); ++e) j["edge_parts"][t.edges[e].id] = c.edge_parts[e];
  j["leaf_parts"] = Json::object();
  for (std::size_t l = 0; l < t.leaves.size(); ++l) j["leaf_parts"][t.leaves[l].id] = c.leaf_parts[l];
  j["genus"] = Json::object();
  for (std::size_t v = 0; v < t.vertices.size(); ++v) j["genus"][t.vertices[v].id] = c.genus_marks[v];
  return j;
}

inline Json certificate_json(const ObstructionCertificate& c, const EmbeddedGraph& target) {
  Json j;
  j["format"] = "troplift-certificate";
  j["version"] = 1;
  j["tool_version"] = tool_version;
  j["graph_hash"] = graph_hash(target);
  j["direction"] = detail::zvec_json(c.direction);
  j["mode"] = c.mode == SearchMode::stable ? "stable" : "discrete";
  j["level"] = c.level;
  j["pruning"] = c.pruning;
  j["slope_bound"] = c.slope_bound;
  j["parameterization"] = choice_json(c.parameterization, target.base);
  j["cycles"] = c.cycles;
  j["cases"] = Json::array();
  for (const auto& cc : c.cases) {
    Json path = Json::array();
    for (const auto& d : cc.path) {
      Json o{{"kind", d.kind}, {"subject", d.subject}, {"branch", d.branch}};
      if (d.kind == "member") o["vertex"] = d.vertex;
      if (d.kind == "split") o["pivot"] = to_string(d.pivot);
      path.push_back(o);
    }
    Json w;
    if (cc.witness.kind == CaseWitness::Kind::farkas) {
      w["type"] = "farkas";
      w["multipliers"] = Json::array();
      for (const auto& [label, y] : cc.witness.multipliers) w["multipliers"].push_back({label, to_string(y)});
    } else {
      w["type"] = "structural";
      w["reason"] = cc.witness.reason->kind;
      w["cycle"] = cc.witness.reason->cycle;
      w["vertex"] = cc.witness.reason->vertex;
    }
    w["violated"] = cc.witness.note;
    j["cases"].push_back({{"path", path}, {"witness", w}});
  }
  return j;
}

inline CertificateFile certificate_from_json(const Json& j, const AbstractGraph& t) {
  using namespace detail;
  if (!j.is_object() || !j.contains("format") || j["format"] != "troplift-certificate")
    throw MalformedInput("not a troplift certificate");
  CertificateFile out;
  ObstructionCertificate& c = out.cert;
  out.graph_hash = str_field(j, "graph_hash", "/");
  out.tool_version = j.value("tool_version", "");
  c.direction = zvec_value(field(j, "direction", "/"), "/direction");
  std::string mode = str_field(j, "mode", "/");
  if (mode != "stable" && mode != "discrete") throw MalformedInput("/mode: expected stable or discrete");
  c.mode = mode == "stable" ? SearchMode::stable : SearchMode::discrete;
  c.level = static_cast<int>(int_value(field(j, "level", "/"), "/level"));
  const Json& pr = field(j, "pruning", "/");
  if (!pr.is_boolean()) throw MalformedInput("/pruning: expected a boolean");
  c.pruning = pr.get<bool>();
  c.slope_bound = int_value(field(j, "slope_bound", "/"), "/slope_bound");
  const Json& pj = field(j, "parameterization", "/");
  auto parts_of = [&](const Json& obj, const std::string& id, const std::string& where) {
    if (!obj.is_object() || !obj.contains(id)) throw MalformedInput(where + ": missing '" + id + "'");
    std::vector<int> parts;
    for (const auto& x : obj[id]) parts.push_back(static_cast<int>(int_value(x, where + "/" + id)));
    return parts;
  };
  for (const auto& e : t.edges) c.parameterization.edge_parts.push_back(parts_of(field(pj, "edge_parts", "/parameterization"), e.id, "/parameterization/edge_parts"));
  for (const auto& l : t.leaves) c.parameterization.leaf_parts.push_back(parts_of(field(pj, "leaf_parts", "/parameterization"), l.id, "/parameterization/leaf_parts"));
  const Json& gj = field(pj, "genus", "/parameterization");
  for (const auto& v : t.vertices) {
    if (!gj.is_object() || !gj.contains(v.id)) throw MalformedInput("/parameterization/genus: missing '" + v.id + "'");
    c.parameterization.genus_marks.push_back(static_cast<int>(int_value(gj[v.id], "/parameterization/genus")));
  }
  const Json& cyc = field(j, "cycles", "/");
  if (!cyc.is_array()) throw MalformedInput("/cycles: expected an array");
  for (const auto& cy : cyc) {
    std::vector<std::string> ids;
    for (const auto& id : cy) {
      if (!id.is_string()) throw MalformedInput("/cycles: expected vertex ids");
      ids.push_back(id.get<std::string>());
    }
    c.cycles.push_back(ids);
  }
  const Json& cases = field(j, "cases", "/");
  if (!cases.is_array()) throw MalformedInput("/cases: expected an array");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::string where = "/cases/" + std::to_string(i);
    CertificateCase cc;
    const Json& path = field(cases[i], "path", where);
    if (!path.is_array()) throw MalformedInput(where + "/path: expected an array");
    for (const auto& dj : path) {
      NamedDecision d;
      d.kind = str_field(dj, "kind", where + "/path");
      d.subject = str_field(dj, "subject", where + "/path");
      d.branch = str_field(dj, "branch", where + "/path");
      if (d.kind == "member") d.vertex = str_field(dj, "vertex", where + "/path");
      if (d.kind == "split") {
        std::string pivot = str_field(dj, "pivot", where + "/path");
        Rational q = parse_rational(pivot);
        if (!is_integer(q)) throw MalformedInput(where + "/path: pivot must be an integer");
        d.pivot = q.get_num();
      }
      cc.path.push_back(d);
    }
    const Json& w = field(cases[i], "witness", where);
    std::string type = str_field(w, "type", where + "/witness");
    cc.witness.note = w.value("violated", "");
    if (type == "farkas") {
      cc.witness.kind = CaseWitness::Kind::farkas;
      const Json& ms = field(w, "multipliers", where + "/witness");
      if (!ms.is_array()) throw MalformedInput(where + "/witness/multipliers: expected an array");
      for (const auto& m : ms) {
        if (!m.is_array() || m.size() != 2 || !m[0].is_string())
          throw MalformedInput(where + "/witness/multipliers: expected [label, \"p/q\"] pairs");
        cc.witness.multipliers.emplace_back(m[0].get<std::string>(), rational_value(m[1], where + "/witness/multipliers"));
      }
    } else if (type == "structural") {
      cc.witness.kind = CaseWitness::Kind::structural;
      NamedReason r;
      r.kind = str_field(w, "reason", where + "/witness");
      r.cycle = static_cast<std::size_t>(int_value(field(w, "cycle", where + "/witness"), where + "/witness/cycle"));
      r.vertex = w.value("vertex", "");
      cc.witness.reason = r;
    } else {
      throw MalformedInput(where + "/witness/type: expected farkas or structural");
    }
    c.cases.push_back(std::move(cc));
  }
  return out;
}

// A single certificate, or every certificate of an obstruction bundle.
inline std::vector<CertificateFile> parse_certificates(const std::string& text, const AbstractGraph& t) {
  Json j = detail::parse_json(text);
  std::vector<CertificateFile> out;
  if (j.is_object() && j.value("format", "") == "troplift-obstruction") {
    const Json& certs = detail::field(j, "certificates", "/");
    for (const auto& c : certs) out.push_back(certificate_from_json(c, t));
    return out;
  }
  out.push_back(certificate_from_json(j, t));
  return out;
}

inline CertificateCheck validate_certificate_file(const CertificateFile& f, std::shared_ptr<const EmbeddedGraph> target) {
  if (f.graph_hash != graph_hash(*target)) return {false, "graph hash mismatch"};
  return validate_certificate(f.cert, std::move(target));
}

}  // namespace troplift
