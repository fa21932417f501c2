#include "troplift/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace troplift;

namespace {

enum Exit { ok = 0, fail = 1, undecided = 2, usage = 64, data_error = 65, no_input = 66, cant_create = 73 };

struct Output {
  bool json = false;
  Json doc = Json::object();
  std::vector<std::string> lines;

  void line(std::string s) { lines.push_back(std::move(s)); }
  int finish(int code) {
    if (json) {
      doc["exit_code"] = code;
      std::cout << doc.dump(2) << "\n";
    } else {
      for (const auto& l : lines) std::cout << l << "\n";
    }
    return code;
  }
};

ZVec parse_direction(const std::string& text) {
  ZVec m;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Rational q = parse_rational(item);
    if (!is_integer(q)) throw MalformedInput("direction entries must be integers");
    m.push_back(q.get_num());
  }
  if (m.empty() || is_zero(m)) throw MalformedInput("direction must be a nonzero integer vector");
  if (!is_primitive(m)) throw MalformedInput("direction " + to_string(m) + " is not primitive");
  return m;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::shared_ptr<const EmbeddedGraph> embedded(const std::string& path) {
  auto lg = load_graph(path);
  if (lg.abstract) throw MalformedInput("'" + path + "' is an abstract graph; an embedded graph is required");
  return std::make_shared<const EmbeddedGraph>(std::move(lg.graph));
}

void require_dim(const EmbeddedGraph& g, const ZVec& m) {
  if (m.size() != static_cast<std::size_t>(g.dim))
    throw MalformedInput("direction has " + std::to_string(m.size()) + " entries, graph lives in dimension " +
                         std::to_string(g.dim));
}

std::string divisor_line(const Divisor& d, const AbstractGraph& g) {
  std::string s;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (d[v] != 0) s += (s.empty() ? "" : " + ") + std::to_string(d[v]) + "*" + g.vertices[v].id;
  return s.empty() ? "0" : s;
}

std::string default_certificate_path(const std::string& graph) {
  return std::filesystem::path(graph).stem().string() + ".certificate.json";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << text;
}

Json search_json(const SearchResult& r, const EmbeddedGraph& g, const ZVec& m) {
  Json j;
  j["status"] = to_string(r.status);
  j["direction"] = detail::zvec_json(m);
  j["nodes"] = r.nodes;
  j["level"] = r.level;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.relaxed) j["relaxed_witness"] = relaxed_json(*r.relaxed, g.base);
  if (r.witness) j["witness"] = function_json(*r.witness, subdivide(g.base, r.level));
  if (r.replay) {
    j["replay"] = {{"ok", r.replay->ok()},
                   {"gammas_checked", r.replay->gammas_checked},
                   {"gammas_indeterminate", r.replay->gammas_indeterminate},
                   {"failures", r.replay->failures}};
  }
  if (r.certificate) j["cases"] = r.certificate->cases.size();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"troplift: combinatorial obstructions to lifting tropical curves"};
  app.require_subcommand(1);
  Output out;
  app.add_flag("--json", out.json, "machine-readable output");

  std::string graph_path, second_path, m_text, c_text = "0", gamma_text, directions_path, cert_out;
  int genus = 0, level = 0;
  bool stable = false, pruning = false;
  std::size_t node_cap = SearchOptions{}.node_cap;
  unsigned jobs = 1;

  auto* check = app.add_subcommand("check", "graph checks");
  check->require_subcommand(1);
  auto* balance = check->add_subcommand("balance", "check the balancing condition");
  balance->add_option("graph", graph_path)->required();
  auto* ws = check->add_subcommand("well-spaced", "well-spacedness of a cycle in a level set");
  ws->add_option("graph", graph_path)->required();
  ws->add_option("--m", m_text, "direction, comma separated")->required();
  ws->add_option("--c", c_text, "level");
  ws->add_option("--gamma", gamma_text, "vertex ids of the cycle, comma separated")->required();
  auto* wws = check->add_subcommand("weak-well-spaced", "single trivalent boundary test");
  wws->add_option("graph", graph_path)->required();
  wws->add_option("--m", m_text)->required();
  wws->add_option("--c", c_text);

  auto* divisor = app.add_subcommand("divisor", "divisors on the graph");
  divisor->require_subcommand(1);
  auto* canonical = divisor->add_subcommand("canonical", "canonical divisor");
  canonical->add_option("graph", graph_path)->required();
  auto* lap = divisor->add_subcommand("laplacian", "Laplacian of a piecewise-linear function");
  lap->add_option("graph", graph_path)->required();
  lap->add_option("function", second_path)->required();

  auto* params = app.add_subcommand("params", "tropical parameterizations");
  params->require_subcommand(1);
  auto* enumerate = params->add_subcommand("enumerate", "enumerate parameterizations of a given genus");
  enumerate->add_option("graph", graph_path)->required();
  enumerate->add_option("--genus", genus)->required()->check(CLI::NonNegativeNumber);

  auto* search = app.add_subcommand("search", "search for the functions phi_m");
  search->require_subcommand(1);
  auto* phi = search->add_subcommand("phi", "search for phi_m on the identity parameterization");
  phi->add_option("graph", graph_path)->required();
  phi->add_option("--m", m_text)->required();
  auto* lopt = phi->add_option("--l", level, "discrete mode on the l-fold subdivision")->check(CLI::PositiveNumber);
  phi->add_flag("--stable", stable, "subdivision-stable mode (default)")->excludes(lopt);
  phi->add_flag("--pruning", pruning, "add descending-path rows");
  phi->add_option("--node-cap", node_cap);
  phi->add_option("--certificate", cert_out, "write the certificate of an Unsat result here");

  auto* obs = app.add_subcommand("obstruct", "decide the obstruction over all parameterizations");
  obs->add_option("graph", graph_path)->required();
  obs->add_option("--genus", genus)->required()->check(CLI::NonNegativeNumber);
  obs->add_option("--directions", directions_path, "JSON array of extra directions");
  obs->add_option("--certificate", cert_out, "output path (default <graph>.certificate.json)");
  obs->add_flag("--pruning", pruning);
  obs->add_option("--node-cap", node_cap);
  obs->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "validate a certificate against a graph");
  certify->add_option("graph", graph_path)->required();
  certify->add_option("certificate", second_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (balance->parsed()) {
      auto lg = load_graph(graph_path, false);
      if (lg.abstract) throw MalformedInput("abstract graphs carry no embedding to balance");
      auto rep = check_balanced(lg.graph);
      Json bad = Json::object();
      for (auto v : rep.unbalanced) bad[lg.graph.base.vertices[v].id] = detail::zvec_json(rep.residuals[v]);
      out.doc = {{"balanced", rep.balanced}, {"unbalanced", bad}};
      out.line(rep.balanced ? "balanced" : "not balanced");
      for (auto v : rep.unbalanced)
        out.line("  " + lg.graph.base.vertices[v].id + ": residual " + to_string(rep.residuals[v]));
      return out.finish(rep.balanced ? ok : fail);
    }
    if (ws->parsed() || wws->parsed()) {
      auto g = embedded(graph_path);
      ZVec m = parse_direction(m_text);
      require_dim(*g, m);
      Rational c = parse_rational(c_text);
      bool result;
      if (ws->parsed()) {
        Subgraph gamma;
        for (const auto& id : split_ids(gamma_text)) {
          std::size_t v = g->base.find_vertex(id);
          if (v == npos) throw MalformedInput("unknown vertex '" + id + "'");
          gamma.vertices.push_back(v);
        }
        gamma.normalize();
        for (std::size_t e = 0; e < g->base.edges.size(); ++e)
          if (gamma.has_vertex(g->base.edges[e].tail) && gamma.has_vertex(g->base.edges[e].head)) gamma.edges.push_back(e);
        result = well_spaced_check(*g, m, c, gamma);
      } else {
        result = weak_well_spaced_check(*g, m, c);
      }
      out.doc = {{"result", result}};
      out.line(result ? "true" : "false");
      return out.finish(result ? ok : fail);
    }
    if (canonical->parsed()) {
      auto lg = load_graph(graph_path);
      Divisor k = canonical_divisor(lg.graph.base);
      out.doc = {{"divisor", divisor_json(k, lg.graph.base)}, {"degree", k.degree()}};
      out.line("K = " + divisor_line(k, lg.graph.base));
      out.line("deg K = " + std::to_string(k.degree()));
      return out.finish(ok);
    }
    if (lap->parsed()) {
      auto lg = load_graph(graph_path);
      PLFunction f = parse_function(detail::read_file(second_path), lg.graph.base);
      Divisor d = laplacian(lg.graph.base, f);
      out.doc = {{"divisor", divisor_json(d, lg.graph.base)}, {"degree", d.degree()}};
      out.line("Delta(phi) = " + divisor_line(d, lg.graph.base));
      out.line("deg = " + std::to_string(d.degree()));
      return out.finish(ok);
    }
    if (enumerate->parsed()) {
      auto g = embedded(graph_path);
      Enumeration en = enumerate_parameterizations(g, genus);
      Json maps = Json::array();
      bool all_ok = true;
      for (std::size_t i = 0; i < en.maps.size(); ++i) {
        auto rep = verify_parameterization(en.maps[i]);
        all_ok = all_ok && rep.ok;
        maps.push_back({{"choice", choice_json(en.choices[i], g->base)}, {"valid", rep.ok}});
      }
      out.doc = {{"count", en.maps.size()}, {"abstract_classes", en.abstract_classes}, {"parameterizations", maps}};
      out.line(std::to_string(en.maps.size()) + " parameterization(s) of genus " + std::to_string(genus) + ", " +
               std::to_string(en.abstract_classes) + " up to automorphisms of the target");
      for (std::size_t i = 0; i < en.maps.size(); ++i) out.line("  " + std::to_string(i) + ": " + choice_json(en.choices[i], g->base).dump());
      return out.finish(all_ok ? ok : fail);
    }
    if (phi->parsed()) {
      auto g = embedded(graph_path);
      ZVec m = parse_direction(m_text);
      require_dim(*g, m);
      SearchOptions opt;
      opt.pruning = pruning;
      opt.node_cap = node_cap;
      ParamChoice choice;
      for (const auto& e : g->base.edges) choice.edge_parts.push_back({e.multiplicity});
      for (const auto& l : g->base.leaves) choice.leaf_parts.push_back({l.multiplicity});
      choice.genus_marks.assign(g->base.vertices.size(), 0);
      for (std::size_t v = 0; v < g->base.vertices.size(); ++v) choice.genus_marks[v] = g->base.vertices[v].genus;
      ParamMap p = build_param_map(g, choice);
      SearchResult r = level > 0 ? phi_search_discrete(p, m, level, choice, opt) : phi_search_stable(p, m, choice, opt);
      out.doc = search_json(r, realize(p), m);
      out.doc["mode"] = level > 0 ? "discrete" : "stable";
      out.line(std::string(to_string(r.status)) + (level > 0 ? " at level " + std::to_string(level) : " (stable)"));
      if (r.status == SearchStatus::sat && r.replay)
        out.line("witness on the " + std::to_string(r.level) + "-fold subdivision; replay " +
                 (r.replay->ok() ? "passes" : "FAILS"));
      if (r.status == SearchStatus::indeterminate) out.line(r.reason);
      if (r.certificate) {
        out.line(std::to_string(r.certificate->cases.size()) + " refuted cases");
        if (!cert_out.empty()) {
          write_text(cert_out, certificate_json(*r.certificate, *g).dump(2) + "\n");
          out.doc["certificate"] = cert_out;
          out.line("certificate written to " + cert_out);
        }
      }
      int code = r.status == SearchStatus::sat ? ok : r.status == SearchStatus::unsat ? fail : undecided;
      return out.finish(code);
    }
    if (obs->parsed()) {
      auto g = embedded(graph_path);
      ObstructOptions opt;
      opt.search.pruning = pruning;
      opt.search.node_cap = node_cap;
      opt.jobs = jobs;
      if (!directions_path.empty()) {
        Json dj = detail::parse_json(detail::read_file(directions_path));
        if (!dj.is_array()) throw MalformedInput("directions file must be a JSON array of integer arrays");
        for (std::size_t i = 0; i < dj.size(); ++i) {
          ZVec m = detail::zvec_value(dj[i], "/" + std::to_string(i));
          require_dim(*g, m);
          if (is_zero(m)) throw MalformedInput("/" + std::to_string(i) + ": direction must be nonzero");
          opt.extra_directions.push_back(m);
        }
      }
      ObstructionVerdict v = obstruct(g, genus, opt);
      Json legs = Json::array(), certs = Json::array();
      for (const auto& leg : v.legs) {
        Json lj = search_json(leg.result, *g, leg.direction);
        lj["parameterization"] = leg.parameterization;
        legs.push_back(lj);
        if (leg.result.certificate) certs.push_back(certificate_json(*leg.result.certificate, *g));
      }
      Json dirs = Json::array();
      for (const auto& d : v.directions) dirs.push_back(detail::zvec_json(d));
      out.doc = {{"verdict", to_string(v.status)}, {"report", v.report}, {"genus", genus},
                 {"parameterizations", v.parameterizations}, {"abstract_classes", v.abstract_classes},
                 {"directions", dirs}, {"legs", legs}};
      out.line(std::string(to_string(v.status)) + ": " + v.report);
      out.line(std::to_string(v.parameterizations) + " parameterization(s), " + std::to_string(v.directions.size()) +
               " candidate direction(s)");
      for (const auto& leg : v.legs)
        out.line("  parameterization " + std::to_string(leg.parameterization) + ", m = " + to_string(leg.direction) +
                 ": " + to_string(leg.result.status) +
                 (leg.result.certificate ? " (" + std::to_string(leg.result.certificate->cases.size()) + " cases)" : ""));
      if (!certs.empty() || v.status == ObstructionStatus::obstructed) {
        std::string path = cert_out.empty() ? default_certificate_path(graph_path) : cert_out;
        Json bundle = {{"format", "troplift-obstruction"}, {"verdict", to_string(v.status)}, {"genus", genus},
                       {"report", v.report}, {"certificates", certs}};
        write_text(path, bundle.dump(2) + "\n");
        out.doc["certificate"] = path;
        out.line("certificate written to " + path);
      }
      int code = v.status == ObstructionStatus::obstructed       ? fail
                 : v.status == ObstructionStatus::not_obstructed ? ok
                                                                 : undecided;
      return out.finish(code);
    }
    if (certify->parsed()) {
      auto g = embedded(graph_path);
      auto files = parse_certificates(detail::read_file(second_path), g->base);
      bool all = !files.empty();
      Json results = Json::array();
      for (std::size_t i = 0; i < files.size(); ++i) {
        auto chk = validate_certificate_file(files[i], g);
        all = all && chk.valid;
        results.push_back({{"valid", chk.valid}, {"reason", chk.reason}});
        out.line("certificate " + std::to_string(i) + ": " + (chk.valid ? "valid" : "INVALID: " + chk.reason));
      }
      out.doc = {{"valid", all}, {"certificates", results}};
      return out.finish(all ? ok : fail);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cant_create;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return no_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return data_error;
  }
  return usage;
}
