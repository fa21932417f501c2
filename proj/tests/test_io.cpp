#include "support.hpp"

#include <gtest/gtest.h>

using namespace troplift;
using namespace fixtures;

namespace {

std::string fixture(const std::string& name) { return std::string(TROPLIFT_FIXTURES) + "/" + name; }

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(GraphFile, RoundTripIsByteIdentical) {
  for (const auto& g : {elliptic(1, 2, 3, 1), g3(), trivalent_boundary(), triangle(), segment()}) {
    std::string text = save_graph(g);
    auto back = parse_graph(text);
    EXPECT_FALSE(back.abstract);
    EXPECT_EQ(save_graph(back.graph), text);
    EXPECT_EQ(graph_hash(back.graph), graph_hash(g));
  }
}

TEST(GraphFile, FixturesMatchBuilders) {
  struct Case {
    const char* file;
    EmbeddedGraph g;
  };
  for (const auto& c : std::vector<Case>{{"elliptic.json", elliptic(1, 2, 3, 1)},
                                         {"elliptic-bad.json", elliptic(1, 1, 3, 1)},
                                         {"g3.json", g3()},
                                         {"trivalent-boundary.json", trivalent_boundary()},
                                         {"triangle.json", triangle()},
                                         {"segment.json", segment()}}) {
    auto loaded = load_graph(fixture(c.file));
    EXPECT_EQ(save_graph(loaded.graph), save_graph(c.g)) << c.file;
  }
}

TEST(GraphFile, AbstractRoundTrip) {
  auto g = trivalent_boundary();
  std::string text = save_graph(g, true);
  auto back = parse_graph(text);
  EXPECT_TRUE(back.abstract);
  EXPECT_EQ(back.graph.base.edges.size(), g.base.edges.size());
  EXPECT_EQ(back.graph.base.edges[0].length, g.base.edges[0].length);
  EXPECT_EQ(save_graph(back.graph, true), text);
}

TEST(GraphFile, LengthsDerivedAndChecked) {
  auto j = graph_json(segment());
  j["edges"][0]["length"] = "2";
  EXPECT_NO_THROW(parse_graph(j.dump()));
  j["edges"][0]["length"] = "3";
  auto msg = message_of([&] { parse_graph(j.dump(2)); });
  EXPECT_NE(msg.find("disagrees"), std::string::npos);
  EXPECT_NE(msg.find("line "), std::string::npos);
}

TEST(GraphFile, Errors) {
  auto np = message_of([] { load_graph(fixture("invalid/nonprimitive-leaf.json")); });
  EXPECT_NE(np.find("'s1'"), std::string::npos) << np;
  EXPECT_NE(np.find("primitive"), std::string::npos) << np;

  auto syn = message_of([] { load_graph(fixture("invalid/syntax.json")); });
  EXPECT_NE(syn.find("line"), std::string::npos) << syn;
  EXPECT_THROW(load_graph(fixture("invalid/syntax.json")), MalformedInput);

  EXPECT_THROW(load_graph(fixture("invalid/unbalanced.json")), MalformedInput);
  auto loose = load_graph(fixture("invalid/unbalanced.json"), false);
  EXPECT_FALSE(check_balanced(loose.graph).balanced);

  EXPECT_THROW(load_graph(fixture("no-such-file.json")), FileError);

  auto j = graph_json(segment());
  j["edges"][0]["ends"][1] = "nowhere";
  EXPECT_NE(message_of([&] { parse_graph(j.dump()); }).find("'nowhere'"), std::string::npos);
  j = graph_json(segment());
  j["vertices"][0]["position"][0] = "1/0";
  EXPECT_THROW(parse_graph(j.dump()), MalformedInput);
  EXPECT_THROW(parse_graph("[1, 2]"), MalformedInput);
}

TEST(FunctionFile, ParseAndRoundTrip) {
  auto g = load_graph(fixture("elliptic.json")).graph;
  auto f = parse_function(detail::read_file(fixture("elliptic-phi.json")), g.base);
  EXPECT_EQ(f.values[g.base.find_vertex("A")], 6);
  EXPECT_EQ(f.values[g.base.find_vertex("v1")], 3);
  auto back = parse_function(function_json(f, g.base).dump(), g.base);
  EXPECT_EQ(back.values, f.values);
  EXPECT_EQ(back.leaf_slopes, f.leaf_slopes);
  EXPECT_TRUE(parse_function(R"({"infinite": true})", g.base).infinite);
  EXPECT_THROW(parse_function(R"({"values": {"v1": "0"}})", g.base), MalformedInput);
  EXPECT_THROW(parse_function(R"({"values": {"zz": "0"}})", g.base), MalformedInput);
}

TEST(CertificateFile, RoundTrip) {
  auto target = shared(elliptic(1, 1, 3, 1));
  auto verdict = obstruct(target, 1);
  ASSERT_EQ(verdict.status, ObstructionStatus::obstructed);
  const auto& cert = *verdict.legs.back().result.certificate;
  Json j = certificate_json(cert, *target);
  EXPECT_EQ(j["format"], "troplift-certificate");
  EXPECT_EQ(j["graph_hash"], graph_hash(*target));

  auto files = parse_certificates(j.dump(2), target->base);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(certificate_json(files[0].cert, *target), j);
  EXPECT_TRUE(validate_certificate_file(files[0], target).valid);

  Json bundle{{"format", "troplift-obstruction"}, {"certificates", Json::array({j, j})}};
  EXPECT_EQ(parse_certificates(bundle.dump(), target->base).size(), 2u);

  auto other = shared(elliptic(1, 2, 3, 1));
  auto check = validate_certificate_file(files[0], other);
  EXPECT_FALSE(check.valid);
  EXPECT_EQ(check.reason, "graph hash mismatch");

  Json broken = j;
  broken["cases"][0]["witness"]["type"] = "vibes";
  EXPECT_THROW(parse_certificates(broken.dump(), target->base), MalformedInput);
  EXPECT_THROW(parse_certificates(R"({"format": "other"})", target->base), MalformedInput);
}

TEST(CertificateFile, DiscreteCertificateNamesTheOriginalGraph) {
  auto target = shared(elliptic(1, 1, 3, 1));
  auto r = phi_search_discrete(identity_map(target), zv({0, 0, 1}), 2, identity_choice(*target), {});
  ASSERT_EQ(r.status, SearchStatus::unsat);
  Json j = certificate_json(*r.certificate, *target);
  EXPECT_EQ(j["level"], 2);
  auto files = parse_certificates(j.dump(), target->base);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_TRUE(validate_certificate_file(files[0], target).valid);
  auto sub = shared(subdivide(*target, 2));
  EXPECT_FALSE(validate_certificate(*r.certificate, sub).valid);  // would subdivide twice
}
