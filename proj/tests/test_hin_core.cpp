#include "doctest.h"

#include <set>

#include "mg2v/synth.hpp"
#include "mg2v/typed_graph.hpp"
#include "support/oracles.hpp"
#include "support/toys.hpp"

using namespace mg2v;
using namespace mg2v::tests;

TEST_SUITE_BEGIN("hin-core");

TEST_CASE("schema implies reverse relations and closure under inversion") {
  Schema s = apv_schema();
  CHECK(s.num_types() == 3);
  CHECK(s.num_relations() == 6);  // 3 declared + 3 reverses
  RelId write = *s.find_relation(s.type_id("A"), "write", s.type_id("P"));
  RelId rev = s.reverse(write);
  CHECK(s.relation(rev).label == "write^-1");
  CHECK(s.relation(rev).src == s.type_id("P"));
  CHECK(s.relation(rev).dst == s.type_id("A"));
  CHECK(s.reverse(rev) == write);
  CHECK(Schema::reverse_label("write") == "write^-1");
  CHECK(Schema::reverse_label("write^-1") == "write");
}

TEST_CASE("schema rejects bad declarations") {
  Schema s;
  s.add_node_type("A");
  CHECK_THROWS_AS(s.add_node_type("A"), Error);
  CHECK_THROWS_AS(s.add_relation("A", "r", "B"), Error);  // undeclared endpoint
  s.add_node_type("B");
  s.add_relation("A", "r", "B");
  CHECK_THROWS_AS(s.add_relation("A", "r", "B"), Error);      // duplicate
  CHECK_THROWS_AS(s.add_relation("B", "r^-1", "A"), Error);   // collides with reverse
}

TEST_CASE("schema text round trip") {
  Schema s = apv_schema();
  Schema again = Schema::parse(s.serialize());
  CHECK(again.serialize() == s.serialize());
  CHECK(again.num_relations() == s.num_relations());
}

TEST_CASE("load_graph reads bibliographic-style files") {
  TempDir tmp("load");
  write_file(tmp.path("n.tsv"),
             "# comment line\n"
             "a1\tA\n"
             "a2\tA\n"
             "p1\tP\n"
             "p2\tP\n"
             "v1\tV\n");
  write_file(tmp.path("e.tsv"),
             "a1\tp1\twrite\n"
             "a2\tp1\twrite\n"
             "a2\tp2\twrite\n"
             "v1\tp1\tpublish\n"
             "p1\tp2\tcite\n");
  TypedGraph g = load_graph(tmp.path("n.tsv"), tmp.path("e.tsv"), apv_schema());
  CHECK(g.num_nodes() == 5);
  CHECK(g.num_forward_edges() == 5);
  CHECK(g.schema().num_types() == 3);
  CHECK(g.node_type(g.node_id("v1")) == g.schema().type_id("V"));

  // Reverse edges are materialized: p1's out-neighbors by type.
  NodeId p1 = g.node_id("p1");
  auto authors = g.neighbors_by_type(p1, g.schema().type_id("A"));
  CHECK(std::vector<NodeId>(authors.begin(), authors.end()) ==
        std::vector<NodeId>{g.node_id("a1"), g.node_id("a2")});
  CHECK(g.neighbors_by_type(p1, g.schema().type_id("V")).size() == 1);
  CHECK(g.neighbors_by_type(p1, g.schema().type_id("P")).size() == 1);
}

TEST_CASE("single node, empty edge file") {
  TempDir tmp("empty");
  write_file(tmp.path("n.tsv"), "a1\tA\n");
  write_file(tmp.path("e.tsv"), "");
  TypedGraph g = load_graph(tmp.path("n.tsv"), tmp.path("e.tsv"), apv_schema());
  CHECK(g.num_nodes() == 1);
  CHECK(g.num_forward_edges() == 0);
  CHECK(g.buckets(0).empty());
  CHECK(g.out_degree(0) == 0);
}

TEST_CASE("three-node toy: reverse relations visible from the paper side") {
  Schema s = apv_schema();
  TypedGraph g = build_graph(
      s, {{"A1", "A"}, {"P1", "P"}, {"V1", "V"}},
      {{"A1", "P1", "write"}, {"V1", "P1", "publish"}});
  NodeId p1 = g.node_id("P1");
  CHECK(g.out_degree(p1) == 2);
  auto a = g.neighbors_by_type(p1, s.type_id("A"));
  auto v = g.neighbors_by_type(p1, s.type_id("V"));
  REQUIRE(a.size() == 1);
  REQUIRE(v.size() == 1);
  CHECK(g.node_name(a[0]) == "A1");
  CHECK(g.node_name(v[0]) == "V1");
  // The stored relation on the reverse arc carries the ^-1 label.
  bool found = false;
  for (const NeighborBucket& b : g.buckets(p1)) {
    for (const auto& [nbr, rel] : b.edges) {
      if (nbr == g.node_id("A1")) {
        CHECK(g.schema().relation(rel).label == "write^-1");
        found = true;
      }
    }
  }
  CHECK(found);
}

TEST_CASE("load errors") {
  TempDir tmp("errs");
  write_file(tmp.path("n.tsv"), "a1\tA\n");
  write_file(tmp.path("bad_type.tsv"), "x1\tX\n");
  write_file(tmp.path("dup.tsv"), "a1\tA\na1\tA\n");
  write_file(tmp.path("e_unknown.tsv"), "a1\tzz\twrite\n");
  write_file(tmp.path("e_badrel.tsv"), "a1\ta1\twrite\n");
  write_file(tmp.path("empty.tsv"), "");

  CHECK_THROWS_AS(load_graph(tmp.path("bad_type.tsv"), tmp.path("empty.tsv"), apv_schema()),
                  Error);
  CHECK_THROWS_AS(load_graph(tmp.path("dup.tsv"), tmp.path("empty.tsv"), apv_schema()), Error);
  CHECK_THROWS_AS(load_graph(tmp.path("n.tsv"), tmp.path("e_unknown.tsv"), apv_schema()),
                  Error);
  // a1 -> a1 is both a self-loop and type-incompatible; rejected either way.
  CHECK_THROWS_AS(load_graph(tmp.path("n.tsv"), tmp.path("e_badrel.tsv"), apv_schema()), Error);

  Schema s = apv_schema();
  CHECK_THROWS_AS(build_graph(s, {{"a1", "A"}, {"p1", "P"}},
                              {{"a1", "p1", "publish"}}),
                  Error);  // relation exists but not between these types
  CHECK_THROWS_AS(build_graph(s, {{"p1", "P"}, {"p2", "P"}}, {{"p1", "p1", "cite"}}), Error);
  // reverse directions are generated, never declared
  CHECK_THROWS_WITH_AS(build_graph(s, {{"a1", "A"}, {"p1", "P"}},
                                   {{"p1", "a1", "write^-1"}}),
                       doctest::Contains("reverse"), Error);
}

TEST_CASE("duplicate edges collapse with a counter") {
  Schema s = apv_schema();
  TypedGraph g = build_graph(s, {{"a1", "A"}, {"p1", "P"}},
                             {{"a1", "p1", "write"}, {"a1", "p1", "write"}});
  CHECK(g.num_forward_edges() == 1);
  CHECK(g.load_stats().duplicates_dropped == 1);
  CHECK(g.neighbors_by_type(g.node_id("p1"), s.type_id("A")).size() == 1);
}

TEST_CASE("neighbors_by_type matches a brute-force filter over the edge list") {
  TypedGraph g = twelve_node_graph();
  for (size_t v = 0; v < g.num_nodes(); ++v) {
    std::vector<NodeId> expected_all = scan_neighbors(g, static_cast<NodeId>(v));
    std::vector<NodeId> got_all;
    for (size_t t = 0; t < g.schema().num_types(); ++t) {
      auto span = g.neighbors_by_type(static_cast<NodeId>(v), static_cast<TypeId>(t));
      for (NodeId u : span) {
        CHECK(g.node_type(u) == static_cast<TypeId>(t));
        got_all.push_back(u);
      }
      CHECK(std::is_sorted(span.begin(), span.end()));
    }
    std::sort(got_all.begin(), got_all.end());
    // Bucket partition: the typed buckets partition the neighbor set exactly.
    CHECK(got_all == expected_all);
    CHECK(g.out_degree(static_cast<NodeId>(v)) == expected_all.size());
  }
}

TEST_CASE("isolated node has empty buckets for every type") {
  TypedGraph g = twelve_node_graph();
  NodeId v3 = g.node_id("v3");
  for (size_t t = 0; t < g.schema().num_types(); ++t) {
    CHECK(g.neighbors_by_type(v3, static_cast<TypeId>(t)).empty());
  }
  CHECK_THROWS_AS(g.neighbors_by_type(v3, 99), Error);
  CHECK_THROWS_AS(g.neighbors_by_type(999, 0), Error);
}

TEST_CASE("reverse-edge closure holds for every stored adjacency arc") {
  SynthConfig cfg;
  cfg.authors_per_community = 30;
  cfg.papers_per_community = 40;
  cfg.venues_per_community = 2;
  cfg.cross_community_prob = 0.1;
  cfg.seed = 11;
  TypedGraph g = generate_hin(cfg);
  for (size_t v = 0; v < g.num_nodes(); ++v) {
    for (const NeighborBucket& b : g.buckets(static_cast<NodeId>(v))) {
      for (const auto& [u, rel] : b.edges) {
        RelId rev = g.schema().reverse(rel);
        bool found = false;
        for (const NeighborBucket& ub : g.buckets(u)) {
          for (const auto& [w, wrel] : ub.edges) {
            if (w == static_cast<NodeId>(v) && wrel == rev) found = true;
          }
        }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("ingestion round-trip preserves the graph exactly") {
  TempDir tmp("rt");
  TypedGraph g = twelve_node_graph();
  save_graph(g, tmp.path("n.tsv"), tmp.path("e.tsv"));
  TypedGraph h = load_graph(tmp.path("n.tsv"), tmp.path("e.tsv"), apv_schema());
  REQUIRE(h.num_nodes() == g.num_nodes());
  REQUIRE(h.num_forward_edges() == g.num_forward_edges());
  for (size_t v = 0; v < g.num_nodes(); ++v) {
    CHECK(h.node_name(static_cast<NodeId>(v)) == g.node_name(static_cast<NodeId>(v)));
    CHECK(h.node_type(static_cast<NodeId>(v)) == g.node_type(static_cast<NodeId>(v)));
  }
  for (size_t e = 0; e < g.num_forward_edges(); ++e) {
    CHECK(g.forward_edges()[e].src == h.forward_edges()[e].src);
    CHECK(g.forward_edges()[e].dst == h.forward_edges()[e].dst);
    CHECK(g.forward_edges()[e].rel == h.forward_edges()[e].rel);
  }
}

TEST_CASE("label files round trip and tolerate unlabeled nodes") {
  TempDir tmp("labels");
  TypedGraph g = twelve_node_graph();
  write_file(tmp.path("l.tsv"), "a1\tx\na2\ty\na3\tx\n");
  load_labels(g, tmp.path("l.tsv"));
  CHECK(g.labels()[g.node_id("a1")] == g.labels()[g.node_id("a3")]);
  CHECK(g.labels()[g.node_id("a1")] != g.labels()[g.node_id("a2")]);
  CHECK(g.labels()[g.node_id("p1")] == -1);
  save_labels(g, tmp.path("l2.tsv"));
  TypedGraph h = twelve_node_graph();
  load_labels(h, tmp.path("l2.tsv"));
  CHECK(h.labels() == g.labels());
  write_file(tmp.path("bad.tsv"), "nope\tx\n");
  CHECK_THROWS_AS(load_labels(g, tmp.path("bad.tsv")), Error);
}

TEST_SUITE_END();
