#include "doctest.h"
#include "oracles.hpp"
#include "polyvol/families.hpp"
#include "polyvol/graph.hpp"
#include "polyvol/lattice.hpp"
#include "polyvol/params.hpp"

using namespace polyvol;

TEST_CASE("parse single edge") {
  auto g = parse_edge_list("vertices 2\n0 1");
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.max_degree() == 1);
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacent(1, 0));
}

TEST_CASE("parse isolated vertex") {
  auto g = parse_edge_list("vertices 1\n");
  CHECK(g.vertex_count() == 1);
  CHECK(g.edge_count() == 0);
  CHECK(g.max_degree() == 0);
}

TEST_CASE("parse path of three") {
  auto g = parse_edge_list("vertices 3\n0 1\n1 2");
  CHECK(g.vertex_count() == 3);
  CHECK(g.max_degree() == 2);
  CHECK(g == families::path(3));
}

TEST_CASE("parse infers vertex count, skips comments and blanks") {
  auto g = parse_edge_list("# header\n\n0 3\n  # indented comment\n2 1\n");
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 2);
  CHECK(parse_edge_list("").vertex_count() == 0);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_edge_list("vertices 2\n0 1\n1 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_edge_list("0 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_edge_list("0 x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_edge_list("0 1 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_edge_list("vertices 2\n0 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_edge_list("-1 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_edge_list("vertices 2\nvertices 3"), std::invalid_argument);
  CHECK_THROWS(read_edge_list("/nonexistent/graph.txt"));
}

TEST_CASE("from_edges validates") {
  std::vector<Edge> loop{{1, 1}};
  std::vector<Edge> dup{{0, 1}, {1, 0}};
  std::vector<Edge> range{{0, 5}};
  CHECK_THROWS_AS(Graph::from_edges(2, loop), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(2, dup), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(2, range), std::invalid_argument);
}

TEST_CASE("remove_vertex examples") {
  auto p3 = families::path(3).remove_vertex(1);
  CHECK(p3.live_count() == 2);
  CHECK(p3.edge_count() == 0);
  CHECK(p3.vertex_count() == 3);
  CHECK_FALSE(p3.is_live(1));

  for (Vertex v : {0, 1}) {
    auto e = families::path(2).remove_vertex(v);
    CHECK(e.live_count() == 1);
    CHECK(e.edge_count() == 0);
  }
  for (Vertex v : {0, 1, 2}) {
    auto k = families::complete(3).remove_vertex(v);
    CHECK(k.live_count() == 2);
    CHECK(k.edge_count() == 1);
    CHECK(k.max_degree() == 1);
  }
  CHECK_THROWS_AS(p3.remove_vertex(1), std::out_of_range);
  CHECK_THROWS_AS(p3.remove_vertex(7), std::out_of_range);
}

TEST_CASE("remove_vertex drops exactly the incident edges") {
  for (std::size_t m = 1; m <= 5; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (Vertex v : g.live_vertices()) {
        auto h = g.remove_vertex(v);
        CHECK(h.live_count() == g.live_count() - 1);
        CHECK(h.edge_count() == g.edge_count() - g.degree(v));
        for (Vertex u : h.live_vertices())
          for (Vertex w : h.neighbors(u)) CHECK(w != v);
      }
}

TEST_CASE("connected graph census") {
  const std::size_t expected[] = {1, 1, 2, 6, 21};
  for (std::size_t m = 1; m <= 5; ++m) CHECK(families::connected_graphs(m).size() == expected[m - 1]);
}

TEST_CASE("constraint set") {
  ConstraintSet b(3);
  CHECK(b.empty());
  CHECK_FALSE(b.pin(1).has_value());
  auto c = b.with(1, 4);
  CHECK(c.pin(1) == 4);
  CHECK(c.pinned_count() == 1);
  CHECK(b.empty());
  CHECK_THROWS(c.set(0, -3));

  const auto p = Params::make(10, 3);
  const auto e = families::path(2);
  CHECK(is_feasible(e, p, ConstraintSet(2).with(0, 7).with(1, 3)));
  CHECK_FALSE(is_feasible(e, p, ConstraintSet(2).with(0, 7).with(1, 4)));
  CHECK_FALSE(is_feasible(e, p, ConstraintSet(2).with(0, 8)));
  CHECK(max_pinned_neighbor(e, ConstraintSet(2).with(1, 6), 0) == 6);
  CHECK(max_pinned_neighbor(e, ConstraintSet(2), 0) == 0);
}

TEST_CASE("canonicalize examples") {
  const auto p = Params::make(7, 3);
  CHECK(canonicalize(ConstraintSet(1).with(0, 2), p).pin(0) == 0);
  CHECK(canonicalize(ConstraintSet(1).with(0, 5), p).pin(0) == 5);
  CHECK(canonicalize(ConstraintSet(2), p).empty());
  auto once = canonicalize(ConstraintSet(3).with(0, 1).with(2, 4), p);
  CHECK(canonicalize(once, p) == once);
}

TEST_CASE("small pins are interchangeable for the exact count") {
  for (std::size_t m = 2; m <= 4; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (int A : {1, 2}) {
        const Params p = Params::make(6, A);
        const auto inst = oracle::instance_of(g);
        for (int n = 0; n <= A; ++n)
          for (int other = 0; other <= p.cap(); other += 2) {
            std::vector<int> pin(m, -1);
            pin[0] = n;
            pin[m - 1] = other;
            auto beta = ConstraintSet(m).with(0, n).with(m - 1, other);
            auto zero = ConstraintSet(m).with(0, 0).with(m - 1, other);
            CHECK(exact_count(g, p, beta) == exact_count(g, p, zero));
            CHECK(exact_count(g, p, beta) == oracle::count(inst, 6, A, pin));
          }
      }
}
