#include <doctest.h>

#include "pane/graph.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace pane;
using namespace pane::graph;
using datasets::Sign;
using datasets::SignedEdge;

TEST_CASE("build fills both sides and both directions") {
  const std::vector<SignedEdge> edges = {{0, 0, Sign::positive}, {0, 1, Sign::negative}};
  const SignedBipartiteGraph g = build(edges, 2, 2);
  CHECK(g.positive.user_degree(0) == 1);
  CHECK(g.negative.user_degree(0) == 1);
  CHECK(g.positive.item_degree(0) == 1);
  CHECK(g.negative.item_degree(1) == 1);
  CHECK(g.positive.user_degree(1) == 0);
  CHECK(g.positive.has_edge(0, 0));
  CHECK_FALSE(g.positive.has_edge(0, 1));
}

TEST_CASE("no negative edges leaves the negative side empty") {
  const std::vector<SignedEdge> edges = {{0, 0, Sign::positive}, {1, 1, Sign::positive}};
  const SignedBipartiteGraph g = build(edges, 2, 2);
  CHECK(g.negative.empty());
  for (std::uint32_t u = 0; u < 2; ++u) CHECK(g.negative.user_degree(u) == 0);
}

TEST_CASE("positive bipartite clique has uniform degree") {
  std::vector<SignedEdge> edges;
  for (std::uint32_t u = 0; u < 4; ++u) {
    for (std::uint32_t i = 0; i < 4; ++i) edges.push_back({u, i, Sign::positive});
  }
  const SignedBipartiteGraph g = build(edges, 4, 4);
  for (std::uint32_t u = 0; u < 4; ++u) CHECK(g.positive.user_degree(u) == 4);
  for (std::uint32_t i = 0; i < 4; ++i) CHECK(g.positive.item_degree(i) == 4);
}

TEST_CASE("build rejects duplicates and out-of-range indices") {
  CHECK_THROWS_AS(build({{0, 0, Sign::positive}, {0, 0, Sign::positive}}, 1, 1), Error);
  CHECK_THROWS_AS(build({{0, 0, Sign::positive}, {0, 0, Sign::negative}}, 1, 1), Error);
  CHECK_THROWS_AS(build({{0, 3, Sign::positive}}, 1, 2), Error);
  CHECK_THROWS_AS(build({{5, 0, Sign::positive}}, 1, 2), Error);
}

TEST_CASE("adjacency lists are sorted and degree sums match the edge count") {
  RngStream rng(5);
  for (int round = 0; round < 10; ++round) {
    const auto g = testsupport::random_bipartite(3 + rng.next_below(20), 3 + rng.next_below(20),
                                                 0.2, 0.2, rng);
    for (const Adjacency* side : {&g.positive, &g.negative}) {
      std::size_t user_sum = 0;
      std::size_t item_sum = 0;
      for (const auto& list : side->user_items) {
        CHECK(std::is_sorted(list.begin(), list.end()));
        user_sum += list.size();
      }
      for (const auto& list : side->item_users) item_sum += list.size();
      CHECK(user_sum == side->edge_count);
      CHECK(item_sum == side->edge_count);
    }
  }
}

TEST_CASE("norm_coeff hand values") {
  // degrees (2, 8), (1, 1), (4, 4)
  std::vector<SignedEdge> edges;
  for (std::uint32_t i = 0; i < 2; ++i) edges.push_back({0, i, Sign::positive});
  for (std::uint32_t u = 1; u < 8; ++u) edges.push_back({u, 0, Sign::positive});
  const SignedBipartiteGraph g = build(edges, 8, 2);
  CHECK(norm_coeff(g.positive, 0, 0) == doctest::Approx(0.25).epsilon(1e-12));

  const SignedBipartiteGraph single = build({{0, 0, Sign::positive}}, 1, 1);
  CHECK(norm_coeff(single.positive, 0, 0) == doctest::Approx(1.0));

  std::vector<SignedEdge> clique;
  for (std::uint32_t u = 0; u < 4; ++u) {
    for (std::uint32_t i = 0; i < 4; ++i) clique.push_back({u, i, Sign::positive});
  }
  const SignedBipartiteGraph c = build(clique, 4, 4);
  CHECK(norm_coeff(c.positive, 2, 3) == doctest::Approx(0.25));

  CHECK_THROWS_AS(norm_coeff(g.positive, 1, 1), Error);  // not adjacent
}

TEST_CASE("norm_coeff agrees with the dense normalized adjacency") {
  RngStream rng(21);
  const auto g = testsupport::random_bipartite(12, 15, 0.3, 0.0, rng);
  const Eigen::MatrixXd a = testsupport::dense_norm_adjacency(g.positive, 12, 15);
  for (std::uint32_t u = 0; u < 12; ++u) {
    for (const std::uint32_t i : g.positive.user_items[u]) {
      CHECK(norm_coeff(g.positive, u, i) == doctest::Approx(a(u, 12 + i)).epsilon(1e-13));
      // symmetric across the bipartition
      CHECK(a(u, 12 + i) == a(12 + i, u));
    }
  }
}

TEST_CASE("distort keeps everything at p=0 and nothing at p=1") {
  RngStream rng(9);
  const auto g = testsupport::random_bipartite(10, 12, 0.2, 0.3, rng);

  const DistortedGraph all = distort(g, 0.0, 4);
  CHECK(all.adj.edge_count == g.negative.edge_count);
  CHECK(all.adj.user_items == g.negative.user_items);

  const DistortedGraph none = distort(g, 1.0, 4);
  CHECK(none.adj.edge_count == 0);

  CHECK_THROWS_AS(distort(g, -0.1, 4), Error);
  CHECK_THROWS_AS(distort(g, 1.5, 4), Error);
}

TEST_CASE("distort at p=0.5 keeps a binomially plausible count") {
  // 100 users x 100 items, all negative: 10,000 edges.
  std::vector<SignedEdge> edges;
  for (std::uint32_t u = 0; u < 100; ++u) {
    for (std::uint32_t i = 0; i < 100; ++i) edges.push_back({u, i, Sign::negative});
  }
  const SignedBipartiteGraph g = build(edges, 100, 100);
  const DistortedGraph d = distort(g, 0.5, 12345);
  CHECK(d.adj.edge_count >= 4871);
  CHECK(d.adj.edge_count <= 5129);
}

TEST_CASE("distortion is a seeded subset of the negative graph") {
  RngStream rng(33);
  const auto g = testsupport::random_bipartite(15, 15, 0.1, 0.4, rng);
  for (const double p : {0.2, 0.7}) {
    const DistortedGraph a = distort(g, p, 77);
    const DistortedGraph b = distort(g, p, 77);
    CHECK(a.adj.user_items == b.adj.user_items);
    for (std::uint32_t u = 0; u < 15; ++u) {
      CHECK(a.adj.user_degree(u) <= g.negative.user_degree(u));
      for (const std::uint32_t i : a.adj.user_items[u]) {
        CHECK(g.negative.has_edge(u, i));
        // both directions stay consistent
        const auto& users = a.adj.item_users[i];
        CHECK(std::binary_search(users.begin(), users.end(), u));
      }
    }
  }
}

TEST_CASE("graph cache round trips") {
  testsupport::TempDir dir("graph");
  RngStream rng(2);
  const auto g = testsupport::random_bipartite(9, 11, 0.25, 0.25, rng);
  write_graph_cache(dir.file("g.bin"), g);
  const SignedBipartiteGraph loaded = read_graph_cache(dir.file("g.bin"));
  CHECK(loaded.n_users == g.n_users);
  CHECK(loaded.n_items == g.n_items);
  CHECK(loaded.positive.user_items == g.positive.user_items);
  CHECK(loaded.negative.item_users == g.negative.item_users);

  testsupport::write_text(dir.file("junk.bin"), "not a cache");
  CHECK_THROWS_AS(read_graph_cache(dir.file("junk.bin")), Error);
}
