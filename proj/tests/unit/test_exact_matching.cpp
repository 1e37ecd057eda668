#include <doctest.h>

#include <stdexcept>

#include <set>

#include "msk/exact_matching.hpp"
#include "msk/rng.hpp"
#include "support/oracles.hpp"

using namespace msk;

TEST_CASE("matching construction rejects repeated vertices") {
  CHECK_NOTHROW(Matching({{0, 1}, {1, 0}}));  // bipartite sides are separate spaces
  CHECK_THROWS_AS(Matching({{0, 1}, {0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Matching({{1, 0}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Matching({{0, 1}, {1, 2}}, MatchingKind::kGeneral), std::invalid_argument);
  CHECK_NOTHROW(Matching({{0, 1}, {2, 3}}, MatchingKind::kGeneral));
}

TEST_CASE("graph construction deduplicates and validates") {
  BipartiteGraph g(4, 4, {{1, 2}, {1, 2}, {0, 3}});
  CHECK(g.edges().size() == 2);
  CHECK_THROWS_AS(BipartiteGraph(4, 4, {{4, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(BipartiteGraph(4, 4, {{0, 4}}), std::invalid_argument);
}

TEST_CASE("empty graph has empty matching") {
  BipartiteGraph g(5, 5, {});
  CHECK(max_matching(g).size() == 0);
  CHECK(greedy_maximal(g).size() == 0);
}

TEST_CASE("complete bipartite graph has a perfect matching") {
  for (std::uint64_t m : {1ULL, 3ULL, 6ULL}) {
    std::vector<Edge> edges;
    for (std::uint64_t u = 0; u < m; ++u)
      for (std::uint64_t v = 0; v < m; ++v) edges.emplace_back(u, v);
    BipartiteGraph g(m, m, std::move(edges));
    CHECK(max_matching(g).size() == m);
  }
}

TEST_CASE("matches brute force on random small graphs") {
  Rng rng(31337);
  for (int round = 0; round < 200; ++round) {
    BipartiteGraph g = testing::random_bipartite(6, 6, 12, rng);
    std::uint64_t expect = testing::brute_force_matching_size(g.edges());
    Matching m = max_matching(g);
    CHECK(m.size() == expect);
  }
}

TEST_CASE("greedy is maximal and at least half of optimal") {
  BipartiteGraph path(4, 4, {{0, 0}, {1, 0}, {1, 1}});
  Matching g = greedy_maximal(path);
  CHECK(g.size() >= 1);

  Rng rng(99);
  for (int round = 0; round < 200; ++round) {
    BipartiteGraph graph = testing::random_bipartite(8, 8, 20, rng);
    std::uint64_t exact = max_matching(graph).size();
    std::uint64_t greedy = greedy_maximal(graph).size();
    CHECK(2 * greedy >= exact);
    CHECK(greedy <= exact);
  }
}

TEST_CASE("size is monotone under edge addition") {
  Rng rng(7);
  std::vector<Edge> edges;
  std::uint64_t last = 0;
  for (int i = 0; i < 60; ++i) {
    edges.emplace_back(rng.below(10), rng.below(10));
    std::uint64_t size = max_matching(BipartiteGraph(10, 10, edges)).size();
    CHECK(size >= last);
    last = size;
  }
}

TEST_CASE("deterministic edge choice") {
  BipartiteGraph g(3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}});
  Matching a = max_matching(g);
  Matching b = max_matching(g);
  CHECK(a.edges() == b.edges());
  // lowest-index augmenting order pins the exact matching
  CHECK(a.edges() == std::vector<Edge>{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("returned matchings are vertex disjoint") {
  Rng rng(4242);
  for (int round = 0; round < 50; ++round) {
    BipartiteGraph g = testing::random_bipartite(12, 12, 40, rng);
    Matching m = max_matching(g);
    std::set<std::uint64_t> left, right;
    for (const Edge& e : m.edges()) {
      CHECK(left.insert(e.first).second);
      CHECK(right.insert(e.second).second);
    }
  }
}
