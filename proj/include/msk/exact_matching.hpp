#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace msk {

using Edge = std::pair<std::uint64_t, std::uint64_t>;

enum class MatchingKind { kBipartite, kGeneral };

// Set of vertex-disjoint edges. Construction rejects any repeated endpoint;
// kBipartite treats the two columns as separate vertex spaces.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::vector<Edge> edges, MatchingKind kind = MatchingKind::kBipartite);

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }

 private:
  std::vector<Edge> edges_;
};

// Simple bipartite graph; edges are deduplicated and sorted on construction.
class BipartiteGraph {
 public:
  BipartiteGraph(std::uint64_t n_left, std::uint64_t n_right, std::vector<Edge> edges);

  std::uint64_t n_left() const { return n_left_; }
  std::uint64_t n_right() const { return n_right_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::uint64_t n_left_;
  std::uint64_t n_right_;
  std::vector<Edge> edges_;
};

// Maximum-cardinality matching via Hopcroft-Karp. Augmenting paths are
// explored lowest-index-first, so the returned edge set is deterministic.
Matching max_matching(const BipartiteGraph& g);

// Greedy maximal matching in edge order; at least half the maximum size.
Matching greedy_maximal(const BipartiteGraph& g);

}  // namespace msk
