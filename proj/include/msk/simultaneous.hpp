#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msk/matching_sketch.hpp"
#include "msk/stream.hpp"

namespace msk {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Graph whose edge set partitions into t pairwise edge-disjoint induced
// matchings of size r each. The edge set is the union of the matchings.
struct RSGraph {
  std::uint64_t n_vertices = 0;
  std::vector<std::vector<Edge>> matchings;

  std::uint64_t matching_size() const { return matchings.empty() ? 0 : matchings[0].size(); }
  std::uint64_t matching_count() const { return matchings.size(); }
  std::vector<Edge> union_edges() const;
};

struct RSCertificate {
  bool ok = true;
  std::string reason;
  std::size_t matching_index = 0;
  Edge offending_edge{0, 0};
};

// Checks sizes, vertex-disjointness, pairwise edge-disjointness and the
// induced property against the union of the matchings.
RSCertificate verify_rs(const RSGraph& g);
// Same, but induced within an explicit host edge set.
RSCertificate verify_rs(const RSGraph& g, const std::vector<Edge>& host_edges);

// Backtracking search for a partition of all edges into t induced matchings
// of size r. Returns nullopt when no partition exists. Throws BudgetError
// for graphs over 16 vertices or when the node budget runs out.
std::optional<RSGraph> find_rs_decomposition(std::uint64_t n_vertices,
                                             const std::vector<Edge>& edges, std::uint64_t r,
                                             std::uint64_t t);

// k-player instance built from an RS graph: per player, one hidden matching
// marks its vertices as starred (labeled uniquely for that player), every
// matching drops half its edges, and all non-starred vertices share one
// global labeling.
struct HardInstance {
  std::uint64_t players = 0;
  std::uint64_t label_universe = 0;  // max(k*N, N + 2*r*k)
  std::uint64_t rs_vertices = 0;     // N
  std::uint64_t rs_matching_size = 0;
  std::uint64_t rs_matching_count = 0;
  std::vector<std::vector<Edge>> player_edges;        // global labels
  std::vector<std::uint64_t> hidden_matching;         // per player
  std::vector<std::vector<std::uint64_t>> star_labels;  // per player, sorted
};

HardInstance gen_hard(const RSGraph& rs, std::uint64_t players, std::uint64_t seed);

// Claim-style check on one instance: |max trivial matching| / |M*| against
// 4/alpha with alpha = k*r/N. A trivial matching may touch at most N
// starred labels. Exact matchings come from a desk-scale branch-and-bound.
struct TrivialRatioReport {
  std::uint64_t max_matching_size = 0;
  std::uint64_t max_trivial_size = 0;
  std::uint64_t good_label_count = 0;
  double alpha = 0;
  double ratio = 0;
  double bound = 0;
  bool bound_holds = false;
};

TrivialRatioReport check_trivial_ratio(const HardInstance& inst);

// Exact maximum matching on a tiny general graph (branch and bound over
// edges). Throws BudgetError past ~64 distinct vertices or the node cap.
std::uint64_t max_matching_small(const std::vector<Edge>& edges);
// Same, but at most `good_budget` endpoints from `good_labels` may be matched.
std::uint64_t max_trivial_matching_small(const std::vector<Edge>& edges,
                                         const std::vector<std::uint64_t>& good_labels,
                                         std::uint64_t good_budget);

// Public-coin one-round harness: every player sketches its share with the
// shared seed, the coordinator merges and extracts. The merged sketch is
// bit-identical to single-stream processing of the concatenation.
struct SimultaneousResult {
  Matching matching;
  MatchingSketch merged;
  std::vector<std::size_t> player_bytes;  // serialized message sizes
};

SimultaneousResult run_simultaneous(const std::vector<std::vector<EdgeUpdate>>& shares,
                                    const Params& params, std::uint64_t seed);

// Uniform random partition of one update sequence into k shares.
std::vector<std::vector<EdgeUpdate>> split_updates(const std::vector<EdgeUpdate>& updates,
                                                   std::uint64_t players, std::uint64_t seed);

// Text form: instance header, then per player a "player <i> ..." header
// followed by stream lines, replayable through any sketch.
std::string format_hard_instance(const HardInstance& inst);
HardInstance parse_hard_instance(const std::string& text);

// RS graph text form: header "rs N <N> r <r> t <t>", then one line per
// matching holding 2r vertex ids.
std::string format_rs_graph(const RSGraph& g);
RSGraph parse_rs_graph(const std::string& text);
RSGraph read_rs_graph(const std::string& path);

std::vector<EdgeUpdate> player_updates(const HardInstance& inst, std::size_t player);
StreamSpec player_stream(const HardInstance& inst, std::size_t player);

}  // namespace msk
