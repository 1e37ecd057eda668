#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "msk/exact_matching.hpp"
#include "msk/l0_sampler.hpp"
#include "msk/stream.hpp"

namespace msk {

// Derived sketch shape for one opt estimate. group_count and
// partners_per_group control how many edge samplers are kept;
// hash_degree is the independence of the vertex-to-group hashes.
struct Params {
  std::uint64_t n = 0;
  double epsilon = 0;
  std::uint64_t opt_estimate = 0;
  std::uint64_t group_count = 0;         // ceil(opt_estimate / n^eps)
  std::uint64_t partners_per_group = 0;  // 6 * ceil(opt_estimate / n^{2 eps}) * ceil(log2 n)
  std::uint64_t hash_degree = 0;         // 4 * ceil(n^eps)
  std::uint32_t partner_rounds = 1;      // success-boosting repetitions of partner choice

  // Validates n >= 2, epsilon in (0, 1/2], 1 <= opt_estimate <= n and fills
  // in the derived fields.
  static Params make(std::uint64_t n, double epsilon, std::uint64_t opt_estimate,
                     std::uint32_t partner_rounds = 1);

  // Failure probability handed to every edge sampler: n^-5.
  double sampler_delta() const;

  bool operator==(const Params&) const = default;
};

// Single-pass mergeable sketch of a bipartite dynamic graph stream from
// which a large matching can be extracted. Vertices hash into groups on
// each side; every (left group, right group) pair drawn as active keeps one
// L0Sketch over the edges between those groups. The whole state is a linear
// function of the edge-multiplicity vector, so sketches built from the same
// (params, seed) merge exactly.
class MatchingSketch {
 public:
  MatchingSketch(const Params& params, std::uint64_t seed);

  // Routes the edge to its group pair's sampler; no-op when that pair is
  // not active. Throws std::out_of_range for endpoints outside [0, n).
  void update(std::uint64_t left, std::uint64_t right, std::int64_t delta);
  void apply(const std::vector<EdgeUpdate>& updates);

  void merge(const MatchingSketch& other);

  // Draws one edge from each active pair (Empty/Fail draws are skipped) and
  // returns a maximum matching over the drawn edges.
  Matching extract() const;
  std::vector<Edge> sample_edges() const;

  const Params& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t active_pair_count() const { return pairs_.size(); }
  std::size_t cell_count() const;

  std::uint64_t left_group(std::uint64_t u) const { return left_hash_(u); }
  std::uint64_t right_group(std::uint64_t v) const { return right_hash_(v); }

  // Active pair keys in serialization order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> active_pairs() const;
  // The sampler for one group pair, or nullptr when the pair is not active.
  const L0Sketch* pair_sketch(std::uint32_t left_group, std::uint32_t right_group) const;

  void serialize(ByteWriter& out) const;
  std::string serialize() const;
  std::size_t serialized_size() const;
  static MatchingSketch deserialize(ByteReader& in);

 private:
  struct ActivePair {
    std::uint32_t left_group;
    std::uint32_t right_group;
    L0Sketch sketch;
  };

  Params params_;
  std::uint64_t seed_ = 0;
  HashFamily left_hash_, right_hash_;
  std::vector<ActivePair> pairs_;  // sorted by (left_group, right_group)
  std::unordered_map<std::uint64_t, std::uint32_t> pair_index_;
};

// One MatchingSketch per power-of-two opt estimate, plus a single sampler
// over all edges for the case where one edge is already a good answer.
class OptSearchSketch {
 public:
  OptSearchSketch(std::uint64_t n, double epsilon, std::uint64_t seed);

  void update(std::uint64_t left, std::uint64_t right, std::int64_t delta);
  void apply(const std::vector<EdgeUpdate>& updates);
  void merge(const OptSearchSketch& other);

  // Largest matching over all estimates; ties keep the smallest estimate.
  Matching extract() const;

  const std::vector<MatchingSketch>& estimates() const { return estimates_; }
  std::size_t cell_count() const;
  std::size_t serialized_size() const;

 private:
  std::uint64_t n_ = 0;
  double epsilon_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<MatchingSketch> estimates_;
  std::optional<L0Sketch> global_sampler_;
};

// One-pass run over a full update sequence with estimate search.
Matching guess_opt_extract(const std::vector<EdgeUpdate>& updates, std::uint64_t n, double epsilon,
                           std::uint64_t seed);

// Seeded random vertex bipartition for running the bipartite sketch on
// general-graph streams. Vertices keep their relative order within each
// side. Only crossing edges are forwarded; an expected half of any fixed
// matching survives.
class BipartitionReducer {
 public:
  BipartitionReducer(std::uint64_t n, std::uint64_t seed);

  // Reduced update, or nullopt when the edge does not cross the bipartition.
  // Throws std::invalid_argument on self-loops.
  std::optional<EdgeUpdate> reduce(const EdgeUpdate& upd) const;

  bool on_left(std::uint64_t v) const;
  std::uint64_t n() const { return n_; }

 private:
  std::uint64_t n_ = 0;
  std::vector<std::uint8_t> side_;        // 0 = left
  std::vector<std::uint64_t> side_rank_;  // rank within own side
};

StreamSpec bipartition_reduce(const StreamSpec& general, std::uint64_t seed);

}  // namespace msk
