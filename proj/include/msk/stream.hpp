#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "msk/exact_matching.hpp"

namespace msk {

// One stream token: endpoints plus a +1/-1 multiplicity change.
struct EdgeUpdate {
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::int32_t delta = 1;

  bool operator==(const EdgeUpdate&) const = default;
};

enum class GraphKind { kBipartite, kGeneral };

// A dynamic graph stream: for kBipartite, u and v index the two sides
// separately (each in [0, n)); for kGeneral both index one vertex set.
struct StreamSpec {
  std::uint64_t n = 0;
  GraphKind kind = GraphKind::kBipartite;
  std::vector<EdgeUpdate> updates;

  bool operator==(const StreamSpec&) const = default;
};

struct TurnstileError : std::runtime_error {
  TurnstileError(std::size_t position, const EdgeUpdate& offending);
  std::size_t position;
  EdgeUpdate offending;
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what);
  std::size_t line;
};

// Canonical packed key of an edge; general edges are unordered pairs.
std::uint64_t edge_key(const StreamSpec& s, std::uint64_t u, std::uint64_t v);

// Exact final multiplicities. Throws TurnstileError at the first position
// whose prefix drives a multiplicity negative, and std::out_of_range for
// endpoints outside [0, n).
std::unordered_map<std::uint64_t, std::int64_t> validate(const StreamSpec& s);

struct PlantedStream {
  StreamSpec stream;
  Matching planted;
};

// Bipartite stream whose final graph contains a planted matching of the
// given size, plus uniform noise edges (multiplicity capped at 4) and churn
// edges that are inserted and later deleted. Deterministic given seed.
PlantedStream gen_planted(std::uint64_t n, std::uint64_t opt, std::uint64_t noise_edges,
                          std::uint64_t churn, std::uint64_t seed);

// Text format: header "n <n> kind <bipartite|general>", then one update per
// line "u v +1|-1".
std::string format_stream(const StreamSpec& s);
StreamSpec parse_stream(const std::string& text);
StreamSpec read_stream(const std::string& path);
void write_stream(const StreamSpec& s, const std::string& path);

}  // namespace msk
