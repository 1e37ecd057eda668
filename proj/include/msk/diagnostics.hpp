#pragma once

#include <cstdint>
#include <vector>

namespace msk {

// Monte Carlo checks behind the sketch's success probability. Each returns
// observed frequencies plus the pass threshold it was checked against.

struct BallsBinsCell {
  std::uint64_t balls = 0;
  std::uint64_t bins = 0;
  double frequency = 0;  // P(non-empty bins >= min(balls, bins)/3)
  double required = 0;
  bool pass = false;
};

BallsBinsCell balls_bins_cell(std::uint64_t balls, std::uint64_t bins, std::uint64_t trials,
                              std::uint64_t seed);
std::vector<BallsBinsCell> balls_bins_grid(std::uint64_t trials, std::uint64_t seed);

// Fraction of trials where at least a quarter of the left groups see their
// planted-matching edges spread over min(n^eps, group_count)/3 distinct
// right groups.
struct SpanningReport {
  std::uint64_t trials = 0;
  double frequency = 0;
  double required = 0;
  bool pass = false;
};

SpanningReport spanning_diagnostic(std::uint64_t n, double epsilon, std::uint64_t trials,
                                   std::uint64_t seed);

// Fresh-seed sampling from a fixed-support vector: total-variation distance
// of the returned index from uniform over the support, plus the fail rate.
struct UniformityReport {
  std::uint64_t trials = 0;
  std::uint64_t support = 0;
  double tv_distance = 0;
  double tv_tolerance = 0;
  double fail_rate = 0;
  double fail_tolerance = 0;  // delta + 3 sigma
  bool pass = false;
};

UniformityReport sampler_uniformity_diagnostic(std::uint64_t domain, std::uint64_t support,
                                               double delta, std::uint64_t trials,
                                               std::uint64_t seed);

}  // namespace msk
