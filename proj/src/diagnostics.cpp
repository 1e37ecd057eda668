#include "msk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "msk/field_hash.hpp"
#include "msk/l0_sampler.hpp"
#include "msk/matching_sketch.hpp"
#include "msk/rng.hpp"

namespace msk {

BallsBinsCell balls_bins_cell(std::uint64_t balls, std::uint64_t bins, std::uint64_t trials,
                              std::uint64_t seed) {
  Rng rng(seed);
  double threshold = static_cast<double>(std::min(balls, bins)) / 3.0;
  std::uint64_t hits = 0;
  std::vector<std::uint8_t> occupied(bins);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::fill(occupied.begin(), occupied.end(), 0);
    std::uint64_t non_empty = 0;
    for (std::uint64_t b = 0; b < balls; ++b) {
      std::uint64_t bin = rng.below(bins);
      if (!occupied[bin]) {
        occupied[bin] = 1;
        ++non_empty;
      }
    }
    if (static_cast<double>(non_empty) >= threshold) ++hits;
  }
  BallsBinsCell cell;
  cell.balls = balls;
  cell.bins = bins;
  cell.frequency = static_cast<double>(hits) / static_cast<double>(trials);
  double sigma = std::sqrt(0.25 / static_cast<double>(trials));
  cell.required = 0.5 - 3.0 * sigma;
  cell.pass = cell.frequency >= cell.required;
  return cell;
}

std::vector<BallsBinsCell> balls_bins_grid(std::uint64_t trials, std::uint64_t seed) {
  const std::uint64_t sizes[] = {4, 16, 64, 256};
  std::vector<BallsBinsCell> cells;
  std::uint64_t idx = 0;
  for (std::uint64_t balls : sizes)
    for (std::uint64_t bins : sizes)
      cells.push_back(balls_bins_cell(balls, bins, trials, derive_seed(seed, 0x62626c6cULL, idx++)));
  return cells;
}

SpanningReport spanning_diagnostic(std::uint64_t n, double epsilon, std::uint64_t trials,
                                   std::uint64_t seed) {
  Params params = Params::make(n, epsilon, n);
  double n_eps = std::pow(static_cast<double>(n), epsilon);
  double spread_needed = std::min(n_eps, static_cast<double>(params.group_count)) / 3.0;

  std::uint64_t hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::uint64_t trial_seed = derive_seed(seed, 0x7370616eULL, trial);
    Rng rng(trial_seed);
    std::vector<std::uint64_t> partner = rng.sample(n, n);  // planted perfect matching

    HashFamily left(static_cast<std::uint32_t>(params.hash_degree), n, params.group_count,
                    derive_seed(trial_seed, 1, 0));
    HashFamily right(static_cast<std::uint32_t>(params.hash_degree), n, params.group_count,
                     derive_seed(trial_seed, 2, 0));

    std::vector<std::unordered_set<std::uint64_t>> spread(params.group_count);
    for (std::uint64_t u = 0; u < n; ++u) spread[left(u)].insert(right(partner[u]));

    std::uint64_t spanning = 0;
    for (const auto& groups : spread)
      if (static_cast<double>(groups.size()) >= spread_needed) ++spanning;
    if (4 * spanning >= params.group_count) ++hits;
  }

  SpanningReport report;
  report.trials = trials;
  report.frequency = static_cast<double>(hits) / static_cast<double>(trials);
  double sigma = std::sqrt(0.4 * 0.6 / static_cast<double>(trials));
  report.required = 0.4 - 3.0 * sigma;
  report.pass = report.frequency >= report.required;
  return report;
}

UniformityReport sampler_uniformity_diagnostic(std::uint64_t domain, std::uint64_t support,
                                               double delta, std::uint64_t trials,
                                               std::uint64_t seed) {
  std::vector<std::uint64_t> counts(support, 0);
  std::uint64_t fails = 0, found = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::uint64_t trial_seed = derive_seed(seed, 0x756e6966ULL, trial);
    Rng rng(trial_seed);
    std::vector<std::uint64_t> indices = rng.sample(domain, support);
    std::unordered_map<std::uint64_t, std::uint64_t> rank;
    for (std::uint64_t i = 0; i < support; ++i) rank.emplace(indices[i], i);

    L0Sketch sketch(domain, delta, derive_seed(trial_seed, 3, 0));
    for (std::uint64_t idx : indices) sketch.update(idx, +1);

    L0Sample s = sketch.sample();
    if (s.status == L0Sample::Status::kFail) {
      ++fails;
    } else if (s.status == L0Sample::Status::kFound) {
      ++found;
      ++counts[rank.at(s.index)];
    }
  }

  UniformityReport report;
  report.trials = trials;
  report.support = support;
  double tv = 0;
  if (found > 0) {
    for (std::uint64_t c : counts)
      tv += std::abs(static_cast<double>(c) / static_cast<double>(found) -
                     1.0 / static_cast<double>(support));
  }
  report.tv_distance = tv / 2.0;
  report.tv_tolerance = 0.05;
  report.fail_rate = static_cast<double>(fails) / static_cast<double>(trials);
  double sigma = std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
  report.fail_tolerance = delta + 3.0 * sigma;
  report.pass = report.tv_distance <= report.tv_tolerance &&
                report.fail_rate <= report.fail_tolerance;
  return report;
}

}  // namespace msk
