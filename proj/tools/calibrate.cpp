// Derives the constants pinned in msk/calibration.hpp: runs the extraction
// grid and reports the worst observed opt / (extracted * n^eps), then
// measures estimate-search space against n^{2-3 eps} * log2(n)^4.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "msk/exact_matching.hpp"
#include "msk/field_hash.hpp"
#include "msk/matching_sketch.hpp"
#include "msk/stream.hpp"

using namespace msk;

int main() {
  struct Cell {
    std::uint64_t n;
    double epsilon;
  };
  const Cell cells[] = {{256, 1.0 / 3.0}, {1024, 1.0 / 3.0}, {1024, 0.5}};
  const int trials = 50;

  std::printf("extraction constant (opt / (extracted * n^eps)):\n");
  double overall_p90 = 0;
  for (const Cell& cell : cells) {
    for (std::uint64_t planted_opt : {cell.n / 4, cell.n}) {
      std::vector<double> constants;
      double n_eps = std::pow(static_cast<double>(cell.n), cell.epsilon);
      for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t seed = derive_seed(0xACC3, cell.n * 8 + planted_opt, trial);
        PlantedStream ps = gen_planted(cell.n, planted_opt, cell.n / 4, cell.n / 8, seed);
        auto mult = validate(ps.stream);
        std::vector<Edge> final_edges;
        for (const auto& [key, m] : mult) final_edges.emplace_back(key / cell.n, key % cell.n);
        std::uint64_t exact = max_matching(BipartiteGraph(cell.n, cell.n, final_edges)).size();

        Params params = Params::make(cell.n, cell.epsilon, std::max<std::uint64_t>(1, exact));
        MatchingSketch sketch(params, derive_seed(seed, 4, 0));
        sketch.apply(ps.stream.updates);
        std::uint64_t extracted = sketch.extract().size();
        constants.push_back(extracted == 0 ? 1e9
                                           : static_cast<double>(exact) /
                                                 (static_cast<double>(extracted) * n_eps));
      }
      std::sort(constants.begin(), constants.end());
      double p90 = constants[static_cast<std::size_t>(0.9 * (constants.size() - 1))];
      overall_p90 = std::max(overall_p90, p90);
      std::printf("  n=%-5llu eps=%-8.4f opt=%-5llu p50=%.3f p90=%.3f max=%.3f\n",
                  static_cast<unsigned long long>(cell.n), cell.epsilon,
                  static_cast<unsigned long long>(planted_opt), constants[constants.size() / 2],
                  p90, constants.back());
    }
  }
  std::printf("  worst p90 across the grid: %.3f\n\n", overall_p90);

  std::printf("space constants at n=1024 (estimate-search sketch):\n");
  const std::uint64_t n = 1024;
  double log4 = std::pow(std::log2(static_cast<double>(n)), 4.0);
  double bytes_third = 0, bytes_half = 0;
  for (double epsilon : {1.0 / 3.0, 0.4, 0.5}) {
    PlantedStream ps = gen_planted(n, n / 4, n / 4, n / 8, 0xACC4);
    OptSearchSketch sketch(n, epsilon, derive_seed(0xACC4, 1, 0));
    sketch.apply(ps.stream.updates);
    double bytes = static_cast<double>(sketch.serialized_size());
    double cells_measured = static_cast<double>(sketch.cell_count());
    double scale = std::pow(static_cast<double>(n), 2.0 - 3.0 * epsilon) * log4;
    if (epsilon == 1.0 / 3.0) bytes_third = bytes;
    if (epsilon == 0.5) bytes_half = bytes;
    std::printf("  eps=%-8.4f bytes=%-12.0f c_bytes=%-8.2f cells=%-12.0f c_cells=%.2f\n", epsilon,
                bytes, bytes / (scale * 8.0), cells_measured, cells_measured / scale);
  }
  std::printf("  b(1/3)/b(1/2) = %.2f (criterion needs >= sqrt(n)/8 = %.2f)\n",
              bytes_third / bytes_half, std::sqrt(static_cast<double>(n)) / 8.0);
  return 0;
}
