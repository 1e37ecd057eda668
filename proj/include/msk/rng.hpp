#pragma once

#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace msk {

// Seeded random source for generators and experiments. Bounded draws use
// plain modulo reduction so sequences are identical across standard library
// implementations (std::uniform_int_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

  bool coin() { return (engine_() & 1) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, m), uniformly ordered. Uses rejection when
  // k is small relative to m, a partial Fisher-Yates shuffle otherwise.
  std::vector<std::uint64_t> sample(std::uint64_t m, std::uint64_t k) {
    std::vector<std::uint64_t> out;
    out.reserve(k);
    if (k * 20 <= m) {
      std::unordered_set<std::uint64_t> seen;
      seen.reserve(k * 2);
      while (out.size() < k) {
        std::uint64_t v = below(m);
        if (seen.insert(v).second) out.push_back(v);
      }
      return out;
    }
    std::vector<std::uint64_t> ids(m);
    for (std::uint64_t i = 0; i < m; ++i) ids[i] = i;
    for (std::uint64_t i = 0; i < k && i + 1 < m; ++i) {
      std::uint64_t j = i + below(m - i);
      std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    return ids;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace msk
