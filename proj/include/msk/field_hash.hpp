#pragma once

#include <cstdint>
#include <vector>

namespace msk {

// All hashing and fingerprinting happens in GF(p) for the Mersenne prime
// p = 2^61 - 1. Products fit a 128-bit intermediate and reduce with two
// shift-folds, so every operation stays in one machine word.
inline constexpr std::uint64_t kFieldPrime = (1ULL << 61) - 1;

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b) {
  __uint128_t x = static_cast<__uint128_t>(a) * b;
  std::uint64_t s = static_cast<std::uint64_t>(x & kFieldPrime) + static_cast<std::uint64_t>(x >> 61);
  s = (s & kFieldPrime) + (s >> 61);
  return s >= kFieldPrime ? s - kFieldPrime : s;
}

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kFieldPrime ? s - kFieldPrime : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b) {
  return a >= b ? a - b : a + kFieldPrime - b;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp);

// Signed value mapped into [0, p).
inline std::uint64_t to_field(std::int64_t v) {
  std::int64_t r = v % static_cast<std::int64_t>(kFieldPrime);
  if (r < 0) r += static_cast<std::int64_t>(kFieldPrime);
  return static_cast<std::uint64_t>(r);
}

// Counter-mode pseudorandom 64-bit values (splitmix64 finalizer). All sketch
// randomness is derived this way: equal seeds give equal structure, which is
// what makes independently built sketches mergeable.
std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter);

// Uniform field element in [0, p) from (seed, counter).
std::uint64_t field_element(std::uint64_t seed, std::uint64_t counter);

// Child seed for a tagged sub-structure.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix64(mix64(seed, tag), index);
}

// k-wise independent hash family: a seeded random polynomial of degree k-1
// over GF(p), reduced modulo the output range. The modulo step biases each
// output by O(range/p), negligible at the ranges used here.
class HashFamily {
 public:
  HashFamily() = default;

  // Throws std::invalid_argument on zero degree/domain/range or when the
  // field is too small for the requested domain or range.
  HashFamily(std::uint32_t degree, std::uint64_t domain, std::uint64_t range, std::uint64_t seed);

  static HashFamily from_coefficients(std::vector<std::uint64_t> coefficients, std::uint64_t domain,
                                      std::uint64_t range);

  // Throws std::out_of_range when x >= domain.
  std::uint64_t operator()(std::uint64_t x) const;

  std::uint32_t degree() const { return static_cast<std::uint32_t>(coefficients_.size()); }
  std::uint64_t domain() const { return domain_; }
  std::uint64_t range() const { return range_; }
  const std::vector<std::uint64_t>& coefficients() const { return coefficients_; }

 private:
  std::vector<std::uint64_t> coefficients_;  // Horner order: highest degree first
  std::uint64_t domain_ = 0;
  std::uint64_t range_ = 0;
};

}  // namespace msk
