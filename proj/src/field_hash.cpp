#include "msk/field_hash.hpp"

#include <stdexcept>

namespace msk {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  std::uint64_t b = base >= kFieldPrime ? base % kFieldPrime : base;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, b);
    b = mul_mod(b, b);
    exp >>= 1;
  }
  return result;
}

std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t field_element(std::uint64_t seed, std::uint64_t counter) {
  // 2^64 mod p = 8, so plain reduction biases residues 0..7 by 2^-61 each.
  return mix64(seed, counter) % kFieldPrime;
}

HashFamily::HashFamily(std::uint32_t degree, std::uint64_t domain, std::uint64_t range,
                       std::uint64_t seed) {
  if (degree == 0) throw std::invalid_argument("HashFamily: degree must be positive");
  if (domain == 0) throw std::invalid_argument("HashFamily: domain must be positive");
  if (range == 0) throw std::invalid_argument("HashFamily: range must be positive");
  if (domain > kFieldPrime || range > kFieldPrime)
    throw std::invalid_argument("HashFamily: domain/range exceeds field size");
  domain_ = domain;
  range_ = range;
  coefficients_.resize(degree);
  for (std::uint32_t i = 0; i < degree; ++i) coefficients_[i] = field_element(seed, i);
}

HashFamily HashFamily::from_coefficients(std::vector<std::uint64_t> coefficients,
                                         std::uint64_t domain, std::uint64_t range) {
  if (coefficients.empty()) throw std::invalid_argument("HashFamily: degree must be positive");
  if (domain == 0 || range == 0) throw std::invalid_argument("HashFamily: zero domain/range");
  for (std::uint64_t c : coefficients)
    if (c >= kFieldPrime) throw std::invalid_argument("HashFamily: coefficient outside field");
  HashFamily h;
  h.coefficients_ = std::move(coefficients);
  h.domain_ = domain;
  h.range_ = range;
  return h;
}

std::uint64_t HashFamily::operator()(std::uint64_t x) const {
  if (x >= domain_) throw std::out_of_range("HashFamily: input outside domain");
  std::uint64_t acc = 0;
  for (std::uint64_t c : coefficients_) acc = add_mod(mul_mod(acc, x), c);
  return acc % range_;
}

}  // namespace msk
