#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msk/binio.hpp"
#include "msk/field_hash.hpp"

namespace msk {

struct IncompatibleSketchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Accumulator that recovers a vector exactly when it has a single nonzero
// coordinate: (sum of values, sum of index-weighted values, fingerprint
// sum f_i * z^i over GF(p)). All three components are linear, so cells add.
struct OneSparseCell {
  std::int64_t weight = 0;
  std::int64_t weighted_sum = 0;
  std::uint64_t fingerprint = 0;

  void add(std::uint64_t index, std::int64_t delta, std::uint64_t z) {
    weight += delta;
    weighted_sum += delta * static_cast<std::int64_t>(index);
    fingerprint = add_mod(fingerprint, mul_mod(to_field(delta), pow_mod(z, index)));
  }

  void combine(const OneSparseCell& other) {
    weight += other.weight;
    weighted_sum += other.weighted_sum;
    fingerprint = add_mod(fingerprint, other.fingerprint);
  }

  bool is_zero() const { return weight == 0 && weighted_sum == 0 && fingerprint == 0; }

  // (index, value) when the cell holds exactly one nonzero coordinate of the
  // given domain; the fingerprint rejects multi-coordinate states with
  // failure probability <= 2/p.
  std::optional<std::pair<std::uint64_t, std::int64_t>> decode(std::uint64_t domain,
                                                               std::uint64_t z) const;
};

struct L0Sample {
  enum class Status { kFound, kEmpty, kFail };
  Status status = Status::kEmpty;
  std::uint64_t index = 0;
  std::int64_t frequency = 0;
};

// Mergeable linear sketch of a vector indexed by [0, domain) from which a
// near-uniform nonzero coordinate (with its exact value) can be recovered.
// Structure: ceil(log2 domain)+1 geometric subsampling levels, each with its
// own membership hash and a pairwise-hashed row of 2*ceil(log2(1/delta))
// one-sparse cells. Everything is derived from (domain, delta, seed), so
// sketches built from equal parameters merge exactly.
class L0Sketch {
 public:
  L0Sketch(std::uint64_t domain, double delta, std::uint64_t seed, std::uint32_t repetitions = 1);

  void update(std::uint64_t index, std::int64_t delta_value);

  // Componentwise sum; requires identical construction parameters.
  void merge(const L0Sketch& other);

  // Scans levels sparsest-first across repetitions and returns the first
  // one-sparse decode. kEmpty means every cell is identically zero.
  L0Sample sample() const;

  std::uint64_t domain() const { return domain_; }
  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t levels() const { return levels_; }
  std::uint32_t buckets_per_level() const { return buckets_; }
  std::uint32_t repetitions() const { return repetitions_; }
  std::size_t cell_count() const { return cells_.size(); }

  void serialize(ByteWriter& out) const;
  std::string serialize() const;
  std::size_t serialized_size() const;
  static L0Sketch deserialize(ByteReader& in);

 private:
  bool admits(std::uint32_t rep, std::uint32_t level, std::uint64_t index) const;
  std::uint64_t cell_z(std::size_t cell_index) const;

  std::uint64_t domain_ = 0;
  double delta_ = 0;
  std::uint64_t seed_ = 0;
  std::uint32_t levels_ = 0;
  std::uint32_t buckets_ = 0;
  std::uint32_t repetitions_ = 0;
  std::vector<HashFamily> member_hash_;  // one per (rep, level)
  std::vector<HashFamily> bucket_hash_;  // one per (rep, level)
  std::vector<OneSparseCell> cells_;     // [rep][level][bucket]
};

}  // namespace msk
