#include "msk/l0_sampler.hpp"

#include <bit>
#include <cmath>

namespace msk {

namespace {

constexpr std::uint64_t kTagMember = 0x6d656d6272ULL;
constexpr std::uint64_t kTagBucket = 0x62636b7473ULL;
constexpr std::uint64_t kTagCellZ = 0x63656c6c7aULL;
constexpr std::uint32_t kMagic = 0x4b53304cU;  // "L0SK"
constexpr std::uint32_t kVersion = 1;

std::uint32_t ceil_log2(std::uint64_t x) {
  std::uint32_t bits = 0;
  while ((1ULL << bits) < x) ++bits;
  return bits;
}

}  // namespace

std::optional<std::pair<std::uint64_t, std::int64_t>> OneSparseCell::decode(
    std::uint64_t domain, std::uint64_t z) const {
  if (weight == 0) return std::nullopt;
  if (weighted_sum % weight != 0) return std::nullopt;
  std::int64_t index = weighted_sum / weight;
  if (index < 0 || static_cast<std::uint64_t>(index) >= domain) return std::nullopt;
  std::uint64_t expect = mul_mod(to_field(weight), pow_mod(z, static_cast<std::uint64_t>(index)));
  if (expect != fingerprint) return std::nullopt;
  return std::make_pair(static_cast<std::uint64_t>(index), weight);
}

L0Sketch::L0Sketch(std::uint64_t domain, double delta, std::uint64_t seed,
                   std::uint32_t repetitions)
    : domain_(domain), delta_(delta), seed_(seed), repetitions_(repetitions) {
  if (domain == 0) throw std::invalid_argument("L0Sketch: domain must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("L0Sketch: delta outside (0,1)");
  if (repetitions == 0) throw std::invalid_argument("L0Sketch: repetitions must be positive");

  levels_ = ceil_log2(domain) + 1;
  double log_inv = std::log2(1.0 / delta);
  buckets_ = 2 * static_cast<std::uint32_t>(std::ceil(log_inv - 1e-9));
  if (buckets_ < 2) buckets_ = 2;

  std::uint32_t member_bits = levels_ + 2;
  if (member_bits > 57) member_bits = 57;
  std::uint64_t member_range = 1ULL << member_bits;

  member_hash_.reserve(static_cast<std::size_t>(repetitions_) * levels_);
  bucket_hash_.reserve(static_cast<std::size_t>(repetitions_) * levels_);
  for (std::uint32_t r = 0; r < repetitions_; ++r) {
    for (std::uint32_t j = 0; j < levels_; ++j) {
      std::uint64_t idx = static_cast<std::uint64_t>(r) * levels_ + j;
      member_hash_.emplace_back(2, domain_, member_range, derive_seed(seed_, kTagMember, idx));
      bucket_hash_.emplace_back(2, domain_, buckets_, derive_seed(seed_, kTagBucket, idx));
    }
  }
  cells_.resize(static_cast<std::size_t>(repetitions_) * levels_ * buckets_);
}

bool L0Sketch::admits(std::uint32_t rep, std::uint32_t level, std::uint64_t index) const {
  if (level == 0) return true;
  std::uint64_t h = member_hash_[static_cast<std::size_t>(rep) * levels_ + level](index);
  return static_cast<std::uint32_t>(std::countr_zero(h)) >= level;
}

std::uint64_t L0Sketch::cell_z(std::size_t cell_index) const {
  return 1 + derive_seed(seed_, kTagCellZ, cell_index) % (kFieldPrime - 1);
}

void L0Sketch::update(std::uint64_t index, std::int64_t delta_value) {
  if (index >= domain_) throw std::out_of_range("L0Sketch: index outside domain");
  if (delta_value == 0) return;
  for (std::uint32_t r = 0; r < repetitions_; ++r) {
    for (std::uint32_t j = 0; j < levels_; ++j) {
      if (!admits(r, j, index)) continue;
      std::size_t row = static_cast<std::size_t>(r) * levels_ + j;
      std::uint64_t b = bucket_hash_[row](index);
      std::size_t cell = row * buckets_ + b;
      cells_[cell].add(index, delta_value, cell_z(cell));
    }
  }
}

void L0Sketch::merge(const L0Sketch& other) {
  std::uint64_t self_bits, other_bits;
  std::memcpy(&self_bits, &delta_, 8);
  std::memcpy(&other_bits, &other.delta_, 8);
  if (domain_ != other.domain_ || self_bits != other_bits || seed_ != other.seed_ ||
      repetitions_ != other.repetitions_) {
    throw IncompatibleSketchError("L0Sketch: merge of sketches with different parameters");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].combine(other.cells_[i]);
}

L0Sample L0Sketch::sample() const {
  bool any_nonzero = false;
  for (std::uint32_t j = levels_; j-- > 0;) {
    for (std::uint32_t r = 0; r < repetitions_; ++r) {
      std::size_t row = static_cast<std::size_t>(r) * levels_ + j;
      for (std::uint32_t b = 0; b < buckets_; ++b) {
        std::size_t cell = row * buckets_ + b;
        const OneSparseCell& c = cells_[cell];
        if (c.is_zero()) continue;
        any_nonzero = true;
        if (auto hit = c.decode(domain_, cell_z(cell))) {
          return {L0Sample::Status::kFound, hit->first, hit->second};
        }
      }
    }
  }
  return {any_nonzero ? L0Sample::Status::kFail : L0Sample::Status::kEmpty, 0, 0};
}

void L0Sketch::serialize(ByteWriter& out) const {
  out.u32(kMagic);
  out.u32(kVersion);
  out.u64(domain_);
  out.f64(delta_);
  out.u64(seed_);
  out.u32(repetitions_);
  out.u32(levels_);
  out.u32(buckets_);
  for (const OneSparseCell& c : cells_) {
    out.i64(c.weight);
    out.i64(c.weighted_sum);
    out.u64(c.fingerprint);
  }
}

std::string L0Sketch::serialize() const {
  std::string out;
  ByteWriter w = ByteWriter::appending_to(out);
  serialize(w);
  return out;
}

std::size_t L0Sketch::serialized_size() const {
  std::size_t n = 0;
  ByteWriter w = ByteWriter::counting(n);
  serialize(w);
  return n;
}

L0Sketch L0Sketch::deserialize(ByteReader& in) {
  if (in.u32() != kMagic) throw std::runtime_error("L0Sketch: bad magic");
  if (in.u32() != kVersion) throw std::runtime_error("L0Sketch: unsupported version");
  std::uint64_t domain = in.u64();
  double delta = in.f64();
  std::uint64_t seed = in.u64();
  std::uint32_t reps = in.u32();
  L0Sketch s(domain, delta, seed, reps);
  std::uint32_t levels = in.u32();
  std::uint32_t buckets = in.u32();
  if (levels != s.levels_ || buckets != s.buckets_)
    throw std::runtime_error("L0Sketch: layout mismatch");
  for (OneSparseCell& c : s.cells_) {
    c.weight = in.i64();
    c.weighted_sum = in.i64();
    c.fingerprint = in.u64();
  }
  return s;
}

}  // namespace msk
