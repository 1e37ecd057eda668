#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <unordered_map>
#include <vector>

#include "msk/l0_sampler.hpp"
#include "msk/rng.hpp"

using namespace msk;

TEST_CASE("fresh sketch samples empty and serializes reproducibly") {
  L0Sketch a(1024, 0.01, 42);
  L0Sketch b(1024, 0.01, 42);
  CHECK(a.sample().status == L0Sample::Status::kEmpty);
  CHECK(a.serialize() == b.serialize());
}

TEST_CASE("constructor rejects bad parameters") {
  CHECK_THROWS_AS(L0Sketch(0, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(L0Sketch(16, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(L0Sketch(16, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(L0Sketch(16, -0.5, 1), std::invalid_argument);
  L0Sketch s(16, 0.5, 1);
  CHECK_THROWS_AS(s.update(16, +1), std::out_of_range);
}

TEST_CASE("cell count tracks levels times buckets") {
  // domain 2^20 -> 21 levels; delta 2^-10 -> 20 buckets per level.
  L0Sketch s(1ULL << 20, 1.0 / 1024.0, 7);
  CHECK(s.levels() == 21);
  CHECK(s.buckets_per_level() == 20);
  std::size_t nominal = 21 * 10 * 2;
  CHECK(s.cell_count() >= nominal / 2);
  CHECK(s.cell_count() <= nominal * 2);
}

TEST_CASE("single nonzero entry decodes exactly") {
  L0Sketch s(1ULL << 16, 0.01, 3);
  s.update(777, +1);
  s.update(777, +1);
  s.update(777, +1);
  L0Sample out = s.sample();
  REQUIRE(out.status == L0Sample::Status::kFound);
  CHECK(out.index == 777);
  CHECK(out.frequency == 3);
}

TEST_CASE("insert then delete returns to the zero state bit-exactly") {
  L0Sketch s(4096, 0.01, 11);
  std::string fresh = s.serialize();
  s.update(9, +1);
  CHECK(s.serialize() != fresh);
  s.update(9, -1);
  CHECK(s.serialize() == fresh);
  CHECK(s.sample().status == L0Sample::Status::kEmpty);
}

TEST_CASE("update order does not change the state") {
  const std::uint64_t domain = 1ULL << 12;
  Rng rng(100);
  std::vector<std::pair<std::uint64_t, std::int64_t>> updates;
  for (int i = 0; i < 100; ++i) updates.push_back({rng.below(domain), rng.coin() ? 1 : -1});

  L0Sketch base(domain, 0.01, 55);
  for (auto [idx, d] : updates) base.update(idx, d);
  std::string want = base.serialize();

  for (int perm = 0; perm < 10; ++perm) {
    rng.shuffle(updates);
    L0Sketch s(domain, 0.01, 55);
    for (auto [idx, d] : updates) s.update(idx, d);
    CHECK(s.serialize() == want);
  }
}

TEST_CASE("merge is the sketch of the summed vectors") {
  const std::uint64_t domain = 1ULL << 14;
  Rng rng(200);
  std::vector<std::pair<std::uint64_t, std::int64_t>> updates;
  for (int i = 0; i < 10000; ++i) updates.push_back({rng.below(domain), +1});

  L0Sketch single(domain, 0.01, 77);
  std::vector<L0Sketch> parts(4, L0Sketch(domain, 0.01, 77));
  for (std::size_t i = 0; i < updates.size(); ++i) {
    single.update(updates[i].first, updates[i].second);
    parts[i % 4].update(updates[i].first, updates[i].second);
  }
  L0Sketch merged = parts[0];
  for (int i = 1; i < 4; ++i) merged.merge(parts[i]);
  CHECK(merged.serialize() == single.serialize());

  SUBCASE("merge with fresh sketch is the identity") {
    L0Sketch fresh(domain, 0.01, 77);
    L0Sketch copy = single;
    copy.merge(fresh);
    CHECK(copy.serialize() == single.serialize());
  }

  SUBCASE("merge with the negated vector gives the zero sketch") {
    L0Sketch negated(domain, 0.01, 77);
    for (auto [idx, d] : updates) negated.update(idx, -d);
    L0Sketch copy = single;
    copy.merge(negated);
    CHECK(copy.serialize() == L0Sketch(domain, 0.01, 77).serialize());
  }
}

TEST_CASE("merging incompatible sketches fails") {
  L0Sketch a(1024, 0.01, 1);
  L0Sketch b(1024, 0.01, 2);
  L0Sketch c(2048, 0.01, 1);
  L0Sketch d(1024, 0.02, 1);
  CHECK_THROWS_AS(a.merge(b), IncompatibleSketchError);
  CHECK_THROWS_AS(a.merge(c), IncompatibleSketchError);
  CHECK_THROWS_AS(a.merge(d), IncompatibleSketchError);
}

TEST_CASE("serialization round trip") {
  L0Sketch s(4096, 0.05, 13);
  s.update(1, +1);
  s.update(4095, +2);
  std::string blob = s.serialize();
  ByteReader reader(blob);
  L0Sketch back = L0Sketch::deserialize(reader);
  CHECK(back.serialize() == blob);
  CHECK(reader.remaining() == 0);
}

TEST_CASE("found results always report the exact multiplicity") {
  const std::uint64_t domain = 1ULL << 16;
  Rng rng(300);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::int64_t> reference(256, 0);
    L0Sketch s(domain, 0.05, rng.next());
    int tokens = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < tokens; ++i) {
      std::uint64_t idx = rng.below(256);
      std::int64_t d = rng.coin() ? 1 : -1;
      if (reference[idx] + d < 0) d = +1;  // keep the final vector nonnegative
      reference[idx] += d;
      s.update(idx, d);
    }
    L0Sample out = s.sample();
    bool all_zero = true;
    for (std::int64_t v : reference) all_zero = all_zero && v == 0;
    if (out.status == L0Sample::Status::kFound) {
      CHECK(out.frequency == reference[out.index]);
      CHECK(out.frequency != 0);
    } else if (out.status == L0Sample::Status::kEmpty) {
      CHECK(all_zero);
    }
  }
}

TEST_CASE("two-coordinate cells are rejected by the fingerprint") {
  // Adversarial one-sparse decodes: f_i = f_j = 1 with i + j even, so the
  // ratio test alone would decode index (i + j) / 2.
  Rng rng(400);
  int false_decodes = 0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t i = 2 * rng.below(1ULL << 15);
    std::uint64_t j = 2 * rng.below(1ULL << 15);
    if (i == j) continue;
    std::uint64_t z = 1 + rng.below(kFieldPrime - 1);
    OneSparseCell cell;
    cell.add(i, +1, z);
    cell.add(j, +1, z);
    if (cell.decode(1ULL << 16, z)) ++false_decodes;
  }
  CHECK(static_cast<double>(false_decodes) / trials <= 1e-4);
}

TEST_CASE("fail rate stays below delta with margin") {
  const std::uint64_t domain = 1ULL << 12;
  const double delta = 1.0 / 64.0;
  const int trials = 2000;
  for (std::uint64_t support : {1ULL, 10ULL, 100ULL}) {
    int fails = 0;
    for (int trial = 0; trial < trials; ++trial) {
      std::uint64_t seed = derive_seed(9000, support, trial);
      Rng rng(seed);
      L0Sketch s(domain, delta, seed);
      for (std::uint64_t idx : rng.sample(domain, support)) s.update(idx, +1);
      if (s.sample().status == L0Sample::Status::kFail) ++fails;
    }
    double rate = static_cast<double>(fails) / trials;
    double sigma = std::sqrt(delta * (1 - delta) / trials);
    CHECK(rate <= delta + 3 * sigma);
  }
}
