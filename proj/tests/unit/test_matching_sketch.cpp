#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <set>
#include <unordered_map>

#include "msk/calibration.hpp"
#include "msk/diagnostics.hpp"
#include "msk/matching_sketch.hpp"
#include "msk/rng.hpp"
#include "msk/stream.hpp"

using namespace msk;

namespace {

// Interleave per-edge token sequences in a random but prefix-valid order:
// within one edge the order is kept, across edges it is shuffled.
std::vector<EdgeUpdate> valid_shuffle(std::vector<std::vector<EdgeUpdate>> per_edge, Rng& rng) {
  std::vector<EdgeUpdate> out;
  std::vector<std::size_t> cursor(per_edge.size(), 0);
  std::size_t remaining = 0;
  for (const auto& seq : per_edge) remaining += seq.size();
  while (remaining > 0) {
    std::size_t pick = rng.below(per_edge.size());
    if (cursor[pick] == per_edge[pick].size()) continue;
    out.push_back(per_edge[pick][cursor[pick]++]);
    --remaining;
  }
  return out;
}

}  // namespace

TEST_CASE("derived parameters match the defining formulas") {
  Params p = Params::make(1024, 0.5, 64);
  CHECK(p.group_count == 2);
  CHECK(p.partners_per_group == 60);
  CHECK(p.hash_degree == 128);
  CHECK(p.sampler_delta() == doctest::Approx(std::pow(1024.0, -5.0)));

  Params q = Params::make(256, 1.0 / 3.0, 256);
  CHECK(q.group_count == 41);          // ceil(256 / 256^(1/3))
  CHECK(q.partners_per_group == 336);  // 6 * ceil(256 / 256^(2/3)) * 8
  CHECK(q.hash_degree == 28);          // 4 * ceil(256^(1/3))

  CHECK_THROWS_AS(Params::make(256, 0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(256, 0.6, 16), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(256, 0.3, 0), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(256, 0.3, 257), std::invalid_argument);
}

TEST_CASE("same seed rebuilds the same sketch") {
  Params p = Params::make(64, 0.4, 16);
  MatchingSketch a(p, 999);
  MatchingSketch b(p, 999);
  CHECK(a.active_pairs() == b.active_pairs());
  CHECK(a.serialize() == b.serialize());
}

TEST_CASE("active pair count within dedup bounds across seeds") {
  for (std::uint64_t opt : {16ULL, 64ULL, 256ULL}) {
    Params p = Params::make(256, 1.0 / 3.0, opt);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      MatchingSketch s(p, seed);
      std::uint64_t cap = std::min(p.group_count * p.partners_per_group,
                                   p.group_count * p.group_count);
      CHECK(s.active_pair_count() >= 1);
      CHECK(s.active_pair_count() <= cap);
    }
  }
}

TEST_CASE("updates on inactive pairs leave the state untouched") {
  // Large group count with few partners leaves inactive pairs to probe.
  Params p = Params::make(1024, 0.5, 1024);
  MatchingSketch s(p, 31);
  std::set<std::pair<std::uint32_t, std::uint32_t>> active;
  for (auto key : s.active_pairs()) active.insert(key);
  REQUIRE(active.size() < p.group_count * p.group_count);

  std::string fresh = s.serialize();
  bool probed_inactive = false, probed_active = false;
  for (std::uint64_t u = 0; u < 1024 && !(probed_inactive && probed_active); ++u) {
    for (std::uint64_t v = 0; v < 1024; ++v) {
      auto key = std::make_pair(static_cast<std::uint32_t>(s.left_group(u)),
                                static_cast<std::uint32_t>(s.right_group(v)));
      if (!probed_inactive && !active.count(key)) {
        s.update(u, v, +1);
        CHECK(s.serialize() == fresh);
        probed_inactive = true;
      }
      if (!probed_active && active.count(key)) {
        MatchingSketch touched(p, 31);
        touched.update(u, v, +1);
        CHECK(touched.serialize() != fresh);
        probed_active = true;
      }
      if (probed_inactive && probed_active) break;
    }
  }
  CHECK(probed_inactive);
  CHECK(probed_active);
}

TEST_CASE("insert then delete restores the fresh state") {
  Params p = Params::make(64, 0.4, 32);
  MatchingSketch s(p, 5);
  std::string fresh = s.serialize();
  s.update(3, 9, +1);
  s.update(3, 9, -1);
  CHECK(s.serialize() == fresh);
  CHECK_THROWS_AS(s.update(64, 0, +1), std::out_of_range);
  CHECK_THROWS_AS(s.update(0, 64, +1), std::out_of_range);
}

TEST_CASE("any valid update order gives a bit-identical sketch") {
  const std::uint64_t n = 64;
  Rng rng(808);
  // ~10^4 tokens: random edges with +/- patterns that keep prefixes valid.
  std::vector<std::vector<EdgeUpdate>> per_edge;
  for (int e = 0; e < 2500; ++e) {
    std::uint64_t u = rng.below(n), v = rng.below(n);
    std::vector<EdgeUpdate> seq = {{u, v, +1}};
    if (rng.coin()) seq.push_back({u, v, -1});
    if (rng.coin()) seq.push_back({u, v, +1});
    if (seq.size() == 3 && rng.coin()) seq.push_back({u, v, -1});
    per_edge.push_back(std::move(seq));
  }

  Params p = Params::make(n, 1.0 / 3.0, 16);
  std::string want;
  for (int perm = 0; perm < 10; ++perm) {
    std::vector<EdgeUpdate> updates = valid_shuffle(per_edge, rng);
    StreamSpec spec{n, GraphKind::kBipartite, updates};
    validate(spec);  // sanity: the interleaving is strict turnstile
    MatchingSketch s(p, 17);
    s.apply(updates);
    if (perm == 0) {
      want = s.serialize();
    } else {
      CHECK(s.serialize() == want);
    }
  }
}

TEST_CASE("merge equals single-stream processing") {
  const std::uint64_t n = 64;
  PlantedStream ps = gen_planted(n, 16, 40, 20, 404);
  Params p = Params::make(n, 1.0 / 3.0, 16);

  MatchingSketch single(p, 2024);
  single.apply(ps.stream.updates);

  std::vector<MatchingSketch> players(4, MatchingSketch(p, 2024));
  for (std::size_t i = 0; i < ps.stream.updates.size(); ++i) {
    const EdgeUpdate& upd = ps.stream.updates[i];
    players[i % 4].update(upd.u, upd.v, upd.delta);
  }
  MatchingSketch merged = players[0];
  for (int i = 1; i < 4; ++i) merged.merge(players[i]);
  CHECK(merged.serialize() == single.serialize());

  MatchingSketch fresh(p, 2024);
  merged.merge(fresh);
  CHECK(merged.serialize() == single.serialize());

  MatchingSketch other_seed(p, 2025);
  CHECK_THROWS_AS(merged.merge(other_seed), IncompatibleSketchError);
  MatchingSketch other_params(Params::make(n, 1.0 / 3.0, 32), 2024);
  CHECK_THROWS_AS(merged.merge(other_params), IncompatibleSketchError);
}

TEST_CASE("serialization round trip") {
  Params p = Params::make(32, 0.4, 8);
  MatchingSketch s(p, 12);
  s.update(1, 2, +1);
  s.update(30, 31, +1);
  std::string blob = s.serialize();
  ByteReader reader(blob);
  MatchingSketch back = MatchingSketch::deserialize(reader);
  CHECK(back.serialize() == blob);
  CHECK(reader.remaining() == 0);
}

TEST_CASE("routing: an edge lands exactly in its group pair") {
  const std::uint64_t n = 16;
  Params p = Params::make(n, 0.5, 16);
  MatchingSketch fresh(p, 606);
  std::unordered_map<std::uint64_t, std::string> fresh_pair_blob;
  for (auto [lg, rg] : fresh.active_pairs())
    fresh_pair_blob[lg * p.group_count + rg] = fresh.pair_sketch(lg, rg)->serialize();

  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t v = 0; v < n; ++v) {
      MatchingSketch s(p, 606);
      s.update(u, v, +1);
      std::uint64_t routed = s.left_group(u) * p.group_count + s.right_group(v);
      for (auto [lg, rg] : s.active_pairs()) {
        std::uint64_t key = lg * p.group_count + rg;
        const L0Sketch* sub = s.pair_sketch(lg, rg);
        if (key == routed) {
          L0Sample got = sub->sample();
          REQUIRE(got.status == L0Sample::Status::kFound);
          CHECK(got.index == u * n + v);
          CHECK(got.frequency == 1);
        } else {
          CHECK(sub->serialize() == fresh_pair_blob[key]);
        }
      }
    }
  }
}

TEST_CASE("extraction basics") {
  const std::uint64_t n = 64;
  Params p = Params::make(n, 1.0 / 3.0, 4);
  MatchingSketch s(p, 3);

  SUBCASE("empty stream gives the empty matching") { CHECK(s.extract().size() == 0); }

  SUBCASE("a single routed edge is recovered") {
    // Find an edge whose group pair is active, insert it, extract it.
    bool inserted = false;
    for (std::uint64_t u = 0; u < n && !inserted; ++u)
      for (std::uint64_t v = 0; v < n && !inserted; ++v) {
        if (s.pair_sketch(static_cast<std::uint32_t>(s.left_group(u)),
                          static_cast<std::uint32_t>(s.right_group(v))) == nullptr)
          continue;
        s.update(u, v, +1);
        Matching m = s.extract();
        REQUIRE(m.size() == 1);
        CHECK(m.edges()[0] == Edge{u, v});
        inserted = true;
      }
    CHECK(inserted);
  }
}

TEST_CASE("extracted edges are vertex-disjoint and really in the graph") {
  const std::uint64_t n = 64;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlantedStream ps = gen_planted(n, 16, 30, 10, seed);
    auto mult = validate(ps.stream);
    Params p = Params::make(n, 1.0 / 3.0, 16);
    MatchingSketch s(p, derive_seed(seed, 1, 2));
    s.apply(ps.stream.updates);
    Matching m = s.extract();  // construction of Matching checks disjointness
    for (const Edge& e : m.edges()) {
      auto it = mult.find(e.first * n + e.second);
      REQUIRE(it != mult.end());
      CHECK(it->second >= 1);
    }
  }
}

TEST_CASE("estimate search recovers a lone edge through the global sampler") {
  const std::uint64_t n = 256;
  std::vector<EdgeUpdate> updates = {{200, 3, +1}};
  Matching m = guess_opt_extract(updates, n, 1.0 / 3.0, 50);
  REQUIRE(m.size() == 1);
  CHECK(m.edges()[0] == Edge{200, 3});

  CHECK(guess_opt_extract({}, n, 1.0 / 3.0, 50).size() == 0);
}

TEST_CASE("estimate search stays within the pinned space budget") {
  const std::uint64_t n = 256;
  const double eps = 1.0 / 3.0;
  OptSearchSketch sketch(n, eps, 1);
  double log2n = std::log2(static_cast<double>(n));
  double budget = kSpaceCellsC * std::pow(static_cast<double>(n), 2.0 - 3.0 * eps) *
                  std::pow(log2n, 4.0);
  CHECK(static_cast<double>(sketch.cell_count()) <= budget);
}

TEST_CASE("estimate search matches the known-estimate ratio bound") {
  // Planted size deliberately off the power-of-two grid.
  const std::uint64_t n = 1024;
  const double eps = 1.0 / 3.0;
  double n_eps = std::pow(static_cast<double>(n), eps);
  for (int trial = 0; trial < 5; ++trial) {
    PlantedStream ps = gen_planted(n, 300, n / 4, n / 8, 9100 + trial);
    auto mult = validate(ps.stream);
    std::vector<Edge> final_edges;
    for (const auto& [key, m] : mult) final_edges.emplace_back(key / n, key % n);
    std::uint64_t exact = max_matching(BipartiteGraph(n, n, final_edges)).size();

    Matching m = guess_opt_extract(ps.stream.updates, n, eps, derive_seed(13, 5, trial));
    CHECK(static_cast<double>(m.size()) * kApproxRatioC * n_eps >= static_cast<double>(exact));
  }
}

TEST_CASE("extra partner rounds only widen the active set") {
  Params one = Params::make(256, 0.5, 256, 1);
  Params three = Params::make(256, 0.5, 256, 3);
  CHECK(one != three);
  MatchingSketch a(one, 9);
  MatchingSketch b(three, 9);
  CHECK(b.active_pair_count() >= a.active_pair_count());
  CHECK_THROWS_AS(a.merge(b), IncompatibleSketchError);

  // The first round's draws are a prefix of the boosted draw sequence.
  std::set<std::pair<std::uint32_t, std::uint32_t>> wide;
  for (auto key : b.active_pairs()) wide.insert(key);
  for (auto key : a.active_pairs()) CHECK(wide.count(key) == 1);
}

TEST_CASE("known-estimate extraction recovers a planted matching at small scale") {
  // Desk-scale version of the approximation guarantee; the full grid runs in
  // the acceptance suite.
  const std::uint64_t n = 256;
  const double eps = 1.0 / 3.0;
  double n_eps = std::pow(static_cast<double>(n), eps);
  int ok = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    PlantedStream ps = gen_planted(n, n, 0, 0, 7000 + trial);
    Params p = Params::make(n, eps, n);
    MatchingSketch s(p, derive_seed(42, 7, trial));
    s.apply(ps.stream.updates);
    double extracted = static_cast<double>(s.extract().size());
    if (extracted * kApproxRatioC * n_eps >= static_cast<double>(n)) ++ok;
  }
  CHECK(ok >= 9);
}

TEST_CASE("bipartition reduction") {
  const std::uint64_t n = 128;
  BipartitionReducer reducer(n, 2121);

  SUBCASE("same-side edges drop, crossing edges keep their delta") {
    std::uint64_t left_a = 0, left_b = 0, cross_u = 0, cross_v = 0;
    bool have_same = false, have_cross = false;
    for (std::uint64_t u = 0; u < n && !(have_same && have_cross); ++u)
      for (std::uint64_t v = u + 1; v < n; ++v) {
        if (reducer.on_left(u) == reducer.on_left(v) && !have_same) {
          left_a = u;
          left_b = v;
          have_same = true;
        }
        if (reducer.on_left(u) != reducer.on_left(v) && !have_cross) {
          cross_u = u;
          cross_v = v;
          have_cross = true;
        }
      }
    REQUIRE(have_same);
    REQUIRE(have_cross);
    CHECK(!reducer.reduce({left_a, left_b, +1}).has_value());
    auto forwarded = reducer.reduce({cross_u, cross_v, -1});
    REQUIRE(forwarded.has_value());
    CHECK(forwarded->delta == -1);
  }

  SUBCASE("self-loops are rejected") {
    CHECK_THROWS_AS(reducer.reduce({5, 5, +1}), std::invalid_argument);
  }

  SUBCASE("deterministic given seed") {
    StreamSpec general{n, GraphKind::kGeneral, {}};
    Rng rng(33);
    for (int i = 0; i < 500; ++i) {
      std::uint64_t u = rng.below(n), v = rng.below(n);
      if (u == v) continue;
      general.updates.push_back({u, v, +1});
    }
    StreamSpec a = bipartition_reduce(general, 9);
    StreamSpec b = bipartition_reduce(general, 9);
    CHECK(a == b);
    CHECK(a.kind == GraphKind::kBipartite);
  }

  SUBCASE("about half of a fixed matching survives") {
    const std::uint64_t m = 40;
    std::vector<EdgeUpdate> matching;
    for (std::uint64_t i = 0; i < m; ++i) matching.push_back({2 * i, 2 * i + 1, +1});
    double total = 0;
    const int seeds = 1000;
    for (int seed = 0; seed < seeds; ++seed) {
      BipartitionReducer r(n, derive_seed(1234, 5, seed));
      for (const EdgeUpdate& upd : matching)
        if (r.reduce(upd)) total += 1;
    }
    double mean = total / seeds;
    double sigma = std::sqrt(m * 0.25 / seeds);
    CHECK(std::abs(mean - m / 2.0) <= 3 * sigma);
  }
}

TEST_CASE("balls-in-bins diagnostic holds on the grid") {
  for (const auto& cell : balls_bins_grid(2000, 99)) {
    CAPTURE(cell.balls);
    CAPTURE(cell.bins);
    CHECK(cell.pass);
  }
}

TEST_CASE("spanning diagnostic at reduced scale") {
  SpanningReport report = spanning_diagnostic(256, 0.5, 50, 7);
  CHECK(report.pass);
}
