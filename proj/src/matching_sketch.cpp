#include "msk/matching_sketch.hpp"

#include <algorithm>
#include <cmath>

namespace msk {

namespace {

constexpr std::uint64_t kTagLeftHash = 0x6c686173ULL;
constexpr std::uint64_t kTagRightHash = 0x72686173ULL;
constexpr std::uint64_t kTagPartners = 0x70727472ULL;
constexpr std::uint64_t kTagPairSketch = 0x70736b74ULL;
constexpr std::uint64_t kTagEstimate = 0x65737469ULL;
constexpr std::uint64_t kTagGlobal = 0x676c6f62ULL;
constexpr std::uint64_t kTagSide = 0x73696465ULL;
constexpr std::uint32_t kMagic = 0x544b534dU;  // "MSKT"
constexpr std::uint32_t kVersion = 1;

std::uint64_t ceil_div_pow(std::uint64_t numer, double denom) {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(numer) / denom - 1e-12));
}

std::uint64_t ceil_log2_u64(std::uint64_t x) {
  std::uint64_t bits = 0;
  while ((1ULL << bits) < x) ++bits;
  return bits;
}

}  // namespace

Params Params::make(std::uint64_t n, double epsilon, std::uint64_t opt_estimate,
                    std::uint32_t partner_rounds) {
  if (n < 2) throw std::invalid_argument("Params: n must be at least 2");
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw std::invalid_argument("Params: epsilon outside (0, 1/2]");
  if (opt_estimate < 1 || opt_estimate > n)
    throw std::invalid_argument("Params: opt_estimate outside [1, n]");
  if (partner_rounds == 0) throw std::invalid_argument("Params: partner_rounds must be positive");

  Params p;
  p.n = n;
  p.epsilon = epsilon;
  p.opt_estimate = opt_estimate;
  p.partner_rounds = partner_rounds;
  double n_eps = std::pow(static_cast<double>(n), epsilon);
  double n_2eps = std::pow(static_cast<double>(n), 2.0 * epsilon);
  std::uint64_t log2n = ceil_log2_u64(n);
  p.group_count = ceil_div_pow(opt_estimate, n_eps);
  p.partners_per_group = 6 * ceil_div_pow(opt_estimate, n_2eps) * log2n;
  p.hash_degree = 4 * static_cast<std::uint64_t>(std::ceil(n_eps - 1e-12));
  return p;
}

double Params::sampler_delta() const { return std::pow(static_cast<double>(n), -5.0); }

MatchingSketch::MatchingSketch(const Params& params, std::uint64_t seed)
    : params_(params), seed_(seed) {
  std::uint32_t degree = static_cast<std::uint32_t>(params_.hash_degree);
  left_hash_ = HashFamily(degree, params_.n, params_.group_count,
                          derive_seed(seed_, kTagLeftHash, 0));
  right_hash_ = HashFamily(degree, params_.n, params_.group_count,
                           derive_seed(seed_, kTagRightHash, 0));

  // Partners are drawn with replacement per left group; duplicates collapse
  // into a single sketch since they would observe the identical edge set.
  std::vector<std::uint64_t> keys;
  for (std::uint64_t li = 0; li < params_.group_count; ++li) {
    std::uint64_t partner_seed = derive_seed(seed_, kTagPartners, li);
    std::uint64_t draws =
        params_.partners_per_group * static_cast<std::uint64_t>(params_.partner_rounds);
    for (std::uint64_t d = 0; d < draws; ++d) {
      std::uint64_t rj = mix64(partner_seed, d) % params_.group_count;
      keys.push_back(li * params_.group_count + rj);
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  double delta = params_.sampler_delta();
  std::uint64_t edge_domain = params_.n * params_.n;
  pairs_.reserve(keys.size());
  pair_index_.reserve(keys.size());
  for (std::uint64_t key : keys) {
    ActivePair pair{static_cast<std::uint32_t>(key / params_.group_count),
                    static_cast<std::uint32_t>(key % params_.group_count),
                    L0Sketch(edge_domain, delta, derive_seed(seed_, kTagPairSketch, key))};
    pair_index_.emplace(key, static_cast<std::uint32_t>(pairs_.size()));
    pairs_.push_back(std::move(pair));
  }
}

void MatchingSketch::update(std::uint64_t left, std::uint64_t right, std::int64_t delta) {
  if (left >= params_.n || right >= params_.n)
    throw std::out_of_range("MatchingSketch: vertex outside [0, n)");
  std::uint64_t key = left_hash_(left) * params_.group_count + right_hash_(right);
  auto it = pair_index_.find(key);
  if (it == pair_index_.end()) return;
  pairs_[it->second].sketch.update(left * params_.n + right, delta);
}

void MatchingSketch::apply(const std::vector<EdgeUpdate>& updates) {
  for (const EdgeUpdate& upd : updates) update(upd.u, upd.v, upd.delta);
}

void MatchingSketch::merge(const MatchingSketch& other) {
  if (!(params_ == other.params_) || seed_ != other.seed_)
    throw IncompatibleSketchError("MatchingSketch: merge of sketches with different parameters");
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    pairs_[i].sketch.merge(other.pairs_[i].sketch);
}

std::vector<Edge> MatchingSketch::sample_edges() const {
  std::vector<Edge> edges;
  edges.reserve(pairs_.size());
  for (const ActivePair& pair : pairs_) {
    L0Sample s = pair.sketch.sample();
    if (s.status != L0Sample::Status::kFound) continue;
    edges.emplace_back(s.index / params_.n, s.index % params_.n);
  }
  return edges;
}

Matching MatchingSketch::extract() const {
  BipartiteGraph candidate(params_.n, params_.n, sample_edges());
  return max_matching(candidate);
}

std::size_t MatchingSketch::cell_count() const {
  std::size_t total = 0;
  for (const ActivePair& pair : pairs_) total += pair.sketch.cell_count();
  return total;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> MatchingSketch::active_pairs() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
  keys.reserve(pairs_.size());
  for (const ActivePair& pair : pairs_) keys.emplace_back(pair.left_group, pair.right_group);
  return keys;
}

const L0Sketch* MatchingSketch::pair_sketch(std::uint32_t left_group,
                                            std::uint32_t right_group) const {
  auto it = pair_index_.find(static_cast<std::uint64_t>(left_group) * params_.group_count +
                             right_group);
  return it == pair_index_.end() ? nullptr : &pairs_[it->second].sketch;
}

void MatchingSketch::serialize(ByteWriter& out) const {
  out.u32(kMagic);
  out.u32(kVersion);
  out.u64(params_.n);
  out.f64(params_.epsilon);
  out.u64(params_.opt_estimate);
  out.u64(params_.group_count);
  out.u64(params_.partners_per_group);
  out.u64(params_.hash_degree);
  out.u32(params_.partner_rounds);
  out.u64(seed_);
  out.u32(static_cast<std::uint32_t>(pairs_.size()));
  for (const ActivePair& pair : pairs_) {
    out.u32(pair.left_group);
    out.u32(pair.right_group);
    pair.sketch.serialize(out);
  }
}

std::string MatchingSketch::serialize() const {
  std::string out;
  ByteWriter w = ByteWriter::appending_to(out);
  serialize(w);
  return out;
}

std::size_t MatchingSketch::serialized_size() const {
  std::size_t n = 0;
  ByteWriter w = ByteWriter::counting(n);
  serialize(w);
  return n;
}

MatchingSketch MatchingSketch::deserialize(ByteReader& in) {
  if (in.u32() != kMagic) throw std::runtime_error("MatchingSketch: bad magic");
  if (in.u32() != kVersion) throw std::runtime_error("MatchingSketch: unsupported version");
  std::uint64_t n = in.u64();
  double epsilon = in.f64();
  std::uint64_t opt_estimate = in.u64();
  std::uint64_t group_count = in.u64();
  std::uint64_t partners = in.u64();
  std::uint64_t degree = in.u64();
  std::uint32_t rounds = in.u32();
  std::uint64_t seed = in.u64();
  Params params = Params::make(n, epsilon, opt_estimate, rounds);
  if (params.group_count != group_count || params.partners_per_group != partners ||
      params.hash_degree != degree)
    throw std::runtime_error("MatchingSketch: derived parameters disagree with header");
  MatchingSketch sketch(params, seed);
  std::uint32_t pair_count = in.u32();
  if (pair_count != sketch.pairs_.size())
    throw std::runtime_error("MatchingSketch: active pair count disagrees with seed");
  for (ActivePair& pair : sketch.pairs_) {
    if (in.u32() != pair.left_group || in.u32() != pair.right_group)
      throw std::runtime_error("MatchingSketch: active pair keys disagree with seed");
    pair.sketch = L0Sketch::deserialize(in);
  }
  return sketch;
}

OptSearchSketch::OptSearchSketch(std::uint64_t n, double epsilon, std::uint64_t seed)
    : n_(n), epsilon_(epsilon), seed_(seed) {
  std::uint64_t top = ceil_log2_u64(n);
  for (std::uint64_t i = 0; i <= top; ++i) {
    std::uint64_t opt_estimate = std::min(std::uint64_t{1} << i, n);
    Params p = Params::make(n, epsilon, opt_estimate);
    estimates_.emplace_back(p, derive_seed(seed, kTagEstimate, i));
    if (opt_estimate == n) break;
  }
  global_sampler_.emplace(n * n, estimates_.front().params().sampler_delta(),
                          derive_seed(seed, kTagGlobal, 0));
}

void OptSearchSketch::update(std::uint64_t left, std::uint64_t right, std::int64_t delta) {
  for (MatchingSketch& sketch : estimates_) sketch.update(left, right, delta);
  global_sampler_->update(left * n_ + right, delta);
}

void OptSearchSketch::apply(const std::vector<EdgeUpdate>& updates) {
  for (const EdgeUpdate& upd : updates) update(upd.u, upd.v, upd.delta);
}

void OptSearchSketch::merge(const OptSearchSketch& other) {
  if (n_ != other.n_ || epsilon_ != other.epsilon_ || seed_ != other.seed_)
    throw IncompatibleSketchError("OptSearchSketch: merge of sketches with different parameters");
  for (std::size_t i = 0; i < estimates_.size(); ++i) estimates_[i].merge(other.estimates_[i]);
  global_sampler_->merge(*other.global_sampler_);
}

Matching OptSearchSketch::extract() const {
  Matching best;
  L0Sample single = global_sampler_->sample();
  if (single.status == L0Sample::Status::kFound)
    best = Matching({{single.index / n_, single.index % n_}});
  for (const MatchingSketch& sketch : estimates_) {
    Matching m = sketch.extract();
    if (m.size() > best.size()) best = std::move(m);
  }
  return best;
}

std::size_t OptSearchSketch::cell_count() const {
  std::size_t total = global_sampler_->cell_count();
  for (const MatchingSketch& sketch : estimates_) total += sketch.cell_count();
  return total;
}

std::size_t OptSearchSketch::serialized_size() const {
  std::size_t total = global_sampler_->serialized_size();
  for (const MatchingSketch& sketch : estimates_) total += sketch.serialized_size();
  return total;
}

Matching guess_opt_extract(const std::vector<EdgeUpdate>& updates, std::uint64_t n, double epsilon,
                           std::uint64_t seed) {
  OptSearchSketch sketch(n, epsilon, seed);
  sketch.apply(updates);
  return sketch.extract();
}

BipartitionReducer::BipartitionReducer(std::uint64_t n, std::uint64_t seed) : n_(n) {
  side_.resize(n);
  side_rank_.resize(n);
  std::uint64_t side_seed = derive_seed(seed, kTagSide, 0);
  std::uint64_t left_count = 0, right_count = 0;
  for (std::uint64_t v = 0; v < n; ++v) {
    side_[v] = static_cast<std::uint8_t>(mix64(side_seed, v) & 1);
    side_rank_[v] = side_[v] == 0 ? left_count++ : right_count++;
  }
}

bool BipartitionReducer::on_left(std::uint64_t v) const {
  if (v >= n_) throw std::out_of_range("BipartitionReducer: vertex outside [0, n)");
  return side_[v] == 0;
}

std::optional<EdgeUpdate> BipartitionReducer::reduce(const EdgeUpdate& upd) const {
  if (upd.u >= n_ || upd.v >= n_)
    throw std::out_of_range("BipartitionReducer: vertex outside [0, n)");
  if (upd.u == upd.v) throw std::invalid_argument("BipartitionReducer: self-loop update");
  if (side_[upd.u] == side_[upd.v]) return std::nullopt;
  std::uint64_t left = side_[upd.u] == 0 ? upd.u : upd.v;
  std::uint64_t right = side_[upd.u] == 0 ? upd.v : upd.u;
  return EdgeUpdate{side_rank_[left], side_rank_[right], upd.delta};
}

StreamSpec bipartition_reduce(const StreamSpec& general, std::uint64_t seed) {
  BipartitionReducer reducer(general.n, seed);
  StreamSpec out{general.n, GraphKind::kBipartite, {}};
  for (const EdgeUpdate& upd : general.updates) {
    if (auto reduced = reducer.reduce(upd)) out.updates.push_back(*reduced);
  }
  return out;
}

}  // namespace msk
