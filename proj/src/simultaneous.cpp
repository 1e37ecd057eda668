#include "msk/simultaneous.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "msk/field_hash.hpp"
#include "msk/rng.hpp"

namespace msk {

namespace {

constexpr std::uint64_t kTagPermutation = 0x7065726dULL;
constexpr std::uint64_t kTagPlayer = 0x706c7972ULL;
constexpr std::uint64_t kTagSplit = 0x73706c74ULL;
constexpr std::size_t kSearchNodeBudget = 50'000'000;

Edge canonical(Edge e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  return e;
}

RSCertificate fail(std::string reason, std::size_t idx, Edge e) {
  return RSCertificate{false, std::move(reason), idx, e};
}

}  // namespace

std::vector<Edge> RSGraph::union_edges() const {
  std::vector<Edge> edges;
  for (const auto& m : matchings)
    for (const Edge& e : m) edges.push_back(canonical(e));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

RSCertificate verify_rs(const RSGraph& g) { return verify_rs(g, g.union_edges()); }

RSCertificate verify_rs(const RSGraph& g, const std::vector<Edge>& host_edges) {
  if (g.matchings.empty()) return fail("no matchings", 0, {0, 0});
  std::uint64_t r = g.matchings[0].size();
  std::set<Edge> host;
  for (const Edge& e : host_edges) host.insert(canonical(e));
  std::set<Edge> seen;

  for (std::size_t i = 0; i < g.matchings.size(); ++i) {
    const auto& m = g.matchings[i];
    if (m.size() != r)
      return fail("matching size differs from the first matching", i, m.empty() ? Edge{0, 0} : m[0]);
    std::set<std::uint64_t> vertices;
    for (const Edge& raw : m) {
      Edge e = canonical(raw);
      if (e.first == e.second) return fail("self-loop edge", i, e);
      if (e.second >= g.n_vertices) return fail("endpoint out of range", i, e);
      if (!host.count(e)) return fail("edge missing from host graph", i, e);
      if (!seen.insert(e).second) return fail("edge shared between matchings", i, e);
      if (!vertices.insert(e.first).second || !vertices.insert(e.second).second)
        return fail("vertex reused within matching", i, e);
    }
    // Induced: the host graph may not contain any extra edge inside V(m).
    for (const Edge& h : host) {
      if (!vertices.count(h.first) || !vertices.count(h.second)) continue;
      if (std::find_if(m.begin(), m.end(), [&](const Edge& raw) { return canonical(raw) == h; }) ==
          m.end())
        return fail("extra induced edge inside matching vertex set", i, h);
    }
  }
  return RSCertificate{};
}

namespace {

struct DecompositionSearch {
  std::uint64_t n, r, t;
  std::vector<Edge> edges;
  std::vector<std::uint32_t> adjacency;  // vertex -> bitmask over vertices
  std::vector<std::uint32_t> bucket_vertices;
  std::vector<std::uint8_t> bucket_sizes;
  std::vector<std::uint32_t> assignment;  // edge -> bucket
  std::size_t nodes = 0;

  bool place(std::size_t edge_idx, std::uint32_t open_buckets) {
    if (++nodes > kSearchNodeBudget)
      throw BudgetError("find_rs_decomposition: search budget exceeded");
    if (edge_idx == edges.size()) return true;
    const Edge& e = edges[edge_idx];
    std::uint32_t endpoints = (1u << static_cast<std::uint32_t>(e.first)) |
                              (1u << static_cast<std::uint32_t>(e.second));
    std::uint32_t reach = adjacency[e.first] | adjacency[e.second];
    std::uint32_t limit = std::min<std::uint32_t>(open_buckets + 1, static_cast<std::uint32_t>(t));
    for (std::uint32_t b = 0; b < limit; ++b) {
      if (bucket_sizes[b] == r) continue;
      if ((bucket_vertices[b] & endpoints) != 0) continue;
      if ((bucket_vertices[b] & reach) != 0) continue;  // would break the induced property
      bucket_vertices[b] |= endpoints;
      ++bucket_sizes[b];
      assignment[edge_idx] = b;
      if (place(edge_idx + 1, std::max(open_buckets, b + 1))) return true;
      bucket_vertices[b] &= ~endpoints;
      --bucket_sizes[b];
    }
    return false;
  }
};

}  // namespace

std::optional<RSGraph> find_rs_decomposition(std::uint64_t n_vertices,
                                             const std::vector<Edge>& raw_edges, std::uint64_t r,
                                             std::uint64_t t) {
  if (n_vertices > 16) throw BudgetError("find_rs_decomposition: more than 16 vertices");
  if (r == 0 || t == 0) throw std::invalid_argument("find_rs_decomposition: r, t must be positive");

  std::vector<Edge> edges;
  for (const Edge& e : raw_edges) edges.push_back(canonical(e));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const Edge& e : edges) {
    if (e.second >= n_vertices)
      throw std::invalid_argument("find_rs_decomposition: endpoint out of range");
    if (e.first == e.second) throw std::invalid_argument("find_rs_decomposition: self-loop");
  }
  if (r * t != edges.size()) return std::nullopt;

  DecompositionSearch search;
  search.n = n_vertices;
  search.r = r;
  search.t = t;
  search.edges = edges;
  search.adjacency.assign(n_vertices, 0);
  for (const Edge& e : edges) {
    search.adjacency[e.first] |= 1u << e.second;
    search.adjacency[e.second] |= 1u << e.first;
  }
  search.bucket_vertices.assign(t, 0);
  search.bucket_sizes.assign(t, 0);
  search.assignment.assign(edges.size(), 0);

  if (!search.place(0, 0)) return std::nullopt;

  RSGraph out;
  out.n_vertices = n_vertices;
  out.matchings.assign(t, {});
  for (std::size_t i = 0; i < edges.size(); ++i)
    out.matchings[search.assignment[i]].push_back(edges[i]);
  return out;
}

HardInstance gen_hard(const RSGraph& rs, std::uint64_t players, std::uint64_t seed) {
  if (players < 2) throw std::invalid_argument("gen_hard: need at least 2 players");
  RSCertificate cert = verify_rs(rs);
  if (!cert.ok) throw std::invalid_argument("gen_hard: invalid RS graph: " + cert.reason);

  std::uint64_t big_n = rs.n_vertices;
  std::uint64_t r = rs.matching_size();
  std::uint64_t t = rs.matching_count();

  HardInstance inst;
  inst.players = players;
  inst.rs_vertices = big_n;
  inst.rs_matching_size = r;
  inst.rs_matching_count = t;
  // Starred labels must avoid every shared label and each other, which at
  // small N can need more than k*N labels in total.
  inst.label_universe = std::max(players * big_n, big_n + 2 * r * players);

  Rng perm_rng(derive_seed(seed, kTagPermutation, 0));
  std::vector<std::uint64_t> pi(inst.label_universe);
  for (std::uint64_t i = 0; i < pi.size(); ++i) pi[i] = i;
  perm_rng.shuffle(pi);

  for (std::uint64_t p = 0; p < players; ++p) {
    Rng rng(derive_seed(seed, kTagPlayer, p));
    std::uint64_t lambda = rng.below(t);
    inst.hidden_matching.push_back(lambda);

    // Starred vertices come from the full hidden matching, before dropping.
    std::vector<std::uint64_t> starred;
    for (const Edge& e : rs.matchings[lambda]) {
      starred.push_back(e.first);
      starred.push_back(e.second);
    }
    std::sort(starred.begin(), starred.end());
    std::unordered_map<std::uint64_t, std::uint64_t> star_rank;
    for (std::uint64_t i = 0; i < starred.size(); ++i) star_rank.emplace(starred[i], i);

    auto label_of = [&](std::uint64_t v) {
      auto it = star_rank.find(v);
      if (it == star_rank.end()) return pi[v];
      return pi[big_n + p * 2 * r + it->second];
    };

    std::vector<Edge> edges;
    for (std::uint64_t j = 0; j < t; ++j) {
      std::vector<std::uint64_t> keep = rng.sample(r, r / 2);
      for (std::uint64_t idx : keep) {
        const Edge& e = rs.matchings[j][idx];
        edges.push_back(canonical({label_of(e.first), label_of(e.second)}));
      }
    }
    std::sort(edges.begin(), edges.end());
    inst.player_edges.push_back(std::move(edges));

    std::vector<std::uint64_t> star_labels;
    for (std::uint64_t v : starred) star_labels.push_back(label_of(v));
    std::sort(star_labels.begin(), star_labels.end());
    inst.star_labels.push_back(std::move(star_labels));
  }
  return inst;
}

namespace {

struct SmallMatchingSearch {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // compressed vertex ids
  std::vector<std::uint64_t> good;  // per compressed vertex: 1 if good
  std::uint64_t good_budget = 0;
  std::uint64_t best = 0;
  std::size_t nodes = 0;

  void run(std::size_t idx, std::uint64_t used, std::uint64_t size, std::uint64_t good_used) {
    if (++nodes > kSearchNodeBudget)
      throw BudgetError("matching search: node budget exceeded");
    best = std::max(best, size);
    if (idx == edges.size()) return;
    if (size + (edges.size() - idx) <= best) return;  // cannot improve
    const auto& e = edges[idx];
    std::uint64_t bits = (1ULL << e.first) | (1ULL << e.second);
    if ((used & bits) == 0) {
      std::uint64_t g = good[e.first] + good[e.second];
      if (good_used + g <= good_budget) run(idx + 1, used | bits, size + 1, good_used + g);
    }
    run(idx + 1, used, size, good_used);
  }
};

std::uint64_t matching_search(const std::vector<Edge>& edges,
                              const std::vector<std::uint64_t>& good_labels,
                              std::uint64_t good_budget) {
  std::set<Edge> dedup;
  for (const Edge& e : edges) {
    if (e.first != e.second) dedup.insert(canonical(e));
  }
  std::vector<std::uint64_t> vertex_ids;
  for (const Edge& e : dedup) {
    vertex_ids.push_back(e.first);
    vertex_ids.push_back(e.second);
  }
  std::sort(vertex_ids.begin(), vertex_ids.end());
  vertex_ids.erase(std::unique(vertex_ids.begin(), vertex_ids.end()), vertex_ids.end());
  if (vertex_ids.size() > 64) throw BudgetError("matching search: more than 64 distinct vertices");
  std::unordered_map<std::uint64_t, std::uint32_t> compress;
  for (std::uint32_t i = 0; i < vertex_ids.size(); ++i) compress.emplace(vertex_ids[i], i);

  SmallMatchingSearch search;
  search.good.assign(vertex_ids.size(), 0);
  std::unordered_set<std::uint64_t> good_set(good_labels.begin(), good_labels.end());
  for (std::uint32_t i = 0; i < vertex_ids.size(); ++i)
    if (good_set.count(vertex_ids[i])) search.good[i] = 1;
  for (const Edge& e : dedup)
    search.edges.emplace_back(compress[e.first], compress[e.second]);
  search.good_budget = good_budget;
  search.run(0, 0, 0, 0);
  return search.best;
}

}  // namespace

std::uint64_t max_matching_small(const std::vector<Edge>& edges) {
  return matching_search(edges, {}, 0);
}

std::uint64_t max_trivial_matching_small(const std::vector<Edge>& edges,
                                         const std::vector<std::uint64_t>& good_labels,
                                         std::uint64_t good_budget) {
  return matching_search(edges, good_labels, good_budget);
}

TrivialRatioReport check_trivial_ratio(const HardInstance& inst) {
  std::vector<Edge> union_edges;
  for (const auto& edges : inst.player_edges)
    union_edges.insert(union_edges.end(), edges.begin(), edges.end());

  std::vector<std::uint64_t> good;
  for (const auto& stars : inst.star_labels) good.insert(good.end(), stars.begin(), stars.end());
  std::sort(good.begin(), good.end());
  good.erase(std::unique(good.begin(), good.end()), good.end());

  TrivialRatioReport report;
  report.good_label_count = good.size();
  report.max_matching_size = max_matching_small(union_edges);
  report.max_trivial_size = max_trivial_matching_small(union_edges, good, inst.rs_vertices);
  report.alpha = static_cast<double>(inst.players * inst.rs_matching_size) /
                 static_cast<double>(inst.rs_vertices);
  report.bound = 4.0 / report.alpha;
  report.ratio = report.max_matching_size == 0
                     ? 0.0
                     : static_cast<double>(report.max_trivial_size) /
                           static_cast<double>(report.max_matching_size);
  report.bound_holds = report.ratio <= report.bound + 1e-12;
  return report;
}

SimultaneousResult run_simultaneous(const std::vector<std::vector<EdgeUpdate>>& shares,
                                    const Params& params, std::uint64_t seed) {
  if (shares.empty()) throw std::invalid_argument("run_simultaneous: need at least one player");
  std::vector<std::size_t> player_bytes;
  std::optional<MatchingSketch> merged;
  for (const auto& share : shares) {
    MatchingSketch sketch(params, seed);
    sketch.apply(share);
    player_bytes.push_back(sketch.serialized_size());
    if (merged) {
      merged->merge(sketch);
    } else {
      merged.emplace(std::move(sketch));
    }
  }
  Matching matching = merged->extract();
  return SimultaneousResult{std::move(matching), std::move(*merged), std::move(player_bytes)};
}

std::vector<std::vector<EdgeUpdate>> split_updates(const std::vector<EdgeUpdate>& updates,
                                                   std::uint64_t players, std::uint64_t seed) {
  if (players == 0) throw std::invalid_argument("split_updates: need at least one player");
  Rng rng(derive_seed(seed, kTagSplit, players));
  std::vector<std::vector<EdgeUpdate>> shares(players);
  for (const EdgeUpdate& upd : updates) shares[rng.below(players)].push_back(upd);
  return shares;
}

std::vector<EdgeUpdate> player_updates(const HardInstance& inst, std::size_t player) {
  std::vector<EdgeUpdate> updates;
  for (const Edge& e : inst.player_edges.at(player)) updates.push_back({e.first, e.second, +1});
  return updates;
}

StreamSpec player_stream(const HardInstance& inst, std::size_t player) {
  return StreamSpec{inst.label_universe, GraphKind::kGeneral, player_updates(inst, player)};
}

std::string format_hard_instance(const HardInstance& inst) {
  std::ostringstream os;
  os << "hard k " << inst.players << " n " << inst.label_universe << " N " << inst.rs_vertices
     << " r " << inst.rs_matching_size << " t " << inst.rs_matching_count << "\n";
  for (std::uint64_t p = 0; p < inst.players; ++p) {
    os << "player " << p << " lambda " << inst.hidden_matching[p] << " stars";
    for (std::uint64_t label : inst.star_labels[p]) os << " " << label;
    os << "\n";
    for (const Edge& e : inst.player_edges[p]) os << e.first << " " << e.second << " +1\n";
  }
  return os.str();
}

std::string format_rs_graph(const RSGraph& g) {
  std::ostringstream os;
  os << "rs N " << g.n_vertices << " r " << g.matching_size() << " t " << g.matching_count()
     << "\n";
  for (const auto& m : g.matchings) {
    bool first = true;
    for (const Edge& e : m) {
      os << (first ? "" : " ") << e.first << " " << e.second;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

RSGraph parse_rs_graph(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ParseError(1, "missing RS header");
  ++line_no;
  std::istringstream header(line);
  std::string w_rs, w_n, w_r, w_t;
  std::uint64_t n, r, t;
  if (!(header >> w_rs >> w_n >> n >> w_r >> r >> w_t >> t) || w_rs != "rs" || w_n != "N" ||
      w_r != "r" || w_t != "t")
    throw ParseError(line_no, "expected 'rs N <N> r <r> t <t>'");

  RSGraph g;
  g.n_vertices = n;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<Edge> matching;
    std::uint64_t u, v;
    while (row >> u >> v) matching.push_back({u, v});
    if (matching.size() != r) throw ParseError(line_no, "matching line must hold r edges");
    g.matchings.push_back(std::move(matching));
  }
  if (g.matchings.size() != t) throw ParseError(line_no, "matching count differs from header");
  return g;
}

RSGraph read_rs_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open RS graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rs_graph(buf.str());
}

HardInstance parse_hard_instance(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ParseError(1, "missing instance header");
  ++line_no;
  std::istringstream header(line);
  std::string w_hard, w_k, w_n, w_bn, w_r, w_t;
  HardInstance inst;
  if (!(header >> w_hard >> w_k >> inst.players >> w_n >> inst.label_universe >> w_bn >>
        inst.rs_vertices >> w_r >> inst.rs_matching_size >> w_t >> inst.rs_matching_count) ||
      w_hard != "hard" || w_k != "k" || w_n != "n" || w_bn != "N" || w_r != "r" || w_t != "t")
    throw ParseError(line_no, "expected 'hard k <k> n <n> N <N> r <r> t <t>'");

  inst.player_edges.resize(inst.players);
  inst.hidden_matching.resize(inst.players, 0);
  inst.star_labels.resize(inst.players);
  std::int64_t current = -1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string first;
    row >> first;
    if (first == "player") {
      std::uint64_t idx;
      std::string w_lambda, w_stars;
      std::uint64_t lambda;
      if (!(row >> idx >> w_lambda >> lambda >> w_stars) || w_lambda != "lambda" ||
          w_stars != "stars" || idx >= inst.players)
        throw ParseError(line_no, "expected 'player <i> lambda <j> stars <labels...>'");
      current = static_cast<std::int64_t>(idx);
      inst.hidden_matching[idx] = lambda;
      std::uint64_t label;
      while (row >> label) inst.star_labels[idx].push_back(label);
      continue;
    }
    if (current < 0) throw ParseError(line_no, "edge before any player header");
    std::istringstream edge_row(line);
    std::uint64_t u, v;
    std::string delta_word;
    if (!(edge_row >> u >> v >> delta_word) || delta_word != "+1")
      throw ParseError(line_no, "expected 'u v +1'");
    inst.player_edges[static_cast<std::size_t>(current)].push_back({u, v});
  }
  return inst;
}

}  // namespace msk
