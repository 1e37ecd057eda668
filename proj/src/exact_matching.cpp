#include "msk/exact_matching.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace msk {

Matching::Matching(std::vector<Edge> edges, MatchingKind kind) : edges_(std::move(edges)) {
  std::unordered_set<std::uint64_t> left, right;
  for (const Edge& e : edges_) {
    bool fresh = left.insert(e.first).second;
    if (kind == MatchingKind::kBipartite) {
      fresh = right.insert(e.second).second && fresh;
    } else {
      fresh = left.insert(e.second).second && fresh;
    }
    if (!fresh) throw std::invalid_argument("Matching: repeated vertex");
  }
}

BipartiteGraph::BipartiteGraph(std::uint64_t n_left, std::uint64_t n_right,
                               std::vector<Edge> edges)
    : n_left_(n_left), n_right_(n_right), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.first >= n_left_ || e.second >= n_right_)
      throw std::invalid_argument("BipartiteGraph: endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

namespace {

constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

struct HopcroftKarp {
  std::vector<std::vector<std::uint32_t>> adj;
  std::vector<std::uint32_t> match_left, match_right, dist;
  std::uint32_t n_left;

  explicit HopcroftKarp(const BipartiteGraph& g)
      : n_left(static_cast<std::uint32_t>(g.n_left())) {
    adj.resize(n_left);
    for (const Edge& e : g.edges())
      adj[static_cast<std::uint32_t>(e.first)].push_back(static_cast<std::uint32_t>(e.second));
    match_left.assign(n_left, kNil);
    match_right.assign(static_cast<std::size_t>(g.n_right()), kNil);
    dist.assign(n_left, kInf);
  }

  bool bfs() {
    std::queue<std::uint32_t> q;
    for (std::uint32_t u = 0; u < n_left; ++u) {
      if (match_left[u] == kNil) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    bool reachable = false;
    while (!q.empty()) {
      std::uint32_t u = q.front();
      q.pop();
      for (std::uint32_t v : adj[u]) {
        std::uint32_t w = match_right[v];
        if (w == kNil) {
          reachable = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return reachable;
  }

  bool dfs(std::uint32_t u) {
    for (std::uint32_t v : adj[u]) {
      std::uint32_t w = match_right[v];
      if (w == kNil || (dist[w] == dist[u] + 1 && dfs(w))) {
        match_left[u] = v;
        match_right[v] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  }

  void run() {
    while (bfs()) {
      for (std::uint32_t u = 0; u < n_left; ++u)
        if (match_left[u] == kNil) dfs(u);
    }
  }
};

}  // namespace

Matching max_matching(const BipartiteGraph& g) {
  HopcroftKarp hk(g);
  hk.run();
  std::vector<Edge> edges;
  for (std::uint32_t u = 0; u < hk.n_left; ++u)
    if (hk.match_left[u] != kNil) edges.emplace_back(u, hk.match_left[u]);
  return Matching(std::move(edges));
}

Matching greedy_maximal(const BipartiteGraph& g) {
  std::unordered_set<std::uint64_t> used_left, used_right;
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (used_left.count(e.first) || used_right.count(e.second)) continue;
    used_left.insert(e.first);
    used_right.insert(e.second);
    edges.push_back(e);
  }
  return Matching(std::move(edges));
}

}  // namespace msk
