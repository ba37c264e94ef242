#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "areon/dag.hpp"

namespace areon {

namespace {

// Hopcroft-Karp maximum matching on the strict-order bipartite graph of a
// vertex subset: left u -> right v whenever u precedes v. The matching size
// gives max antichain cardinality as n - matching (Dilworth via Konig).
class Matcher {
 public:
  explicit Matcher(const std::vector<std::vector<int>>& adj)
      : adj_(adj), n_(int(adj.size())) {}

  int solve() {
    match_l_.assign(n_, -1);
    match_r_.assign(n_, -1);
    int matching = 0;
    while (bfs()) {
      for (int u = 0; u < n_; ++u)
        if (match_l_[u] < 0 && dfs(u)) ++matching;
    }
    return matching;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    dist_.assign(n_, kInf);
    for (int u = 0; u < n_; ++u)
      if (match_l_[u] < 0) {
        dist_[u] = 0;
        q.push(u);
      }
    bool found = false;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj_[u]) {
        int w = match_r_[v];
        if (w < 0) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      int w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  const std::vector<std::vector<int>>& adj_;
  int n_;
  std::vector<int> match_l_, match_r_, dist_;
};

// Matching size over the sub-poset induced by `alive`.
int matching_size(const std::vector<std::vector<int>>& order_adj,
                  const std::vector<bool>& alive, int alive_count) {
  if (alive_count == 0) return 0;
  int n = int(order_adj.size());
  std::vector<int> map_to(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (alive[i]) map_to[i] = m++;
  std::vector<std::vector<int>> adj(m);
  for (int i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    for (int j : order_adj[i])
      if (alive[j]) adj[map_to[i]].push_back(map_to[j]);
  }
  return Matcher(adj).solve();
}

}  // namespace

std::vector<BlockIdx> max_antichain(const DagView& view, std::int32_t t,
                                    std::int32_t w,
                                    const std::vector<BlockIdx>& forced) {
  const DagStore& store = view.store();
  std::vector<BlockIdx> window;
  for (BlockIdx i : store.key_order())
    if (view.contains(i) && in_window(store.block(i).slot, t, w))
      window.push_back(i);
  int n = int(window.size());
  if (n == 0) {
    assert(forced.empty());
    return {};
  }

  std::vector<std::vector<int>> order_adj(n);
  auto precedes = [&](int a, int b) {
    return a != b && store.at(window[b]).anc_short.test(window[a]);
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (precedes(a, b)) order_adj[a].push_back(b);

  auto comparable = [&](int a, int b) {
    return precedes(a, b) || precedes(b, a);
  };

  // pool = vertices still allowed next to the chosen set.
  std::vector<bool> in_forced(n, false);
  std::vector<bool> pool(n, true);
  int pool_count = n;
  std::vector<int> chosen;
  auto force = [&](int x) {
    chosen.push_back(x);
    for (int z = 0; z < n; ++z)
      if (pool[z] && (z == x || comparable(z, x))) {
        pool[z] = false;
        --pool_count;
      }
  };

  for (BlockIdx f : forced) {
    auto it = std::find(window.begin(), window.end(), f);
    assert(it != window.end());
    in_forced[int(it - window.begin())] = true;
  }
  for (int x = 0; x < n; ++x)
    if (in_forced[x]) {
      assert(pool[x]);
      force(x);
    }

  // Largest antichain extending the forced set.
  int target =
      int(chosen.size()) + pool_count - matching_size(order_adj, pool, pool_count);

  // Greedy lexicographically-least completion: take the smallest-key vertex
  // whose forcing keeps the target reachable.
  for (int x = 0; x < n && int(chosen.size()) < target; ++x) {
    if (!pool[x]) continue;
    std::vector<bool> next_pool = pool;
    int next_count = pool_count;
    for (int z = 0; z < n; ++z)
      if (next_pool[z] && (z == x || comparable(z, x))) {
        next_pool[z] = false;
        --next_count;
      }
    int reach = int(chosen.size()) + 1 + next_count -
                matching_size(order_adj, next_pool, next_count);
    if (reach == target) {
      chosen.push_back(x);
      pool = std::move(next_pool);
      pool_count = next_count;
    }
  }
  assert(int(chosen.size()) == target);

  std::sort(chosen.begin(), chosen.end());
  std::vector<BlockIdx> out;
  out.reserve(chosen.size());
  for (int x : chosen) out.push_back(window[x]);
  return out;
}

}  // namespace areon
