#include "ofdm/fec/peg.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "ofdm/errors.hpp"

namespace ofdm {

LdpcCode make_peg_code(const PegConfig& cfg) {
  const int n = cfg.n, m = cfg.n_checks, k = n - m;
  if (m < 2 || k < 1) throw ConfigError("PEG: need 2 <= n_checks < n");
  if (cfg.info_degree < 1 || cfg.info_degree > m) throw ConfigError("PEG: info_degree out of range");

  std::vector<std::vector<int>> var_checks(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> check_vars(static_cast<std::size_t>(m));
  auto connect = [&](int v, int c) {
    var_checks[v].push_back(c);
    check_vars[c].push_back(v);
  };
  for (int j = 0; j < m; ++j) {
    connect(k + j, j);
    if (j + 1 < m) connect(k + j, j + 1);
  }

  Rng rng(cfg.seed);
  std::vector<int> depth(static_cast<std::size_t>(m));
  std::vector<char> var_seen(static_cast<std::size_t>(n));
  auto pick_min_degree = [&](auto&& allowed) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<int> ties;
    for (int c = 0; c < m; ++c) {
      if (!allowed(c)) continue;
      const auto d = check_vars[c].size();
      if (d < best) {
        best = d;
        ties.clear();
      }
      if (d == best) ties.push_back(c);
    }
    return ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
  };

  for (int v = 0; v < k; ++v) {
    for (int e = 0; e < cfg.info_degree; ++e) {
      if (e == 0) {
        connect(v, pick_min_degree([](int) { return true; }));
        continue;
      }
      // Breadth-first expansion from v; depth[c] = tree level at which c is reached.
      std::fill(depth.begin(), depth.end(), -1);
      std::fill(var_seen.begin(), var_seen.end(), 0);
      var_seen[v] = 1;
      std::vector<int> frontier;
      for (int c : var_checks[v]) {
        depth[c] = 0;
        frontier.push_back(c);
      }
      int reached = static_cast<int>(frontier.size());
      int level = 0;
      while (true) {
        std::vector<int> next;
        for (int c : frontier)
          for (int u : check_vars[c]) {
            if (var_seen[u]) continue;
            var_seen[u] = 1;
            for (int c2 : var_checks[u])
              if (depth[c2] < 0) {
                depth[c2] = level + 1;
                next.push_back(c2);
              }
          }
        if (next.empty()) {
          // Graph component exhausted: any unreached check avoids new cycles.
          connect(v, pick_min_degree([&](int c) { return depth[c] < 0; }));
          break;
        }
        if (reached + static_cast<int>(next.size()) == m) {
          // Every check is reached at level+1: use the deepest level.
          const int lv = level + 1;
          connect(v, pick_min_degree([&](int c) { return depth[c] == lv; }));
          break;
        }
        reached += static_cast<int>(next.size());
        frontier = std::move(next);
        ++level;
      }
    }
  }
  return LdpcCode(n, std::move(check_vars));
}

int tanner_girth(const LdpcCode& code) {
  const int n = code.n();
  const auto& vars = code.variables();
  const auto& checks = code.checks();
  // Node ids: variables [0, n), checks [n, n + m).
  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(n + code.n_checks()));
  std::vector<int> parent(dist.size());
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    dist[s] = 0;
    parent[s] = -1;
    q.push(s);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      if (2 * dist[x] + 1 >= best) break;
      const auto& adj = x < n ? vars[x] : checks[x - n];
      for (int y0 : adj) {
        const int y = x < n ? y0 + n : y0;
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          parent[y] = x;
          q.push(y);
        } else if (parent[x] != y) {
          best = std::min(best, dist[x] + dist[y] + 1);
        }
      }
    }
  }
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

}  // namespace ofdm
